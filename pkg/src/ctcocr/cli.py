"""Command-line front door.

Subcommands: ``train``, ``evaluate``, ``recognize``, ``page-ocr``, ``synth``.
Failures exit nonzero with a machine-readable JSON error on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import imageio
from .checkpoint import Checkpoint
from .errors import CtcOcrError
from .imaging import GrayImage, WindowConfig, preprocess
from .manifest import Manifest
from .metrics import build_report
from .models import CnnConfig, ModelConfig, RnnConfig
from .pageocr import parse_detections, recognize_page, score_page
from .synthgen import CLEAN_STYLE, DEGRADED_STYLE, generate_corpus
from .trainer import TrainPlan, build_alphabet, evaluate, model_from_checkpoint, predict, train

STYLES = {"clean": CLEAN_STYLE, "degraded": DEGRADED_STYLE}


def _model_config_from_json(d: dict, alphabet_size: int) -> ModelConfig:
    kind = d["kind"]
    rnn = None
    if kind != "cnn_only":
        rnn = RnnConfig(**d.get("rnn", {}))
    window = WindowConfig(**d["window"]) if kind == "win_rnn" else None
    cnn = None
    if kind in ("cnn_only", "crnn"):
        c = d.get("cnn", {})
        cnn = CnnConfig(arch=c.get("arch", "crnn7"), channels=tuple(c.get("channels", (8, 16))))
    return ModelConfig(kind=kind, alphabet_size=alphabet_size, rnn=rnn, window=window,
                       cnn=cnn, direction=d.get("direction", "ltr"))


def _cmd_train(args) -> int:
    cfg_json = json.loads(Path(args.config).read_text(encoding="utf-8"))
    train_json = cfg_json.get("train", {})
    unit = train_json.get("unit", "word")
    manifest = Manifest.load(args.manifest, unit=unit)
    fine_tune = Checkpoint.load(args.fine_tune_from) if args.fine_tune_from else None
    model_cfg = None
    if fine_tune is None:
        alphabet = build_alphabet(manifest)
        model_cfg = _model_config_from_json(cfg_json["model"], alphabet.size)
    plan = TrainPlan(
        epochs=int(train_json.get("epochs", 15)),
        batch_size=int(train_json.get("batch_size", 64)),
        learning_rate=float(train_json.get("learning_rate", 1e-3)),
        unit=unit,
        config=model_cfg,
        fine_tune_from=fine_tune,
        real_fraction=args.real_fraction,
    )
    result = train(plan, manifest, seed=args.seed, log_path=args.log, verbose=not args.quiet)
    result.checkpoint.save(args.out)
    print(
        json.dumps(
            {
                "checkpoint": str(args.out),
                "best_epoch": result.best_epoch,
                "val_char_accuracy": result.checkpoint.metadata["val_char_accuracy"],
                "skipped_unreachable": result.n_skipped_unreachable,
            }
        )
    )
    return 0


def _report_lines(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True)
    keys = sorted(report)
    return ",".join(keys) + "\n" + ",".join(str(report[k]) for k in keys)


def _cmd_evaluate(args) -> int:
    if bool(args.checkpoint) == bool(args.pred):
        raise CtcOcrError("evaluate needs exactly one of --checkpoint or --pred")
    if args.checkpoint:
        manifest = Manifest.load(args.gt, unit=args.mode if args.mode != "page" else "line")
        report = evaluate(Checkpoint.load(args.checkpoint), manifest, split=args.split)
        out = report.to_dict()
    else:
        pred = Manifest.load(args.pred)
        gt = Manifest.load(args.gt)
        gt_texts = {e.path: e.text for e in gt.entries}
        missing = [e.path for e in pred.entries if e.path not in gt_texts]
        if missing:
            raise CtcOcrError(f"prediction paths missing from ground truth: {missing[:5]}")
        pairs = [(e.text, gt_texts[e.path]) for e in pred.entries]
        report = build_report(pairs, with_words=args.mode == "page")
        out = report.to_dict()
    text = _report_lines(out, args.format)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return 0


def _cmd_recognize(args) -> int:
    ckpt = Checkpoint.load(args.checkpoint)
    model, alphabet = model_from_checkpoint(ckpt)
    img = preprocess(Path(args.image).read_bytes())
    print(predict(model, alphabet, [img])[0])
    return 0


def _cmd_page_ocr(args) -> int:
    ckpt = Checkpoint.load(args.checkpoint)
    page = GrayImage(imageio.decode_image(Path(args.image).read_bytes()))
    det = parse_detections(Path(args.detections).read_text(encoding="utf-8"), page=args.image)
    result = recognize_page(page, det, ckpt, direction=args.direction)
    if args.gt:
        gt_text = Path(args.gt).read_text(encoding="utf-8").rstrip("\n")
        report = score_page(result, gt_text)
        print(json.dumps({"text": result.text, "report": report.to_dict(),
                          "n_box_errors": len(result.errors)}, sort_keys=True))
    else:
        print(result.text)
    return 0


def _cmd_synth(args) -> int:
    lexicon = [w for w in Path(args.lexicon).read_text(encoding="utf-8").split() if w]
    manifest = generate_corpus(
        lexicon,
        args.out,
        total=args.count,
        n_per_word=args.per_word,
        seed=args.seed,
        ranges=STYLES[args.style],
        split=args.split,
        unit=args.unit,
        image_format=args.format,
    )
    print(json.dumps({"manifest": str(Path(args.out) / "manifest.tsv"),
                      "n_images": len(manifest.entries)}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctcocr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a recognizer from a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--config", required=True, help="JSON file with model/train sections")
    p.add_argument("--out", required=True, help="checkpoint output path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--log", default=None, help="per-epoch CSV log path")
    p.add_argument("--fine-tune-from", default=None, help="checkpoint to start from")
    p.add_argument("--real-fraction", type=float, default=None)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="score a checkpoint or a prediction manifest")
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--pred", default=None, help="manifest of predicted texts")
    p.add_argument("--gt", required=True, help="ground-truth manifest")
    p.add_argument("--split", default="test")
    p.add_argument("--mode", choices=("word", "line", "page"), default="word")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("recognize", help="transcribe a single cropped image")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--image", required=True)
    p.set_defaults(func=_cmd_recognize)

    p = sub.add_parser("page-ocr", help="recognize a page from detections")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--image", required=True, help="full page image")
    p.add_argument("--detections", required=True, help="box file: x y w h order unit [line_id]")
    p.add_argument("--direction", choices=("ltr", "rtl"), default=None)
    p.add_argument("--gt", default=None, help="ground-truth page text file")
    p.set_defaults(func=_cmd_page_ocr)

    p = sub.add_parser("synth", help="generate a synthetic word-image corpus")
    p.add_argument("--lexicon", required=True, help="file with one word per whitespace run")
    p.add_argument("--count", type=int, default=None, help="total images")
    p.add_argument("--per-word", type=int, default=None, help="images per lexicon word")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--style", choices=sorted(STYLES), default="clean")
    p.add_argument("--split", default="train")
    p.add_argument("--unit", choices=("word", "line"), default="word")
    p.add_argument("--format", choices=("pgm", "png"), default="pgm")
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CtcOcrError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "OSError", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
