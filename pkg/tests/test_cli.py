import json

import numpy as np
import pytest

from ctcocr import Manifest, generate_corpus, imageio
from ctcocr.cli import main


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Lexicon file + synthetic corpus + trained checkpoint, all via the CLI."""
    root = tmp_path_factory.mktemp("cliws")
    lex = root / "lexicon.txt"
    lex.write_text("ab\nba\naba\n", encoding="utf-8")

    corpus = root / "corpus"
    for split, count, seed, prefix in (("train", 48, 1, "tr"), ("val", 16, 2, "va"),
                                       ("test", 16, 3, "te")):
        generate_corpus(["ab", "ba", "aba"], corpus, total=count, seed=seed, split=split,
                        name_prefix=prefix)
    # merge the three generations into one manifest
    entries = []
    for prefix, split in (("tr", "train"), ("va", "val"), ("te", "test")):
        for p in sorted((corpus / "images").glob(f"{prefix}*.pgm")):
            from ctcocr.synthgen import _index_rng

            seed = {"tr": 1, "va": 2, "te": 3}[prefix]
            rng = _index_rng(seed, int(p.stem[2:]))
            word = ["ab", "ba", "aba"][int(rng.integers(3))]
            entries.append(f"images/{p.name}\t{word}\t{split}")
    (corpus / "manifest.tsv").write_text("\n".join(entries) + "\n", encoding="utf-8")

    config = root / "config.json"
    config.write_text(json.dumps({
        "model": {"kind": "crnn", "rnn": {"layers": 1, "hidden": 6},
                  "cnn": {"arch": "tiny", "channels": [3, 4]}},
        "train": {"epochs": 2, "batch_size": 16, "learning_rate": 1e-3, "unit": "word"},
    }), encoding="utf-8")

    ckpt = root / "model.ckpt"
    rc = main(["train", "--manifest", str(corpus / "manifest.tsv"), "--config", str(config),
               "--out", str(ckpt), "--seed", "5", "--quiet",
               "--log", str(root / "train.csv")])
    assert rc == 0
    return root, corpus, ckpt


def test_synth_command(tmp_path, capsys):
    lex = tmp_path / "lex.txt"
    lex.write_text("one two\n", encoding="utf-8")
    rc = main(["synth", "--lexicon", str(lex), "--count", "4", "--seed", "9",
               "--out", str(tmp_path / "corp")])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["n_images"] == 4
    man = Manifest.load(out["manifest"])
    assert len(man.entries) == 4


def test_train_wrote_checkpoint_and_log(workspace):
    root, corpus, ckpt = workspace
    assert ckpt.exists()
    log = (root / "train.csv").read_text().splitlines()
    assert log[0] == "epoch,mean_loss,val_ca,val_sa"


def test_recognize_prints_text(workspace, capsys):
    root, corpus, ckpt = workspace
    image = next(iter(sorted((corpus / "images").glob("te*.pgm"))))
    rc = main(["recognize", "--checkpoint", str(ckpt), "--image", str(image)])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.endswith("\n")


def test_evaluate_checkpoint_json(workspace, capsys):
    root, corpus, ckpt = workspace
    rc = main(["evaluate", "--checkpoint", str(ckpt), "--gt", str(corpus / "manifest.tsv"),
               "--split", "test", "--mode", "word"])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["n_samples"] == 16
    assert report["char_accuracy"] + report["char_error_rate"] == 100.0


def test_evaluate_pred_vs_gt(workspace, tmp_path, capsys):
    root, corpus, ckpt = workspace
    gt = tmp_path / "gt.tsv"
    gt.write_text("a.pgm\thello\ttest\nb.pgm\tworld\ttest\n", encoding="utf-8")
    pred = tmp_path / "pred.tsv"
    pred.write_text("a.pgm\thello\ttest\nb.pgm\tworl\ttest\n", encoding="utf-8")
    rc = main(["evaluate", "--pred", str(pred), "--gt", str(gt), "--format", "csv"])
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    header = lines[0].split(",")
    values = dict(zip(header, lines[1].split(",")))
    assert float(values["char_accuracy"]) == pytest.approx(90.0)


def test_page_ocr_command(workspace, tmp_path, capsys):
    root, corpus, ckpt = workspace
    # single word crop dropped onto a page
    src = next(iter(sorted((corpus / "images").glob("te*.pgm"))))
    crop = imageio.read_pnm(src.read_bytes())
    page = np.ones((crop.shape[0] + 20, crop.shape[1] + 20))
    page[10 : 10 + crop.shape[0], 10 : 10 + crop.shape[1]] = crop
    page_path = tmp_path / "page.pgm"
    page_path.write_bytes(imageio.write_pgm(page))
    det_path = tmp_path / "boxes.txt"
    det_path.write_text(f"10 10 {crop.shape[1]} {crop.shape[0]} 0 word\n", encoding="utf-8")

    rc = main(["page-ocr", "--checkpoint", str(ckpt), "--image", str(page_path),
               "--detections", str(det_path)])
    assert rc == 0
    capsys.readouterr()

    gt_path = tmp_path / "gt.txt"
    gt_path.write_text("ab\n", encoding="utf-8")
    rc = main(["page-ocr", "--checkpoint", str(ckpt), "--image", str(page_path),
               "--detections", str(det_path), "--gt", str(gt_path)])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert "report" in payload and "text" in payload


def test_error_is_machine_readable_json(tmp_path, capsys):
    rc = main(["recognize", "--checkpoint", str(tmp_path / "missing.ckpt"),
               "--image", str(tmp_path / "missing.pgm")])
    assert rc == 1
    err = capsys.readouterr().err
    payload = json.loads(err)
    assert "error" in payload and "message" in payload


def test_evaluate_requires_exactly_one_source(tmp_path, capsys):
    rc = main(["evaluate", "--gt", str(tmp_path / "x.tsv")])
    assert rc == 1
    assert "error" in json.loads(capsys.readouterr().err)
