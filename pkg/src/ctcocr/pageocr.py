"""Page-level OCR: crop externally detected boxes, recognize, concatenate.

Detection is out of scope; boxes come from a detection file, one record per
line:

    x y w h order_index unit [line_id]

with '#' comments allowed.  Boxes are processed in ``order_index`` order.
Word boxes sharing a ``line_id`` form one line and are joined by single
spaces; without line ids all words form one line.  Line boxes each stand on
their own line.  Lines are joined by newlines.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .checkpoint import Checkpoint
from .errors import ConfigError, FormatError, InvalidInputError
from .imaging import Direction, GrayImage, normalize_height
from .metrics import EvalReport, build_report, word_accuracy
from .models import Recognizer
from .trainer import model_from_checkpoint, predict


@dataclass(frozen=True)
class Box:
    x: int
    y: int
    w: int
    h: int
    order_index: int
    unit: str
    line_id: str | None = None

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise InvalidInputError(f"box {self.order_index}: width/height must be >= 1")
        if self.unit not in ("word", "line"):
            raise InvalidInputError(f"box {self.order_index}: unknown unit {self.unit!r}")


@dataclass(frozen=True)
class DetectionSet:
    page: str | None
    boxes: tuple[Box, ...]

    def __post_init__(self):
        orders = [b.order_index for b in self.boxes]
        if len(set(orders)) != len(orders):
            raise InvalidInputError("box order_index values must be unique")


def parse_detections(text: str, page: str | None = None) -> DetectionSet:
    boxes = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (6, 7):
            raise FormatError(f"detections line {lineno}: expected 6 or 7 fields")
        try:
            x, y, w, h, order = (int(v) for v in parts[:5])
        except ValueError as exc:
            raise FormatError(f"detections line {lineno}: {exc}") from exc
        boxes.append(Box(x, y, w, h, order, parts[5], parts[6] if len(parts) == 7 else None))
    return DetectionSet(page=page, boxes=tuple(boxes))


@dataclass
class PageResult:
    text: str
    per_box: list[tuple[Box, str]]
    errors: list[tuple[Box, str]]


def _crop(page: GrayImage, box: Box) -> GrayImage:
    if box.x < 0 or box.y < 0 or box.x + box.w > page.width or box.y + box.h > page.height:
        raise InvalidInputError(
            f"box {box.order_index} ({box.x},{box.y},{box.w},{box.h}) "
            f"outside page {page.width}x{page.height}"
        )
    return GrayImage(page.pixels[box.y : box.y + box.h, box.x : box.x + box.w].copy())


def _join(boxes: list[Box], texts: list[str], unit: str) -> str:
    if unit == "line":
        return "\n".join(texts)
    lines: list[list[str]] = []
    current_id: str | None = None
    for box, text in zip(boxes, texts):
        if not lines or box.line_id != current_id:
            lines.append([])
            current_id = box.line_id
        lines[-1].append(text)
    return "\n".join(" ".join(words) for words in lines)


def recognize_page(
    page: GrayImage,
    det: DetectionSet,
    ckpt: Checkpoint,
    direction: Direction | None = None,
) -> PageResult:
    """Crop each detected box from the full-resolution page, recognize it,
    and concatenate in reading order."""
    unit = ckpt.metadata.get("unit")
    for box in det.boxes:
        if box.unit != unit:
            raise ConfigError(
                f"box {box.order_index} unit {box.unit!r} does not match "
                f"checkpoint unit {unit!r}"
            )
    model, alphabet = model_from_checkpoint(ckpt)
    if direction is not None and direction != model.cfg.direction:
        model_dir = Recognizer(replace(model.cfg, direction=direction), seed=0)
        model_dir.load_state_arrays({p.name: p.values for p in model.params()})
        model = model_dir

    ordered = sorted(det.boxes, key=lambda b: b.order_index)
    crops: list[GrayImage] = []
    good: list[Box] = []
    errors: list[tuple[Box, str]] = []
    for box in ordered:
        try:
            crops.append(normalize_height(_crop(page, box)))
            good.append(box)
        except InvalidInputError as exc:
            errors.append((box, str(exc)))
    texts = predict(model, alphabet, crops)
    return PageResult(text=_join(good, texts, unit), per_box=list(zip(good, texts)),
                      errors=errors)


def score_page(result: PageResult, gt_text: str) -> EvalReport:
    """ISRI-style page scores: pooled character accuracy plus LCS word
    accuracy against the ground-truth page text."""
    if not gt_text:
        raise InvalidInputError("ground-truth page text must be non-empty")
    report = build_report([(result.text, gt_text)])
    return replace(report, word_accuracy=word_accuracy(pred_page=result.text, gt_page=gt_text))
