"""Image preprocessing and pixel-based feature extraction.

Recognizer input is a grayscale image resized to a fixed height of 32 pixels
with the aspect ratio preserved.  Frames are vertical slices of the image:
either single columns or stacked sliding-window columns.  Right-to-left
scripts are handled by mirroring the image horizontally and extracting
left-to-right, which keeps every downstream consumer direction-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import imageio
from .errors import InvalidInputError

TARGET_HEIGHT = 32

Direction = Literal["ltr", "rtl"]

# a FeatureSequence is a plain T x D float array
FeatureSequence = np.ndarray


@dataclass(frozen=True)
class GrayImage:
    """2-D intensity array with values in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise InvalidInputError("image must be a non-empty 2-D array")
        if p.dtype != np.float64:
            object.__setattr__(self, "pixels", p.astype(np.float64))
            p = self.pixels
        if p.min() < 0.0 or p.max() > 1.0:
            raise InvalidInputError("image intensities must lie in [0, 1]")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class WindowConfig:
    """Sliding-window geometry: window width, horizontal step, direction."""

    width: int = 20
    step: int = 5
    direction: Direction = "ltr"

    def __post_init__(self):
        if self.width < 1 or self.step < 1:
            raise InvalidInputError("window width and step must be >= 1")
        if self.direction not in ("ltr", "rtl"):
            raise InvalidInputError(f"unknown direction {self.direction!r}")


def bilinear_resize(pixels: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resampling with pixel-center alignment.

    When the scale is exactly 1 in a dimension the sample points land on the
    source grid, so an identity resize is bit-exact.
    """
    h, w = pixels.shape
    sy = h / out_h
    sx = w / out_w
    yc = np.clip((np.arange(out_h) + 0.5) * sy - 0.5, 0.0, h - 1.0)
    xc = np.clip((np.arange(out_w) + 0.5) * sx - 0.5, 0.0, w - 1.0)
    y0 = np.floor(yc).astype(np.int64)
    x0 = np.floor(xc).astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (yc - y0)[:, None]
    fx = (xc - x0)[None, :]
    top = pixels[y0][:, x0] * (1 - fx) + pixels[y0][:, x1] * fx
    bot = pixels[y1][:, x0] * (1 - fx) + pixels[y1][:, x1] * fx
    return top * (1 - fy) + bot * fy


def normalize_height(img: GrayImage, height: int = TARGET_HEIGHT) -> GrayImage:
    """Aspect-preserving resize to the target height (minimum width 1)."""
    out_w = max(1, int(np.floor(img.width * height / img.height + 0.5)))
    out = bilinear_resize(img.pixels, height, out_w)
    return GrayImage(np.clip(out, 0.0, 1.0))


def preprocess(raw: bytes) -> GrayImage:
    """Decode image bytes and normalize: grayscale, height 32, values [0,1]."""
    gray = imageio.decode_image(raw)
    return normalize_height(GrayImage(np.clip(gray, 0.0, 1.0)))


def mirror(img: GrayImage) -> GrayImage:
    """Horizontal flip."""
    return GrayImage(img.pixels[:, ::-1].copy())


def extract_columns(img: GrayImage, direction: Direction = "ltr") -> FeatureSequence:
    """One frame per image column: T = W, D = H.

    Right-to-left extraction takes the columns from last to first, which is
    identical to left-to-right extraction of the mirrored image.
    """
    px = img.pixels if direction == "ltr" else img.pixels[:, ::-1]
    return px.T.copy()


def extract_windows(img: GrayImage, cfg: WindowConfig) -> FeatureSequence:
    """Stacked sliding-window frames: T = floor(W / step), D = H * width.

    Frame t stacks the columns [t*step, t*step + width) top to bottom, column
    by column.  Columns beyond the right edge are padded with white (1.0).
    The frame count is clamped to at least 1 so very narrow images still
    produce a sequence.
    """
    px = img.pixels if cfg.direction == "ltr" else img.pixels[:, ::-1]
    h, w = px.shape
    t_out = max(1, w // cfg.step)
    needed = (t_out - 1) * cfg.step + cfg.width
    if needed > w:
        px = np.concatenate([px, np.ones((h, needed - w))], axis=1)
    frames = np.empty((t_out, h * cfg.width))
    for t in range(t_out):
        block = px[:, t * cfg.step : t * cfg.step + cfg.width]
        frames[t] = block.T.ravel()
    return frames
