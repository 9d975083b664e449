"""Synthetic word-image generation.

Each word is rasterized with a randomly drawn font, size, styling (bold,
italic), foreground/background intensities, kerning and skew; a random
quarter of the images get a sigma-0.5 Gaussian blur; everything is then
resized to height 32 with the aspect ratio preserved.  Backgrounds are
always lighter than foregrounds, like scanned documents.

Glyph rasterization goes through a small renderer interface so a real
shaping stack (needed for complex scripts) can be plugged in; the built-in
renderer scales a fixed 5x7 bitmap font covering ASCII letters and digits.
Every random draw is derived from (seed, image index), so corpora are
reproducible and independent of generation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import imageio
from .errors import ConfigError, InvalidInputError, MissingGlyphError
from .fontdata import GLYPH_HEIGHT, GLYPH_WIDTH, GLYPHS_5X7
from .imaging import GrayImage, bilinear_resize, normalize_height
from .manifest import Manifest, ManifestEntry


@dataclass(frozen=True)
class RenderSpec:
    """All knobs for rendering one word image."""

    text: str
    font_id: str
    font_size: int
    bold: bool
    italic: bool
    fg_intensity: float
    bg_intensity: float
    kerning: int
    skew_degrees: float
    blur_sigma: float
    seed: int

    def __post_init__(self):
        if not self.text:
            raise InvalidInputError("render text must be non-empty")
        if not self.bg_intensity > self.fg_intensity:
            raise InvalidInputError("background must be lighter than foreground")
        if self.font_size < GLYPH_HEIGHT:
            raise InvalidInputError(f"font size must be >= {GLYPH_HEIGHT}")
        if self.blur_sigma < 0:
            raise InvalidInputError("blur sigma must be >= 0")


@dataclass(frozen=True)
class JitterRanges:
    """Sampling ranges for :func:`sample_spec`.  Integer ranges inclusive."""

    font_size: tuple[int, int] = (24, 48)
    skew_degrees: tuple[float, float] = (-3.0, 3.0)
    kerning: tuple[int, int] = (-1, 2)
    fg_intensity: tuple[float, float] = (0.0, 0.3)
    bg_intensity: tuple[float, float] = (0.7, 1.0)
    blur_probability: float = 0.25
    bold_probability: float = 0.25
    italic_probability: float = 0.25

    def __post_init__(self):
        if self.fg_intensity[1] >= self.bg_intensity[0]:
            raise ConfigError("fg range must stay below bg range (bg always lighter)")


CLEAN_STYLE = JitterRanges()

# low contrast, always blurred, heavier geometry jitter
DEGRADED_STYLE = JitterRanges(
    font_size=(16, 32),
    skew_degrees=(-6.0, 6.0),
    kerning=(-2, 3),
    fg_intensity=(0.2, 0.42),
    bg_intensity=(0.58, 0.8),
    blur_probability=1.0,
    bold_probability=0.4,
    italic_probability=0.4,
)


class BitmapFontRenderer:
    """Deterministic renderer over the built-in 5x7 bitmap font."""

    def __init__(self):
        self._fonts = {"mono5x7": GLYPHS_5X7}

    @property
    def font_ids(self) -> list[str]:
        return sorted(self._fonts)

    def register_font(self, font_id: str, glyphs: dict) -> None:
        """Add a bitmap font: char -> rows of '.'/'#' strings (5x7 grid)."""
        self._fonts[font_id] = dict(glyphs)

    def glyph_mask(self, font_id: str, char: str, height: int) -> np.ndarray:
        """Boolean glyph raster scaled to the given pixel height."""
        glyphs = self._fonts.get(font_id)
        if glyphs is None:
            raise ConfigError(f"unknown font {font_id!r}")
        rows = glyphs.get(char)
        if rows is None:
            raise MissingGlyphError([char])
        bits = np.array([[c == "#" for c in row] for row in rows], dtype=np.float64)
        width = max(1, int(np.floor(height * GLYPH_WIDTH / GLYPH_HEIGHT + 0.5)))
        # nearest-neighbour scaling
        ys = np.minimum((np.arange(height) * GLYPH_HEIGHT) // height, GLYPH_HEIGHT - 1)
        xs = np.minimum((np.arange(width) * GLYPH_WIDTH) // width, GLYPH_WIDTH - 1)
        return bits[np.ix_(ys, xs)] > 0.5

    def raster(self, spec: RenderSpec) -> np.ndarray:
        """Boolean ink mask for the whole word (no margins)."""
        gh = spec.font_size
        glyphs = self._fonts.get(spec.font_id)
        if glyphs is None:
            raise ConfigError(f"unknown font {spec.font_id!r}")
        missing = sorted({c for c in spec.text if c not in glyphs})
        if missing:
            raise MissingGlyphError(missing)
        masks = []
        for c in spec.text:
            m = self.glyph_mask(spec.font_id, c, gh)
            if spec.bold:
                thick = m.copy()
                thick[:, 1:] |= m[:, :-1]
                m = thick
            if spec.italic:
                m = _shear(m, slope=0.25)
            masks.append(m)
        gap = max(1, int(round(gh / GLYPH_HEIGHT)))
        glyph_w = max(m.shape[1] for m in masks)
        advance = max(1, glyph_w + gap + spec.kerning)
        total_w = (len(masks) - 1) * advance + glyph_w
        canvas = np.zeros((gh, total_w), dtype=bool)
        x = 0
        for m in masks:
            canvas[:, x : x + m.shape[1]] |= m
            x += advance
        return canvas


_DEFAULT_RENDERER = BitmapFontRenderer()


def _shear(mask: np.ndarray, slope: float) -> np.ndarray:
    """Shift each row horizontally in proportion to its distance from the
    bottom (positive slope leans the top rightward)."""
    h, w = mask.shape
    shifts = np.floor(slope * (h - 1 - np.arange(h)) + 0.5).astype(np.int64)
    shifts -= shifts.min()
    out = np.zeros((h, w + int(shifts.max(initial=0))), dtype=mask.dtype)
    for r in range(h):
        out[r, shifts[r] : shifts[r] + w] = mask[r]
    return out


def gaussian_blur(pixels: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian filter with edge replication."""
    if sigma <= 0:
        return pixels
    radius = max(1, int(np.ceil(3.0 * sigma)))
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (xs / sigma) ** 2)
    kernel /= kernel.sum()
    padded = np.pad(pixels, ((radius, radius), (0, 0)), mode="edge")
    rows = sum(kernel[i] * padded[i : i + pixels.shape[0]] for i in range(kernel.size))
    padded = np.pad(rows, ((0, 0), (radius, radius)), mode="edge")
    return sum(kernel[i] * padded[:, i : i + pixels.shape[1]] for i in range(kernel.size))


def sample_spec(
    text: str,
    rng: np.random.Generator,
    ranges: JitterRanges = CLEAN_STYLE,
    renderer: BitmapFontRenderer | None = None,
    seed: int = 0,
) -> RenderSpec:
    """Draw a random :class:`RenderSpec` for the given text."""
    if not text:
        raise InvalidInputError("cannot sample a spec for empty text")
    renderer = renderer or _DEFAULT_RENDERER
    fonts = renderer.font_ids
    if not fonts:
        raise ConfigError("font registry is empty")
    return RenderSpec(
        text=text,
        font_id=fonts[int(rng.integers(len(fonts)))],
        font_size=int(rng.integers(ranges.font_size[0], ranges.font_size[1] + 1)),
        bold=bool(rng.random() < ranges.bold_probability),
        italic=bool(rng.random() < ranges.italic_probability),
        fg_intensity=float(rng.uniform(*ranges.fg_intensity)),
        bg_intensity=float(rng.uniform(*ranges.bg_intensity)),
        kerning=int(rng.integers(ranges.kerning[0], ranges.kerning[1] + 1)),
        skew_degrees=float(rng.uniform(*ranges.skew_degrees)),
        blur_sigma=0.5 if rng.random() < ranges.blur_probability else 0.0,
        seed=seed,
    )


def render_with_mask(
    spec: RenderSpec, renderer: BitmapFontRenderer | None = None
) -> tuple[GrayImage, np.ndarray]:
    """Render a spec; also return the resized ink mask (values in [0, 1])."""
    renderer = renderer or _DEFAULT_RENDERER
    ink = renderer.raster(spec)
    if abs(spec.skew_degrees) > 1e-12:
        ink = _shear(ink, slope=float(np.tan(np.deg2rad(spec.skew_degrees))))
    margin = max(1, int(round(spec.font_size / GLYPH_HEIGHT)))
    h, w = ink.shape
    mask = np.zeros((h + 2 * margin, w + 2 * margin), dtype=bool)
    mask[margin : margin + h, margin : margin + w] = ink
    canvas = np.where(mask, spec.fg_intensity, spec.bg_intensity)
    if spec.blur_sigma > 0:
        canvas = gaussian_blur(canvas, spec.blur_sigma)
    img = normalize_height(GrayImage(np.clip(canvas, 0.0, 1.0)))
    mask_resized = bilinear_resize(mask.astype(np.float64), img.height, img.width)
    return img, mask_resized


def render(spec: RenderSpec, renderer: BitmapFontRenderer | None = None) -> GrayImage:
    """Rasterize, skew, optionally blur, resize to height 32."""
    img, _ = render_with_mask(spec, renderer)
    return img


def _index_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def generate_corpus(
    lexicon: list[str],
    out_dir,
    total: int | None = None,
    n_per_word: int | None = None,
    seed: int = 0,
    ranges: JitterRanges = CLEAN_STYLE,
    split: str = "train",
    unit: str = "word",
    renderer: BitmapFontRenderer | None = None,
    image_format: str = "pgm",
    name_prefix: str = "",
) -> Manifest:
    """Render a corpus to disk and return its manifest.

    Exactly one of ``total`` / ``n_per_word`` must be given.  Image i draws
    its word (for ``total`` mode) and all jitter from an RNG derived from
    (seed, i), so regeneration is bit-identical and order-independent.
    """
    if not lexicon:
        raise InvalidInputError("lexicon must be non-empty")
    if (total is None) == (n_per_word is None):
        raise InvalidInputError("specify exactly one of total / n_per_word")
    count = total if total is not None else n_per_word * len(lexicon)
    out = Path(out_dir)
    (out / "images").mkdir(parents=True, exist_ok=True)
    writer = imageio.write_pgm if image_format == "pgm" else imageio.write_png
    entries = []
    for i in range(count):
        rng = _index_rng(seed, i)
        if total is not None:
            word = lexicon[int(rng.integers(len(lexicon)))]
        else:
            word = lexicon[i // n_per_word]
        spec = sample_spec(word, rng, ranges, renderer, seed=seed)
        img = render(spec, renderer)
        rel = f"images/{name_prefix}{i:05d}.{image_format}"
        (out / rel).write_bytes(writer(img.pixels))
        entries.append(ManifestEntry(rel, word, split))
    manifest = Manifest(entries=entries, unit=unit, root=out)
    manifest.save(out / "manifest.tsv")
    return manifest
