"""Minimal image file codecs: PGM (P5/P2) and a baseline PNG subset.

Both decoders return grayscale float arrays in [0, 1].  Color inputs are
reduced with the 0.299/0.587/0.114 luminance weights; alpha is composited
over a white background, matching the light document backgrounds this
package deals with.  The encoders write byte-deterministic output, which the
PGM golden tests and the reproducible-corpus guarantees rely on.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import FormatError

LUMINANCE = np.array([0.299, 0.587, 0.114])

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def to_u8(gray: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(np.asarray(gray, dtype=np.float64) * 255.0 + 0.5), 0, 255).astype(
        np.uint8
    )


# ---------------------------------------------------------------------------
# PGM


def _pnm_tokens(data: bytes, count: int, start: int) -> tuple[list[int], int]:
    """Read `count` whitespace-separated integer header tokens, skipping
    '#' comments."""
    tokens: list[int] = []
    i = start
    cur = b""
    in_comment = False
    while i < len(data) and len(tokens) < count:
        c = data[i : i + 1]
        i += 1
        if in_comment:
            if c in b"\r\n":
                in_comment = False
            continue
        if c == b"#":
            in_comment = True
            continue
        if c.isspace():
            if cur:
                tokens.append(int(cur))
                cur = b""
        elif c.isdigit():
            cur += c
        else:
            raise FormatError(f"unexpected byte {c!r} in PNM header")
    if len(tokens) < count:
        raise FormatError("truncated PNM header")
    return tokens, i


def read_pnm(data: bytes) -> np.ndarray:
    magic = data[:2]
    if magic not in (b"P5", b"P2"):
        raise FormatError("not a P5/P2 PGM stream")
    (w, h, maxval), pos = _pnm_tokens(data, 3, 2)
    if w < 1 or h < 1:
        raise FormatError("PGM dimensions must be positive")
    if not 0 < maxval < 256:
        raise FormatError(f"unsupported PGM maxval {maxval}")
    if magic == b"P5":
        raw = data[pos : pos + w * h]
        if len(raw) != w * h:
            raise FormatError("truncated PGM pixel data")
        px = np.frombuffer(raw, dtype=np.uint8).reshape(h, w)
    else:
        values = data[pos:].split()
        if len(values) < w * h:
            raise FormatError("truncated PGM pixel data")
        px = np.array([int(v) for v in values[: w * h]], dtype=np.uint16).reshape(h, w)
        if px.max(initial=0) > maxval:
            raise FormatError("PGM sample exceeds maxval")
    return px.astype(np.float64) / float(maxval)


def write_pgm(gray: np.ndarray) -> bytes:
    u8 = to_u8(gray)
    h, w = u8.shape
    return b"P5\n%d %d\n255\n" % (w, h) + u8.tobytes()


# ---------------------------------------------------------------------------
# PNG (baseline subset: 8-bit depth, no interlace)


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    if pb <= pc:
        return b
    return c


def _defilter(raw: bytes, h: int, stride: int, bpp: int) -> np.ndarray:
    if len(raw) != h * (stride + 1):
        raise FormatError("PNG pixel data has unexpected length")
    out = np.zeros((h, stride), dtype=np.uint8)
    prev = bytearray(stride)
    for row in range(h):
        off = row * (stride + 1)
        ftype = raw[off]
        line = bytearray(raw[off + 1 : off + 1 + stride])
        if ftype == 0:
            pass
        elif ftype == 1:  # Sub
            for i in range(bpp, stride):
                line[i] = (line[i] + line[i - bpp]) & 0xFF
        elif ftype == 2:  # Up
            for i in range(stride):
                line[i] = (line[i] + prev[i]) & 0xFF
        elif ftype == 3:  # Average
            for i in range(stride):
                left = line[i - bpp] if i >= bpp else 0
                line[i] = (line[i] + ((left + prev[i]) >> 1)) & 0xFF
        elif ftype == 4:  # Paeth
            for i in range(stride):
                left = line[i - bpp] if i >= bpp else 0
                ul = prev[i - bpp] if i >= bpp else 0
                line[i] = (line[i] + _paeth(left, prev[i], ul)) & 0xFF
        else:
            raise FormatError(f"unknown PNG filter type {ftype}")
        out[row] = np.frombuffer(bytes(line), dtype=np.uint8)
        prev = line
    return out


def read_png(data: bytes) -> np.ndarray:
    if data[:8] != PNG_SIGNATURE:
        raise FormatError("not a PNG stream")
    pos = 8
    ihdr = None
    plte = None
    trns = None
    idat = b""
    while pos + 8 <= len(data):
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        ctype = data[pos + 4 : pos + 8]
        body = data[pos + 8 : pos + 8 + length]
        pos += 12 + length
        if ctype == b"IHDR":
            ihdr = struct.unpack(">IIBBBBB", body)
        elif ctype == b"PLTE":
            plte = np.frombuffer(body, dtype=np.uint8).reshape(-1, 3)
        elif ctype == b"tRNS":
            trns = np.frombuffer(body, dtype=np.uint8)
        elif ctype == b"IDAT":
            idat += body
        elif ctype == b"IEND":
            break
    if ihdr is None:
        raise FormatError("PNG stream has no IHDR chunk")
    w, h, depth, color, comp, filt, interlace = ihdr
    if w < 1 or h < 1:
        raise FormatError("PNG dimensions must be positive")
    if depth != 8:
        raise FormatError(f"unsupported PNG bit depth {depth} (only 8 supported)")
    if comp != 0 or filt != 0:
        raise FormatError("unsupported PNG compression/filter method")
    if interlace != 0:
        raise FormatError("Adam7 interlaced PNG not supported")
    channels = {0: 1, 2: 3, 3: 1, 4: 2, 6: 4}.get(color)
    if channels is None:
        raise FormatError(f"unsupported PNG color type {color}")
    try:
        raw = zlib.decompress(idat)
    except zlib.error as exc:
        raise FormatError(f"corrupt PNG pixel data: {exc}") from exc
    px = _defilter(raw, h, w * channels, channels).reshape(h, w, channels)

    if color == 3:
        if plte is None:
            raise FormatError("paletted PNG without PLTE chunk")
        idx = px[..., 0]
        rgb = plte[idx].astype(np.float64) / 255.0
        if trns is not None:
            alpha = np.ones(256)
            alpha[: trns.size] = trns / 255.0
            a = alpha[idx]
            rgb = rgb * a[..., None] + (1.0 - a[..., None])
        return rgb @ LUMINANCE

    f = px.astype(np.float64) / 255.0
    if color == 0:
        return f[..., 0]
    if color == 4:
        g, a = f[..., 0], f[..., 1]
        return g * a + (1.0 - a)
    if color == 2:
        return f @ LUMINANCE
    rgb, a = f[..., :3], f[..., 3]
    return (rgb @ LUMINANCE) * a + (1.0 - a)


def _chunk(ctype: bytes, body: bytes) -> bytes:
    return (
        struct.pack(">I", len(body))
        + ctype
        + body
        + struct.pack(">I", zlib.crc32(ctype + body) & 0xFFFFFFFF)
    )


def write_png(gray: np.ndarray) -> bytes:
    u8 = to_u8(gray)
    h, w = u8.shape
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 0, 0, 0, 0)
    rows = b"".join(b"\x00" + u8[r].tobytes() for r in range(h))
    idat = zlib.compress(rows, 6)
    return PNG_SIGNATURE + _chunk(b"IHDR", ihdr) + _chunk(b"IDAT", idat) + _chunk(b"IEND", b"")


def decode_image(data: bytes) -> np.ndarray:
    """Decode PNG or PGM bytes to a grayscale float array in [0, 1]."""
    if data[:8] == PNG_SIGNATURE:
        return read_png(data)
    if data[:2] in (b"P5", b"P2"):
        return read_pnm(data)
    raise FormatError("unrecognized image format (PNG and PGM P5/P2 supported)")
