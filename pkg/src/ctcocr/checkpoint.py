"""Self-describing checkpoint container.

A checkpoint is one binary file: a magic string, a format version, a JSON
header describing the named arrays (dtype, shape, byte offsets) plus a free
metadata record, then the raw little-endian array payloads in sorted name
order.  The writer is fully deterministic, so identical training runs produce
byte-identical files.  Loading a file with a different format version is
refused.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import FormatError

MAGIC = b"CTCOCRCKPT"
VERSION = 1


@dataclass
class Checkpoint:
    """Named parameter arrays plus a JSON-serializable metadata record."""

    arrays: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def save(self, path) -> None:
        names = sorted(self.arrays)
        entries = []
        offset = 0
        blobs = []
        for name in names:
            arr = np.ascontiguousarray(self.arrays[name])
            if arr.dtype.byteorder == ">":
                arr = arr.astype(arr.dtype.newbyteorder("<"))
            blob = arr.tobytes()
            entries.append(
                {
                    "name": name,
                    "dtype": arr.dtype.str,
                    "shape": list(arr.shape),
                    "offset": offset,
                    "nbytes": len(blob),
                }
            )
            blobs.append(blob)
            offset += len(blob)
        header = json.dumps(
            {"arrays": entries, "metadata": self.metadata},
            sort_keys=True,
            separators=(",", ":"),
            ensure_ascii=True,
        ).encode("ascii")
        with open(path, "wb") as f:
            f.write(MAGIC)
            f.write(struct.pack("<IQ", VERSION, len(header)))
            f.write(header)
            for blob in blobs:
                f.write(blob)

    @classmethod
    def load(cls, path) -> "Checkpoint":
        data = Path(path).read_bytes()
        if data[: len(MAGIC)] != MAGIC:
            raise FormatError(f"{path}: not a checkpoint file")
        version, hlen = struct.unpack_from("<IQ", data, len(MAGIC))
        if version != VERSION:
            raise FormatError(
                f"{path}: checkpoint format version {version} not supported (expected {VERSION})"
            )
        start = len(MAGIC) + 12
        try:
            header = json.loads(data[start : start + hlen].decode("ascii"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"{path}: corrupt checkpoint header: {exc}") from exc
        payload = data[start + hlen :]
        arrays = {}
        for e in header["arrays"]:
            raw = payload[e["offset"] : e["offset"] + e["nbytes"]]
            if len(raw) != e["nbytes"]:
                raise FormatError(f"{path}: truncated array payload for {e['name']!r}")
            arrays[e["name"]] = (
                np.frombuffer(raw, dtype=np.dtype(e["dtype"])).reshape(e["shape"]).copy()
            )
        return cls(arrays=arrays, metadata=header["metadata"])
