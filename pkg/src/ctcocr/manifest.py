"""Dataset manifests.

A manifest is a UTF-8 tab-separated file, one sample per line:

    relative/path<TAB>ground truth text<TAB>split

where split is ``train``, ``val`` or ``test``.  Paths are resolved against
the manifest's own directory.  The recognition unit (word or line) is a
property of the whole manifest, chosen when loading or constructing it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError, InvalidInputError

SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    text: str
    split: str


@dataclass
class Manifest:
    entries: list[ManifestEntry]
    unit: str = "word"
    root: Path = field(default_factory=Path)

    def __post_init__(self):
        if self.unit not in ("word", "line"):
            raise InvalidInputError(f"unknown recognition unit {self.unit!r}")
        for e in self.entries:
            if e.split not in SPLITS:
                raise InvalidInputError(f"unknown split {e.split!r} for {e.path!r}")
            if e.split == "train" and not e.text:
                raise InvalidInputError(f"train entry {e.path!r} has empty ground truth")

    def split(self, name: str) -> list[ManifestEntry]:
        return [e for e in self.entries if e.split == name]

    def resolve(self, entry: ManifestEntry) -> Path:
        return self.root / entry.path

    def texts(self, split: str = "train") -> list[str]:
        return [e.text for e in self.split(split)]

    @classmethod
    def load(cls, path, unit: str = "word") -> "Manifest":
        p = Path(path)
        entries = []
        for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(f"{p}:{lineno}: expected 3 tab-separated fields")
            entries.append(ManifestEntry(parts[0], parts[1], parts[2]))
        return cls(entries=entries, unit=unit, root=p.parent)

    def save(self, path) -> None:
        p = Path(path)
        lines = []
        for e in self.entries:
            if "\t" in e.path or "\t" in e.text:
                raise InvalidInputError("manifest fields must not contain tabs")
            lines.append(f"{e.path}\t{e.text}\t{e.split}")
        p.write_text("\n".join(lines) + "\n", encoding="utf-8")
