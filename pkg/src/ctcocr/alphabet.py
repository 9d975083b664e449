"""Output alphabet handling.

An :class:`Alphabet` is the ordered set of output labels ``L`` plus one
reserved *blank* label appended at the end, giving the augmented set ``L'``
used by the transcription layer.  Labellings are represented as tuples of
integer indices into ``L``; paths use indices into ``L'`` (so the blank index
is a valid path symbol but never a labelling symbol).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvalidInputError

Labelling = tuple[int, ...]


@dataclass(frozen=True)
class Alphabet:
    """Ordered output labels plus the reserved blank.

    ``labels`` holds the real output symbols (one Unicode code point each).
    The blank is not a member of ``labels``; it lives at index ``len(labels)``
    of the augmented alphabet.
    """

    labels: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise InvalidInputError("alphabet labels must be unique")
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(self.labels)})

    @classmethod
    def from_texts(cls, texts: Iterable[str], include_space: bool = False) -> "Alphabet":
        """Alphabet of the sorted distinct code points found in ``texts``."""
        chars = set()
        for t in texts:
            chars.update(t)
        if include_space:
            chars.add(" ")
        return cls(tuple(sorted(chars)))

    @property
    def blank_index(self) -> int:
        return len(self.labels)

    @property
    def size(self) -> int:
        """``|L'|``: number of labels including the blank."""
        return len(self.labels) + 1

    def encode(self, text: str) -> Labelling:
        """Map text to a tuple of label indices.

        Raises :class:`InvalidInputError` listing the offending characters if
        any are not in the alphabet.
        """
        try:
            return tuple(self._index[c] for c in text)
        except KeyError:
            missing = sorted({c for c in text if c not in self._index})
            raise InvalidInputError(
                "character(s) not in alphabet: " + ", ".join(repr(c) for c in missing)
            ) from None

    def decode(self, indices: Sequence[int]) -> str:
        """Map label indices back to text.  Blank is not a valid index here."""
        out = []
        for i in indices:
            if not 0 <= i < len(self.labels):
                raise InvalidInputError(f"label index {i} out of range for |L|={len(self.labels)}")
            out.append(self.labels[i])
        return "".join(out)

    def __contains__(self, char: str) -> bool:
        return char in self._index

    def to_dict(self) -> dict:
        return {"labels": "".join(self.labels)}

    @classmethod
    def from_dict(cls, d: dict) -> "Alphabet":
        return cls(tuple(d["labels"]))
