"""ISRI-style OCR evaluation metrics.

Character accuracy pools edit distance over the whole corpus rather than
averaging per sample:

    CA = (sum len(g_i) - sum LD(l_i, g_i)) / sum len(g_i) * 100

so it can go negative when the total edit distance exceeds the ground-truth
length.  Sequence accuracy is the percentage of exactly matching samples.
Word accuracy aligns the word-token sequences of a page pair via their
longest common subsequence.  Everything operates on Unicode code points with
no normalization; callers who want NFC etc. normalize first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidInputError


@dataclass(frozen=True)
class EvalReport:
    """Aggregated accuracies plus the raw counts they were computed from."""

    char_accuracy: float
    seq_accuracy: float
    word_accuracy: float | None
    total_gt_chars: int
    total_edit_distance: int
    n_samples: int
    oov_chars: int = 0
    n_skipped: int = 0

    @property
    def char_error_rate(self) -> float:
        return 100.0 - self.char_accuracy

    def to_dict(self) -> dict:
        d = {
            "char_accuracy": self.char_accuracy,
            "char_error_rate": self.char_error_rate,
            "seq_accuracy": self.seq_accuracy,
            "total_gt_chars": self.total_gt_chars,
            "total_edit_distance": self.total_edit_distance,
            "n_samples": self.n_samples,
            "oov_chars": self.oov_chars,
            "n_skipped": self.n_skipped,
        }
        if self.word_accuracy is not None:
            d["word_accuracy"] = self.word_accuracy
        return d


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Minimal insert/delete/substitute count between two sequences."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb))
        prev = cur
    return prev[-1]


def lcs_length(a: Sequence, b: Sequence) -> int:
    """Length of the longest common subsequence."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for ca in a:
        cur = [0] * (len(b) + 1)
        for j, cb in enumerate(b, start=1):
            cur[j] = prev[j - 1] + 1 if ca == cb else max(prev[j], cur[j - 1])
        prev = cur
    return prev[-1]


def char_accuracy(pairs: Iterable[tuple[str, str]]) -> float:
    """Corpus-pooled character accuracy over (prediction, ground truth) pairs."""
    total_len = 0
    total_dist = 0
    for pred, gt in pairs:
        total_len += len(gt)
        total_dist += levenshtein(pred, gt)
    if total_len == 0:
        raise InvalidInputError("character accuracy undefined: total ground-truth length is 0")
    return (total_len - total_dist) / total_len * 100.0


def seq_accuracy(pairs: Iterable[tuple[str, str]]) -> float:
    """Percentage of pairs whose prediction matches the ground truth exactly."""
    n = 0
    exact = 0
    for pred, gt in pairs:
        n += 1
        exact += pred == gt
    if n == 0:
        raise InvalidInputError("sequence accuracy undefined for zero samples")
    return exact / n * 100.0


def tokenize_words(page: str) -> list[str]:
    """Split on runs of Unicode whitespace."""
    return page.split()


def word_accuracy(pairs: Iterable[tuple[str, str]] | None = None, *, pred_page: str | None = None,
                  gt_page: str | None = None) -> float:
    """LCS-based word accuracy, pooled over pages.

    Accepts either an iterable of (pred, gt) page pairs or a single pair via
    keywords.  WA = sum len(LCS(words(pred), words(gt))) / sum len(words(gt)).
    """
    if pairs is None:
        if pred_page is None or gt_page is None:
            raise InvalidInputError("word_accuracy needs pairs or pred_page+gt_page")
        pairs = [(pred_page, gt_page)]
    total_gt = 0
    total_lcs = 0
    for pred, gt in pairs:
        pw = tokenize_words(pred)
        gw = tokenize_words(gt)
        total_gt += len(gw)
        total_lcs += lcs_length(pw, gw)
    if total_gt == 0:
        raise InvalidInputError("word accuracy undefined: ground truth has no words")
    return total_lcs / total_gt * 100.0


def build_report(pairs: Sequence[tuple[str, str]], with_words: bool = False,
                 oov_chars: int = 0, n_skipped: int = 0) -> EvalReport:
    """EvalReport over (prediction, ground truth) pairs."""
    total_len = sum(len(gt) for _, gt in pairs)
    total_dist = sum(levenshtein(pred, gt) for pred, gt in pairs)
    if total_len == 0:
        raise InvalidInputError("character accuracy undefined: total ground-truth length is 0")
    ca = (total_len - total_dist) / total_len * 100.0
    sa = seq_accuracy(pairs)
    wa = word_accuracy(pairs) if with_words else None
    return EvalReport(
        char_accuracy=ca,
        seq_accuracy=sa,
        word_accuracy=wa,
        total_gt_chars=total_len,
        total_edit_distance=total_dist,
        n_samples=len(pairs),
        oov_chars=oov_chars,
        n_skipped=n_skipped,
    )
