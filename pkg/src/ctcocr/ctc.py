"""CTC transcription mathematics.

Per-frame class distributions are turned into label-sequence probabilities by
summing over all frame-level paths that collapse to the sequence.  The
collapse rule merges adjacent repeated labels first and then deletes blanks,
so a repeated output label is only reachable when a blank separates the two
occurrences in the path.

All probability work is done in natural-log space; ``-inf`` stands for
probability zero.  The loss gradient is taken with respect to the pre-softmax
activations that produced the posteriorgram (softmax and loss fused), which is
the numerically stable formulation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .alphabet import Alphabet, Labelling
from .errors import CapacityError, InvalidInputError

NEG_INF = float("-inf")


@dataclass(frozen=True)
class Posteriorgram:
    """T x |L'| per-frame class distributions.

    ``probs`` rows sum to one; ``log_probs`` is the same matrix in natural-log
    space with ``-inf`` for exact zeros.
    """

    probs: np.ndarray
    log_probs: np.ndarray

    @classmethod
    def from_probs(cls, probs) -> "Posteriorgram":
        p = np.asarray(probs, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] < 1:
            raise InvalidInputError("posteriorgram must be a T x |L'| matrix with T >= 1")
        if np.any(p < 0) or np.any(p > 1):
            raise InvalidInputError("posteriorgram entries must lie in [0, 1]")
        if np.any(np.abs(p.sum(axis=1) - 1.0) > 1e-6):
            raise InvalidInputError("posteriorgram rows must sum to 1 within 1e-6")
        with np.errstate(divide="ignore"):
            lp = np.log(p)
        return cls(p, lp)

    @classmethod
    def from_logits(cls, logits) -> "Posteriorgram":
        a = np.asarray(logits, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] < 1:
            raise InvalidInputError("logits must be a T x |L'| matrix with T >= 1")
        shifted = a - a.max(axis=1, keepdims=True)
        lp = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        return cls(np.exp(lp), lp)

    @property
    def n_frames(self) -> int:
        return self.probs.shape[0]

    @property
    def n_labels(self) -> int:
        return self.probs.shape[1]


@dataclass(frozen=True)
class CtcLossResult:
    """Negative log-likelihood of a labelling plus its fused gradient.

    ``grad`` is d(loss)/d(logits) for any pre-softmax activations that softmax
    to the given posteriorgram (well defined because softmax is shift
    invariant).  ``unreachable`` flags targets with zero probability; then
    ``loss`` is ``+inf`` and ``grad`` is all zeros.
    """

    loss: float
    grad: np.ndarray
    unreachable: bool = False


def _check_path(path: Sequence[int], n_labels: int) -> np.ndarray:
    p = np.asarray(path, dtype=np.int64)
    if p.ndim != 1:
        raise InvalidInputError("path must be a 1-D sequence of label indices")
    if p.size and (p.min() < 0 or p.max() >= n_labels):
        raise InvalidInputError(f"path frame index out of range for |L'|={n_labels}")
    return p


def collapse(path: Sequence[int], alphabet: Alphabet) -> Labelling:
    """Merge adjacent duplicates, then remove blanks.

    ``path`` is a sequence over the augmented alphabet (blank allowed); the
    result is a labelling over the plain alphabet.
    """
    p = _check_path(path, alphabet.size)
    out = []
    prev = -1
    for s in p:
        if s != prev and s != alphabet.blank_index:
            out.append(int(s))
        prev = s
    return tuple(out)


def path_probability(path: Sequence[int], y: Posteriorgram) -> float:
    """Product of the per-frame probabilities of the path's labels.

    Computed in log space and exponentiated on return.
    """
    p = _check_path(path, y.n_labels)
    if p.size != y.n_frames:
        raise InvalidInputError(f"path length {p.size} != posteriorgram length {y.n_frames}")
    logp = y.log_probs[np.arange(y.n_frames), p].sum()
    return float(np.exp(logp))


def labelling_probability_bruteforce(
    l: Labelling, y: Posteriorgram, alphabet: Alphabet, max_paths: int = 10**7
) -> float:
    """Exact p(l|x) by enumerating every length-T path over L'.

    This is the independent oracle for :func:`ctc_loss`; it shares no code
    with the dynamic program.  Guarded by ``max_paths`` since the path count
    is |L'|**T.
    """
    n = y.n_labels
    t = y.n_frames
    if n**t > max_paths:
        raise CapacityError(f"{n}**{t} paths exceed the enumeration guard of {max_paths}")
    target = tuple(l)
    total = 0.0
    for path in itertools.product(range(n), repeat=t):
        if collapse(path, alphabet) == target:
            total += math.prod(float(y.probs[i, s]) for i, s in enumerate(path))
    return total


def _augment(l: Labelling, blank: int) -> np.ndarray:
    """Blank-interleaved target: ~ l1 ~ l2 ... ~ lN ~."""
    aug = np.full(2 * len(l) + 1, blank, dtype=np.int64)
    aug[1::2] = l
    return aug


def min_frames(l: Labelling) -> int:
    """Fewest frames that can carry the labelling: |l| plus one forced blank
    between each adjacent repeated pair."""
    repeats = sum(1 for a, b in zip(l, l[1:]) if a == b)
    return len(l) + repeats


def _forward_backward(log_y: np.ndarray, aug: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Log-space forward/backward over the augmented label sequence.

    alpha[t, s] includes the emission at frame t; beta[t, s] covers emissions
    strictly after t.  log p(l|x) = logsumexp_s(alpha[t, s] + beta[t, s]) for
    any t.
    """
    T = log_y.shape[0]
    S = aug.size

    # skip transition s-2 -> s allowed only into a label state whose label
    # differs from the one two states back
    skip_ok = np.zeros(S, dtype=bool)
    if S > 2:
        skip_ok[3::2] = aug[3::2] != aug[1:-2:2]

    emit = log_y[:, aug]  # T x S

    alpha = np.full((T, S), NEG_INF)
    alpha[0, 0] = emit[0, 0]
    if S > 1:
        alpha[0, 1] = emit[0, 1]
    for t in range(1, T):
        prev = alpha[t - 1]
        move = np.logaddexp(prev[1:], prev[:-1])
        acc = np.concatenate(([prev[0]], move))
        if S > 2:
            skipped = np.where(skip_ok[2:], prev[:-2], NEG_INF)
            acc[2:] = np.logaddexp(acc[2:], skipped)
        alpha[t] = acc + emit[t]

    beta = np.full((T, S), NEG_INF)
    beta[T - 1, S - 1] = 0.0
    if S > 1:
        beta[T - 1, S - 2] = 0.0
    for t in range(T - 2, -1, -1):
        nxt = beta[t + 1] + emit[t + 1]
        acc = nxt.copy()
        acc[:-1] = np.logaddexp(acc[:-1], nxt[1:])
        if S > 2:
            skipped = np.where(skip_ok[2:], nxt[2:], NEG_INF)
            acc[:-2] = np.logaddexp(acc[:-2], skipped)
        beta[t] = acc

    if S > 1:
        log_p = np.logaddexp(alpha[T - 1, S - 1], alpha[T - 1, S - 2])
    else:
        log_p = alpha[T - 1, 0]
    return alpha, beta, float(log_p)


def ctc_loss(l: Labelling, y: Posteriorgram, alphabet: Alphabet) -> CtcLossResult:
    """-ln p(l|x) via the forward-backward dynamic program, with gradient.

    Matches :func:`labelling_probability_bruteforce` on enumerable instances.
    Structurally unreachable targets (too few frames) give ``+inf`` loss, a
    zero gradient and ``unreachable=True``.
    """
    target = tuple(int(s) for s in l)
    blank = alphabet.blank_index
    if any(s == blank for s in target):
        raise InvalidInputError("target labelling must not contain the blank label")
    if any(not 0 <= s < len(alphabet.labels) for s in target):
        raise InvalidInputError("target labelling contains out-of-range label indices")
    if y.n_labels != alphabet.size:
        raise InvalidInputError(
            f"posteriorgram has {y.n_labels} labels, alphabet expects {alphabet.size}"
        )

    T = y.n_frames
    if T < min_frames(target):
        return CtcLossResult(float("inf"), np.zeros_like(y.probs), unreachable=True)

    aug = _augment(target, blank)
    alpha, beta, log_p = _forward_backward(y.log_probs, aug)
    if log_p == NEG_INF:
        return CtcLossResult(float("inf"), np.zeros_like(y.probs), unreachable=True)

    # fused softmax+CTC gradient: y - sum of state occupancies per label
    log_gamma = alpha + beta - log_p  # T x S
    occupancy = np.zeros_like(y.probs)
    gamma = np.exp(log_gamma)
    np.add.at(occupancy, (slice(None), aug), gamma)
    grad = y.probs - occupancy
    return CtcLossResult(-log_p, grad, unreachable=False)


def best_path_decode(y: Posteriorgram, alphabet: Alphabet) -> Labelling:
    """Collapse of the per-frame argmax path.

    An approximation to the most probable labelling; argmax ties resolve to
    the lowest label index.
    """
    if y.n_labels != alphabet.size:
        raise InvalidInputError(
            f"posteriorgram has {y.n_labels} labels, alphabet expects {alphabet.size}"
        )
    path = np.argmax(y.probs, axis=1)
    return collapse(path, alphabet)
