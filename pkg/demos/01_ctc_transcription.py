#!/usr/bin/env python3
"""Tour of the CTC transcription mathematics.

Shows the path-collapse rule, exact labelling probabilities by enumeration,
the forward-backward dynamic program agreeing with the enumeration, and the
case where greedy best-path decoding picks a labelling that is NOT the most
probable one.
"""

import math

import numpy as np

from ctcocr import (
    Alphabet,
    Posteriorgram,
    best_path_decode,
    collapse,
    ctc_loss,
    labelling_probability_bruteforce,
    path_probability,
)

# ---------------------------------------------------------------------------
# 1. The collapse mapping: merge repeats, then drop blanks.

ab = Alphabet(tuple("adghin"))
blank = ab.blank_index
path = [ab.encode(c)[0] if c != "~" else blank for c in "g~~aa~nd~hh~~ii"]
print("path  g~~aa~nd~hh~~ii  collapses to:", ab.decode(collapse(path, ab)))

# A blank keeps repeated labels apart: "aa~a" -> "aa"
ab1 = Alphabet(("a",))
print('path  aa~a             collapses to: "%s"' % ab1.decode(collapse([0, 0, 1, 0], ab1)))

# ---------------------------------------------------------------------------
# 2. Labelling probability = sum over every path that collapses to it.

y = Posteriorgram.from_probs([[0.4, 0.6], [0.4, 0.6]])  # p(a)=0.4, p(~)=0.6, two frames
print()
print("two frames with p(a)=0.4, p(~)=0.6 each:")
for path, name in [((0, 1), "a~"), ((1, 0), "~a"), ((0, 0), "aa"), ((1, 1), "~~")]:
    print(f"  p(path {name}) = {path_probability(path, y):.4f}")

p_a = labelling_probability_bruteforce((0,), y, ab1)
p_empty = labelling_probability_bruteforce((), y, ab1)
print(f'  p(labelling "a") = {p_a:.4f}  (a~ + ~a + aa)')
print(f'  p(labelling "")  = {p_empty:.4f}  (just ~~)')

# ---------------------------------------------------------------------------
# 3. The dynamic program reproduces the enumeration, in log space.

res = ctc_loss((0,), y, ab1)
print()
print(f"forward-backward loss = {res.loss:.6f}  vs  -ln(0.64) = {-math.log(0.64):.6f}")

rng = np.random.default_rng(0)
worst = 0.0
for _ in range(200):
    t, k = int(rng.integers(1, 7)), int(rng.integers(2, 5))
    post = Posteriorgram.from_probs(rng.dirichlet(np.ones(k), size=t))
    labels = Alphabet(tuple("abc"[: k - 1]))
    l = tuple(int(v) for v in rng.integers(0, k - 1, size=int(rng.integers(0, t + 1))))
    exact = labelling_probability_bruteforce(l, post, labels)
    if exact > 0:
        worst = max(worst, abs(math.exp(-ctc_loss(l, post, labels).loss) - exact) / exact)
print(f"worst relative disagreement over 200 random instances: {worst:.2e}")

# ---------------------------------------------------------------------------
# 4. Best-path decoding is an approximation.

decoded = best_path_decode(y, ab1)
print()
print(f'best-path decode says: "{ab1.decode(decoded)}" (empty)')
print(f'yet p("a") = {p_a:.2f} > p("") = {p_empty:.2f}')
print("the most probable SINGLE path is ~~, but mass spread over a~, ~a, aa wins for \"a\"")
