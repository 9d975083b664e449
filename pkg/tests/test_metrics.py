import numpy as np
import pytest

from ctcocr import (
    InvalidInputError,
    char_accuracy,
    lcs_length,
    levenshtein,
    seq_accuracy,
    word_accuracy,
)
from ctcocr.metrics import build_report, tokenize_words


def brute_levenshtein(a, b):
    """Plain recursive definition; the independent oracle."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(
        brute_levenshtein(a[1:], b) + 1,
        brute_levenshtein(a, b[1:]) + 1,
        brute_levenshtein(a[1:], b[1:]) + (a[0] != b[0]),
    )


def random_strings(rng, n, max_len=7, sigma="abc"):
    for _ in range(n):
        la = int(rng.integers(0, max_len + 1))
        lb = int(rng.integers(0, max_len + 1))
        yield (
            "".join(rng.choice(list(sigma), size=la)),
            "".join(rng.choice(list(sigma), size=lb)),
        )


class TestLevenshtein:
    def test_examples(self):
        assert levenshtein("gandhi", "gandhi") == 0
        assert levenshtein("gandhi", "gandi") == 1
        assert levenshtein("", "abc") == 3

    def test_against_recursive_oracle(self):
        rng = np.random.default_rng(1)
        for a, b in random_strings(rng, 300):
            assert levenshtein(a, b) == brute_levenshtein(a, b)

    def test_metric_properties(self):
        rng = np.random.default_rng(2)
        pairs = list(random_strings(rng, 60, max_len=5))
        for a, b in pairs:
            assert levenshtein(a, b) == levenshtein(b, a)
            assert levenshtein(a, a) == 0
        triples = list(random_strings(rng, 40, max_len=4))
        for (a, b), (c, _) in zip(triples, reversed(triples)):
            assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


class TestLcs:
    def test_bounds(self):
        rng = np.random.default_rng(3)
        for a, b in random_strings(rng, 100, max_len=6):
            l = lcs_length(a, b)
            assert l <= min(len(a), len(b))

    def test_equals_min_iff_subsequence(self):
        assert lcs_length("abc", "axbxc") == 3
        assert lcs_length("abc", "abx") == 2
        assert lcs_length("", "abc") == 0


class TestCharAccuracy:
    def test_single_pair(self):
        # len(g)=6, LD=1 -> 500/6
        assert char_accuracy([("gandi", "gandhi")]) == pytest.approx(500.0 / 6.0)

    def test_all_exact(self):
        assert char_accuracy([("x", "x"), ("yz", "yz")]) == 100.0

    def test_pooled_not_averaged(self):
        # lengths 5 and 5 with distances 5 and 0: pooled 50.0
        assert char_accuracy([("zzzzz", "aaaaa"), ("bbbbb", "bbbbb")]) == pytest.approx(50.0)

    def test_pooling_weighting_differs_from_mean(self):
        # pooled CA weights by length; per-sample mean would not
        pairs = [("", "aaaaaaaa"), ("b", "b")]
        pooled = char_accuracy(pairs)
        assert pooled == pytest.approx((9 - 8) / 9 * 100)
        per_sample_mean = (0.0 + 100.0) / 2
        assert pooled != pytest.approx(per_sample_mean)

    def test_can_go_negative(self):
        assert char_accuracy([("xyzxyz", "ab")]) < 0

    def test_empty_gt_total_is_error(self):
        with pytest.raises(InvalidInputError):
            char_accuracy([("abc", "")])

    def test_all_empty_predictions(self):
        pairs = [("", "abc"), ("", "de")]
        assert char_accuracy(pairs) == pytest.approx(0.0)


class TestSeqAccuracy:
    def test_two_of_three(self):
        assert seq_accuracy([("a", "a"), ("b", "b"), ("c", "x")]) == pytest.approx(200.0 / 3.0)

    def test_all_wrong(self):
        assert seq_accuracy([("a", "b")]) == 0.0

    def test_duplicates_counted_per_sample(self):
        assert seq_accuracy([("a", "a"), ("a", "a"), ("a", "x")]) == pytest.approx(200.0 / 3.0)


class TestWordAccuracy:
    def test_lcs_example(self):
        wa = word_accuracy(pred_page="the quik fox", gt_page="the quick fox")
        assert wa == pytest.approx(200.0 / 3.0)

    def test_identical_pages(self):
        assert word_accuracy(pred_page="a b c", gt_page="a b c") == 100.0

    def test_empty_prediction(self):
        assert word_accuracy(pred_page="", gt_page="a b") == 0.0

    def test_whitespace_runs_ignored(self):
        a = word_accuracy(pred_page="the  quick\nfox", gt_page="the quick fox")
        b = word_accuracy(pred_page="the quick fox", gt_page="the\t quick  fox")
        assert a == 100.0 and b == 100.0

    def test_empty_gt_is_error(self):
        with pytest.raises(InvalidInputError):
            word_accuracy(pred_page="x", gt_page="  ")


def test_tokenize_words_unicode_whitespace():
    assert tokenize_words("a b c d") == ["a", "b", "c", "d"]


def test_ca_plus_cer_is_100():
    rng = np.random.default_rng(4)
    pairs = list(random_strings(rng, 30, max_len=6))
    pairs = [(a, b if b else "x") for a, b in pairs]
    report = build_report(pairs)
    assert report.char_accuracy + report.char_error_rate == 100.0
