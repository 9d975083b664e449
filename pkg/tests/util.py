"""Shared test helpers: finite differences and random instances."""

import numpy as np


def fd_gradient(fn, arr, h=1e-5):
    """Central-difference gradient of scalar fn() w.r.t. arr, in place."""
    g = np.zeros_like(arr)
    it = np.nditer(arr, flags=["multi_index"])
    for _ in it:
        ix = it.multi_index
        orig = arr[ix]
        arr[ix] = orig + h
        fp = fn()
        arr[ix] = orig - h
        fm = fn()
        arr[ix] = orig
        g[ix] = (fp - fm) / (2 * h)
    return g


def max_rel_err(a, b, floor=1e-4):
    """Elementwise |a-b| / max(|a|, |b|, floor), maximized."""
    denom = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return float(np.max(np.abs(a - b) / denom))


def random_posteriorgram(rng, t, k):
    return rng.dirichlet(np.ones(k), size=t)
