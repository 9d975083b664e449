"""RMSProp parameter updates."""

from __future__ import annotations

import numpy as np

from .errors import TrainingError
from .layers import ParamArray


class RmsProp:
    """Running-mean-square gradient scaling.

    v <- alpha*v + (1-alpha)*g^2 ; p <- p - lr * g / (sqrt(v) + eps)
    """

    def __init__(self, params: list[ParamArray], lr: float, alpha: float = 0.9, eps: float = 1e-8):
        self.params = [p for p in params if p.trainable]
        self.lr = lr
        self.alpha = alpha
        self.eps = eps
        self.v = {p.name: np.zeros_like(p.values) for p in self.params}

    def step(self) -> None:
        """Apply one update from the accumulated gradients.

        Aborts (raises, no partial update) if any gradient is non-finite.
        """
        for p in self.params:
            if not np.all(np.isfinite(p.grad)):
                raise TrainingError(f"non-finite gradient in parameter {p.name!r}; step aborted")
        for p in self.params:
            v = self.v[p.name]
            v *= self.alpha
            v += (1.0 - self.alpha) * p.grad * p.grad
            p.values -= self.lr * p.grad / (np.sqrt(v) + self.eps)
