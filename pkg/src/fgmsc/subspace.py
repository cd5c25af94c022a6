"""Per-view non-negative self-expression W^v (multiplicative updates).

The subproblem is

    min_{W >= 0}  ||X - X W||_F^2 + alpha ||W - Z||_F^2 + ||W||_1

and each step rescales ``W`` by ``2 (K + alpha Z) / (W K + K W + 2 alpha W + 1)``
with ``K = X^T X``. The symmetric denominator makes this a majorise-minimise
step over *symmetric* ``W``; for such ``W`` the asymmetric part of ``Z`` only
adds a constant to the objective, so ``Z`` enters through ``(Z + Z^T) / 2``
and symmetric iterates stay symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

_DENOM_FLOOR = 1e-12


def init_w(n: int, seed: int) -> np.ndarray:
    """Symmetric, strictly positive start with entries in [0.9/n, 1.1/n]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    R = rng.uniform(0.9 / n, 1.1 / n, size=(n, n))
    return (R + R.T) / 2.0


def _check(X, W, Z, alpha):
    X = np.asarray(X, dtype=float)
    W = np.asarray(W, dtype=float)
    Z = np.asarray(Z, dtype=float)
    n = X.shape[1]
    if W.shape != (n, n) or Z.shape != (n, n):
        raise ValueError(f"W and Z must be {n}x{n} for a view with {n} samples")
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    return X, W, Z


def w_objective(X, W, Z, alpha: float) -> float:
    X, W, Z = _check(X, W, Z, alpha)
    recon = np.sum((X - X @ W) ** 2)
    return float(recon + alpha * np.sum((W - Z) ** 2) + np.abs(W).sum())


@dataclass
class _Gram:
    """``K = X^T X``, kept factored when the view has few features."""

    X: np.ndarray
    dense: np.ndarray = None

    def __post_init__(self):
        d, n = self.X.shape
        if d >= n // 2:
            self.dense = self.X.T @ self.X

    def left(self, W):  # K @ W
        if self.dense is not None:
            return self.dense @ W
        return self.X.T @ (self.X @ W)

    def right(self, W):  # W @ K
        if self.dense is not None:
            return W @ self.dense
        return (W @ self.X.T) @ self.X

    def full(self):
        return self.dense if self.dense is not None else self.X.T @ self.X


def _objective_from(XW, X, W, Z, alpha):
    return float(np.sum((X - XW) ** 2) + alpha * np.sum((W - Z) ** 2)
                 + W.sum())


def update_w(X, W, Z, alpha: float, inner_iters: int = 30,
             tol: float = 1e-5, return_trace: bool = False):
    """Run multiplicative steps until the relative objective change is below
    ``tol`` or ``inner_iters`` steps were taken.

    Returns the new ``W`` (and the per-step objective list when
    ``return_trace`` is set; its first entry is the starting objective).
    """
    X, W, Z = _check(X, W, Z, alpha)
    if (X < 0).any() or (W < 0).any() or (Z < 0).any():
        raise ValueError("multiplicative update needs non-negative X, W, Z")
    gram = _Gram(X)
    Zs = (Z + Z.T) / 2.0
    numer = 2.0 * (gram.full() + alpha * Zs)
    trace: List[float] = [_objective_from(X @ W, X, W, Z, alpha)]
    for _ in range(inner_iters):
        P = gram.right(W) + gram.left(W) + 2.0 * alpha * W
        W = W * numer / np.maximum(P + 1.0, _DENOM_FLOOR)
        f = _objective_from(X @ W, X, W, Z, alpha)
        prev = trace[-1]
        trace.append(f)
        if abs(prev - f) <= tol * max(abs(prev), 1e-300):
            break
    if return_trace:
        return W, trace
    return W
