"""Unnormalised graph Laplacian, spectral embedding and k-means."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import scipy.linalg


class EigenError(RuntimeError):
    pass


@dataclass(frozen=True)
class Laplacian:
    L: np.ndarray
    degrees: np.ndarray


@dataclass(frozen=True)
class Embedding:
    F: np.ndarray
    eigenvalues: np.ndarray


def laplacian(G: np.ndarray) -> Laplacian:
    """``L = D - S`` for the symmetrised graph ``S = (G + G^T) / 2``."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ValueError("G must be square")
    if not np.all(np.isfinite(G)):
        raise ValueError("G has non-finite entries")
    S = (G + G.T) / 2.0
    deg = S.sum(axis=1)
    L = -S
    L[np.diag_indices_from(L)] += deg
    # make rows sum to exactly zero despite rounding in deg
    L[np.diag_indices_from(L)] -= L.sum(axis=1)
    return Laplacian(L, deg)


def _fix_signs(F: np.ndarray) -> np.ndarray:
    # largest |entry| of each column positive; argmax returns the lowest index
    idx = np.argmax(np.abs(F), axis=0)
    signs = np.sign(F[idx, np.arange(F.shape[1])])
    signs[signs == 0] = 1.0
    return F * signs


def spectral_embedding(lap, c: int) -> Embedding:
    """Eigenvectors of the ``c`` smallest eigenvalues of L (ascending)."""
    L = lap.L if isinstance(lap, Laplacian) else np.asarray(lap, dtype=float)
    n = L.shape[0]
    if not 1 <= c <= n:
        raise ValueError(f"c must be in [1, {n}], got {c}")
    try:
        vals, vecs = scipy.linalg.eigh(L, subset_by_index=[0, c - 1],
                                       driver="evr")
    except (np.linalg.LinAlgError, ValueError):
        # evr occasionally gives up on highly degenerate spectra
        try:
            vals, vecs = scipy.linalg.eigh(L, driver="evd")
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise EigenError(f"eigendecomposition failed: {exc}") from exc
        vals, vecs = vals[:c], vecs[:, :c]
    if not np.all(np.isfinite(vecs)):
        raise EigenError("eigendecomposition returned non-finite vectors")
    return Embedding(_fix_signs(vecs), vals)


@dataclass
class KMeansResult:
    labels: np.ndarray
    inertia: float
    history: List[float]


def _kmeanspp(X, c, rng):
    n = X.shape[0]
    centers = np.empty((c, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for k in range(1, c):
        total = d2.sum()
        if total <= 0:
            j = rng.integers(n)
        else:
            j = int(np.searchsorted(np.cumsum(d2), rng.random() * total,
                                    side="right"))
            j = min(j, n - 1)
        centers[k] = X[j]
        d2 = np.minimum(d2, np.sum((X - centers[k]) ** 2, axis=1))
    return centers


def _sq_dists(X, centers):
    d = (np.sum(X ** 2, axis=1)[:, None] - 2.0 * X @ centers.T
         + np.sum(centers ** 2, axis=1)[None, :])
    return np.maximum(d, 0.0)


def lloyd(X, centers, max_iter: int = 300, tol: float = 1e-7) -> KMeansResult:
    """Lloyd iterations from given centres. ``history`` holds the inertia
    after every assignment step."""
    c = centers.shape[0]
    history = []
    labels = None
    for _ in range(max_iter):
        D = _sq_dists(X, centers)
        labels = np.argmin(D, axis=1)
        inertia = float(D[np.arange(X.shape[0]), labels].sum())
        history.append(inertia)
        new = centers.copy()
        for k in range(c):
            members = labels == k
            if members.any():
                new[k] = X[members].mean(axis=0)
        centers = new
        if len(history) > 1 and history[-2] - inertia <= tol * max(history[-2], 1e-300):
            break
    # exact inertia for the final centres
    D = _sq_dists(X, centers)
    labels = np.argmin(D, axis=1)
    inertia = float(np.sum((X - centers[labels]) ** 2))
    history.append(inertia)
    return KMeansResult(labels, inertia, history)


def kmeans(F, c: int, seed: int = 0, restarts: int = 10,
           max_iter: int = 300, tol: float = 1e-7) -> KMeansResult:
    """k-means++ seeded Lloyd; best of ``restarts`` runs.

    Restart ``r`` draws from its own stream ``default_rng([seed, r])``, so the
    result does not depend on the order the restarts run in.
    """
    X = F.F if isinstance(F, Embedding) else np.asarray(F, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if c < 1 or c > n:
        raise ValueError(f"c must be in [1, {n}], got {c}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    best: Optional[KMeansResult] = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        res = lloyd(X, _kmeanspp(X, c, rng), max_iter, tol)
        if best is None or res.inertia < best.inertia:
            best = res
    best.labels = _canonical_labels(best.labels)
    return best


def _canonical_labels(labels):
    # relabel clusters in order of first appearance
    _, first = np.unique(labels, return_index=True)
    order = labels[np.sort(first)]
    remap = np.empty(labels.max() + 1, dtype=int)
    remap[order] = np.arange(order.size)
    return remap[labels]
