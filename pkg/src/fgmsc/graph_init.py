"""Adaptive-neighbour graphs and the row-wise m-sparse simplex solver."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import numpy as np

# relative size under which the closed-form denominator counts as zero
_DEGENERATE = 1e-13


def sparse_simplex_rows(Q: np.ndarray, m: int,
                        exclude_diagonal: bool = False) -> np.ndarray:
    """Row-wise closed-form m-sparse simplex weights.

    For every row ``q`` the ``m`` smallest candidates (ascending, ties by
    index) get ``(q[m+1] - q[j]) / (m * q[m+1] - sum(q[:m]))`` and all other
    entries are zero. This is the minimiser of ``<g, q> + gamma * |g|^2`` on
    the simplex for the largest ``gamma`` that still leaves exactly ``m``
    non-zeros.

    When a row has only ``m`` candidates the missing ``(m+1)``-th value is
    taken as ``2 * q[m] - q[1]``. Rows whose denominator vanishes (all of
    the ``m+1`` smallest equal) fall back to uniform ``1/m``.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2:
        raise ValueError("Q must be a 2-D array")
    n_rows, n = Q.shape
    n_cand = n - 1 if exclude_diagonal else n
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if n_cand < 1:
        raise ValueError("need at least one candidate per row")
    m = min(int(m), n_cand)

    work = Q.copy()
    bad = ~np.isfinite(work)
    if np.any(bad.all(axis=1)):
        raise ValueError("a row of q has no finite entries")
    work[bad] = np.inf
    if exclude_diagonal:
        if n_rows != n:
            raise ValueError("exclude_diagonal needs a square matrix")
        work[np.arange(n), np.arange(n)] = np.inf

    order = np.argsort(work, axis=1, kind="stable")
    srt = np.take_along_axis(work, order, axis=1)
    head = srt[:, :m]
    if not np.all(np.isfinite(head)):
        raise ValueError("fewer than m finite candidates in a row")
    nxt = srt[:, m] if m < n_cand else np.full(n_rows, np.inf)
    nxt = np.where(np.isfinite(nxt), nxt, 2.0 * head[:, -1] - head[:, 0])

    num = nxt[:, None] - head
    den = num.sum(axis=1)
    scale = np.maximum(np.abs(head).max(axis=1), np.abs(nxt))
    degenerate = den <= _DEGENERATE * np.maximum(scale, 1.0) * m
    vals = np.empty_like(num)
    ok = ~degenerate
    vals[ok] = num[ok] / den[ok, None]
    vals[degenerate] = 1.0 / m

    out = np.zeros((n_rows, n))
    np.put_along_axis(out, order[:, :m], vals, axis=1)
    return out


def sparse_simplex_row(q, m: int, self_index: Optional[int] = None):
    """Single-row form of :func:`sparse_simplex_rows`.

    ``self_index`` is removed from the candidates and gets weight 0.
    """
    q = np.asarray(q, dtype=float).ravel()
    if self_index is None:
        return sparse_simplex_rows(q[None, :], m)[0]
    keep = np.arange(q.size) != self_index
    out = np.zeros(q.size)
    out[keep] = sparse_simplex_rows(q[keep][None, :], m)[0]
    return out


def squared_distances(X: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances between the columns of X."""
    sq = np.einsum("ij,ij->j", X, X)
    D = sq[:, None] + sq[None, :] - 2.0 * (X.T @ X)
    np.maximum(D, 0.0, out=D)
    np.fill_diagonal(D, 0.0)
    return D


def adaptive_neighbors_graph(X: np.ndarray, k: int) -> np.ndarray:
    """Row-stochastic k-neighbour graph of the columns of a ``d x n`` view."""
    X = np.asarray(X, dtype=float)
    n = X.shape[1]
    if n < 2:
        raise ValueError("need at least 2 samples")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return sparse_simplex_rows(squared_distances(X), min(k, n - 1),
                               exclude_diagonal=True)


def init_unified_graph(graphs: Sequence[np.ndarray]) -> np.ndarray:
    if len(graphs) == 0:
        raise ValueError("need at least one graph")
    shape = np.shape(graphs[0])
    if any(np.shape(g) != shape for g in graphs):
        raise ValueError("graphs differ in size")
    return np.mean(np.stack(graphs), axis=0)


def export_graph_csv(path, G: np.ndarray):
    np.savetxt(Path(path), G, delimiter=",", fmt="%.17g")


def export_edge_list(path, G: np.ndarray):
    """Write ``i,j,w`` lines for every positive entry (row-major order)."""
    rows, cols = np.nonzero(G > 0)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("i,j,w\n")
        for i, j in zip(rows, cols):
            fh.write(f"{i},{j},{float(G[i, j])!r}\n")
