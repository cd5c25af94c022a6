"""Cross-view slicing and the fine-grained fusion updates (Z and A).

A stack of ``t`` graphs (each ``n x n``) is rearranged by :func:`trans` into
``n`` slices of shape ``t x n``: slice ``i`` holds row ``i`` of every view.
Slices are carried as one ``(n, t, n)`` array; fusion weights as a ``t x n``
matrix whose column ``i`` weights the views for sample ``i``.
"""

from __future__ import annotations

import itertools
from typing import List, Sequence, Tuple

import numpy as np

DEFAULT_RIDGE = 1e-8
# supports are enumerated exactly up to this many views
_MAX_ENUM_VIEWS = 12


class DegenerateSliceError(np.linalg.LinAlgError):
    pass


def trans(graphs: Sequence[np.ndarray]) -> np.ndarray:
    """``(t, n, n)`` graphs -> ``(n, t, n)`` slices; slice i row v = graph v row i."""
    stack = _stack(graphs)
    return np.ascontiguousarray(stack.transpose(1, 0, 2))


def trans_inverse(slices) -> List[np.ndarray]:
    S = np.asarray(slices, dtype=float)
    if S.ndim != 3 or S.shape[0] != S.shape[2]:
        raise ValueError(f"expected n slices of shape t x n, got {S.shape}")
    return [np.ascontiguousarray(S[:, v, :]) for v in range(S.shape[1])]


def _stack(graphs) -> np.ndarray:
    if len(graphs) == 0:
        raise ValueError("need at least one graph")
    shape = np.shape(graphs[0])
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ValueError(f"graphs must be square, got {shape}")
    if any(np.shape(g) != shape for g in graphs):
        raise ValueError("graphs differ in size")
    return np.asarray(np.stack(graphs), dtype=float)


def update_z_slices(w_slices, A, G, alpha: float, lam: float) -> np.ndarray:
    """Batched ``(alpha I + lam a a^T)^{-1} (alpha W_i + lam a g_i^T)``.

    Uses the rank-one inverse, so each slice costs O(t n).
    """
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    Wt = np.asarray(w_slices, dtype=float)
    A = np.asarray(A, dtype=float)
    G = np.asarray(G, dtype=float)
    n, t, _ = Wt.shape
    if A.shape != (t, n) or G.shape != (n, n):
        raise ValueError("shape mismatch between slices, A and G")
    if lam == 0:
        return Wt.copy()
    a = A.T  # (n, t)
    B = alpha * Wt + lam * a[:, :, None] * G[:, None, :]
    aB = np.einsum("it,itj->ij", a, B)
    coef = lam / (alpha + lam * np.einsum("it,it->i", a, a))
    return (B - coef[:, None, None] * a[:, :, None] * aB[:, None, :]) / alpha


def update_z_slice(w_slice, a_i, g_row, alpha: float, lam: float):
    """Single-sample form of :func:`update_z_slices`."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    w_slice = np.asarray(w_slice, dtype=float)
    a = np.asarray(a_i, dtype=float).ravel()
    g = np.asarray(g_row, dtype=float).ravel()
    if w_slice.shape != (a.size, g.size):
        raise ValueError("shape mismatch")
    if lam == 0:
        return w_slice.copy()
    B = alpha * w_slice + lam * np.outer(a, g)
    coef = lam / (alpha + lam * (a @ a))
    return (B - coef * np.outer(a, a @ B)) / alpha


def z_slice_objectives(w_slices, z_slices, A, G, alpha: float,
                       lam: float) -> np.ndarray:
    """Per-sample ``alpha |W_i - Z_i|^2 + lam |g_i - Z_i^T a_i|^2``."""
    Wt = np.asarray(w_slices, dtype=float)
    Zt = np.asarray(z_slices, dtype=float)
    fit = np.sum((Wt - Zt) ** 2, axis=(1, 2))
    return alpha * fit + lam * fusion_residuals(Zt, A, G)


def update_z_monotone(w_slices, z_prev, A, G, alpha: float, lam: float):
    """Closed-form slices, post-processed into graphs.

    Post-processing can undo part of the closed-form gain. Samples whose
    slice objective would grow move instead to the best point on the
    segment between their previous rows and the candidate rows; that point
    is row-stochastic too and never worse than the previous rows.

    Returns ``(graphs, damped)`` with ``damped`` flagging those samples.
    """
    Wt = np.asarray(w_slices, dtype=float)
    raw = update_z_slices(Wt, A, G, alpha, lam)
    cand = trans(postprocess_z(trans_inverse(raw)))
    prev = trans(z_prev)
    f_cand = z_slice_objectives(Wt, cand, A, G, alpha, lam)
    f_prev = z_slice_objectives(Wt, prev, A, G, alpha, lam)
    damped = f_cand > f_prev
    if damped.any():
        idx = np.nonzero(damped)[0]
        a = np.asarray(A, dtype=float).T[idx]
        P, D = prev[idx], cand[idx] - prev[idx]
        aD = np.einsum("it,itj->ij", a, D)
        resid = np.asarray(G, dtype=float)[idx] - np.einsum("it,itj->ij", a, P)
        # f(s) = f(0) + b s + c s^2 along prev + s D
        b = (-2.0 * alpha * np.einsum("itj,itj->i", Wt[idx] - P, D)
             - 2.0 * lam * np.einsum("ij,ij->i", resid, aD))
        c = alpha * np.einsum("itj,itj->i", D, D) + lam * np.einsum("ij,ij->i", aD, aD)
        step = np.clip(np.divide(-b, 2.0 * c, out=np.zeros_like(b), where=c > 0),
                       0.0, 1.0)
        mixed = P + step[:, None, None] * D
        f_mixed = z_slice_objectives(Wt[idx], mixed, np.asarray(A, dtype=float)[:, idx],
                                     np.asarray(G, dtype=float)[idx], alpha, lam)
        worse = f_mixed > f_prev[idx]  # only through rounding
        mixed[worse] = P[worse]
        cand[idx] = mixed
    return trans_inverse(cand), damped


def _row_normalize(S: np.ndarray) -> np.ndarray:
    """Row-normalise a ``(t, n, n)`` stack; empty rows get uniform 1/(n-1)
    weight off the diagonal."""
    t, n, _ = S.shape
    sums = S.sum(axis=2, keepdims=True)
    empty = sums[..., 0] <= 0
    out = np.divide(S, sums, out=np.zeros_like(S), where=sums > 0)
    if np.any(empty):
        fill = np.full(n, 1.0 / (n - 1)) if n > 1 else np.ones(1)
        vv, ii = np.nonzero(empty)
        out[vv, ii] = fill
        if n > 1:
            out[vv, ii, ii] = 0.0
    return out


def postprocess_z(graphs) -> List[np.ndarray]:
    """clip at 0 -> row-normalise -> symmetrise -> row-normalise."""
    S = _stack(graphs)
    if not np.all(np.isfinite(S)):
        raise ValueError("non-finite entries in Z")
    S = _row_normalize(np.maximum(S, 0.0))
    S = (S + S.transpose(0, 2, 1)) / 2.0
    S = _row_normalize(S)
    return [S[v] for v in range(S.shape[0])]


def _supports(t: int):
    for r in range(1, t + 1):
        yield from itertools.combinations(range(t), r)


def simplex_quadratic_min(M: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Minimise ``a^T M a`` over the probability simplex for a batch of PSD
    ``(b, t, t)`` matrices.

    The equality-constrained closed form ``M^{-1} 1 / (1^T M^{-1} 1)`` is used
    where it is already non-negative. Elsewhere the same closed form is
    evaluated on every face of the simplex and the best feasible face wins,
    which is exact. Returns the ``(b, t)`` minimisers and a mask of the batch
    entries where the plain closed form was infeasible.
    """
    M = np.asarray(M, dtype=float)
    b, t, _ = M.shape
    ones = np.ones((b, t, 1))
    x = _solve(M, ones)[..., 0]
    s = x.sum(axis=1, keepdims=True)
    a = np.divide(x, s, out=np.full_like(x, 1.0 / t), where=s > 0)
    projected = ~((a >= 0).all(axis=1) & (s[:, 0] > 0))
    if not projected.any():
        return a, projected

    idx = np.nonzero(projected)[0]
    Mp = M[idx]
    if t > _MAX_ENUM_VIEWS:
        # clip-and-renormalise fallback for very many views
        c = np.maximum(a[idx], 0.0)
        cs = c.sum(axis=1, keepdims=True)
        a[idx] = np.divide(c, cs, out=np.full_like(c, 1.0 / t),
                           where=cs > 1e-12)
        return a, projected

    best = np.full(idx.size, np.inf)
    best_a = np.full((idx.size, t), 1.0 / t)
    for S in _supports(t):
        S = list(S)
        sub = Mp[:, S][:, :, S]
        xs = _solve(sub, np.ones((idx.size, len(S), 1)))[..., 0]
        ss = xs.sum(axis=1)
        ok = ss > 0
        cand = np.zeros((idx.size, t))
        cand[:, S] = np.divide(xs, ss[:, None], out=np.zeros_like(xs),
                               where=ok[:, None])
        ok &= (cand[:, S] >= -1e-12).all(axis=1)
        np.maximum(cand, 0.0, out=cand)
        cand /= np.where(ok, cand.sum(axis=1), 1.0)[:, None]
        val = np.einsum("bi,bij,bj->b", cand, Mp, cand)
        better = ok & (val < best)
        best[better] = val[better]
        best_a[better] = cand[better]
    a[idx] = best_a
    return a, projected


def _solve(M, rhs):
    try:
        return np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        # batched solve fails as a whole; retry per matrix with lstsq
        out = np.empty(rhs.shape)
        for k in range(M.shape[0]):
            out[k] = np.linalg.lstsq(M[k], rhs[k], rcond=None)[0]
        return out


def _gram_check(M, ridge):
    if ridge > 0:
        return
    t = M.shape[-1]
    ranks = np.linalg.matrix_rank(M, hermitian=True)
    if np.any(ranks < t):
        raise DegenerateSliceError("degenerate slice - increase ridge")


def update_a(z_slices, G, ridge: float = DEFAULT_RIDGE):
    """All fusion-weight columns at once.

    Column ``i`` minimises ``||g_i - Z_i^T a||^2`` on the simplex, with
    ``T_i = 1 g_i^T - Z_i`` and ``M_i = T_i T_i^T + ridge I``. Returns the
    ``t x n`` weight matrix and the per-sample projection mask.
    """
    if ridge < 0:
        raise ValueError("ridge must be >= 0")
    Zt = np.asarray(z_slices, dtype=float)
    G = np.asarray(G, dtype=float)
    n, t, _ = Zt.shape
    if G.shape != (n, n):
        raise ValueError("G does not match the slices")
    T = G[:, None, :] - Zt
    M = np.einsum("itk,isk->its", T, T) + ridge * np.eye(t)
    _gram_check(M, ridge)
    a, projected = simplex_quadratic_min(M)
    return a.T.copy(), projected


def update_a_column(z_slice, g_row, ridge: float = DEFAULT_RIDGE):
    z_slice = np.asarray(z_slice, dtype=float)
    g_row = np.asarray(g_row, dtype=float).ravel()
    if z_slice.ndim != 2 or z_slice.shape[1] != g_row.size:
        raise ValueError("shape mismatch between slice and G row")
    if ridge < 0:
        raise ValueError("ridge must be >= 0")
    T = g_row[None, :] - z_slice
    M = (T @ T.T + ridge * np.eye(T.shape[0]))[None]
    _gram_check(M, ridge)
    return simplex_quadratic_min(M)[0][0]


def update_a_graph_level(G, graphs, ridge: float = DEFAULT_RIDGE):
    """One weight per view minimising ``||G - sum_v a_v Z^v||_F^2`` on the
    simplex."""
    S = _stack(graphs)
    G = np.asarray(G, dtype=float)
    if G.shape != S.shape[1:]:
        raise ValueError("G does not match the graphs")
    T = (G[None] - S).reshape(S.shape[0], -1)
    M = (T @ T.T + ridge * np.eye(S.shape[0]))[None]
    _gram_check(M, ridge)
    a, projected = simplex_quadratic_min(M)
    return a[0], bool(projected[0])


def fusion_residuals(z_slices, A, G) -> np.ndarray:
    """Per-sample ``||g_i - Z_i^T a_i||^2``."""
    Zt = np.asarray(z_slices, dtype=float)
    fused = np.einsum("ti,itj->ij", np.asarray(A, dtype=float), Zt)
    return np.sum((np.asarray(G) - fused) ** 2, axis=1)
