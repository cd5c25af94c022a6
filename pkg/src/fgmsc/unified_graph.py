"""The unified graph G: per-row linear costs and the m-sparse row update.

Row ``i`` of G minimises ``(lam + gamma) |g|^2 + <Q_i, g> / 2`` on the
simplex with ``Q_i = eta * h_i - 4 lam * a_i^T Z_i``. Instead of fixing
``gamma`` the update keeps exactly ``m`` neighbours per row, which picks a
per-row ``gamma`` implicitly; the common scale ``4 (lam + gamma)`` cancels in
the closed form, so only ``Q`` is needed.
"""

from __future__ import annotations

import numpy as np

from .graph_init import sparse_simplex_rows


def embedding_distances(F: np.ndarray) -> np.ndarray:
    """``h_ij = |F_i - F_j|^2`` over the rows of F."""
    F = np.asarray(F, dtype=float)
    if not np.all(np.isfinite(F)):
        raise ValueError("F has non-finite entries")
    sq = np.einsum("ij,ij->i", F, F)
    H = sq[:, None] + sq[None, :] - 2.0 * (F @ F.T)
    np.maximum(H, 0.0, out=H)
    H = (H + H.T) / 2.0
    np.fill_diagonal(H, 0.0)
    return H


def q_row(a_i, z_slice, h_row, lam: float, eta: float) -> np.ndarray:
    a_i = np.asarray(a_i, dtype=float).ravel()
    z_slice = np.asarray(z_slice, dtype=float)
    h_row = np.asarray(h_row, dtype=float).ravel()
    if lam < 0 or eta < 0:
        raise ValueError("lambda and eta must be >= 0")
    if z_slice.shape != (a_i.size, h_row.size):
        raise ValueError("shape mismatch")
    return eta * h_row - 4.0 * lam * (a_i @ z_slice)


def q_matrix(A, z_slices, H, lam: float, eta: float) -> np.ndarray:
    """All rows ``Q_i`` stacked; same as calling :func:`q_row` per sample."""
    if lam < 0 or eta < 0:
        raise ValueError("lambda and eta must be >= 0")
    A = np.asarray(A, dtype=float)
    Zt = np.asarray(z_slices, dtype=float)
    H = np.asarray(H, dtype=float)
    n, t, _ = Zt.shape
    if A.shape != (t, n) or H.shape != (n, n):
        raise ValueError("shape mismatch")
    fused = np.einsum("ti,itj->ij", A, Zt)
    return eta * H - 4.0 * lam * fused


def update_g(A, z_slices, H, lam: float, eta: float, m: int) -> np.ndarray:
    n = np.shape(H)[0]
    if not 1 <= m <= n - 1:
        raise ValueError(f"m must be in [1, {n - 1}], got {m}")
    return sparse_simplex_rows(q_matrix(A, z_slices, H, lam, eta), m,
                               exclude_diagonal=True)


def g_row_objectives(G, A, z_slices, H, lam: float, eta: float) -> np.ndarray:
    """Per-row share of the objective that depends on G:
    ``lam |g_i - Z_i^T a_i|^2 + (eta / 2) <h_i, g_i>``. Their sum is the
    fusion term plus ``eta * Tr(F^T L F)``."""
    fused = np.einsum("ti,itj->ij", np.asarray(A, dtype=float),
                      np.asarray(z_slices, dtype=float))
    G = np.asarray(G, dtype=float)
    return (lam * np.sum((G - fused) ** 2, axis=1)
            + 0.5 * eta * np.sum(np.asarray(H) * G, axis=1))


def project_simplex_rows(Y: np.ndarray) -> np.ndarray:
    """Euclidean projection of every row onto the probability simplex
    (sort-and-threshold). Entries equal to ``-inf`` always get weight 0."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise ValueError("Y must be a 2-D array")
    n = Y.shape[1]
    srt = -np.sort(-Y, axis=1)
    finite = np.isfinite(srt)
    css = np.cumsum(np.where(finite, srt, 0.0), axis=1) - 1.0
    ks = np.arange(1, n + 1)
    cond = finite & (srt - css / ks > 0)
    rho = n - 1 - np.argmax(cond[:, ::-1], axis=1)  # last index where cond holds
    theta = css[np.arange(Y.shape[0]), rho] / (rho + 1)
    return np.maximum(Y - theta[:, None], 0.0)


def sparse_project_rows(Y: np.ndarray, m: int,
                        exclude_diagonal: bool = True) -> np.ndarray:
    """Closest point to each row among simplex vectors with at most ``m``
    non-zeros: keep the ``m`` largest entries and project them onto the
    simplex, which is exact for this constraint set."""
    Y = np.array(Y, dtype=float)
    n_rows, n = Y.shape
    if exclude_diagonal:
        if n_rows != n:
            raise ValueError("exclude_diagonal needs a square matrix")
        Y[np.arange(n), np.arange(n)] = -np.inf
    n_cand = n - 1 if exclude_diagonal else n
    if not 1 <= m <= n_cand:
        raise ValueError(f"m must be in [1, {n_cand}], got {m}")
    top = np.argsort(-Y, axis=1, kind="stable")[:, :m]
    vals = project_simplex_rows(np.take_along_axis(Y, top, axis=1))
    out = np.zeros((n_rows, n))
    np.put_along_axis(out, top, vals, axis=1)
    return out


def update_g_monotone(G_prev, A, z_slices, H, lam: float, eta: float, m: int):
    """:func:`update_g` with a fallback for rows where it would raise the
    objective.

    Such rows take the exact minimiser of :func:`g_row_objectives` over
    m-sparse simplex rows instead; a row is left unchanged only if neither
    candidate beats it. Returns ``(G, fallback, kept)`` with boolean row
    masks for the two cases.
    """
    if lam <= 0:
        raise ValueError("lambda must be > 0")
    G_prev = np.asarray(G_prev, dtype=float)
    Q = q_matrix(A, z_slices, H, lam, eta)
    primary = sparse_simplex_rows(Q, m, exclude_diagonal=True)
    exact = sparse_project_rows(-Q / (4.0 * lam), m)
    obj = [g_row_objectives(G, A, z_slices, H, lam, eta)
           for G in (G_prev, primary, exact)]
    fallback = obj[1] > obj[0]
    kept = fallback & (obj[2] > obj[0])
    G = primary
    G[fallback] = exact[fallback]
    G[kept] = G_prev[kept]
    return G, fallback & ~kept, kept
