"""Slow, independent reference implementations used by the tests.

None of these import from fgmsc; they re-derive each quantity the long way.
"""

import itertools
import math

import numpy as np


def simplex_qp_bruteforce(P, b, support=None, tol=1e-12):
    """min_x x^T P x + b^T x over the probability simplex restricted to
    ``support``, by enumerating every face and solving its KKT system."""
    P = np.asarray(P, dtype=float)
    b = np.asarray(b, dtype=float)
    n = b.size
    support = list(range(n)) if support is None else list(support)
    best, best_x = np.inf, None
    for r in range(1, len(support) + 1):
        for S in itertools.combinations(support, r):
            S = list(S)
            k = len(S)
            K = np.zeros((k + 1, k + 1))
            K[:k, :k] = 2.0 * P[np.ix_(S, S)]
            K[:k, k] = 1.0
            K[k, :k] = 1.0
            rhs = np.concatenate([-b[S], [1.0]])
            sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
            x = np.zeros(n)
            x[S] = sol[:k]
            if x.min() < -tol or abs(x.sum() - 1.0) > 1e-9:
                continue
            x = np.maximum(x, 0.0)
            val = x @ P @ x + b @ x
            if val < best - 1e-15:
                best, best_x = val, x
    return best_x, best


def implied_gamma(q, m):
    """gamma that makes the (m+1)-th smallest entry sit exactly on the
    boundary of the support; with only m entries the missing value is
    extrapolated as 2 q_(m) - q_(1)."""
    s = np.sort(q)
    nxt = s[m] if m < s.size else 2 * s[m - 1] - s[0]
    return (m * nxt - s[:m].sum()) / 2.0


def m_sparse_oracle(q, m):
    """Best m-sparse simplex vector for <q, z> + gamma |z|^2: every
    m-subset is enumerated and the face QP is solved exactly."""
    q = np.asarray(q, dtype=float)
    n = q.size
    gamma = implied_gamma(q, m)
    P = gamma * np.eye(n)
    best, best_x = np.inf, None
    for S in itertools.combinations(range(n), m):
        x, val = simplex_qp_bruteforce(P, q, support=S)
        if x is not None and val < best - 1e-15:
            best, best_x = val, x
    return best_x


def simplex_grid(t, step):
    """All points of the t-simplex on a grid of the given step."""
    k = int(round(1.0 / step))
    if t == 1:
        return np.ones((1, 1))
    if t == 2:
        a = np.arange(k + 1) / k
        return np.stack([a, 1 - a], axis=1)
    if t == 3:
        i, j = np.meshgrid(np.arange(k + 1), np.arange(k + 1), indexing="ij")
        keep = i + j <= k
        a1, a2 = i[keep] / k, j[keep] / k
        return np.stack([a1, a2, 1 - a1 - a2], axis=1)
    raise ValueError("grid oracle supports t <= 3")


def fd_gradient(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        e = np.zeros_like(x)
        e[idx] = h
        g[idx] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def acc_bruteforce(pred, truth):
    """Best accuracy over every injective relabelling of ``pred``."""
    pred, truth = np.asarray(pred), np.asarray(truth)
    p_vals, t_vals = np.unique(pred), np.unique(truth)
    best = 0
    # pad the truth side so that every predicted cluster gets a target
    targets = list(t_vals) + [None] * max(0, len(p_vals) - len(t_vals))
    for perm in itertools.permutations(targets, len(p_vals)):
        mapping = dict(zip(p_vals, perm))
        hits = sum(mapping[p] == t for p, t in zip(pred, truth))
        best = max(best, hits)
    return best / len(pred)


def nmi_entropy(pred, truth):
    """I(U;V) / max(H(U), H(V)) from the contingency table."""
    pred, truth = np.asarray(pred), np.asarray(truth)
    n = len(pred)

    def entropy(x):
        _, counts = np.unique(x, return_counts=True)
        p = counts / n
        return -sum(pi * math.log(pi) for pi in p)

    mi = 0.0
    for u in np.unique(pred):
        for v in np.unique(truth):
            nuv = np.sum((pred == u) & (truth == v))
            if nuv:
                nu, nv = np.sum(pred == u), np.sum(truth == v)
                mi += nuv / n * math.log(n * nuv / (nu * nv))
    hu, hv = entropy(pred), entropy(truth)
    if max(hu, hv) == 0:
        return 1.0
    return mi / max(hu, hv)


def ari_pairs(pred, truth):
    """Adjusted Rand index by counting all sample pairs."""
    pred, truth = list(pred), list(truth)
    a = b = c = d = 0
    for i, j in itertools.combinations(range(len(pred)), 2):
        same_p = pred[i] == pred[j]
        same_t = truth[i] == truth[j]
        if same_p and same_t:
            a += 1
        elif same_p:
            b += 1
        elif same_t:
            c += 1
        else:
            d += 1
    total = a + b + c + d
    expected = (a + b) * (a + c) / total
    max_index = ((a + b) + (a + c)) / 2
    if max_index == expected:
        return 1.0
    return (a - expected) / (max_index - expected)


def objective_reference(views, W, Z, G, A, F, alpha, lam, eta):
    """Full objective written out term by term with explicit loops."""
    total = 0.0
    t = len(views)
    n = G.shape[0]
    for v in range(t):
        X = views[v]
        R = X - X @ W[v]
        total += float((R ** 2).sum())
        total += alpha * float(((W[v] - Z[v]) ** 2).sum())
        total += float(np.abs(W[v]).sum())
    for i in range(n):
        fused = sum(A[v, i] * Z[v][i] for v in range(t))
        total += lam * float(((G[i] - fused) ** 2).sum())
    S = (G + G.T) / 2
    spec = 0.0
    for i in range(n):
        for j in range(n):
            spec += 0.5 * S[i, j] * float(((F[i] - F[j]) ** 2).sum())
    return total + eta * spec
