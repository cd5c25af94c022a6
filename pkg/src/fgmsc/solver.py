"""Alternating minimisation of the fine-grained multi-view objective.

One outer step updates, in order: the self-expression matrices W^v, the
refined graphs Z^v, the unified graph G, the fusion weights A and the
spectral embedding F. The reported objective is

    sum_v ||X^v - X^v W^v||^2 + alpha ||W^v - Z^v||^2 + ||W^v||_1
      + lam * sum_i ||g_i - Z_i^T a_i||^2 + eta * Tr(F^T L F)

(no ``gamma ||G||^2`` term: the neighbour count ``m`` stands in for gamma).
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np
from threadpoolctl import threadpool_limits

from . import fusion
from .dataset import MultiViewDataset
from .embedding import Embedding, kmeans, laplacian, spectral_embedding
from .graph_init import adaptive_neighbors_graph, init_unified_graph
from .metrics import evaluate
from .subspace import init_w, update_w
from .unified_graph import (embedding_distances, sparse_project_rows, update_g,
                            update_g_monotone)

log = logging.getLogger(__name__)

VARIANTS = ("full", "fgl_z", "fgl_f", "fgl_zf", "graph_level")
TERMS = ("recon", "graph_reg", "l1", "fusion", "spectral")
# relative per-step increase tolerated before a step counts as a violation
MONOTONE_RTOL = 1e-6
THREADS_ENV = "FGMSC_THREADS"


class SolverDivergence(FloatingPointError):
    pass


@dataclass(frozen=True)
class SolverParams:
    alpha: float = 0.01
    lam: float = 1.0
    eta: float = 10.0
    m: int = 10
    k_init: int = 10
    outer_iters: int = 10
    inner_iters: int = 30
    inner_tol: float = 1e-5
    tol: float = 1e-6
    seed: int = 0
    restarts: int = 10
    variant: str = "full"
    ridge: float = fusion.DEFAULT_RIDGE
    normalize: bool = True
    safeguard: bool = True

    def __post_init__(self):
        for name in ("alpha", "lam", "eta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.m < 1 or self.k_init < 1:
            raise ValueError("m and k_init must be >= 1")
        if self.outer_iters < 1 or self.inner_iters < 1:
            raise ValueError("iteration counts must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.ridge < 0:
            raise ValueError("ridge must be >= 0")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")

    @property
    def joint_w(self) -> bool:
        return self.variant not in ("fgl_z", "fgl_zf")

    @property
    def coupled(self) -> bool:
        """Whether the rank-constraint term takes part in the loop."""
        return self.variant not in ("fgl_f", "fgl_zf")

    @property
    def eta_eff(self) -> float:
        return self.eta if self.coupled else 0.0


@dataclass
class SolverState:
    W: List[np.ndarray]
    Z: List[np.ndarray]
    G: np.ndarray
    A: np.ndarray
    F: Embedding
    objective_trace: List[float] = field(default_factory=list)
    term_trace: List[Dict[str, float]] = field(default_factory=list)
    initial_objective: float = float("nan")
    projections: int = 0
    g_fallbacks: int = 0
    z_damped: int = 0
    violations: int = 0


@dataclass
class RunResult:
    labels: np.ndarray
    metrics: Optional[Dict[str, float]]
    state: SolverState
    params: SolverParams
    iterations: int
    converged: bool
    timing: Dict[str, float]


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return os.cpu_count() or 1
    try:
        k = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}")
    return max(1, k)


@contextmanager
def _workers(threads: int):
    # BLAS stays single-threaded: its reductions then never depend on the
    # worker count, and raising OpenBLAS above the thread count it started
    # with can crash it. Parallelism comes from the per-view worker pool.
    with threadpool_limits(limits=1), \
            ThreadPoolExecutor(max_workers=threads) as pool:
        yield pool


def _map(pool, fn, items):
    if pool is None:
        return [fn(x) for x in items]
    return list(pool.map(fn, items))


def clamp_neighbors(k: int, n: int) -> int:
    return max(1, min(int(k), n - 1))


def objective(state: SolverState, dataset: MultiViewDataset,
              params: SolverParams):
    """Return ``(total, terms)`` for the current variables."""
    recon = graph_reg = l1 = 0.0
    for X, W, Z in zip(dataset.views, state.W, state.Z):
        if W.shape != Z.shape or W.shape[0] != X.shape[1]:
            raise ValueError("state does not match the dataset")
        recon += float(np.sum((X - X @ W) ** 2))
        graph_reg += params.alpha * float(np.sum((W - Z) ** 2))
        l1 += float(np.abs(W).sum())
    res = fusion.fusion_residuals(fusion.trans(state.Z), state.A, state.G)
    fus = params.lam * float(res.sum())
    spectral = 0.0
    if params.coupled:
        F = state.F.F
        spectral = params.eta * float(np.trace(F.T @ laplacian(state.G).L @ F))
    terms = {"recon": recon, "graph_reg": graph_reg, "l1": l1,
             "fusion": fus, "spectral": spectral}
    return sum(terms.values()), terms


def _embed(G, c):
    return spectral_embedding(laplacian(G), c)


def initialize(dataset: MultiViewDataset, params: SolverParams,
               pool=None) -> SolverState:
    n, t, c = dataset.n_samples, dataset.n_views, dataset.n_clusters
    if n < 2:
        raise ValueError("need at least 2 samples")
    k = clamp_neighbors(params.k_init, n)
    A = np.full((t, n), 1.0 / t)
    Z = _map(pool, lambda X: adaptive_neighbors_graph(X, k), dataset.views)
    W0 = init_w(n, params.seed)
    if params.joint_w:
        W = [W0.copy() for _ in range(t)]
    else:
        # W is solved once on its own and then frozen; Z starts from it
        iters = params.inner_iters * params.outer_iters
        W = _map(pool, lambda XZ: update_w(XZ[0], W0, XZ[1], params.alpha,
                                           iters, params.inner_tol),
                 list(zip(dataset.views, Z)))
        Z = fusion.postprocess_z(W)
    G = init_unified_graph(Z)
    if params.safeguard:
        # start from the closest graph with <= m neighbours and no self-loops
        # so that the monotone G update always has a feasible previous row
        G = sparse_project_rows(G, clamp_neighbors(params.m, n))
    state = SolverState(W, Z, G, A, _embed(G, c))
    state.initial_objective = objective(state, dataset, params)[0]
    return state


def step(state: SolverState, dataset: MultiViewDataset,
         params: SolverParams, pool=None) -> SolverState:
    """One outer iteration; returns a new state with the trace extended."""
    n, c = dataset.n_samples, dataset.n_clusters
    W = state.W
    if params.joint_w:
        W = _map(pool, lambda args: update_w(args[0], args[1], args[2],
                                             params.alpha, params.inner_iters,
                                             params.inner_tol),
                 list(zip(dataset.views, state.W, state.Z)))

    w_slices = fusion.trans(W)
    n_damped = n_fallback = 0
    if params.safeguard:
        Z, damped = fusion.update_z_monotone(w_slices, state.Z, state.A,
                                             state.G, params.alpha, params.lam)
        n_damped = int(damped.sum())
    else:
        z_raw = fusion.update_z_slices(w_slices, state.A, state.G,
                                       params.alpha, params.lam)
        Z = fusion.postprocess_z(fusion.trans_inverse(z_raw))
    z_slices = fusion.trans(Z)

    eta = params.eta_eff
    H = embedding_distances(state.F.F) if eta > 0 else np.zeros((n, n))
    m = clamp_neighbors(params.m, n)
    if params.safeguard:
        G, fallback, kept = update_g_monotone(state.G, state.A, z_slices, H,
                                              params.lam, eta, m)
        n_fallback = int(fallback.sum())
        if kept.any():
            log.debug("%d G rows kept", int(kept.sum()))
    else:
        G = update_g(state.A, z_slices, H, params.lam, eta, m)

    if params.variant == "graph_level":
        a, proj = fusion.update_a_graph_level(G, Z, params.ridge)
        A = np.repeat(a[:, None], n, axis=1)
        n_proj = int(proj)
    else:
        A, proj = fusion.update_a(z_slices, G, params.ridge)
        n_proj = int(proj.sum())

    F = _embed(G, c) if params.coupled else state.F

    new = SolverState(W, Z, G, A, F,
                      objective_trace=list(state.objective_trace),
                      term_trace=list(state.term_trace),
                      initial_objective=state.initial_objective,
                      projections=state.projections + n_proj,
                      g_fallbacks=state.g_fallbacks + n_fallback,
                      z_damped=state.z_damped + n_damped,
                      violations=state.violations)
    total, terms = objective(new, dataset, params)
    if not np.isfinite(total):
        raise SolverDivergence(
            f"objective became non-finite at iteration "
            f"{len(state.objective_trace) + 1}: {terms}")
    prev = (state.objective_trace[-1] if state.objective_trace
            else state.initial_objective)
    if total > prev + MONOTONE_RTOL * abs(prev):
        new.violations += 1
        log.warning("objective increased: %.12g -> %.12g", prev, total)
    new.objective_trace.append(total)
    new.term_trace.append(terms)
    return new


def run(dataset: MultiViewDataset, params: SolverParams,
        threads: Optional[int] = None) -> RunResult:
    threads = thread_count() if threads is None else max(1, int(threads))
    timing = {}
    t0 = time.perf_counter()
    if params.normalize:
        dataset = dataset.normalized()
    with _workers(threads) as pool:
        state = initialize(dataset, params, pool)
        timing["init"] = time.perf_counter() - t0
        converged = False
        for it in range(params.outer_iters):
            prev = (state.objective_trace[-1] if state.objective_trace
                    else state.initial_objective)
            state = step(state, dataset, params, pool)
            cur = state.objective_trace[-1]
            log.info("iter %d objective %.10g", it + 1, cur)
            if abs(prev - cur) <= params.tol * max(abs(prev), 1e-300):
                converged = True
                break
        timing["loop"] = time.perf_counter() - t0 - timing["init"]
        if not params.coupled:
            # graph learning and clustering run separately
            state.F = _embed(state.G, dataset.n_clusters)
        km = kmeans(state.F, dataset.n_clusters, params.seed, params.restarts)
    timing["total"] = time.perf_counter() - t0
    if state.projections:
        log.info("A closed form infeasible %d times (solved on simplex faces)",
                 state.projections)
    metrics = None
    if dataset.labels is not None:
        metrics = evaluate(km.labels, dataset.labels)
    return RunResult(km.labels, metrics, state, params,
                     len(state.objective_trace), converged, timing)


def params_dict(params: SolverParams) -> dict:
    return asdict(params)


def with_params(params: SolverParams, **changes) -> SolverParams:
    return replace(params, **changes)
