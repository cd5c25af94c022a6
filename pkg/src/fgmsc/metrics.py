"""Clustering accuracy (Hungarian matching), NMI and ARI."""

import numpy as np
from scipy.optimize import linear_sum_assignment
from sklearn.metrics import adjusted_rand_score, normalized_mutual_info_score

# recorded in run metadata
NMI_NORMALIZATION = "max"


def _pair(pred, truth):
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise ValueError(f"label lengths differ: {pred.size} vs {truth.size}")
    return pred, truth


def acc(pred, truth) -> float:
    pred, truth = _pair(pred, truth)
    if pred.size == 0:
        return 1.0
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    table = np.zeros((p.max() + 1, t.max() + 1), dtype=np.int64)
    np.add.at(table, (p, t), 1)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum() / pred.size)


def nmi(pred, truth) -> float:
    pred, truth = _pair(pred, truth)
    return float(normalized_mutual_info_score(truth, pred,
                                              average_method=NMI_NORMALIZATION))


def ari(pred, truth) -> float:
    pred, truth = _pair(pred, truth)
    return float(adjusted_rand_score(truth, pred))


def evaluate(pred, truth) -> dict:
    return {"acc": acc(pred, truth), "nmi": nmi(pred, truth),
            "ari": ari(pred, truth)}
