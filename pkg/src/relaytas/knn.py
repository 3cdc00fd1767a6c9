"""Brute-force k-nearest-neighbors baseline over normalized features.

Lazy learner: fit stores the points verbatim.  Prediction is a majority
vote among the k nearest points by Euclidean distance (compared on squared
distances).  Distance ties go to the lower point index; vote ties go to
the smallest label.  No tree acceleration: dimensionality is tiny.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class KnnModel:
    points: np.ndarray  # (n, width)
    labels: np.ndarray  # (n,) 1-based
    k: int


def knn_fit(points, labels, k=5):
    points = np.asarray(points, dtype=float)
    labels = np.asarray(labels, dtype=np.int64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError("need a non-empty (n, width) point matrix")
    if labels.shape != (points.shape[0],):
        raise ValueError("labels must match points one to one")
    if not 1 <= k <= points.shape[0]:
        raise ValueError(f"k={k} outside 1..{points.shape[0]}")
    return KnnModel(points=points.copy(), labels=labels.copy(), k=int(k))


def _nearest(dist_sq, k):
    # exact k-nearest with ties at the boundary resolved by lower index
    n = dist_sq.shape[0]
    if k >= n:
        return np.arange(n)
    part = np.argpartition(dist_sq, k - 1)[:k]
    tau = dist_sq[part].max()
    closer = np.flatnonzero(dist_sq < tau)
    at_tau = np.flatnonzero(dist_sq == tau)
    return np.concatenate([closer, at_tau[: k - closer.size]])


def _vote(labels_k):
    counts = np.bincount(labels_k)
    return int(counts.argmax())  # first maximum = smallest label


def knn_predict(model, t):
    """Label of a single query vector."""
    t = np.asarray(t, dtype=float)
    if t.shape != (model.points.shape[1],):
        raise ValueError(
            f"query width {t.shape} != model width ({model.points.shape[1]},)"
        )
    dist_sq = ((model.points - t) ** 2).sum(axis=1)
    return _vote(model.labels[_nearest(dist_sq, model.k)])


def knn_predict_batch(model, queries, chunk=512):
    """Labels for a (m, width) query matrix.

    Distances per chunk via the ||a||^2 + ||b||^2 - 2ab expansion; same
    neighbor rule as :func:`knn_predict`.
    """
    queries = np.asarray(queries, dtype=float)
    out = np.empty(queries.shape[0], dtype=np.int64)
    point_sq = (model.points**2).sum(axis=1)
    for start in range(0, queries.shape[0], chunk):
        q = queries[start : start + chunk]
        d2 = (q**2).sum(axis=1)[:, None] + point_sq[None, :] - 2.0 * (q @ model.points.T)
        np.maximum(d2, 0.0, out=d2)
        for j in range(q.shape[0]):
            out[start + j] = _vote(model.labels[_nearest(d2[j], model.k)])
    return out
