"""Classical embedding-quality measures used for comparison.

All five baselines operate on the two distance matrices (original space
and embedding), never on coordinates, so any metric or precomputed
input works. Rank computations break ties deterministically: average
ranks for the Spearman correlation, ascending point index for k-NN
membership.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, ValidationError
from .metric import DistanceMatrix

#: Normalization used by trustworthiness/continuity (Venna-Kaski variant).
TC_NORMALIZATION = "venna_kaski"


@dataclass(frozen=True)
class NeighborhoodSpec:
    k: int = 30

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError(f"neighborhood size must be >= 1, got {self.k}")

    def check_against(self, n: int) -> None:
        if self.k > n - 1:
            raise ValidationError(f"k={self.k} exceeds n-1={n - 1}")
        if 2 * n - 3 * self.k - 1 <= 0:
            raise ValidationError(
                f"k={self.k} is too large for the rank-based normalization at n={n}"
            )


@dataclass(frozen=True)
class QualityReport:
    """Named measure values plus every parameter that influenced them."""

    measures: dict[str, float] = field(default_factory=dict)
    params: dict[str, object] = field(default_factory=dict)


def _upper_triangle(dm: DistanceMatrix) -> np.ndarray:
    return dm.d[np.triu_indices(dm.n, k=1)]


def _check_same_n(dx: DistanceMatrix, dy: DistanceMatrix) -> int:
    if dx.n != dy.n:
        raise ValidationError(f"matrices must have equal size, got {dx.n} vs {dy.n}")
    return dx.n


def average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values receiving the average of their ranks."""
    values = np.asarray(values)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    sorted_values = values[order]
    boundaries = np.flatnonzero(np.diff(sorted_values) != 0) + 1
    start = 0
    for stop in list(boundaries) + [len(values)]:
        ranks[order[start:stop]] = 0.5 * (start + stop - 1) + 1.0
        start = stop
    return ranks


def spearman_distance_correlation(dx: DistanceMatrix, dy: DistanceMatrix) -> float:
    """Spearman rank correlation between the upper-triangle distances.

    Without ties this is the classical 1 - 6*sum(d^2)/(m(m^2-1)), which
    is exact (rank differences are integers); with ties it falls back to
    the Pearson correlation of the average ranks.
    """
    n = _check_same_n(dx, dy)
    if n < 3:
        raise ValidationError(f"Spearman correlation needs n >= 3, got {n}")
    ux, uy = _upper_triangle(dx), _upper_triangle(dy)
    if np.all(ux == ux[0]) or np.all(uy == uy[0]):
        raise DegenerateInput("constant distances carry no rank information")
    rx = average_ranks(ux)
    ry = average_ranks(uy)
    m = len(rx)
    no_ties = len(np.unique(ux)) == m and len(np.unique(uy)) == m
    if no_ties:
        squared = np.sum((rx - ry) ** 2)
        return float(1.0 - 6.0 * squared / (m * (m * m - 1.0)))
    rx -= rx.mean()
    ry -= ry.mean()
    return float((rx @ ry) / np.sqrt((rx @ rx) * (ry @ ry)))


def rmse_distances(dx: DistanceMatrix, dy: DistanceMatrix) -> float:
    """Root mean squared error between upper-triangle distances."""
    _check_same_n(dx, dy)
    ux, uy = _upper_triangle(dx), _upper_triangle(dy)
    return float(np.sqrt(np.mean((ux - uy) ** 2)))


def _neighbor_order(dm: DistanceMatrix) -> np.ndarray:
    """Row i: all other indices ordered by distance from i, ties by index."""
    n = dm.n
    order = np.argsort(dm.d, axis=1, kind="stable")
    out = np.empty((n, n - 1), dtype=np.intp)
    for i in range(n):
        row = order[i]
        out[i] = row[row != i]
    return out


def _rank_lookup(order: np.ndarray) -> np.ndarray:
    """rank[i, j] = 1-based position of j in i's neighbor order (self = 0)."""
    n = order.shape[0]
    ranks = np.zeros((n, n), dtype=np.intp)
    positions = np.arange(1, n)
    for i in range(n):
        ranks[i, order[i]] = positions
    return ranks


def trustworthiness(
    dx: DistanceMatrix, dy: DistanceMatrix, spec: NeighborhoodSpec = NeighborhoodSpec()
) -> float:
    """Penalty for embedding neighbors that are not original neighbors.

    1 - 2/(n*k*(2n-3k-1)) * sum over points i and intruders j of
    (rank_x(i,j) - k), where intruders are the embedding's k nearest
    neighbors of i that are not among the original's k nearest.
    """
    n = _check_same_n(dx, dy)
    spec.check_against(n)
    k = spec.k
    order_x = _neighbor_order(dx)
    order_y = _neighbor_order(dy)
    ranks_x = _rank_lookup(order_x)
    penalty = 0
    for i in range(n):
        knn_x = set(order_x[i, :k])
        for j in order_y[i, :k]:
            if j not in knn_x:
                penalty += ranks_x[i, j] - k
    return 1.0 - 2.0 * penalty / (n * k * (2 * n - 3 * k - 1))


def continuity(
    dx: DistanceMatrix, dy: DistanceMatrix, spec: NeighborhoodSpec = NeighborhoodSpec()
) -> float:
    """Dual of trustworthiness: original neighbors missing from the embedding."""
    return trustworthiness(dy, dx, spec)


def neighbourhood_loss(
    dx: DistanceMatrix, dy: DistanceMatrix, spec: NeighborhoodSpec = NeighborhoodSpec()
) -> float:
    """Mean fraction of each point's original k-NN absent from the embedding k-NN."""
    n = _check_same_n(dx, dy)
    if spec.k > n - 1:
        raise ValidationError(f"k={spec.k} exceeds n-1={n - 1}")
    k = spec.k
    order_x = _neighbor_order(dx)
    order_y = _neighbor_order(dy)
    retained = 0
    for i in range(n):
        retained += len(set(order_x[i, :k]) & set(order_y[i, :k]))
    return 1.0 - retained / (n * k)
