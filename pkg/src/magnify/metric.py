"""Point clouds, distance matrices, and their validation.

Every downstream computation consumes a ``DistanceMatrix``. Matrices
built by :func:`pairwise_distances` are symmetric by construction (the
upper triangle is computed once and mirrored); matrices supplied by the
user ("precomputed") are accepted as-is and must pass
:func:`validate_distance_matrix` before they reach any solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import DuplicatePoints, ValidationError, ZeroDiameter


class MetricKind(str, Enum):
    """Metrics for which the similarity matrix is provably invertible."""

    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"


def _as_float_matrix(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be a 2-D array, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class PointCloud:
    """An n x D matrix of finite real coordinates with optional row ids."""

    points: np.ndarray
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        pts = _as_float_matrix(self.points, "points")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValidationError(f"point cloud needs n >= 1 and D >= 1, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("point cloud contains non-finite coordinates")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.ids is not None:
            ids = tuple(str(i) for i in self.ids)
            if len(ids) != pts.shape[0]:
                raise ValidationError(f"got {len(ids)} ids for {pts.shape[0]} points")
            if len(set(ids)) != len(ids):
                raise ValidationError("point ids must be unique")
            object.__setattr__(self, "ids", ids)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class DistanceMatrix:
    """An n x n matrix of pairwise distances.

    Construction only checks the shape; content checks (symmetry,
    nonnegativity, zero diagonal, duplicates) are the job of
    :func:`validate_distance_matrix`, so that foreign matrices can be
    inspected and reported on rather than rejected blindly.
    """

    d: np.ndarray
    metric_tag: str = "precomputed"

    def __post_init__(self):
        d = _as_float_matrix(self.d, "distance matrix")
        if d.shape[0] != d.shape[1] or d.shape[0] < 1:
            raise ValidationError(f"distance matrix must be square, got shape {d.shape}")
        d = d.copy()
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def diameter(self) -> float:
        return float(self.d.max())

    def min_offdiag(self) -> float:
        """Smallest off-diagonal entry; used for scattered-regime bounds."""
        if self.n < 2:
            raise ValidationError("min_offdiag needs at least two points")
        masked = self.d + np.diag(np.full(self.n, np.inf))
        return float(masked.min())


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking a distance matrix against all invariants."""

    violations: tuple[tuple[str, str], ...] = field(default_factory=tuple)

    @property
    def magnitude_ready(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {kind for kind, _ in self.violations}

    def describe(self) -> str:
        if self.magnitude_ready:
            return "magnitude-ready"
        return "; ".join(f"{kind}: {detail}" for kind, detail in self.violations)


def pairwise_distances(pc: PointCloud, metric: MetricKind = MetricKind.EUCLIDEAN) -> DistanceMatrix:
    """Distance matrix of a point cloud under the chosen metric.

    The condensed upper triangle is computed once and mirrored, so the
    result is exactly symmetric with an exactly zero diagonal.
    """
    metric = MetricKind(metric)
    if pc.n == 1:
        return DistanceMatrix(np.zeros((1, 1)), metric_tag=metric.value)
    scipy_name = {MetricKind.EUCLIDEAN: "euclidean", MetricKind.MANHATTAN: "cityblock"}[metric]
    condensed = pdist(pc.points, metric=scipy_name)
    return DistanceMatrix(squareform(condensed), metric_tag=metric.value)


def validate_distance_matrix(dm: DistanceMatrix) -> ValidationReport:
    """Report every invariant violation; an empty report means magnitude-ready."""
    d = dm.d
    n = dm.n
    violations: list[tuple[str, str]] = []

    bad = ~np.isfinite(d)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        violations.append(("non_finite", f"entry ({i},{j}) is not finite"))
    else:
        asym = d != d.T
        if asym.any():
            i, j = np.argwhere(asym)[0]
            violations.append(("asymmetry", f"d({i},{j}) != d({j},{i})"))
        neg = d < 0
        if neg.any():
            i, j = np.argwhere(neg)[0]
            violations.append(("negative", f"entry ({i},{j}) = {d[i, j]} is negative"))
        diag = np.diagonal(d)
        if np.any(diag != 0):
            i = int(np.argwhere(diag != 0)[0][0])
            violations.append(("nonzero_diagonal", f"d({i},{i}) = {diag[i]} != 0"))
        dup = (d == 0) & ~np.eye(n, dtype=bool)
        if dup.any():
            pairs = [(int(i), int(j)) for i, j in np.argwhere(np.triu(dup, 1))]
            shown = ", ".join(f"({i},{j})" for i, j in pairs[:5])
            violations.append(("duplicate_points", f"zero distance between distinct points {shown}"))

    return ValidationReport(tuple(violations))


def ensure_magnitude_ready(dm: DistanceMatrix) -> None:
    """Raise ``ValidationError`` unless the matrix passes all checks."""
    report = validate_distance_matrix(dm)
    if report.magnitude_ready:
        return
    if report.kinds() == {"duplicate_points"}:
        dup = (dm.d == 0) & ~np.eye(dm.n, dtype=bool)
        pairs = [(int(i), int(j)) for i, j in np.argwhere(np.triu(dup, 1))]
        raise DuplicatePoints(pairs)
    raise ValidationError(f"distance matrix is not magnitude-ready ({report.describe()})")


@dataclass(frozen=True)
class DedupResult:
    """Deduplicated cloud plus the indices that were dropped."""

    cloud: PointCloud
    dropped: tuple[int, ...]


def deduplicate(pc: PointCloud) -> DedupResult:
    """Remove exact-duplicate rows, keeping the first occurrence.

    Equality is exact coordinate equality (no tolerance); survivor order
    is preserved. ``-0.0`` compares equal to ``0.0``.
    """
    seen: dict[bytes, int] = {}
    keep: list[int] = []
    dropped: list[int] = []
    normalized = pc.points + 0.0  # folds -0.0 into +0.0
    for i in range(pc.n):
        key = normalized[i].tobytes()
        if key in seen:
            dropped.append(i)
        else:
            seen[key] = i
            keep.append(i)
    if not dropped:
        return DedupResult(pc, ())
    ids = None if pc.ids is None else tuple(pc.ids[i] for i in keep)
    return DedupResult(PointCloud(pc.points[keep], ids=ids), tuple(dropped))


def normalize_by_diameter(dm: DistanceMatrix) -> DistanceMatrix:
    """Divide all distances by the largest one, making the diameter exactly 1."""
    if dm.n < 2:
        raise ValidationError("diameter normalization needs at least two points")
    diam = dm.diameter()
    if diam <= 0:
        raise ZeroDiameter("all pairwise distances are zero")
    return DistanceMatrix(dm.d / diam, metric_tag=dm.metric_tag)
