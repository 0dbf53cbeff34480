"""Re-scaled magnitude/weight profiles and the two dissimilarities.

A profile evaluates the magnitude function on the grid s_j = j/m,
j = 1..m, of fractions of the convergence scale t_conv. Working on the
re-scaled domain (0, 1] makes profiles of different spaces directly
comparable regardless of their metric scale.

The profile difference is the L1 distance on [0, 1] between the
cardinality-normalized profiles. The weight difference aggregates, over
the grid, the mean absolute deviation between aligned weight vectors.
For quadrature the s = 0 end is anchored analytically: the normalized
magnitude tends to 1/n there, while the weight deviation column is
carried over from the first grid column.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .convergence import ConvergencePoint, ConvergenceSpec, find_convergence_scale
from .errors import CardinalityMismatch, GridMismatch, ValidationError
from .magnitude import _cholesky_solve, _magnitude_only
from .metric import DistanceMatrix, ensure_magnitude_ready

#: Default number of grid steps, by cardinality.
GRID_SMALL = 64
GRID_LARGE = 32
GRID_SIZE_CUTOFF = 1000


class IntegrationMethod(str, Enum):
    """How grid values are aggregated into a single dissimilarity.

    ``RIEMANN_SUM`` keeps the plain-sum semantics of the defining
    formulas: for the profile difference it is the uniform-width (1/m)
    Riemann approximation of the integral; for the weight difference it
    is the bare sum over grid columns. ``TRAPEZOID`` and ``ROMBERG``
    integrate over [0, 1] instead, using the s = 0 anchor node.
    """

    RIEMANN_SUM = "riemann_sum"
    TRAPEZOID = "trapezoid"
    ROMBERG = "romberg"


@dataclass(frozen=True)
class EvaluationGrid:
    """The scale fractions s_j = j/m, j = 1..m; s_m is exactly 1."""

    m: int = GRID_SMALL

    def __post_init__(self):
        if self.m < 1:
            raise ValidationError(f"grid needs m >= 1 steps, got {self.m}")

    @property
    def s_values(self) -> np.ndarray:
        return np.arange(1, self.m + 1) / self.m


def default_grid(n: int) -> EvaluationGrid:
    """64 steps for spaces up to 1000 points, 32 above."""
    return EvaluationGrid(GRID_SMALL if n <= GRID_SIZE_CUTOFF else GRID_LARGE)


@dataclass(frozen=True)
class MagnitudeProfile:
    grid: EvaluationGrid
    values: np.ndarray
    t_conv: float
    n: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.grid.m,):
            raise ValidationError(
                f"profile needs {self.grid.m} values, got shape {values.shape}"
            )
        if not np.all(values > 0):
            raise ValidationError("profile values must be positive")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class WeightProfile:
    grid: EvaluationGrid
    weights: np.ndarray
    t_conv: float
    n: int
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.shape != (self.n, self.grid.m):
            raise ValidationError(
                f"weight profile needs shape ({self.n},{self.grid.m}), got {weights.shape}"
            )
        weights = weights.copy()
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)


def _require_normalized(dm: DistanceMatrix) -> None:
    if dm.n >= 2 and abs(dm.diameter() - 1.0) > 1e-9:
        raise ValidationError(
            f"profiles expect diameter-normalized distances (diameter 1), got {dm.diameter()!r}"
        )


def rescaled_profile(
    dm: DistanceMatrix,
    spec: ConvergenceSpec = ConvergenceSpec(),
    grid: EvaluationGrid | None = None,
    ids: tuple[str, ...] | None = None,
    jitter: bool = False,
    workers: int | None = None,
) -> tuple[MagnitudeProfile, WeightProfile]:
    """Magnitude and weight profiles on the grid {s_j * t_conv}."""
    ensure_magnitude_ready(dm)
    _require_normalized(dm)
    if grid is None:
        grid = default_grid(dm.n)
    conv = find_convergence_scale(dm, spec, jitter=jitter)
    scales = grid.s_values * conv.t_conv

    def solve_one(t: float):
        return _cholesky_solve(dm.d, t, jitter)

    if workers is not None and workers > 1 and grid.m > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            solved = list(pool.map(solve_one, scales))
    else:
        solved = [solve_one(t) for t in scales]

    values = np.array([m for m, _, _ in solved])
    weight_matrix = np.column_stack([w for _, w, _ in solved])
    mp = MagnitudeProfile(grid=grid, values=values, t_conv=conv.t_conv, n=dm.n)
    wp = WeightProfile(grid=grid, weights=weight_matrix, t_conv=conv.t_conv, n=dm.n, ids=ids)
    return mp, wp


def _rescaled_magnitude_values(
    dm: DistanceMatrix,
    spec: ConvergenceSpec,
    grid: EvaluationGrid,
    jitter: bool = False,
    conv: ConvergencePoint | None = None,
) -> MagnitudeProfile:
    """Magnitude-only profile; skips the weight back-substitutions."""
    ensure_magnitude_ready(dm)
    _require_normalized(dm)
    if conv is None:
        conv = find_convergence_scale(dm, spec, jitter=jitter)
    values = np.array([_magnitude_only(dm.d, s * conv.t_conv, jitter) for s in grid.s_values])
    return MagnitudeProfile(grid=grid, values=values, t_conv=conv.t_conv, n=dm.n)


def romberg_from_samples(y: np.ndarray, dx: float) -> float:
    """Romberg integration of uniformly spaced samples (2^k + 1 of them)."""
    y = np.asarray(y, dtype=np.float64)
    intervals = len(y) - 1
    if intervals < 1 or intervals & (intervals - 1):
        raise ValidationError(
            f"Romberg needs 2^k + 1 samples, got {len(y)}"
        )
    k = intervals.bit_length() - 1
    h = dx * intervals
    row = [0.5 * h * (y[0] + y[-1])]
    for i in range(1, k + 1):
        h /= 2.0
        stride = intervals >> i
        new_points = y[stride::2 * stride]
        trap = 0.5 * row[0] + h * new_points.sum()
        new_row = [trap]
        factor = 1.0
        for prev in row:
            factor *= 4.0
            new_row.append(new_row[-1] + (new_row[-1] - prev) / (factor - 1.0))
        row = new_row
    return float(row[-1])


def _check_grids(a, b) -> None:
    if a.grid != b.grid:
        raise GridMismatch(f"grids differ: m={a.grid.m} vs m={b.grid.m}")


def _integrate_curve(samples_with_anchor: np.ndarray, m: int, method: IntegrationMethod) -> float:
    """Integrate m+1 uniformly spaced nodes (anchor at s=0 first) over [0, 1]."""
    if method is IntegrationMethod.TRAPEZOID:
        return float(np.trapezoid(samples_with_anchor, dx=1.0 / m))
    if method is IntegrationMethod.ROMBERG:
        return romberg_from_samples(samples_with_anchor, 1.0 / m)
    raise ValidationError(f"unsupported integration method {method!r}")


def magnitude_profile_difference(
    px: MagnitudeProfile,
    py: MagnitudeProfile,
    method: IntegrationMethod = IntegrationMethod.TRAPEZOID,
) -> float:
    """L1 distance on [0, 1] between cardinality-normalized profiles.

    Cardinalities may differ; the grids must match. At s = 0 the
    normalized magnitude of any space tends to 1/n, so the quadrature
    anchor there is |1/n_x - 1/n_y|.
    """
    method = IntegrationMethod(method)
    _check_grids(px, py)
    integrand = np.abs(px.values / px.n - py.values / py.n)
    if method is IntegrationMethod.RIEMANN_SUM:
        return float(integrand.sum() / px.grid.m)
    anchor = abs(1.0 / px.n - 1.0 / py.n)
    nodes = np.concatenate([[anchor], integrand])
    return _integrate_curve(nodes, px.grid.m, method)


def _weight_deviation_columns(wx: WeightProfile, wy: WeightProfile) -> np.ndarray:
    if wx.n != wy.n:
        raise CardinalityMismatch(
            f"weight difference needs aligned spaces of equal size, got {wx.n} vs {wy.n}"
        )
    _check_grids(wx, wy)
    return np.abs(wx.weights - wy.weights)


def magnitude_weight_difference(
    wx: WeightProfile,
    wy: WeightProfile,
    method: IntegrationMethod = IntegrationMethod.TRAPEZOID,
) -> float:
    """Aggregated mean absolute deviation between aligned weight profiles.

    Point k of one space must correspond to point k of the other. With
    ``RIEMANN_SUM`` this is the bare sum over grid columns of the
    per-column mean deviation; the quadrature methods integrate the same
    curve over [0, 1], anchoring s = 0 with the first column.
    """
    method = IntegrationMethod(method)
    per_scale = _weight_deviation_columns(wx, wy).mean(axis=0)
    if method is IntegrationMethod.RIEMANN_SUM:
        return float(per_scale.sum())
    nodes = np.concatenate([[per_scale[0]], per_scale])
    return _integrate_curve(nodes, wx.grid.m, method)


def per_point_weight_deviation(
    wx: WeightProfile,
    wy: WeightProfile,
    method: IntegrationMethod = IntegrationMethod.TRAPEZOID,
) -> np.ndarray:
    """Per-point aggregation of |W_X - W_Y| over the grid.

    Uses the same aggregation mode as :func:`magnitude_weight_difference`,
    so the mean over points equals the scalar weight difference.
    """
    method = IntegrationMethod(method)
    deviations = _weight_deviation_columns(wx, wy)
    if method is IntegrationMethod.RIEMANN_SUM:
        return deviations.sum(axis=1)
    m = wx.grid.m
    nodes = np.hstack([deviations[:, :1], deviations])
    if method is IntegrationMethod.TRAPEZOID:
        return np.trapezoid(nodes, dx=1.0 / m, axis=1)
    return np.array([romberg_from_samples(row, 1.0 / m) for row in nodes])
