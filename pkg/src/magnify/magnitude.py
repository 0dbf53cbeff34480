"""Magnitude and magnitude weights via symmetric positive definite solves.

The similarity matrix zeta = exp(-t * d) of a space with a negative
definite metric is symmetric positive definite, so the weight system
zeta @ w = 1 is solved through a Cholesky factorization zeta = L L^T:
a forward substitution gives y = L^-1 1 (and the magnitude as ||y||^2),
a back substitution gives the weight vector. Both the norm path and the
weight-sum path yield the magnitude and must agree; the solver checks
this on every call.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import InvalidScale, NotPositiveDefinite, NumericalError, SingularMatrix, ValidationError
from .metric import DistanceMatrix, ensure_magnitude_ready

#: Relative disagreement allowed between the two magnitude computations.
PATH_AGREEMENT_RTOL = 1e-10

#: Diagonal shift used by the opt-in jitter retry, scaled by n (trace of zeta).
JITTER_PER_POINT = 1e-12

SOLVER_CHOLESKY = "cholesky"
SOLVER_CHOLESKY_JITTERED = "cholesky_jittered"


def _check_scale(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t <= 0:
        raise InvalidScale(f"scale must be finite and > 0, got {t}")
    return t


@dataclass(frozen=True)
class SimilarityMatrix:
    """Entrywise exponential of the negated, scaled distance matrix."""

    zeta: np.ndarray
    scale_t: float

    def __post_init__(self):
        self.zeta.setflags(write=False)


@dataclass(frozen=True)
class MagnitudeResult:
    magnitude: float
    weights: np.ndarray
    scale_t: float
    solver_note: str = SOLVER_CHOLESKY

    def __post_init__(self):
        self.weights.setflags(write=False)


def similarity_matrix(dm: DistanceMatrix, t: float) -> SimilarityMatrix:
    """zeta(i,j) = exp(-t * d(i,j)); the diagonal is exactly 1."""
    t = _check_scale(t)
    ensure_magnitude_ready(dm)
    return SimilarityMatrix(np.exp(-t * dm.d), scale_t=t)


def _cholesky_solve(d: np.ndarray, t: float, jitter: bool) -> tuple[float, np.ndarray, str]:
    """Solve zeta w = 1 at scale t. Returns (magnitude, weights, solver note).

    The exponential is always re-evaluated as exp(-t * d); powers of a
    cached exp(-d) would compound rounding across scales.
    """
    n = d.shape[0]
    ones = np.ones(n)
    zeta = np.exp(-t * d)
    note = SOLVER_CHOLESKY
    try:
        lower = sla.cholesky(zeta, lower=True, overwrite_a=True, check_finite=False)
    except sla.LinAlgError:
        if not jitter:
            raise NotPositiveDefinite(
                f"Cholesky factorization failed at scale t={t!r}; "
                "the metric may not be negative definite"
            ) from None
        zeta = np.exp(-t * d)
        zeta[np.diag_indices(n)] += JITTER_PER_POINT * n
        try:
            lower = sla.cholesky(zeta, lower=True, overwrite_a=True, check_finite=False)
        except sla.LinAlgError:
            raise NotPositiveDefinite(
                f"Cholesky factorization failed at scale t={t!r} even after jitter"
            ) from None
        note = SOLVER_CHOLESKY_JITTERED
    y = sla.solve_triangular(lower, ones, lower=True, check_finite=False)
    weights = sla.solve_triangular(lower, y, lower=True, trans="T", check_finite=False)
    magnitude = float(y @ y)
    weight_sum = float(weights.sum())
    if abs(weight_sum - magnitude) > PATH_AGREEMENT_RTOL * abs(magnitude):
        raise NumericalError(
            f"norm path ({magnitude!r}) and weight-sum path ({weight_sum!r}) "
            f"disagree at scale t={t!r}; the system is too ill-conditioned"
        )
    return magnitude, weights, note


def _magnitude_only(d: np.ndarray, t: float, jitter: bool) -> float:
    """Magnitude at one scale. The weight vector is still computed (the
    back-substitution is O(n^2) against the O(n^3) factorization) so the
    weight-sum self-check runs on every solve."""
    magnitude, _, _ = _cholesky_solve(d, t, jitter)
    return magnitude


def magnitude_and_weights(dm: DistanceMatrix, t: float, jitter: bool = False) -> MagnitudeResult:
    """Magnitude and weight vector of the space with distances scaled by t."""
    t = _check_scale(t)
    ensure_magnitude_ready(dm)
    magnitude, weights, note = _cholesky_solve(dm.d, t, jitter)
    return MagnitudeResult(magnitude=magnitude, weights=weights, scale_t=t, solver_note=note)


def magnitude_function(
    dm: DistanceMatrix,
    ts,
    jitter: bool = False,
    workers: int | None = None,
) -> list[MagnitudeResult]:
    """Evaluate the magnitude function at every scale in ``ts``.

    Scales are independent; with ``workers > 1`` they are evaluated on a
    thread pool (the factorizations release the GIL). Output order always
    matches the input order and per-scale results do not depend on the
    schedule.
    """
    ts = [_check_scale(t) for t in ts]
    if not ts:
        raise ValidationError("ts must contain at least one scale")
    ensure_magnitude_ready(dm)

    def solve_one(t: float) -> MagnitudeResult:
        try:
            magnitude, weights, note = _cholesky_solve(dm.d, t, jitter)
        except NumericalError as exc:
            raise type(exc)(f"{exc} (while evaluating scale t={t!r})") from exc
        return MagnitudeResult(magnitude=magnitude, weights=weights, scale_t=t, solver_note=note)

    if workers is not None and workers > 1 and len(ts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(solve_one, ts))
    return [solve_one(t) for t in ts]


def magnitude_naive_oracle(dm: DistanceMatrix, t: float) -> MagnitudeResult:
    """Reference computation: invert zeta outright and sum all entries.

    Exists purely as a cross-check for the Cholesky path, hence the small
    size guard. Uses hand-rolled Gauss-Jordan elimination with partial
    pivoting so it shares no code with the production solver.
    """
    t = _check_scale(t)
    ensure_magnitude_ready(dm)
    n = dm.n
    if n > 64:
        raise ValidationError(f"naive oracle is capped at n <= 64, got n = {n}")
    zeta = np.exp(-t * dm.d)
    aug = np.hstack([zeta, np.eye(n)])
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(aug[col:, col])))
        pivot = aug[pivot_row, col]
        if abs(pivot) < 1e-300:
            raise SingularMatrix(f"similarity matrix is singular at scale t={t!r}")
        if pivot_row != col:
            aug[[col, pivot_row]] = aug[[pivot_row, col]]
        aug[col] /= aug[col, col]
        for row in range(n):
            if row != col and aug[row, col] != 0.0:
                aug[row] -= aug[row, col] * aug[col]
    inverse = aug[:, n:]
    weights = inverse.sum(axis=1)
    return MagnitudeResult(
        magnitude=float(weights.sum()), weights=weights, scale_t=t, solver_note="naive_inverse"
    )
