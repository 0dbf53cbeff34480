"""Locating the scale at which the magnitude function approaches cardinality.

The convergence scale t_conv is the crossing of M(t) with the target
(1 - epsilon_prop) * n. It is bracketed by doubling (or halving) from
t = 1 and then pinned down by bisection: M(t) is expensive but extremely
well behaved in the convergent regime, so bisection's unconditional
convergence wins over fancier root finders.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateSpace, NoConvergence, NotPositiveDefinite, ValidationError
from .magnitude import _magnitude_only
from .metric import DistanceMatrix, ensure_magnitude_ready


@dataclass(frozen=True)
class ConvergenceSpec:
    """Parameters of the convergence-point search.

    epsilon_prop is the fraction of points allowed to remain "unresolved":
    the target magnitude is (1 - epsilon_prop) * n.
    """

    epsilon_prop: float = 0.05
    t_tolerance: float = 1e-6
    max_bracket_doublings: int = 64
    max_bisections: int = 200

    def __post_init__(self):
        if not 0 < self.epsilon_prop < 1:
            raise ValidationError(f"epsilon_prop must lie in (0,1), got {self.epsilon_prop}")
        if self.t_tolerance <= 0:
            raise ValidationError("t_tolerance must be positive")
        if self.max_bracket_doublings < 1 or self.max_bisections < 1:
            raise ValidationError("iteration budgets must be positive")


@dataclass(frozen=True)
class ConvergencePoint:
    t_conv: float
    achieved_magnitude: float
    evaluations_used: int


def find_convergence_scale(
    dm: DistanceMatrix,
    spec: ConvergenceSpec = ConvergenceSpec(),
    jitter: bool = False,
) -> ConvergencePoint:
    """Smallest probed scale t with M(t) >= (1 - epsilon_prop) * n.

    Probes t = 1 first (a scale-free anchor on diameter-normalized
    input), doubles until the target is met (or halves until it is not,
    when t = 1 already meets it), then bisects the bracket until its
    relative width drops below ``spec.t_tolerance``. Returns the upper
    bracket end, which is guaranteed to satisfy the target.
    """
    n = dm.n
    if n < 2:
        raise DegenerateSpace("convergence scale needs at least two points")
    ensure_magnitude_ready(dm)
    d = dm.d
    target = (1.0 - spec.epsilon_prop) * n
    if target <= 1.0:
        # magnitude only approaches 1 as t -> 0, so the crossing does not exist
        raise NoConvergence(
            f"target {target!r} is at or below the small-scale magnitude limit 1; "
            f"epsilon_prop={spec.epsilon_prop} is too large for n={n}"
        )
    evaluations = 0

    def mag(t: float) -> float:
        nonlocal evaluations
        evaluations += 1
        return _magnitude_only(d, t, jitter)

    t = 1.0
    value = mag(t)
    if value >= target:
        hi, f_hi = t, value
        lo = None
        for _ in range(spec.max_bracket_doublings):
            t /= 2.0
            try:
                value = mag(t)
            except NotPositiveDefinite as exc:
                # zeta collapsed to the singular all-ones matrix before the
                # magnitude dropped below the target
                raise NoConvergence(
                    f"no lower bracket below target {target!r}: similarity "
                    f"matrix degenerated at t={t!r}"
                ) from exc
            if value < target:
                lo = t
                break
            hi, f_hi = t, value
        if lo is None:
            raise NoConvergence(
                f"no lower bracket below target {target!r} after "
                f"{spec.max_bracket_doublings} halvings"
            )
    else:
        lo = t
        hi = None
        for _ in range(spec.max_bracket_doublings):
            t *= 2.0
            value = mag(t)
            if value >= target:
                hi, f_hi = t, value
                break
            lo = t
        if hi is None:
            raise NoConvergence(
                f"magnitude never reached target {target!r} after "
                f"{spec.max_bracket_doublings} doublings"
            )

    for _ in range(spec.max_bisections):
        if (hi - lo) / hi <= spec.t_tolerance:
            break
        mid = 0.5 * (lo + hi)
        value = mag(mid)
        if value >= target:
            hi, f_hi = mid, value
        else:
            lo = mid

    return ConvergencePoint(t_conv=hi, achieved_magnitude=f_hi, evaluations_used=evaluations)
