"""Deterministic synthetic generators and the fixed planets example.

All generators draw from PCG64 streams derived from a single 64-bit
seed via SeedSequence spawning, one stream per sampled component, so a
given (parameters, seed) pair reproduces bit-identically and adding a
component never perturbs the others. Generated clouds never contain
duplicate rows; colliding rows are redrawn.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .metric import PointCloud

#: Generator identity, recorded in output metadata: datasets reproduce
#: across implementations only if the bit generator matches.
RNG_ALGORITHM = "pcg64"

#: Absolute radial jitter applied to the circles dataset.
CIRCLE_JITTER = 0.01

#: Default parameters for the Gaussian blobs used by the stability runs.
DEFAULT_BLOB_CENTERS = ((0.0, 0.0), (6.0, 0.0), (3.0, 5.0))
DEFAULT_BLOB_SIGMA = 1.0

PLANET_NAMES = (
    "Mercury", "Venus", "Earth", "Mars", "Jupiter", "Saturn", "Uranus", "Neptune",
)

#: Columns: diameter (km), density (kg/m^3), surface gravity (m/s^2).
PLANET_TABLE = np.array([
    [4879.0, 5429.0, 3.7],
    [12104.0, 5243.0, 8.9],
    [12756.0, 5514.0, 9.8],
    [6792.0, 3934.0, 3.7],
    [142984.0, 1326.0, 23.1],
    [120536.0, 687.0, 9.0],
    [51118.0, 1270.0, 8.7],
    [49528.0, 1638.0, 11.0],
])

#: Columns: mass (10^24 kg), diameter (km), density (kg/m^3), from the
#: same planetary fact sheet as the table above.
PLANET_MASS_TABLE = np.array([
    [0.330, 4879.0, 5429.0],
    [4.87, 12104.0, 5243.0],
    [5.97, 12756.0, 5514.0],
    [0.642, 6792.0, 3934.0],
    [1898.0, 142984.0, 1326.0],
    [568.0, 120536.0, 687.0],
    [86.8, 51118.0, 1270.0],
    [102.0, 49528.0, 1638.0],
])

PLANET_VARIANTS = ("table", "mass")


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValidationError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _streams(seed: int, count: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(_check_seed(seed)).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def child_seed(seed: int, *key: int) -> int:
    """Derive a reproducible 64-bit child seed for a keyed sub-task."""
    ss = np.random.SeedSequence(_check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def _dedupe_rows(points: np.ndarray, redraw) -> np.ndarray:
    """Redraw rows until all rows are unique (exact equality).

    ``redraw(indices)`` must return replacement rows for those indices;
    earlier occurrences always survive.
    """
    for _ in range(100):
        _, first = np.unique(points, axis=0, return_index=True)
        if len(first) == len(points):
            return points
        keep = np.zeros(len(points), dtype=bool)
        keep[first] = True
        clashing = np.flatnonzero(~keep)
        points[clashing] = redraw(clashing)
    raise ValidationError("could not generate duplicate-free sample")


def swiss_roll(n: int, seed: int) -> tuple[PointCloud, PointCloud]:
    """3-D Swiss Roll sample plus its unrolled 2-D ground truth.

    u ~ U[1.5*pi, 4.5*pi] (roll parameter), v ~ U[0, 21] (height);
    rolled point (u*cos u, v, u*sin u), ground truth (u, v), row-aligned.
    """
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    rng_u, rng_v = _streams(seed, 2)
    u = rng_u.uniform(1.5 * np.pi, 4.5 * np.pi, n)
    v = rng_v.uniform(0.0, 21.0, n)
    uv = np.column_stack([u, v])

    def redraw(indices: np.ndarray) -> np.ndarray:
        return np.column_stack([
            rng_u.uniform(1.5 * np.pi, 4.5 * np.pi, len(indices)),
            rng_v.uniform(0.0, 21.0, len(indices)),
        ])

    uv = _dedupe_rows(uv, redraw)
    u, v = uv[:, 0], uv[:, 1]
    rolled = np.column_stack([u * np.cos(u), v, u * np.sin(u)])
    return PointCloud(rolled), PointCloud(uv)


def circles(n: int, seed: int) -> PointCloud:
    """Two concentric circles (radii 1 and 0.5) with bounded radial jitter."""
    if n < 2:
        raise ValidationError(f"need n >= 2, got {n}")
    rng_angle, rng_jitter = _streams(seed, 2)
    outer = n // 2
    radii = np.concatenate([np.full(outer, 1.0), np.full(n - outer, 0.5)])

    def draw(base_radii: np.ndarray) -> np.ndarray:
        angles = rng_angle.uniform(0.0, 2.0 * np.pi, len(base_radii))
        r = base_radii + rng_jitter.uniform(-CIRCLE_JITTER, CIRCLE_JITTER, len(base_radii))
        return np.column_stack([r * np.cos(angles), r * np.sin(angles)])

    points = draw(radii)

    def redraw(indices: np.ndarray) -> np.ndarray:
        return draw(radii[indices])

    return PointCloud(_dedupe_rows(points, redraw))


def gaussian_blobs(
    n: int,
    centers=DEFAULT_BLOB_CENTERS,
    sigma: float = DEFAULT_BLOB_SIGMA,
    seed: int = 0,
) -> PointCloud:
    """n points split as evenly as possible across isotropic Gaussians."""
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    if centers.shape[0] < 1:
        raise ValidationError("need at least one blob center")
    if sigma <= 0:
        raise ValidationError(f"sigma must be positive, got {sigma}")
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    k = centers.shape[0]
    counts = [n // k + (1 if i < n % k else 0) for i in range(k)]
    streams = _streams(seed, k)
    parts = []
    for center, count, rng in zip(centers, counts, streams):
        if count:
            parts.append(center + sigma * rng.standard_normal((count, centers.shape[1])))
    points = np.vstack(parts)
    blob_of_row = np.repeat(np.arange(k), counts)

    def redraw(indices: np.ndarray) -> np.ndarray:
        rows = streams[0].standard_normal((len(indices), centers.shape[1]))
        return centers[blob_of_row[indices]] + sigma * rows

    return PointCloud(_dedupe_rows(points, redraw))


def laplace_noise(pc: PointCloud, b: float, seed: int) -> PointCloud:
    """Add i.i.d. Laplace(0, b) noise to every coordinate (variance 2*b^2)."""
    if b <= 0:
        raise ValidationError(f"noise scale b must be positive, got {b}")
    streams = _streams(seed, pc.dim)
    noisy = pc.points.copy()
    for column, rng in enumerate(streams):
        noisy[:, column] += rng.laplace(0.0, b, pc.n)
    return PointCloud(noisy, ids=pc.ids)


def standard_scale(points: np.ndarray) -> np.ndarray:
    """Per-column standardization with the population standard deviation."""
    points = np.asarray(points, dtype=np.float64)
    std = points.std(axis=0)
    if np.any(std == 0):
        raise ValidationError("cannot standard-scale a constant column")
    return (points - points.mean(axis=0)) / std


def planets_dataset(variant: str = "table") -> PointCloud:
    """Standard-scaled measurements of the eight planets.

    ``table`` uses diameter/density/gravity; ``mass`` uses
    mass/diameter/density. The latter is the combination whose magnitude
    function reproduces the documented golden values.
    """
    if variant not in PLANET_VARIANTS:
        raise ValidationError(f"unknown planets variant {variant!r}; use one of {PLANET_VARIANTS}")
    raw = PLANET_TABLE if variant == "table" else PLANET_MASS_TABLE
    return PointCloud(standard_scale(raw), ids=PLANET_NAMES)
