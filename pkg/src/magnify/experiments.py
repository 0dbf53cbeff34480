"""Desk-scale reproductions of the stability and ranking studies.

``stability_experiment`` measures how much the magnitude profile of a
synthetic dataset moves when Laplace noise is injected into the
coordinates (noise first, then distance computation and diameter
normalization). ``ranking_experiment`` scores a set of aligned
embeddings of one original space and orders them by magnitude weight
difference.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import baselines
from .baselines import NeighborhoodSpec, QualityReport
from .convergence import ConvergenceSpec
from .datasets import (
    DEFAULT_BLOB_CENTERS,
    DEFAULT_BLOB_SIGMA,
    child_seed,
    circles,
    gaussian_blobs,
    laplace_noise,
    swiss_roll,
)
from .errors import CardinalityMismatch, ValidationError
from .metric import MetricKind, PointCloud, normalize_by_diameter, pairwise_distances
from .profiles import (
    EvaluationGrid,
    IntegrationMethod,
    default_grid,
    magnitude_profile_difference,
    magnitude_weight_difference,
    _rescaled_magnitude_values,
    rescaled_profile,
)

STABILITY_DATASETS = ("circles", "swiss_roll", "gaussian_blobs")

DEFAULT_NOISE_LEVELS = (1e-4, 1e-3, 5e-3, 1e-2, 5e-2)
DEFAULT_SAMPLE_SIZES = (100, 500, 1000, 2000)


def _generate(dataset: str, n: int, seed: int) -> PointCloud:
    if dataset == "circles":
        return circles(n, seed)
    if dataset == "swiss_roll":
        return swiss_roll(n, seed)[0]
    if dataset == "gaussian_blobs":
        return gaussian_blobs(n, DEFAULT_BLOB_CENTERS, DEFAULT_BLOB_SIGMA, seed)
    raise ValidationError(f"unknown dataset {dataset!r}; use one of {STABILITY_DATASETS}")


@dataclass(frozen=True)
class StabilityCell:
    """Aggregated profile differences for one (dataset, n, b) setting."""

    dataset: str
    n: int
    b: float
    repetitions: int
    mean_profile_diff: float
    std_profile_diff: float
    values: tuple[float, ...]


@dataclass(frozen=True)
class StabilityResult:
    rows: tuple[StabilityCell, ...]
    seed: int
    epsilon_prop: float
    integration: IntegrationMethod

    def cell(self, dataset: str, n: int, b: float) -> StabilityCell:
        for row in self.rows:
            if row.dataset == dataset and row.n == n and row.b == b:
                return row
        raise KeyError((dataset, n, b))


def stability_experiment(
    dataset: str,
    ns,
    bs,
    reps: int,
    seed: int,
    spec: ConvergenceSpec = ConvergenceSpec(),
    integration: IntegrationMethod = IntegrationMethod.TRAPEZOID,
    metric: MetricKind = MetricKind.EUCLIDEAN,
    workers: int | None = None,
) -> StabilityResult:
    """Mean/std of the clean-vs-noisy profile difference per (n, b).

    Each repetition draws a fresh cloud; its clean profile is computed
    once and compared against one noisy profile per noise level. Data
    and noise seeds are derived from (seed, n-index, rep) and
    (seed, n-index, b-index, rep), so every cell is reproducible in
    isolation and the schedule cannot change results.
    """
    ns = [int(n) for n in ns]
    bs = [float(b) for b in bs]
    if reps < 1:
        raise ValidationError(f"need reps >= 1, got {reps}")
    if dataset not in STABILITY_DATASETS:
        raise ValidationError(f"unknown dataset {dataset!r}; use one of {STABILITY_DATASETS}")

    def run_one(ni: int, rep: int) -> list[float]:
        n = ns[ni]
        grid = default_grid(n)
        cloud = _generate(dataset, n, child_seed(seed, ni, rep))
        clean_dm = normalize_by_diameter(pairwise_distances(cloud, metric))
        clean = _rescaled_magnitude_values(clean_dm, spec, grid)
        diffs = []
        for bi, b in enumerate(bs):
            noisy_cloud = laplace_noise(cloud, b, child_seed(seed, ni, bi, rep))
            noisy_dm = normalize_by_diameter(pairwise_distances(noisy_cloud, metric))
            noisy = _rescaled_magnitude_values(noisy_dm, spec, grid)
            diffs.append(magnitude_profile_difference(clean, noisy, integration))
        return diffs

    tasks = [(ni, rep) for ni in range(len(ns)) for rep in range(reps)]
    if workers is not None and workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda task: run_one(*task), tasks))
    else:
        outcomes = [run_one(*task) for task in tasks]

    by_cell: dict[tuple[int, int], list[float]] = {}
    for (ni, _rep), diffs in zip(tasks, outcomes):
        for bi, value in enumerate(diffs):
            by_cell.setdefault((ni, bi), []).append(value)

    rows = []
    for ni, n in enumerate(ns):
        for bi, b in enumerate(bs):
            values = by_cell[(ni, bi)]
            rows.append(
                StabilityCell(
                    dataset=dataset,
                    n=n,
                    b=b,
                    repetitions=reps,
                    mean_profile_diff=float(np.mean(values)),
                    std_profile_diff=float(np.std(values)),
                    values=tuple(values),
                )
            )
    return StabilityResult(
        rows=tuple(rows), seed=seed, epsilon_prop=spec.epsilon_prop, integration=integration
    )


@dataclass(frozen=True)
class RankingConfig:
    """Knobs of the embedding comparison, echoed into every report."""

    epsilon_prop: float = 0.05
    grid: EvaluationGrid | None = None
    integration: IntegrationMethod = IntegrationMethod.TRAPEZOID
    k: int = 30
    metric: MetricKind = MetricKind.EUCLIDEAN
    jitter: bool = False
    workers: int | None = None
    extra_params: dict = field(default_factory=dict)


def ranking_experiment(
    original: PointCloud,
    embeddings: dict[str, PointCloud],
    config: RankingConfig = RankingConfig(),
    profiles_out: dict | None = None,
) -> list[QualityReport]:
    """Score every aligned embedding and order them by weight difference.

    Magnitude measures run on diameter-normalized distances; the
    distance correlation, RMSE and neighborhood measures run on the raw
    distance matrices of each space. When ``profiles_out`` is a dict it
    is filled with the magnitude profiles (original under
    ``"__original__"``) for plotting.
    """
    if not embeddings:
        raise ValidationError("need at least one embedding to rank")
    mismatched = [name for name, pc in embeddings.items() if pc.n != original.n]
    if mismatched:
        raise CardinalityMismatch(
            f"embeddings not aligned with the original ({original.n} rows): "
            + ", ".join(f"{name} has {embeddings[name].n}" for name in mismatched)
        )

    spec = ConvergenceSpec(epsilon_prop=config.epsilon_prop)
    grid = config.grid if config.grid is not None else default_grid(original.n)
    nspec = NeighborhoodSpec(config.k)

    dm_orig = pairwise_distances(original, config.metric)
    norm_orig = normalize_by_diameter(dm_orig)
    profile_orig, weights_orig = rescaled_profile(
        norm_orig, spec, grid, ids=original.ids, jitter=config.jitter, workers=config.workers
    )
    if profiles_out is not None:
        profiles_out["__original__"] = profile_orig

    reports = []
    for name, cloud in embeddings.items():
        dm_emb = pairwise_distances(cloud, config.metric)
        norm_emb = normalize_by_diameter(dm_emb)
        profile_emb, weights_emb = rescaled_profile(
            norm_emb, spec, grid, ids=cloud.ids, jitter=config.jitter, workers=config.workers
        )
        if profiles_out is not None:
            profiles_out[name] = profile_emb
        measures = {
            "magnitude_weight_diff": magnitude_weight_difference(
                weights_orig, weights_emb, config.integration
            ),
            "magnitude_profile_diff": magnitude_profile_difference(
                profile_orig, profile_emb, config.integration
            ),
            "spearman_distance_correlation": baselines.spearman_distance_correlation(
                dm_orig, dm_emb
            ),
            "rmse_distances": baselines.rmse_distances(dm_orig, dm_emb),
            "trustworthiness": baselines.trustworthiness(dm_orig, dm_emb, nspec),
            "continuity": baselines.continuity(dm_orig, dm_emb, nspec),
            "neighbourhood_loss": baselines.neighbourhood_loss(dm_orig, dm_emb, nspec),
        }
        params = {
            "embedding": name,
            "n": original.n,
            "epsilon_prop": config.epsilon_prop,
            "grid_m": grid.m,
            "integration": config.integration.value,
            "k": config.k,
            "metric": MetricKind(config.metric).value,
            "tc_normalization": baselines.TC_NORMALIZATION,
            **config.extra_params,
        }
        reports.append(QualityReport(measures=measures, params=params))

    reports.sort(key=lambda r: r.measures["magnitude_weight_diff"])
    return reports
