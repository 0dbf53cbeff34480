"""Command-line interface: ``magnify compute|compare|stability|gen``.

Configuration precedence is flag > config file (``--config``) > default.
Every output file embeds the effective configuration; feeding a file's
embedded block back through ``--config`` reproduces the run byte for
byte (given the same seed). Exit codes: 0 success, 2 input/validation
error, 3 numerical failure, 4 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import io as mio
from . import plotting
from .convergence import ConvergenceSpec
from .datasets import (
    RNG_ALGORITHM,
    circles,
    gaussian_blobs,
    planets_dataset,
    swiss_roll,
)
from .errors import MagnifyError, NumericalError, ValidationError
from .experiments import (
    DEFAULT_NOISE_LEVELS,
    DEFAULT_SAMPLE_SIZES,
    STABILITY_DATASETS,
    RankingConfig,
    ranking_experiment,
    stability_experiment,
)
from .magnitude import magnitude_function
from .metric import (
    DistanceMatrix,
    MetricKind,
    PointCloud,
    deduplicate,
    ensure_magnitude_ready,
    normalize_by_diameter,
    pairwise_distances,
)
from .profiles import EvaluationGrid, default_grid, rescaled_profile

GEN_DATASETS = ("circles", "swiss_roll", "gaussian_blobs", "planets", "planets_mass")


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--metric", choices=[m.value for m in MetricKind], default=None)
    parser.add_argument("--epsilon", type=float, default=None,
                        help="convergence target fraction (default 0.05)")
    parser.add_argument("--grid", default=None,
                        help="grid steps m, or 'auto' (64 up to n=1000, then 32)")
    parser.add_argument("--integration", default=None,
                        choices=["riemann_sum", "trapezoid", "romberg"])
    parser.add_argument("--k", type=int, default=None, help="neighborhood size (default 30)")
    parser.add_argument("--dedup", action="store_const", const=True, default=None,
                        help="drop exact-duplicate rows before computing")
    parser.add_argument("--jitter", action="store_const", const=True, default=None,
                        help="retry a failed factorization once with a tiny diagonal shift")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None,
                        help="cap on worker threads (default: all cores)")
    parser.add_argument("--config", default=None, metavar="FILE",
                        help="key=value file supplying defaults for the flags above")
    parser.add_argument("--out", default=".", metavar="DIR")
    parser.add_argument("--no-plot", action="store_true", help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magnify",
        description="Magnitude functions of finite metric spaces and "
                    "magnitude-based embedding quality measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser("compute", help="magnitude profile of one space")
    p_compute.add_argument("input", help="point-cloud CSV, or a distance matrix "
                                         "with --precomputed (.csv or .bin)")
    p_compute.add_argument("--precomputed", action="store_true",
                           help="input is a distance matrix, not coordinates")
    p_compute.add_argument("--scales", default=None,
                           help="comma-separated absolute scales; evaluates the "
                                "magnitude function instead of the profile")
    p_compute.add_argument("--weights", action="store_true",
                           help="also write the weight profile")
    _add_common_options(p_compute)

    p_compare = sub.add_parser("compare", help="rank embeddings against an original space")
    p_compare.add_argument("original")
    p_compare.add_argument("embeddings", nargs="+")
    _add_common_options(p_compare)

    p_stab = sub.add_parser("stability", help="profile difference under coordinate noise")
    p_stab.add_argument("--dataset", default="all",
                        choices=list(STABILITY_DATASETS) + ["all"])
    p_stab.add_argument("--ns", default=None, help="comma-separated sample sizes")
    p_stab.add_argument("--bs", default=None, help="comma-separated noise scales")
    p_stab.add_argument("--reps", type=int, default=None)
    _add_common_options(p_stab)

    p_gen = sub.add_parser("gen", help="write a synthetic dataset as CSV")
    p_gen.add_argument("dataset", choices=list(GEN_DATASETS))
    p_gen.add_argument("--n", type=int, default=None)
    p_gen.add_argument("--sigma", type=float, default=None, help="blob spread")
    _add_common_options(p_gen)

    return parser


def _effective_config(args) -> tuple[mio.RunConfig, dict[str, str]]:
    if args.config:
        cfg, extras = mio.load_config_file(args.config)
    else:
        cfg, extras = mio.RunConfig(), {}
    overrides = {}
    if args.metric is not None:
        overrides["metric"] = MetricKind(args.metric)
    if args.epsilon is not None:
        overrides["epsilon_prop"] = args.epsilon
    if args.grid is not None:
        if args.grid == "auto":
            overrides["grid_m"] = None
        else:
            try:
                overrides["grid_m"] = int(args.grid)
            except ValueError as exc:
                raise ValidationError(f"bad --grid value {args.grid!r}") from exc
    if args.integration is not None:
        overrides["integration"] = args.integration
    if args.k is not None:
        overrides["k"] = args.k
    if args.dedup is not None:
        overrides["dedup"] = args.dedup
    if args.jitter is not None:
        overrides["jitter"] = args.jitter
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.threads is not None:
        overrides["threads"] = args.threads
    elif not args.config or "threads" not in _raw_config_keys(args.config):
        overrides["threads"] = os.cpu_count() or 1
    return replace(cfg, **overrides), extras


def _raw_config_keys(path) -> set[str]:
    keys = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#") and "=" in line:
            keys.add(line.partition("=")[0].strip())
    return keys


def _extra_or(extras: dict[str, str], key: str, flag_value, fallback):
    if flag_value is not None:
        return flag_value
    if key in extras:
        return extras[key]
    return fallback


def _parse_float_list(text: str, what: str) -> list[float]:
    try:
        values = [float(part) for part in str(text).split(",") if part.strip() != ""]
    except ValueError as exc:
        raise ValidationError(f"bad {what} list {text!r}: {exc}") from exc
    if not values:
        raise ValidationError(f"empty {what} list")
    return values


def _parse_int_list(text: str, what: str) -> list[int]:
    return [int(v) for v in _parse_float_list(text, what)]


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _grid_for(cfg: mio.RunConfig, n: int) -> EvaluationGrid:
    return default_grid(n) if cfg.grid_m is None else EvaluationGrid(cfg.grid_m)


def _load_input_cloud(path, cfg) -> tuple[PointCloud, list[int]]:
    pc = mio.load_point_cloud_csv(path)
    dropped: list[int] = []
    if cfg.dedup:
        result = deduplicate(pc)
        pc, dropped = result.cloud, list(result.dropped)
    return pc, dropped


def cmd_compute(args) -> int:
    cfg, extras = _effective_config(args)
    out = _out_dir(args)
    scales_text = _extra_or(extras, "scales", args.scales, None)
    dropped: list[int] = []

    if args.precomputed:
        if cfg.dedup:
            raise ValidationError("--dedup needs point-cloud input, not a distance matrix")
        path = Path(args.input)
        matrix = mio.read_matrix_bin(path) if path.suffix == ".bin" \
            else mio.load_square_matrix_csv(path)
        dm = DistanceMatrix(matrix, metric_tag="precomputed")
        ids = None
    else:
        pc, dropped = _load_input_cloud(args.input, cfg)
        dm = pairwise_distances(pc, cfg.metric)
        ids = pc.ids

    ensure_magnitude_ready(dm)
    norm = normalize_by_diameter(dm)
    extra = {"command": "compute", "input": str(args.input)}
    if dropped:
        extra["dropped_rows"] = ",".join(str(i) for i in dropped)

    if scales_text:
        scales = _parse_float_list(scales_text, "scales")
        extra["scales"] = ",".join(mio.fmt17(s) for s in scales)
        results = magnitude_function(norm, scales, jitter=cfg.jitter, workers=cfg.threads)
        mio.write_magnitude_function_csv(out / "magnitudes.csv", results, cfg, extra)
        mio.write_json(out / "summary.json", {
            "n": dm.n,
            "scales": [r.scale_t for r in results],
            "magnitudes": [r.magnitude for r in results],
            "solver_notes": [r.solver_note for r in results],
            "dropped_rows": dropped,
        }, cfg, extra)
        if not args.no_plot:
            plotting.save_magnitude_function_figure(
                out / "magnitude_function.png",
                [r.scale_t for r in results], [r.magnitude for r in results], dm.n)
        return 0

    grid = _grid_for(cfg, dm.n)
    spec = ConvergenceSpec(epsilon_prop=cfg.epsilon_prop)
    profile, weights = rescaled_profile(
        norm, spec, grid, ids=ids, jitter=cfg.jitter, workers=cfg.threads
    )
    extra["grid_m_effective"] = str(grid.m)
    mio.write_magnitude_profile_csv(out / "profile.csv", profile, cfg, extra)
    if args.weights:
        mio.write_weight_profile_csv(out / "weights.csv", weights, cfg, extra)
    mio.write_json(out / "summary.json", {
        "n": profile.n,
        "t_conv": profile.t_conv,
        "epsilon_prop": cfg.epsilon_prop,
        "grid_m": grid.m,
        "dropped_rows": dropped,
    }, cfg, extra)
    if not args.no_plot:
        plotting.save_profile_figure(out / "profile.png", [(Path(args.input).stem, profile)])
        if args.weights:
            plotting.save_weight_heatmap(out / "weights.png", weights)
    return 0


def cmd_compare(args) -> int:
    cfg, _ = _effective_config(args)
    out = _out_dir(args)
    original = mio.load_point_cloud_csv(args.original)

    names: list[str] = []
    clouds: list[PointCloud] = []
    for path in args.embeddings:
        stem = Path(path).stem
        name = stem
        counter = 2
        while name in names:
            name = f"{stem}_{counter}"
            counter += 1
        names.append(name)
        clouds.append(mio.load_point_cloud_csv(path))

    if cfg.dedup:
        # shared dedup keyed on original-row identity: the embeddings drop
        # exactly the rows that were duplicates in the original
        pre_n = original.n
        result = deduplicate(original)
        original = result.cloud
        if result.dropped:
            dropped = set(result.dropped)
            keep = [i for i in range(pre_n) if i not in dropped]
            clouds = [
                PointCloud(pc.points[keep],
                           ids=None if pc.ids is None else tuple(pc.ids[i] for i in keep))
                if pc.n == pre_n else pc
                for pc in clouds
            ]

    grid = None if cfg.grid_m is None else EvaluationGrid(cfg.grid_m)
    rank_cfg = RankingConfig(
        epsilon_prop=cfg.epsilon_prop,
        grid=grid,
        integration=cfg.integration,
        k=cfg.k,
        metric=cfg.metric,
        jitter=cfg.jitter,
        workers=cfg.threads,
    )
    profiles_out: dict = {}
    reports = ranking_experiment(
        original, dict(zip(names, clouds)), rank_cfg, profiles_out=profiles_out
    )
    extra = {"command": "compare", "original": str(args.original),
             "embeddings": ",".join(names)}
    mio.write_quality_reports_csv(out / "report.csv", reports, cfg, extra)
    mio.write_json(out / "report.json",
                   {"reports": mio.quality_reports_payload(reports)}, cfg, extra)
    if not args.no_plot:
        plotting.save_comparison_figure(out / "comparison.png", reports)
        labeled = [("original", profiles_out["__original__"])]
        labeled += [(name, profiles_out[name]) for name in names if name in profiles_out]
        plotting.save_profile_figure(out / "profiles.png", labeled)
    return 0


def cmd_stability(args) -> int:
    cfg, extras = _effective_config(args)
    out = _out_dir(args)
    ns = _parse_int_list(_extra_or(extras, "ns", args.ns, None) or
                         ",".join(str(n) for n in DEFAULT_SAMPLE_SIZES), "ns")
    bs = _parse_float_list(_extra_or(extras, "bs", args.bs, None) or
                           ",".join(mio.fmt17(b) for b in DEFAULT_NOISE_LEVELS), "bs")
    reps = int(_extra_or(extras, "reps", args.reps, 10))
    dataset = _extra_or(extras, "dataset", None if args.dataset == "all" else args.dataset, "all")
    datasets = list(STABILITY_DATASETS) if dataset == "all" else [dataset]
    seed = cfg.seed if cfg.seed is not None else 0
    spec = ConvergenceSpec(epsilon_prop=cfg.epsilon_prop)

    results = [
        stability_experiment(name, ns, bs, reps, seed, spec=spec,
                             integration=cfg.integration, metric=cfg.metric,
                             workers=cfg.threads)
        for name in datasets
    ]
    extra = {
        "command": "stability",
        "dataset": dataset,
        "ns": ",".join(str(n) for n in ns),
        "bs": ",".join(mio.fmt17(b) for b in bs),
        "reps": str(reps),
        "rng": RNG_ALGORITHM,
    }
    mio.write_stability_csv(out / "stability.csv", results, cfg, extra)
    mio.write_json(out / "stability.json", mio.stability_payload(results), cfg, extra)
    if not args.no_plot:
        plotting.save_stability_figure(out / "stability.png", results)
    return 0


def cmd_gen(args) -> int:
    cfg, extras = _effective_config(args)
    out = _out_dir(args)
    seed = cfg.seed if cfg.seed is not None else 0
    n = int(_extra_or(extras, "n", args.n, 300))
    sigma = float(_extra_or(extras, "sigma", args.sigma, 1.0))
    extra = {"command": "gen", "dataset": args.dataset, "n": str(n), "rng": RNG_ALGORITHM}

    if args.dataset == "circles":
        cloud = circles(n, seed)
    elif args.dataset == "swiss_roll":
        cloud, truth = swiss_roll(n, seed)
        mio.write_point_cloud_csv(out / "swiss_roll_truth.csv", truth, cfg, extra)
    elif args.dataset == "gaussian_blobs":
        extra["sigma"] = mio.fmt17(sigma)
        cloud = gaussian_blobs(n, sigma=sigma, seed=seed)
    elif args.dataset == "planets":
        cloud = planets_dataset("table")
        extra.pop("n")
    else:  # planets_mass
        cloud = planets_dataset("mass")
        extra.pop("n")

    mio.write_point_cloud_csv(out / f"{args.dataset}.csv", cloud, cfg, extra)
    if not args.no_plot:
        plotting.save_scatter_figure(out / f"{args.dataset}.png", cloud, args.dataset)
    return 0


_COMMANDS = {
    "compute": cmd_compute,
    "compare": cmd_compare,
    "stability": cmd_stability,
    "gen": cmd_gen,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"magnify: input error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"magnify: input error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"magnify: numerical failure: {exc}", file=sys.stderr)
        return 3
    except MagnifyError as exc:
        print(f"magnify: internal error: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"magnify: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
