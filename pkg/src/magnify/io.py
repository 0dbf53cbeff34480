"""File formats and run configuration.

Output conventions: CSV is RFC-4180 with '.' decimals, UTF-8 and LF line
endings; numeric payload cells carry 17 significant digits so a rerun
can be compared byte for byte. Every output file embeds the effective
run configuration - CSV files as leading '# key=value' comment lines,
JSON files under a "config" key - and a file's embedded block can be fed
back through ``--config`` to reproduce it.

The binary matrix format is two little-endian u64 (rows, cols) followed
by row-major little-endian f64 payload.
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .metric import MetricKind, PointCloud
from .profiles import IntegrationMethod, MagnitudeProfile, WeightProfile

CONFIG_SENTINEL = "# magnify-config"


def fmt17(x: float) -> str:
    """17-significant-digit decimal form; round-trip exact for f64."""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class RunConfig:
    """Effective settings of one CLI run; a flat key=value document."""

    metric: MetricKind = MetricKind.EUCLIDEAN
    epsilon_prop: float = 0.05
    grid_m: int | None = None  # None = pick by cardinality (64 / 32)
    integration: IntegrationMethod = IntegrationMethod.TRAPEZOID
    k: int = 30
    dedup: bool = False
    jitter: bool = False
    seed: int | None = None
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "metric", MetricKind(self.metric))
        object.__setattr__(self, "integration", IntegrationMethod(self.integration))
        if not 0 < self.epsilon_prop < 1:
            raise ValidationError(f"epsilon must lie in (0,1), got {self.epsilon_prop}")
        if self.grid_m is not None and self.grid_m < 1:
            raise ValidationError(f"grid must be >= 1, got {self.grid_m}")
        if self.k < 1:
            raise ValidationError(f"k must be >= 1, got {self.k}")
        if self.threads < 1:
            raise ValidationError(f"threads must be >= 1, got {self.threads}")

    def to_pairs(self) -> list[tuple[str, str]]:
        return [
            ("metric", self.metric.value),
            ("epsilon", fmt17(self.epsilon_prop)),
            ("grid", "auto" if self.grid_m is None else str(self.grid_m)),
            ("integration", self.integration.value),
            ("k", str(self.k)),
            ("dedup", "true" if self.dedup else "false"),
            ("jitter", "true" if self.jitter else "false"),
            ("seed", "none" if self.seed is None else str(self.seed)),
            ("threads", str(self.threads)),
        ]

    def to_dict(self) -> dict[str, str]:
        return dict(self.to_pairs())


_BOOL_VALUES = {"true": True, "false": False}


def _parse_config_pairs(pairs: dict[str, str]) -> tuple[RunConfig, dict[str, str]]:
    cfg = RunConfig()
    extras: dict[str, str] = {}
    for key, raw in pairs.items():
        value = raw.strip()
        try:
            if key == "metric":
                cfg = replace(cfg, metric=MetricKind(value))
            elif key == "epsilon":
                cfg = replace(cfg, epsilon_prop=float(value))
            elif key == "grid":
                cfg = replace(cfg, grid_m=None if value == "auto" else int(value))
            elif key == "integration":
                cfg = replace(cfg, integration=IntegrationMethod(value))
            elif key == "k":
                cfg = replace(cfg, k=int(value))
            elif key in ("dedup", "jitter"):
                if value not in _BOOL_VALUES:
                    raise ValueError(f"expected true/false, got {value!r}")
                cfg = replace(cfg, **{key: _BOOL_VALUES[value]})
            elif key == "seed":
                cfg = replace(cfg, seed=None if value == "none" else int(value))
            elif key == "threads":
                cfg = replace(cfg, threads=int(value))
            else:
                extras[key] = value
        except (ValueError, ValidationError) as exc:
            raise ValidationError(f"bad config entry {key}={value!r}: {exc}") from exc
    return cfg, extras


def parse_config_text(text: str) -> tuple[RunConfig, dict[str, str]]:
    """Parse flat key=value lines; unknown keys are returned as extras."""
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno} is not key=value: {line!r}")
        key, _, value = line.partition("=")
        pairs[key.strip()] = value.strip()
    return _parse_config_pairs(pairs)


def load_config_file(path) -> tuple[RunConfig, dict[str, str]]:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def read_embedded_config(path) -> tuple[RunConfig, dict[str, str]]:
    """Recover the configuration block embedded in an output file."""
    path = Path(path)
    if path.suffix == ".json":
        payload = json.loads(path.read_text(encoding="utf-8"))
        block = payload.get("config", {})
        return _parse_config_pairs({str(k): str(v) for k, v in block.items()})
    lines = []
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            stripped = line[1:].strip()
            if stripped != CONFIG_SENTINEL.lstrip("# "):
                lines.append(stripped)
    return parse_config_text("\n".join(lines))


def _config_comment_lines(config: RunConfig | None, extra: dict[str, str] | None) -> list[str]:
    if config is None and not extra:
        return []
    lines = [CONFIG_SENTINEL]
    if config is not None:
        lines.extend(f"# {key}={value}" for key, value in config.to_pairs())
    for key, value in (extra or {}).items():
        lines.append(f"# {key}={value}")
    return lines


def _write_csv(path, comment_lines: list[str], header: list[str], rows) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        for line in comment_lines:
            handle.write(line + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_json(path, payload: dict, config: RunConfig | None = None,
               extra: dict[str, str] | None = None) -> None:
    document = dict(payload)
    if config is not None or extra:
        block = config.to_dict() if config is not None else {}
        block.update(extra or {})
        document["config"] = block
    Path(path).write_text(
        json.dumps(document, indent=2, allow_nan=False) + "\n", encoding="utf-8"
    )


# --- point clouds ---------------------------------------------------------


def load_point_cloud_csv(path) -> PointCloud:
    """One row per point; optional header; optional 'id' column."""
    rows: list[list[str]] = []
    with Path(path).open(encoding="utf-8", newline="") as handle:
        filtered = (line for line in handle if not line.startswith("#"))
        for row in csv.reader(filtered):
            if row:
                rows.append(row)
    if not rows:
        raise ValidationError(f"{path}: no data rows")

    header: list[str] | None = None
    first = rows[0]
    try:
        [float(cell) for cell in first]
    except ValueError:
        header = [cell.strip() for cell in first]
        rows = rows[1:]
    if not rows:
        raise ValidationError(f"{path}: header but no data rows")

    id_col = header.index("id") if header is not None and "id" in header else None
    ids: list[str] | None = [] if id_col is not None else None
    points = []
    width = len(rows[0])
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise ValidationError(f"{path}: row {lineno} has {len(row)} cells, expected {width}")
        cells = list(row)
        if id_col is not None:
            ids.append(cells.pop(id_col))
        try:
            points.append([float(cell) for cell in cells])
        except ValueError as exc:
            raise ValidationError(f"{path}: row {lineno}: {exc}") from exc
    return PointCloud(np.array(points, dtype=np.float64),
                      ids=tuple(ids) if ids is not None else None)


def write_point_cloud_csv(path, pc: PointCloud, config: RunConfig | None = None,
                          extra: dict[str, str] | None = None) -> None:
    header = [f"x{j + 1}" for j in range(pc.dim)]
    if pc.ids is not None:
        header = ["id"] + header
    rows = []
    for i in range(pc.n):
        row = [fmt17(v) for v in pc.points[i]]
        if pc.ids is not None:
            row = [pc.ids[i]] + row
        rows.append(row)
    _write_csv(path, _config_comment_lines(config, extra), header, rows)


def load_square_matrix_csv(path) -> np.ndarray:
    with Path(path).open(encoding="utf-8", newline="") as handle:
        filtered = (line for line in handle if not line.startswith("#"))
        rows = [row for row in csv.reader(filtered) if row]
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    try:
        matrix = np.array([[float(cell) for cell in row] for row in rows])
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from exc
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError(f"{path}: expected a square matrix, got shape {matrix.shape}")
    return matrix


# --- binary matrix format -------------------------------------------------


def write_matrix_bin(path, matrix: np.ndarray) -> None:
    matrix = np.ascontiguousarray(matrix, dtype="<f8")
    if matrix.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got shape {matrix.shape}")
    with Path(path).open("wb") as handle:
        handle.write(struct.pack("<QQ", matrix.shape[0], matrix.shape[1]))
        handle.write(matrix.tobytes(order="C"))


def read_matrix_bin(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 16:
        raise ValidationError(f"{path}: truncated header")
    rows, cols = struct.unpack_from("<QQ", raw)
    expected = 16 + rows * cols * 8
    if len(raw) != expected:
        raise ValidationError(f"{path}: expected {expected} bytes, found {len(raw)}")
    return np.frombuffer(raw, dtype="<f8", offset=16).reshape(rows, cols).astype(np.float64)


# --- profiles -------------------------------------------------------------


def write_magnitude_profile_csv(path, profile: MagnitudeProfile,
                                config: RunConfig | None = None,
                                extra: dict[str, str] | None = None) -> None:
    rows = [
        [fmt17(s), fmt17(v)]
        for s, v in zip(profile.grid.s_values, profile.values)
    ]
    _write_csv(path, _config_comment_lines(config, extra), ["s", "value"], rows)


def write_weight_profile_csv(path, profile: WeightProfile,
                             config: RunConfig | None = None,
                             extra: dict[str, str] | None = None) -> None:
    header = ["s"] + [f"w_{i + 1}" for i in range(profile.n)]
    rows = [
        [fmt17(s)] + [fmt17(w) for w in profile.weights[:, j]]
        for j, s in enumerate(profile.grid.s_values)
    ]
    _write_csv(path, _config_comment_lines(config, extra), header, rows)


def write_magnitude_function_csv(path, results, config: RunConfig | None = None,
                                 extra: dict[str, str] | None = None) -> None:
    rows = [[fmt17(r.scale_t), fmt17(r.magnitude)] for r in results]
    _write_csv(path, _config_comment_lines(config, extra), ["t", "magnitude"], rows)


# --- quality reports ------------------------------------------------------

MEASURE_COLUMNS = (
    "magnitude_weight_diff",
    "magnitude_profile_diff",
    "spearman_distance_correlation",
    "rmse_distances",
    "trustworthiness",
    "continuity",
    "neighbourhood_loss",
)


def write_quality_reports_csv(path, reports, config: RunConfig | None = None,
                              extra: dict[str, str] | None = None) -> None:
    header = ["embedding"] + list(MEASURE_COLUMNS)
    rows = [
        [str(report.params.get("embedding", ""))]
        + [fmt17(report.measures[m]) for m in MEASURE_COLUMNS]
        for report in reports
    ]
    _write_csv(path, _config_comment_lines(config, extra), header, rows)


def quality_reports_payload(reports) -> list[dict]:
    return [{"measures": report.measures, "params": report.params} for report in reports]


# --- stability ------------------------------------------------------------


def write_stability_csv(path, results, config: RunConfig | None = None,
                        extra: dict[str, str] | None = None) -> None:
    header = ["dataset", "n", "b", "repetitions", "mean_profile_diff", "std_profile_diff"]
    rows = [
        [row.dataset, str(row.n), fmt17(row.b), str(row.repetitions),
         fmt17(row.mean_profile_diff), fmt17(row.std_profile_diff)]
        for result in results
        for row in result.rows
    ]
    _write_csv(path, _config_comment_lines(config, extra), header, rows)


def stability_payload(results) -> dict:
    return {
        "results": [
            {
                "dataset": row.dataset,
                "n": row.n,
                "b": row.b,
                "repetitions": row.repetitions,
                "mean_profile_diff": row.mean_profile_diff,
                "std_profile_diff": row.std_profile_diff,
                "values": list(row.values),
            }
            for result in results
            for row in result.rows
        ]
    }
