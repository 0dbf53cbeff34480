"""Figure rendering for the CLI report paths.

Figures are rendered headlessly to files next to the delimited output.
PNG metadata dates are stripped so reruns produce identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_SAVE_KWARGS = {"dpi": 150, "metadata": {"Date": None}}


def _save(fig, path) -> None:
    fig.savefig(Path(path), **_SAVE_KWARGS)
    plt.close(fig)


def save_profile_figure(path, labeled_profiles, title="Re-scaled magnitude function") -> None:
    """Normalized magnitude curves M(s)/n over the grid, one per label."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, profile in labeled_profiles:
        ax.plot(profile.grid.s_values, profile.values / profile.n, label=label, linewidth=1.5)
    ax.set_xlabel("s (fraction of convergence scale)")
    ax.set_ylabel("magnitude / n")
    ax.set_title(title)
    ax.set_ylim(0, 1.05)
    if len(labeled_profiles) > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def save_magnitude_function_figure(path, ts, magnitudes, n) -> None:
    """Magnitude function at explicit scales, log-x when the span warrants it."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ts, magnitudes, marker="o", linewidth=1.5)
    ax.axhline(n, color="gray", linestyle=":", linewidth=1, label=f"n = {n}")
    if max(ts) / min(ts) > 50:
        ax.set_xscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("magnitude")
    ax.set_title("Magnitude function")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def save_weight_heatmap(path, weight_profile) -> None:
    """Weights by point (rows) and grid scale (columns)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    image = ax.imshow(
        weight_profile.weights,
        aspect="auto",
        origin="lower",
        cmap="Greens",
        extent=(weight_profile.grid.s_values[0], 1.0, -0.5, weight_profile.n - 0.5),
    )
    fig.colorbar(image, ax=ax, label="weight")
    ax.set_xlabel("s (fraction of convergence scale)")
    ax.set_ylabel("point index")
    if weight_profile.ids is not None and weight_profile.n <= 20:
        ax.set_yticks(range(weight_profile.n))
        ax.set_yticklabels(weight_profile.ids, fontsize=7)
    ax.set_title("Magnitude weights")
    fig.tight_layout()
    _save(fig, path)


def save_comparison_figure(path, reports) -> None:
    """Weight difference per embedding, in ranked order."""
    names = [str(r.params.get("embedding", "?")) for r in reports]
    values = [r.measures["magnitude_weight_diff"] for r in reports]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.barh(range(len(names)), values, color="#2f7d4f")
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("magnitude weight difference (lower is better)")
    ax.set_title("Embedding ranking")
    fig.tight_layout()
    _save(fig, path)


def save_stability_figure(path, results) -> None:
    """Mean profile difference vs sample size, one line per noise level."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for result in results:
        by_b: dict[float, list] = {}
        for row in result.rows:
            by_b.setdefault(row.b, []).append(row)
        for b, rows in sorted(by_b.items()):
            rows = sorted(rows, key=lambda r: r.n)
            ns = [r.n for r in rows]
            means = [r.mean_profile_diff for r in rows]
            stds = [r.std_profile_diff for r in rows]
            dataset = rows[0].dataset
            line, = ax.plot(ns, means, marker="o", label=f"{dataset} b={b:g}")
            lower = [max(m - s, 1e-16) for m, s in zip(means, stds)]
            upper = [m + s for m, s in zip(means, stds)]
            ax.fill_between(ns, lower, upper, alpha=0.2, color=line.get_color())
    ax.set_xlabel("number of points")
    ax.set_ylabel("mean profile difference")
    ax.set_yscale("log")
    ax.set_title("Stability under coordinate noise")
    ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, path)


def save_scatter_figure(path, pc, title) -> None:
    """First two coordinates of a generated cloud."""
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(pc.points[:, 0], pc.points[:, 1 if pc.dim > 1 else 0], s=8, alpha=0.7)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2" if pc.dim > 1 else "x1")
    ax.set_title(title)
    ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    _save(fig, path)
