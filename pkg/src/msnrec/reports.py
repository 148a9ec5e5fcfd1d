"""Delimited reports and figure rendering.

Report CSVs format fractions as percentages with two decimal places;
the JSON variants keep raw floats.  Figures are rendered headless to
PNG files next to the delimited output.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analytics import LayerSimilarityReport, LayerStats
from .layers import LAYER_INDEX, LAYER_KINDS, RelationLayer
from .simulate import ExperimentReport

STATS_COLUMNS = (
    "kind",
    "relation_count",
    "contribution_in_ties",
    "non_isolated_users",
    "non_isolated_fraction",
    "avg_strength",
    "strength_std_dev",
    "avg_relations_per_user",
    "meeting_object_count",
    "relations_per_object",
    "graph_density",
    "strength_density",
)

COMPARE_COLUMNS = ("layer_a", "layer_b", "union_density", "cosine", "jaccard", "pearson")


def fmt_percent(value: float) -> str:
    return f"{100.0 * value:.2f}%"


def dump_layer(layer: RelationLayer, path: str | Path) -> None:
    """Line-delimited (kind, u_i, u_j, strength) records, 12 significant digits."""
    with open(path, "w", encoding="utf-8") as handle:
        for (i, j), s in sorted(layer.edges.items()):
            handle.write(f"{layer.kind},{i},{j},{s:.11e}\n")


def load_layer_dump(kind: str, path: str | Path) -> dict[tuple[str, str], float]:
    edges: dict[tuple[str, str], float] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            record_kind, i, j, s = line.split(",")
            if record_kind != kind:
                raise ValueError(f"record kind {record_kind!r} does not match file kind {kind!r}")
            edges[(i, j)] = float(s)
    return edges


def dump_ties(ties, path: str | Path) -> None:
    """Tie records with the per-layer strength vector as a ; joined column."""
    with open(path, "w", encoding="utf-8") as handle:
        for (i, j), tie in sorted(ties.items()):
            vector = ";".join(f"{s:.11e}" for s in tie.layer_strengths)
            handle.write(f"tie,{i},{j},{tie.strength:.11e},{vector}\n")


def _stats_rows(stats: Sequence[LayerStats]) -> list[list]:
    rows: list[list] = [list(STATS_COLUMNS)]
    for s in stats:
        rows.append([
            s.kind,
            s.relation_count,
            fmt_percent(s.contribution_in_ties),
            s.non_isolated_users,
            fmt_percent(s.non_isolated_fraction),
            f"{s.avg_strength:.4f}",
            f"{s.strength_std_dev:.4f}",
            f"{s.avg_relations_per_user:.2f}",
            "" if s.meeting_object_count is None else s.meeting_object_count,
            "" if s.relations_per_object is None else f"{s.relations_per_object:.2f}",
            fmt_percent(s.graph_density),
            fmt_percent(s.strength_density),
        ])
    return rows


def write_stats_csv(stats: Sequence[LayerStats], target) -> None:
    """Write the stats table to a path or an open text file."""
    rows = _stats_rows(stats)
    if hasattr(target, "write"):
        csv.writer(target).writerows(rows)
        return
    with open(target, "w", newline="", encoding="utf-8") as handle:
        csv.writer(handle).writerows(rows)


def write_stats_json(stats: Sequence[LayerStats], extra: dict, path: str | Path) -> None:
    doc = dict(extra)
    doc["layers"] = [vars(s) for s in stats]
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True), encoding="utf-8")


def write_compare_csv(reports: Sequence[LayerSimilarityReport], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(COMPARE_COLUMNS)
        for r in reports:
            writer.writerow([
                r.pair[0],
                r.pair[1],
                fmt_percent(r.union_density),
                f"{r.cosine:.6f}",
                f"{r.jaccard:.6f}",
                "" if r.pearson is None else f"{r.pearson:.6f}",
            ])


def write_compare_json(reports: Sequence[LayerSimilarityReport], path: str | Path) -> None:
    doc = {
        "pairs": [
            {
                "pair": list(r.pair),
                "union_density": r.union_density,
                "cosine": r.cosine,
                "jaccard": r.jaccard,
                "pearson": r.pearson,
            }
            for r in reports
        ]
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True), encoding="utf-8")


def render_stats_figure(stats: Sequence[LayerStats], path: str | Path) -> Path:
    kinds = [s.kind for s in stats]
    x = np.arange(len(kinds))
    fig, axes = plt.subplots(1, 3, figsize=(13, 4))

    counts = [s.relation_count for s in stats]
    axes[0].bar(x, counts, color="#4878a8")
    axes[0].set_yscale("symlog")
    axes[0].set_title("relations per layer")

    axes[1].bar(x, [s.avg_strength for s in stats],
                yerr=[s.strength_std_dev for s in stats], color="#6aa84f", capsize=3)
    axes[1].set_ylim(bottom=0)
    axes[1].set_title("strength mean and spread")

    width = 0.4
    axes[2].bar(x - width / 2, [100 * s.graph_density for s in stats], width, label="graph")
    axes[2].bar(x + width / 2, [100 * s.strength_density for s in stats], width, label="strength")
    axes[2].set_title("density (%)")
    axes[2].legend()

    for ax in axes:
        ax.set_xticks(x)
        ax.set_xticklabels(kinds, rotation=45)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def render_compare_figure(reports: Sequence[LayerSimilarityReport], path: str | Path) -> Path:
    n = len(LAYER_KINDS)
    measures = ("union_density", "cosine", "jaccard", "pearson")
    grids = {m: np.full((n, n), np.nan) for m in measures}
    for r in reports:
        a = LAYER_INDEX[r.pair[0]]
        b = LAYER_INDEX[r.pair[1]]
        for m in measures:
            value = getattr(r, m)
            if value is None:
                continue
            grids[m][a, b] = value
            grids[m][b, a] = value

    fig, axes = plt.subplots(2, 2, figsize=(11, 9))
    for ax, measure in zip(axes.ravel(), measures):
        grid = grids[measure]
        vmin, vmax = (-1, 1) if measure == "pearson" else (0, np.nanmax(grid) or 1)
        image = ax.imshow(grid, cmap="viridis", vmin=vmin, vmax=vmax)
        ax.set_xticks(range(n))
        ax.set_yticks(range(n))
        ax.set_xticklabels(LAYER_KINDS, rotation=90)
        ax.set_yticklabels(LAYER_KINDS)
        ax.set_title(measure)
        fig.colorbar(image, ax=ax, shrink=0.8)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def render_overlap_figure(histogram: dict[int, int], path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    buckets = sorted(histogram)
    ax.bar(buckets, [histogram[b] for b in buckets], color="#b45f06")
    ax.set_xlabel("layers backing the tie")
    ax.set_ylabel("ties")
    ax.set_xticks(buckets)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def write_experiment_report(report: ExperimentReport, out_dir: str | Path) -> list[Path]:
    """Experiment report: JSON + per-stage CSV + two figures."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    doc = {
        "n": report.n,
        "rounds": report.rounds,
        "stage_mean_ratings": list(report.stage_mean_ratings),
        "initial_weights": list(report.initial_weights),
        "outcomes": [
            {
                "user": o.user,
                "stage": o.stage,
                "presented": list(o.presented),
                "ratings": o.ratings,
                "mean_rating": o.mean_rating,
                "weights_after": list(o.weights_after),
            }
            for o in report.outcomes
        ],
    }
    json_path = out / "experiment.json"
    json_path.write_text(json.dumps(doc, indent=1, sort_keys=True), encoding="utf-8")
    written.append(json_path)

    csv_path = out / "experiment.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["user", "stage", "mean_rating", *LAYER_KINDS])
        for o in report.outcomes:
            writer.writerow([o.user, o.stage, f"{o.mean_rating:.6f}",
                             *[f"{w:.6f}" for w in o.weights_after]])
    written.append(csv_path)

    # mean personal weights per stage, against the uniform start
    fig, (ax_w, ax_r) = plt.subplots(1, 2, figsize=(12, 4))
    x = np.arange(len(LAYER_KINDS))
    stages = sorted({o.stage for o in report.outcomes})
    width = 0.8 / (len(stages) + 1)
    ax_w.bar(x - 0.4, report.initial_weights, width, label="start")
    for k, stage in enumerate(stages, start=1):
        rows = [o.weights_after for o in report.outcomes if o.stage == stage]
        mean = np.mean(rows, axis=0)
        ax_w.bar(x - 0.4 + k * width, mean, width, label=f"after stage {stage}")
    ax_w.set_xticks(x)
    ax_w.set_xticklabels(LAYER_KINDS, rotation=45)
    ax_w.set_title("mean personal weights")
    ax_w.legend()

    ax_r.bar(range(1, len(report.stage_mean_ratings) + 1), report.stage_mean_ratings,
             color="#674ea7")
    ax_r.set_xlabel("stage")
    ax_r.set_ylabel("mean rating")
    ax_r.set_title("ratings per stage")
    ax_r.set_xticks(range(1, len(report.stage_mean_ratings) + 1))
    fig.tight_layout()
    fig_path = out / "experiment.png"
    fig.savefig(fig_path, dpi=120)
    plt.close(fig)
    written.append(fig_path)
    return written
