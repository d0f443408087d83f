"""Summary export: a fixed-column CSV plus mean/CI bar figures."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import ConditionSummary, Technique, TrialPhaseKind

CSV_HEADER = "technique,perplexity,num_targets,phase,n,mean_ms,sd_ms,ci95_ms,removed"

_TECH_COLORS = {Technique.ASSIST_VR: "#4c72b0", Technique.DISC_PIM: "#dd8452"}
_TECH_LABELS = {Technique.ASSIST_VR: "AssistVR", Technique.DISC_PIM: "DiscPIM"}


def summary_csv(summaries: Sequence[ConditionSummary]) -> str:
    lines = [CSV_HEADER]
    for s in summaries:
        lines.append(
            "%s,%s,%d,%s,%d,%.3f,%.3f,%.3f,%d"
            % (
                s.technique.value,
                s.perplexity.value,
                s.num_targets,
                s.phase.value,
                s.n,
                s.mean_ms,
                s.sd_ms,
                s.ci95_halfwidth_ms,
                s.removed_outliers,
            )
        )
    return "\n".join(lines) + "\n"


def write_summary_csv(summaries: Sequence[ConditionSummary], path: str | Path) -> Path:
    path = Path(path)
    path.write_text(summary_csv(summaries), encoding="utf-8")
    return path


def _pooled(summaries: Sequence[ConditionSummary], technique, phase, predicate) -> tuple[float, float]:
    """Weighted mean and a conservative CI pooled over matching conditions."""
    rows = [
        s
        for s in summaries
        if s.technique is technique and s.phase is phase and predicate(s) and s.n > 0
    ]
    total = sum(s.n for s in rows)
    if total == 0:
        return 0.0, 0.0
    mean = sum(s.mean_ms * s.n for s in rows) / total
    ci = max((s.ci95_halfwidth_ms for s in rows), default=0.0)
    return mean, ci


def _grouped_bars(ax, groups: list[str], series: dict[Technique, list[tuple[float, float]]], title: str) -> None:
    width = 0.35
    for t_index, (technique, values) in enumerate(series.items()):
        xs = [i + (t_index - 0.5) * width for i in range(len(groups))]
        means = [v[0] / 1000.0 for v in values]
        cis = [v[1] / 1000.0 for v in values]
        ax.bar(
            xs,
            means,
            width,
            yerr=cis,
            capsize=3,
            color=_TECH_COLORS[technique],
            label=_TECH_LABELS[technique],
        )
    ax.set_xticks(range(len(groups)))
    ax.set_xticklabels(groups)
    ax.set_ylabel("completion time (s)")
    ax.set_title(title)
    ax.legend()


def render_figures(summaries: Sequence[ConditionSummary], out_dir: str | Path) -> list[Path]:
    """Write the three mean-with-CI bar charts next to the CSV output."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    phases = [TrialPhaseKind.SEARCH, TrialPhaseKind.REPEAT]
    techniques = [Technique.ASSIST_VR, Technique.DISC_PIM]

    fig, ax = plt.subplots(figsize=(6, 4))
    series = {
        t: [_pooled(summaries, t, phase, lambda s: True) for phase in phases]
        for t in techniques
    }
    _grouped_bars(ax, [p.value for p in phases], series, "Completion time by technique")
    fig.tight_layout()
    path = out_dir / "completion_by_technique.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    for dim, values, fname, title in (
        (
            "num_targets",
            [1, 2, 4],
            "completion_by_num_targets.png",
            "Completion time by number of targets",
        ),
        (
            "perplexity",
            ["low", "medium", "high"],
            "completion_by_perplexity.png",
            "Completion time by scene difficulty",
        ),
    ):
        fig, axes = plt.subplots(1, 2, figsize=(9, 4), sharey=True)
        for ax, phase in zip(axes, phases):
            series = {}
            for technique in techniques:
                row = []
                for value in values:
                    if dim == "num_targets":
                        pred = lambda s, v=value: s.num_targets == v
                    else:
                        pred = lambda s, v=value: s.perplexity.value == v
                    row.append(_pooled(summaries, technique, phase, pred))
                series[technique] = row
            _grouped_bars(ax, [str(v) for v in values], series, f"{phase.value} trials")
        fig.suptitle(title)
        fig.tight_layout()
        path = out_dir / fname
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    return written
