"""Matplotlib figures for projection timelines and plan sets."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from dtd.kg.terms import render  # noqa: E402
from dtd.planner import Plan  # noqa: E402
from dtd.projection import Timeline  # noqa: E402


def plot_timeline(timeline: Timeline, path, prefixes: Optional[Mapping[str, str]] = None, title: str = "") -> Path:
    """Bar chart of state size per time point, split into carried and newly added triples."""
    points = list(timeline.states)
    labels = [render(p, prefixes) for p in points]
    added = [len(timeline.added(p)) for p in points]
    carried = [len(timeline.previous(p).view) for p in points]
    fig, ax = plt.subplots(figsize=(max(4.0, 1.1 * len(points) + 2), 3.6))
    xs = range(len(points))
    ax.bar(xs, carried, color="#9bb7d4", label="carried over")
    ax.bar(xs, added, bottom=carried, color="#e07b39", label="added")
    for i, p in enumerate(points):
        if timeline.states[p].clashes:
            ax.annotate("clash", (i, carried[i] + added[i]), ha="center", va="bottom", color="#b00020")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("triples in state")
    ax.set_title(title or "projection")
    ax.legend(loc="upper left", fontsize="small")
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out)
    plt.close(fig)
    return out


def plot_plans(plans: Sequence[Plan], path, title: str = "") -> Path:
    """One row per plan, one labelled box per step along the time axis."""
    rows = max(1, len(plans))
    width = max([len(p.steps) for p in plans] + [1])
    fig, ax = plt.subplots(figsize=(max(4.0, 2.2 * width + 1), 0.7 * rows + 1.4))
    for i, p in enumerate(plans):
        y = rows - i
        for s in p.steps:
            ax.barh(y, 0.9, left=s.t - 0.45, height=0.6, color="#9bb7d4", edgecolor="#33506e")
            ax.text(s.t, y, s.rule, ha="center", va="center", fontsize="small")
    ax.set_yticks([rows - i for i in range(len(plans))])
    ax.set_yticklabels([f"plan {i + 1}" for i in range(len(plans))])
    ax.set_xticks(range(1, width + 1))
    ax.set_xlim(0.4, width + 0.6)
    ax.set_ylim(0.4, rows + 0.6)
    ax.set_xlabel("time index")
    ax.set_title(title or (f"{len(plans)} plan(s)" if plans else "no plan"))
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out)
    plt.close(fig)
    return out
