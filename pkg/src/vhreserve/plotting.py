"""Figures for comparison reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def compare_figure(report: dict, path: str | Path) -> Path:
    """Grouped bars of seats won per applicant group under each compared rule.

    Metadata that would change between runs (dates, svg ids) is pinned so a
    rerun writes the same file.
    """
    path = Path(path)
    rule_a, rule_b = report["rules"]
    groups = ["general"] + list(report["reserved_counts"][rule_a])
    counts = {
        r: [len(report["general"][r])] + [report["reserved_counts"][r][c] for c in groups[1:]]
        for r in (rule_a, rule_b)
    }
    xs = range(len(groups))
    width = 0.38
    with plt.rc_context({"svg.hashsalt": "vhreserve", "font.size": 10}):
        fig, ax = plt.subplots(figsize=(1.6 + 1.1 * len(groups), 3.2))
        ax.bar([x - width / 2 for x in xs], counts[rule_a], width, label=rule_a, color="0.35")
        ax.bar([x + width / 2 for x in xs], counts[rule_b], width, label=rule_b, color="0.75")
        ax.set_xticks(list(xs))
        ax.set_xticklabels(groups)
        ax.set_ylabel("positions awarded")
        ax.yaxis.get_major_locator().set_params(integer=True)
        ax.spines["top"].set_visible(False)
        ax.spines["right"].set_visible(False)
        ax.legend(frameon=False)
        fig.tight_layout()
        meta = {"Date": None} if path.suffix == ".svg" else {"Software": None} if path.suffix == ".png" else None
        fig.savefig(path, metadata=meta)
        plt.close(fig)
    return path
