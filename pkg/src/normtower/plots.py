"""Figure rendering for command reports.

Every plot lands in a file; nothing opens a window. Figures are deliberately
plain: layered dots for posets, log-scale steps for tower growth, green and
red bars for verdict lists.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .poset import Poset, RankInfo


def _covers(P: Poset):
    out = []
    for a, b in P.pairs():
        if not any(P.lt(a, c) and P.lt(c, b) for c in P.elements):
            out.append((a, b))
    return out


def save_poset_figure(P: Poset, info: RankInfo, path) -> None:
    """Layered diagram: one row per rank, covering edges drawn between."""
    pos = {}
    for rk_level in sorted(info.levels):
        row = info.levels[rk_level]
        for i, e in enumerate(sorted(row)):
            pos[e] = (i - (len(row) - 1) / 2, rk_level)
    fig, ax = plt.subplots(figsize=(4.8, 3.6))
    for a, b in _covers(P):
        xa, ya = pos[a]
        xb, yb = pos[b]
        ax.plot([xa, xb], [ya, yb], color="0.6", lw=1, zorder=1)
    xs = [pos[e][0] for e in P.elements]
    ys = [pos[e][1] for e in P.elements]
    ax.scatter(xs, ys, s=260, color="tab:blue", zorder=2)
    for e in P.elements:
        ax.annotate(
            e, pos[e], ha="center", va="center", color="white", fontsize=8
        )
    ax.set_title(f"{P.name}: {len(P)} elements, height {info.rk_of_poset}")
    ax.set_ylabel("rank")
    ax.set_xticks([])
    ax.set_yticks(range(len(info.levels)))
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def save_tower_figure(sizes, title: str, path) -> None:
    """Subgroup sizes up a normalizer tower, on a log2 axis."""
    logs = [math.log2(s) for s in sizes]
    fig, ax = plt.subplots(figsize=(4.8, 3.2))
    ax.step(range(len(sizes)), logs, where="mid", marker="o")
    ax.set_xlabel("tower level")
    ax.set_ylabel("log2 size")
    ax.set_xticks(range(len(sizes)))
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def save_verdict_figure(rows, title: str, path) -> None:
    """Horizontal pass/fail bars, one per named check."""
    rows = list(rows)
    fig, ax = plt.subplots(figsize=(5.6, 0.45 * max(4, len(rows))))
    names = [name for name, _ in rows]
    colors = ["tab:green" if ok else "tab:red" for _, ok in rows]
    ax.barh(range(len(rows)), [1] * len(rows), color=colors)
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(names, fontsize=8)
    ax.set_xticks([])
    ax.invert_yaxis()
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def save_system_figure(S, report, path) -> None:
    """Two panels: node sizes over the index order, and limit clauses."""
    fig, (ax1, ax2) = plt.subplots(
        1, 2, figsize=(7.4, 3.2), gridspec_kw={"width_ratios": [3, 2]}
    )
    names = list(S.nodes.elements)
    sizes = [len(S.posets[n]) for n in names]
    ax1.bar(range(len(names)), sizes, color="tab:blue")
    ax1.set_xticks(range(len(names)))
    ax1.set_xticklabels(names, fontsize=8)
    ax1.set_ylabel("poset size")
    ax1.set_title("nodes")
    clauses = report.clauses()
    colors = ["tab:green" if ok else "tab:red" for ok in clauses.values()]
    ax2.barh(range(len(clauses)), [1] * len(clauses), color=colors)
    ax2.set_yticks(range(len(clauses)))
    ax2.set_yticklabels(list(clauses), fontsize=8)
    ax2.set_xticks([])
    ax2.invert_yaxis()
    ax2.set_title(f"limit clauses at {report.vstar}")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
