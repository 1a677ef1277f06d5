"""Matplotlib renderings: Hasse diagrams and suite breakdowns.

matplotlib is imported lazily with the Agg backend so the rest of the
package never touches a display.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

from .lattice import FinLattice, bits


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def ranks(W: FinLattice) -> list[int]:
    """Length of the longest chain from the bottom to each element."""
    r = [0] * W.size
    order = sorted(range(W.size), key=lambda i: bin(W.down[i]).count("1"))
    for b in order:
        r[b] = max((r[a] + 1 for a, c in W.poset.covers if c == b), default=0)
    return r


def hasse_layout(W: FinLattice) -> dict[int, tuple[float, float]]:
    level = ranks(W)
    rows: dict[int, list[int]] = defaultdict(list)
    for i in range(W.size):
        rows[level[i]].append(i)
    pos = {}
    for y, members in rows.items():
        k = len(members)
        for j, i in enumerate(members):
            pos[i] = (j - (k - 1) / 2, float(y))
    return pos


def hasse_png(W: FinLattice, path: str | Path, highlight: int = 0, title: str | None = None) -> Path:
    """Draw the cover relation; elements in the ``highlight`` mask are filled."""
    plt = _pyplot()
    pos = hasse_layout(W)
    fig, ax = plt.subplots(figsize=(3 + 0.3 * W.size, 3 + 0.3 * W.size))
    for a, b in W.poset.covers:
        (x0, y0), (x1, y1) = pos[a], pos[b]
        ax.plot([x0, x1], [y0, y1], color="0.4", lw=1, zorder=1)
    marked = set(bits(highlight))
    for i, (x, y) in pos.items():
        ax.scatter([x], [y], s=500, zorder=2, edgecolors="k",
                   c="tab:orange" if i in marked else "white")
        ax.annotate(W.names[i], (x, y), ha="center", va="center", fontsize=8, zorder=3)
    ax.set_axis_off()
    ax.margins(0.2)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def breakdown_png(report, path: str | Path) -> Path:
    """Checks per frame size, failures stacked in red."""
    plt = _pyplot()
    checks: dict[int, int] = defaultdict(int)
    fails: dict[int, int] = defaultdict(int)
    for row in report.breakdown:
        checks[row["size"]] += row["checks"]
        fails[row["size"]] += row["failures"]
    sizes = sorted(checks)
    ok = [checks[s] - fails[s] for s in sizes]
    bad = [fails[s] for s in sizes]
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.bar([str(s) for s in sizes], ok, color="tab:blue", label="passed")
    ax.bar([str(s) for s in sizes], bad, bottom=ok, color="tab:red", label="failed")
    ax.set_xlabel("frame size")
    ax.set_ylabel("checks")
    ax.set_title(report.suite)
    ax.legend(frameon=False)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out
