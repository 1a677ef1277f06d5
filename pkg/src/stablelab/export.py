"""Graphviz DOT rendering of frames, bimodules and filter lattices.

Nodes are emitted in index order and edges sorted, so output is stable.
"""

from __future__ import annotations

from .filters import enumerate_filters
from .lattice import FinLattice
from .semantics import StableModel

WHAT = ("hasse", "bimodule", "filters")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _graph(name: str, labels: list[str], edges: list[tuple[int, int, str]], rankdir: str = "BT") -> str:
    out = [f"digraph {name} {{", f"  rankdir={rankdir};", "  node [shape=circle];"]
    for i, lab in enumerate(labels):
        out.append(f"  n{i} [label={_quote(lab)}];")
    for a, b, lab in sorted(edges):
        attr = f" [label={_quote(lab)}]" if lab else ""
        out.append(f"  n{a} -> n{b}{attr};")
    out.append("}")
    return "\n".join(out) + "\n"


def hasse_dot(W: FinLattice) -> str:
    return _graph("hasse", list(W.names), [(a, b, "") for a, b in W.poset.covers])


def bimodule_dot(M: StableModel) -> str:
    if M.bimodule is None:
        raise ValueError("model has no bimodule")
    W = M.frame
    edges = [(w, v, "R") for w, v in M.bimodule.pairs()]
    return _graph("bimodule", list(W.names), edges, rankdir="LR")


def filters_dot(W: FinLattice) -> str:
    FL = enumerate_filters(W)
    return _graph("filters", [F.label() for F in FL.filters], [(a, b, "") for a, b in FL.lattice.poset.covers])


def model_dot(M: StableModel, what: str) -> str:
    if what == "hasse":
        return hasse_dot(M.frame)
    if what == "bimodule":
        return bimodule_dot(M)
    if what == "filters":
        return filters_dot(M.frame)
    raise ValueError(f"unknown export {what!r}; choose from {', '.join(WHAT)}")
