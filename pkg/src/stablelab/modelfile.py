"""JSON model files.

A model file is a JSON object with exactly these fields::

    {
      "elements": ["0", "a", "b", "1"],
      "order": [["0", "a"], ["0", "b"], ["a", "1"], ["b", "1"]],
      "valuation": {"p": ["a", "1"], "q": ["b", "1"]},
      "bimodule": [["0", "0"], ["0", "a"], ...]
    }

``order`` lists generating pairs ``[lower, upper]``; the reflexive-transitive
closure is taken on load.  ``bimodule`` is optional and lists every related
pair ``[w, v]`` (meaning ``w R v``).  Exports write the cover relation.
"""

from __future__ import annotations

import json
from pathlib import Path

from .filters import Filter, is_filter
from .lattice import NotALattice, PosetError, bits, complete_lattice, poset_from_pairs
from .modal import BimoduleError, check_stable_bimodule
from .semantics import StableModel

FIELDS = ("elements", "order", "valuation", "bimodule")
REQUIRED = ("elements", "order", "valuation")


class ModelFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


def _pairs(doc: dict, key: str) -> list[tuple[str, str]]:
    raw = doc[key]
    if not isinstance(raw, list) or not all(
        isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p) for p in raw
    ):
        raise ModelFileError(f"field {key!r} must be a list of [name, name] pairs")
    return [(a, b) for a, b in raw]


def model_from_dict(doc: dict) -> StableModel:
    if not isinstance(doc, dict):
        raise ModelFileError("model file must contain a JSON object")
    unknown = sorted(set(doc) - set(FIELDS))
    if unknown:
        raise ModelFileError(f"unknown field {unknown[0]!r}")
    missing = [k for k in REQUIRED if k not in doc]
    if missing:
        raise ModelFileError(f"missing field {missing[0]!r}")
    names = doc["elements"]
    if not isinstance(names, list) or not names or not all(isinstance(x, str) and x for x in names):
        raise ModelFileError("field 'elements' must be a non-empty list of names")
    if len(set(names)) != len(names):
        raise ModelFileError("duplicate element names")
    try:
        poset = poset_from_pairs(names, _pairs(doc, "order"))
    except PosetError as e:
        if e.axiom == "antisymmetry":
            a, b = (names[i] for i in e.witness)
            raise ModelFileError(f"order is not antisymmetric: {a} and {b} are below each other") from None
        raise ModelFileError(str(e)) from None
    try:
        frame = complete_lattice(poset)
    except NotALattice as e:
        raise ModelFileError(f"frame is not a lattice: {e}") from None
    if not frame.distributive:
        a, x, y = (names[i] for i in frame.dist_witness)
        raise ModelFileError(f"frame not distributive: witness ({a},{x},{y})")
    index = {n: i for i, n in enumerate(names)}

    def lookup(name: str, where: str) -> int:
        if name not in index:
            raise ModelFileError(f"unknown element {name!r} in {where}")
        return index[name]

    val = doc["valuation"]
    if not isinstance(val, dict):
        raise ModelFileError("field 'valuation' must map atom names to lists of elements")
    valuation = {}
    for atom, members in val.items():
        if not isinstance(members, list):
            raise ModelFileError(f"valuation {atom!r} must be a list of elements")
        mask = 0
        for m in members:
            mask |= 1 << lookup(m, f"valuation {atom!r}")
        check = is_filter(frame, mask)
        if not check:
            raise ModelFileError(f"valuation {atom!r} is not a filter: {check.message}")
        valuation[atom] = Filter(frame, mask)
    bimodule = None
    if "bimodule" in doc:
        rows = [0] * frame.size
        for w, v in _pairs(doc, "bimodule"):
            rows[lookup(w, "bimodule")] |= 1 << lookup(v, "bimodule")
        try:
            bimodule = check_stable_bimodule(frame, tuple(rows))
        except BimoduleError as e:
            wit = ",".join(names[i] for i in e.witness)
            label = "bimodule law" if e.condition == "bimodule" else f"condition ({e.condition})"
            raise ModelFileError(f"bimodule fails {label}: witness ({wit})") from None
    return StableModel(frame, valuation, bimodule)


def loads_model(text: str) -> StableModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFileError(e.msg, e.lineno) from None
    return model_from_dict(doc)


def load_model(path: str | Path) -> StableModel:
    return loads_model(Path(path).read_text(encoding="utf-8"))


def model_to_dict(M: StableModel) -> dict:
    W = M.frame
    names = W.names
    doc = {
        "elements": list(names),
        "order": [[names[a], names[b]] for a, b in W.poset.covers],
        "valuation": {p: [names[i] for i in bits(F.members)] for p, F in sorted(M.valuation.items())},
    }
    if M.bimodule is not None:
        doc["bimodule"] = [[names[w], names[v]] for w, v in M.bimodule.pairs()]
    return doc


def dumps_model(M: StableModel) -> str:
    return json.dumps(model_to_dict(M), indent=2, ensure_ascii=False)


def save_model(M: StableModel, path: str | Path) -> None:
    Path(path).write_text(dumps_model(M) + "\n", encoding="utf-8")
