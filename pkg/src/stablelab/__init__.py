"""Finite stable semantics for intuitionistic (modal) logic.

Frames are finite distributive lattices, formulas denote filters, and
modalities come from stable bimodules.  Everything is exhaustive over
small frames built from base posets.
"""

from .filters import (
    Filter,
    FilterLattice,
    coherent_reconstruct,
    duality_roundtrip,
    enumerate_filters,
    is_filter,
    principal_filter,
    scott_extend,
)
from .lattice import (
    FinLattice,
    FinPoset,
    birkhoff,
    chain,
    complete_lattice,
    enumerate_distributive_lattices,
    lattice_from_pairs,
    opposite,
)
from .logic import parse, to_text
from .modal import (
    StableBimodule,
    box_R,
    check_stable_bimodule,
    diamond_R,
    enumerate_stable_bimodules,
)
from .modelfile import load_model, save_model
from .semantics import (
    StableModel,
    countermodel_search,
    eval_filter,
    force,
    forcing_set,
)

__all__ = [
    "Filter", "FilterLattice", "FinLattice", "FinPoset", "StableBimodule", "StableModel",
    "birkhoff", "box_R", "chain", "check_stable_bimodule", "coherent_reconstruct",
    "complete_lattice", "countermodel_search", "diamond_R", "duality_roundtrip",
    "enumerate_distributive_lattices", "enumerate_filters", "enumerate_stable_bimodules",
    "eval_filter", "force", "forcing_set", "is_filter", "lattice_from_pairs", "load_model",
    "opposite", "parse", "principal_filter", "save_model", "scott_extend", "to_text",
]
