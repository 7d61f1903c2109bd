"""Exact choosability tools and a constructive list-colorer for complete multipartite graphs."""

from .generators import gen_eoos, gen_large_m, gen_sharpness, gen_small_m, ohba_formula
from .instance import (
    Instance,
    InvalidSpecification,
    ListAssignment,
    Profile,
    arith_identities,
    main_bound,
    make_instance,
    profile,
)
from .oracle import Inconclusive, choice_number, find_coloring, is_k_choosable
from .pipeline import color, validate_coloring
from .sdr import find_sdr

__all__ = [
    "Instance", "InvalidSpecification", "ListAssignment", "Profile", "Inconclusive",
    "arith_identities", "main_bound", "make_instance", "profile",
    "choice_number", "find_coloring", "is_k_choosable",
    "color", "validate_coloring", "find_sdr",
    "gen_eoos", "gen_large_m", "gen_sharpness", "gen_small_m", "ohba_formula",
]
