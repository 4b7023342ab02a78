"""Z2 homology on grid complexes, stair convexity, subgrid Ramsey searches and
a certified colorful Helly pipeline for finite set systems."""

from __future__ import annotations

from .errors import ContractViolation, HypothesisError, MalformedInput, ResourceLimitError, VerificationFailure
from .gf2 import Gf2Matrix, Gf2Vector, kernel_basis, rank, solve
from .grid import AxisFlat, Chain, GridSpec, affine_span, boundary, product
from .homology import FiniteComplex, betti, fill_cycle, homology_basis, homology_class
from .stair import stc, stc_recursive, stc_unwrapped, verify_alternating_sum, verify_simplex_boundary
from .subgrid import Gf2Hom, Subgrid, find_kernel_subgrid, find_monochromatic_subgrid, kernel_bound, mono_bound
from .minor import build_Md, g_sharp, verify_chain_map, verify_disjoint_supports
from .nerve import SetSystem, delta, shatter, nerve_hypergraph, count_multipartite, sharpness_system
from .helly import (
    ColorfulInstance,
    build_constrained_chain_map,
    find_heavy_intersection,
    helly_t,
    stepping_up_report,
    verify_constrained,
)

__all__ = [
    "ContractViolation",
    "HypothesisError",
    "MalformedInput",
    "ResourceLimitError",
    "VerificationFailure",
    "Gf2Matrix",
    "Gf2Vector",
    "kernel_basis",
    "rank",
    "solve",
    "AxisFlat",
    "Chain",
    "GridSpec",
    "affine_span",
    "boundary",
    "product",
    "FiniteComplex",
    "betti",
    "fill_cycle",
    "homology_basis",
    "homology_class",
    "stc",
    "stc_recursive",
    "stc_unwrapped",
    "verify_alternating_sum",
    "verify_simplex_boundary",
    "Gf2Hom",
    "Subgrid",
    "find_kernel_subgrid",
    "find_monochromatic_subgrid",
    "kernel_bound",
    "mono_bound",
    "build_Md",
    "g_sharp",
    "verify_chain_map",
    "verify_disjoint_supports",
    "SetSystem",
    "delta",
    "shatter",
    "nerve_hypergraph",
    "count_multipartite",
    "sharpness_system",
    "ColorfulInstance",
    "build_constrained_chain_map",
    "find_heavy_intersection",
    "helly_t",
    "stepping_up_report",
    "verify_constrained",
]

__version__ = "0.1.0"
