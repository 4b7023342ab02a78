"""Seeded randomized identity checks for the grid chain complex."""

from __future__ import annotations

import random

from .grid import Chain, GridSpec, boundary, product
from .subgrid import Subgrid, subgrid_chain_map


def random_cell(rng: random.Random, spec: GridSpec, dim: int) -> tuple:
    axes = set(rng.sample(range(spec.m), dim))
    cell = []
    for i in range(spec.m):
        if i in axes:
            a = rng.randint(1, spec.n - 1)
            cell.append((a, a + 1))
        else:
            a = rng.randint(1, spec.n)
            cell.append((a, a))
    return tuple(cell)


def random_chain(rng: random.Random, spec: GridSpec, dim: int, max_cells: int = 12) -> Chain:
    """XOR of up to ``max_cells`` uniformly drawn dim-cells (so possibly zero)."""
    if dim > spec.m or (dim > 0 and spec.n < 2):
        return Chain.zero(spec, dim)
    acc: set = set()
    for _ in range(rng.randint(1, max_cells)):
        acc ^= {random_cell(rng, spec, dim)}
    return Chain(spec, dim, frozenset(acc))


def random_subgrid(rng: random.Random, ell: int, n: int, m: int) -> Subgrid:
    return Subgrid(ell, n, tuple(tuple(sorted(rng.sample(range(1, n + 1), ell))) for _ in range(m)))


def _random_case(rng: random.Random, max_n: int, max_m: int) -> tuple[GridSpec, int]:
    spec = GridSpec(rng.randint(2, max_n), rng.randint(1, max_m))
    return spec, rng.randint(0, spec.m)


def _report(name: str, cases: int, failures: list[dict]) -> dict:
    return {"suite": name, "cases": cases, "failures": len(failures), "counterexamples": failures[:10]}


def boundary_squared_suite(samples: int, seed: int, max_n: int = 6, max_m: int = 5) -> dict:
    rng = random.Random(seed)
    bad = []
    for case in range(samples):
        spec, dim = _random_case(rng, max_n, max_m)
        c = random_chain(rng, spec, dim)
        if not boundary(boundary(c)).is_zero():
            bad.append({"case": case, "n": spec.n, "m": spec.m, "dim": dim})
    return _report("boundary_squared", samples, bad)


def leibniz(c1: Chain, c2: Chain) -> bool:
    """d(c1 x c2) = dc1 x c2 + c1 x dc2 over Z2 (a 0-chain has zero boundary)."""
    lhs = boundary(product(c1, c2)).cells
    rhs: set = set()
    if c1.dim > 0:
        rhs ^= product(boundary(c1), c2).cells
    if c2.dim > 0:
        rhs ^= product(c1, boundary(c2)).cells
    return lhs == rhs


def product_rule_suite(samples: int, seed: int, max_n: int = 6, max_m: int = 5) -> dict:
    rng = random.Random(seed)
    bad = []
    for case in range(samples):
        n = rng.randint(2, max_n)
        m1 = rng.randint(1, max_m - 1)
        s1 = GridSpec(n, m1)
        s2 = GridSpec(n, rng.randint(1, max_m - m1))
        c1 = random_chain(rng, s1, rng.randint(0, s1.m))
        c2 = random_chain(rng, s2, rng.randint(0, s2.m))
        if not leibniz(c1, c2):
            bad.append({"case": case, "n": n, "m1": s1.m, "m2": s2.m, "dim1": c1.dim, "dim2": c2.dim})
    return _report("product_rule", samples, bad)


def subgrid_chain_map_suite(samples: int, seed: int, max_n: int = 7, max_m: int = 4) -> dict:
    """gamma_# commutes with the boundary on random chains and random subgrids."""
    rng = random.Random(seed)
    bad = []
    for case in range(samples):
        m = rng.randint(1, max_m)
        n = rng.randint(2, max_n)
        ell = rng.randint(2, n)
        gamma = random_subgrid(rng, ell, n, m)
        c = random_chain(rng, gamma.source, rng.randint(0, m))
        lhs = subgrid_chain_map(gamma, boundary(c)) if c.dim > 0 else None
        rhs = boundary(subgrid_chain_map(gamma, c))
        if (lhs.cells if lhs is not None else frozenset()) != rhs.cells:
            bad.append({"case": case, "subgrid": gamma.to_json(), "dim": c.dim})
    return _report("subgrid_chain_map", samples, bad)
