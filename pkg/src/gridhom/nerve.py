"""Finite set systems over an ambient complex: nerves, densities, shatter
functions, the sharpness construction and complete multipartite counting."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Hashable, Iterable, Iterator, Sequence

from .errors import ContractViolation, ResourceLimitError
from .homology import (
    FiniteComplex,
    betti,
    grid_complex,
    induced_subcomplex,
    simplex_skeleton,
)


@dataclass(frozen=True)
class Member:
    name: str
    cells: frozenset
    vertices: frozenset | None = None  # set when the member is induced by a vertex set


class SetSystem:
    """An ambient complex and a named list of closed subcomplexes."""

    def __init__(self, ambient: FiniteComplex, members: Sequence[Member]):
        names = [mb.name for mb in members]
        if len(set(names)) != len(names):
            raise ContractViolation("member names must be unique")
        for mb in members:
            if not mb.cells <= ambient.cellset:
                raise ContractViolation(f"member {mb.name} has cells outside the ambient complex")
            for c in mb.cells:
                for f in ambient.faces(c):
                    if f not in mb.cells:
                        raise ContractViolation(f"member {mb.name} is not closed")
        self.ambient = ambient
        self.members = tuple(members)
        vorder = {c: i for i, c in enumerate(ambient.cells(0))}
        self._vmask = tuple(
            sum(1 << vorder[c] for c in mb.cells if ambient.cell_dim(c) == 0) for mb in members
        )
        self._betti_cache: dict[frozenset, tuple[int, ...]] = {}

    def __len__(self) -> int:
        return len(self.members)

    @property
    def names(self) -> list[str]:
        return [mb.name for mb in self.members]

    def index_of(self, name: str) -> int:
        return self.names.index(name)

    @classmethod
    def from_vertex_sets(cls, ambient: FiniteComplex, sets: Sequence[tuple[str, Iterable]]) -> "SetSystem":
        members = []
        for name, vs in sets:
            vs = frozenset(tuple(v) if isinstance(v, list) else v for v in vs)
            members.append(Member(name, induced_subcomplex(ambient, vs).cellset, vs))
        return cls(ambient, members)

    def meets(self, idx: Iterable[int]) -> bool:
        """Nonempty common intersection (closed subcomplexes meet iff they share a vertex)."""
        mask = -1
        for i in idx:
            mask &= self._vmask[i]
            if not mask:
                return False
        return mask != 0

    def common_vertices(self, idx: Iterable[int]) -> list:
        cells = self.intersection_cells(idx)
        return sorted(c for c in cells if self.ambient.cell_dim(c) == 0)

    def intersection_cells(self, idx: Iterable[int]) -> frozenset:
        idx = list(idx)
        if not idx:
            raise ContractViolation("intersection of an empty subfamily is not defined")
        return frozenset.intersection(*[self.members[i].cells for i in idx])

    def intersection_betti(self, idx: Iterable[int]) -> tuple[int, ...]:
        cells = self.intersection_cells(idx)
        cached = self._betti_cache.get(cells)
        if cached is None:
            cached = betti(FiniteComplex(self.ambient.kind, cells, check_closed=False)).values
            self._betti_cache[cells] = cached
        return cached


def intersect(F: SetSystem, names: Iterable[str]) -> FiniteComplex:
    idx = [F.index_of(n) for n in names]
    return FiniteComplex(F.ambient.kind, F.intersection_cells(idx), check_closed=False)


def delta(F: SetSystem, k: int) -> Fraction:
    """Fraction of k-element subfamilies with nonempty intersection."""
    n = len(F)
    if not 1 <= k <= n:
        raise ContractViolation(f"delta needs 1 <= k <= |F| = {n}")
    hits = sum(1 for sub in combinations(range(n), k) if F.meets(sub))
    return Fraction(hits, comb(n, k))


def f_number(F: SetSystem, i: int) -> int:
    """Number of (i+1)-subfamilies with nonempty intersection (faces of the nerve)."""
    return sum(1 for sub in combinations(range(len(F)), i + 1) if F.meets(sub))


@dataclass(frozen=True)
class NerveProfile:
    size: int
    delta: tuple[tuple[int, Fraction], ...]
    f: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "delta": {str(k): str(v) for k, v in self.delta},
            "f": {str(i): v for i, v in self.f},
        }


def nerve_profile(F: SetSystem, max_k: int | None = None) -> NerveProfile:
    n = len(F)
    max_k = n if max_k is None else min(max_k, n)
    deltas, fs = [], []
    for k in range(1, max_k + 1):
        fk = f_number(F, k - 1)
        fs.append((k - 1, fk))
        deltas.append((k, Fraction(fk, comb(n, k))))
    return NerveProfile(n, tuple(deltas), tuple(fs))


def shatter(F: SetSystem, h: int, k: int) -> int:
    """max beta~_i(intersection of G) over nonempty G with |G| <= k and 0 <= i < h.

    Empty intersections contribute 0 in every degree i >= 0.
    """
    if h < 1 or k < 1:
        raise ContractViolation("shatter needs h >= 1 and k >= 1")
    best = 0
    for size in range(1, min(k, len(F)) + 1):
        for sub in combinations(range(len(F)), size):
            if not F.meets(sub):
                continue
            bv = F.intersection_betti(sub)
            best = max([best] + [bv[i] for i in range(min(h, len(bv)))])
    return best


@dataclass(frozen=True)
class ShatterProfile:
    h: int
    values: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {"h": self.h, "values": {str(k): v for k, v in self.values}}


def shatter_profile(F: SetSystem, h: int, max_k: int) -> ShatterProfile:
    return ShatterProfile(h, tuple((k, shatter(F, h, k)) for k in range(1, max_k + 1)))


# Hypergraphs -----------------------------------------------------------------

@dataclass(frozen=True)
class Hypergraph:
    vertices: tuple
    edges: frozenset
    uniformity: int

    def to_json(self) -> dict:
        return {
            "uniformity": self.uniformity,
            "vertices": list(self.vertices),
            "edges": sorted(sorted(e) for e in self.edges),
        }


def nerve_hypergraph(F: SetSystem, k: int) -> Hypergraph:
    """k-uniform hypergraph on member names; edges are intersecting k-subfamilies."""
    if not 1 <= k <= len(F):
        raise ContractViolation(f"nerve_hypergraph needs 1 <= k <= |F| = {len(F)}")
    names = F.names
    edges = frozenset(
        frozenset(names[i] for i in sub)
        for sub in combinations(range(len(F)), k) if F.meets(sub)
    )
    return Hypergraph(tuple(names), edges, k)


def iter_multipartite(H: Hypergraph, m: int, t: int, max_steps: int | None = None) -> Iterator[tuple]:
    """Yield copies of K^m(t) in H as tuples of m disjoint t-sets.

    Classes are unordered: they are listed by increasing minimum vertex.
    Containment, not induced copies.
    """
    if H.uniformity != m:
        raise ContractViolation(f"hypergraph is {H.uniformity}-uniform, not {m}-uniform")
    order = {v: i for i, v in enumerate(H.vertices)}
    verts = list(H.vertices)
    shadow: set = set()
    for e in H.edges:
        for r in range(1, m + 1):
            shadow.update(frozenset(s) for s in combinations(sorted(e, key=order.get), r))
    live = [v for v in verts if frozenset([v]) in shadow]
    steps = 0
    count = 0

    def transversals_ok(classes, new):
        target = H.edges if len(classes) + 1 == m else shadow
        if not classes:
            return all(frozenset([v]) in shadow for v in new)
        partial = [()]
        for cls in classes:
            partial = [p + (v,) for p in partial for v in cls]
        return all(frozenset(p + (v,)) in target for p in partial for v in new)

    def rec(classes, used, last_min):
        nonlocal steps, count
        if len(classes) == m:
            count += 1
            yield tuple(classes)
            return
        for i, first in enumerate(live):
            if order[first] <= last_min or first in used:
                continue
            rest_pool = [v for v in live[i + 1:] if v not in used]
            for rest in combinations(rest_pool, t - 1):
                steps += 1
                if max_steps is not None and steps > max_steps:
                    raise ResourceLimitError(
                        f"multipartite search exceeded {max_steps} steps", partial=count
                    )
                cls = (first,) + rest
                if transversals_ok(classes, cls):
                    yield from rec(classes + [cls], used | set(cls), order[first])

    yield from rec([], frozenset(), -1)


def count_multipartite(H: Hypergraph, m: int, t: int, max_steps: int | None = None) -> int:
    """Number of copies of K^m(t) contained in H."""
    return sum(1 for _ in iter_multipartite(H, m, t, max_steps))


# Stepping-up inequality for convex-like families ----------------------------

@dataclass(frozen=True)
class SteppingCheck:
    k: int
    ell: int
    lhs: Fraction
    rhs: Fraction
    holds: bool

    def to_json(self) -> dict:
        return {"k": self.k, "ell": self.ell, "delta_ell": str(self.lhs),
                "bound": str(self.rhs), "holds": self.holds}


def check_stepping_inequality(F: SetSystem, k: int, ell: int) -> SteppingCheck:
    """delta(ell) >= 1 - (1 - delta(k)) * C(ell, k); guaranteed for convex families only."""
    if not 1 <= k <= ell <= len(F):
        raise ContractViolation("stepping inequality needs k <= ell <= |F|")
    lhs = delta(F, ell)
    rhs = 1 - (1 - delta(F, k)) * comb(ell, k)
    return SteppingCheck(k, ell, lhs, rhs, lhs >= rhs)


def upper_bound_check(F: SetSystem, d: int, r: int) -> dict:
    """Evaluate the f-vector premises f_k > sum_i C(n-r, i) C(r, k-i+1) for
    d <= k <= d+r-1 and the conclusion f_{d+r} > 0.  Reported, not asserted."""
    n = len(F)
    premises = {}
    for k in range(d, d + r):
        thr = sum(comb(n - r, i) * comb(r, k - i + 1) for i in range(d + 1) if k - i + 1 >= 0)
        fk = f_number(F, k) if k + 1 <= n else 0
        premises[str(k)] = {"f": fk, "threshold": thr, "exceeds": fk > thr}
    top = d + r
    f_top = f_number(F, top) if top + 1 <= n else 0
    return {"d": d, "r": r, "premises": premises, "f_top": f_top,
            "premise_holds": all(p["exceeds"] for p in premises.values()),
            "conclusion_holds": f_top > 0}


# Constructions ---------------------------------------------------------------

def sharpness_system(k: int, V: Iterable[Hashable], S: Sequence[Iterable[Hashable]]) -> SetSystem:
    """Induced subcomplexes K[S_i] of the k-skeleton K of the simplex on V."""
    V = sorted(V)
    K = simplex_skeleton(V, k)
    sets = []
    for i, s in enumerate(S):
        s = frozenset(s)
        if not s:
            raise ContractViolation("sharpness construction needs nonempty vertex sets")
        if not s <= set(V):
            raise ContractViolation("vertex set is not contained in V")
        sets.append((f"K{i + 1}", s))
    return SetSystem.from_vertex_sets(K, sets)


def box_cells(lower: Sequence[int], upper: Sequence[int]) -> frozenset:
    """All cells of the closed grid box [lower, upper]."""
    per_axis = []
    for a, b in zip(lower, upper):
        per_axis.append([(x, x) for x in range(a, b + 1)] + [(x, x + 1) for x in range(a, b)])
    out: set = {()}
    for choices in per_axis:
        out = {c + (iv,) for c in out for iv in choices}
    return frozenset(out)


def generate_boxes(d: int, count: int, seed: int, n: int = 10) -> SetSystem:
    """``count`` random axis-aligned boxes in G[n]^d, reproducible from ``seed``."""
    if d < 1 or n < 1:
        raise ContractViolation("generate_boxes needs d >= 1 and n >= 1")
    rng = random.Random(seed)
    ambient = grid_complex(n, d)
    members = []
    for i in range(count):
        lower, upper = [], []
        for _ in range(d):
            a, b = sorted(rng.randint(1, n) for _ in range(2))
            lower.append(a)
            upper.append(b)
        members.append(Member(f"B{i + 1}", box_cells(lower, upper)))
    return SetSystem(ambient, members)


def boxes_system(n: int, boxes: Sequence[tuple[Sequence[int], Sequence[int]]]) -> SetSystem:
    d = len(boxes[0][0])
    ambient = grid_complex(n, d)
    return SetSystem(ambient, [Member(f"B{i + 1}", box_cells(lo, hi)) for i, (lo, hi) in enumerate(boxes)])
