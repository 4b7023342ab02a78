"""Subgrids, the box/shuffle/base-point calculus and Ramsey-type subgrid searches.

Axes are 0-based in this API; grid coordinates are 1-based as in G[n]^m.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product as iproduct
from math import comb
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import ContractViolation, ResourceLimitError
from .grid import Cell, Chain, GridSpec, box, enumerate_cells, interval_segments

Vertex = tuple[int, ...]


@dataclass(frozen=True)
class Subgrid:
    """m strictly increasing maps [ell] -> [n]; ``maps[i][x - 1]`` is gamma_i(x)."""

    ell: int
    n: int
    maps: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(tuple(g) for g in self.maps))
        for g in self.maps:
            if len(g) != self.ell:
                raise ContractViolation(f"coordinate map {g} does not have length {self.ell}")
            if any(b <= a for a, b in zip(g, g[1:])):
                raise ContractViolation(f"coordinate map {g} is not strictly increasing")
            if g and (g[0] < 1 or g[-1] > self.n):
                raise ContractViolation(f"coordinate map {g} leaves [1, {self.n}]")

    @property
    def m(self) -> int:
        return len(self.maps)

    @property
    def source(self) -> GridSpec:
        return GridSpec(self.ell, self.m)

    @property
    def target(self) -> GridSpec:
        return GridSpec(self.n, self.m)

    @classmethod
    def identity(cls, n: int, m: int) -> "Subgrid":
        return cls(n, n, tuple(tuple(range(1, n + 1)) for _ in range(m)))

    @classmethod
    def prefix(cls, ell: int, n: int, m: int) -> "Subgrid":
        return cls(ell, n, tuple(tuple(range(1, ell + 1)) for _ in range(m)))

    def __call__(self, v: Sequence[int]) -> Vertex:
        return tuple(g[x - 1] for g, x in zip(self.maps, v))

    def vertices(self) -> Iterator[Vertex]:
        """Image vertices gamma(v), v in [ell]^m."""
        for v in iproduct(range(1, self.ell + 1), repeat=self.m):
            yield self(v)

    def to_json(self) -> dict:
        return {"ell": self.ell, "n": self.n, "maps": [list(g) for g in self.maps]}


def subgrid_chain_map(gamma: Subgrid, c: Chain) -> Chain:
    """gamma_#: each interval factor [a, b] goes to the long interval [gamma(a), gamma(b)]."""
    if c.spec != gamma.source:
        raise ContractViolation(f"chain lives in {c.spec}, subgrid source is {gamma.source}")
    acc: set = set()
    for cell in c.cells:
        factors = [interval_segments(g[a - 1], g[b - 1]) for g, (a, b) in zip(gamma.maps, cell)]
        for image in iproduct(*factors):
            acc ^= {image}
    return Chain(gamma.target, c.dim, frozenset(acc))


def compose(outer: Subgrid, inner: Subgrid) -> Subgrid:
    """outer o inner, coordinate-wise."""
    if inner.n != outer.ell or inner.m != outer.m:
        raise ContractViolation("inner subgrid target does not match outer source")
    maps = tuple(tuple(go[x - 1] for x in gi) for go, gi in zip(outer.maps, inner.maps))
    return Subgrid(inner.ell, outer.n, maps)


def diff(x: Sequence[int], y: Sequence[int]) -> frozenset[int]:
    return frozenset(i for i, (a, b) in enumerate(zip(x, y)) if a != b)


def box_chain(x: Sequence[int], y: Sequence[int], k: int, n: int) -> Chain:
    """bx_k(x, y): zero unless x and y differ in exactly k coordinates."""
    if len(x) != len(y):
        raise ContractViolation("box corners have different lengths")
    if any(a > b for a, b in zip(x, y)):
        raise ContractViolation(f"box needs x <= y coordinate-wise, got {x}, {y}")
    if len(diff(x, y)) != k:
        return Chain.zero(GridSpec(n, len(x)), k)
    return box(tuple(x), tuple(y), n)


def shuffle(x: Sequence[int], y: Sequence[int], I: Iterable[int]) -> Vertex:
    """x on the axes in I, y elsewhere."""
    I = set(I)
    return tuple(a if i in I else b for i, (a, b) in enumerate(zip(x, y)))


def base_point(x: Sequence[int], y: Sequence[int]) -> Vertex:
    """1 on the axes where x and y differ, the common value elsewhere."""
    return tuple(1 if a != b else a for a, b in zip(x, y))


def _subsets(s: Iterable[int]) -> Iterator[tuple[int, ...]]:
    s = sorted(s)
    for r in range(len(s) + 1):
        yield from combinations(s, r)


def verify_box_inclusion_exclusion(x: Sequence[int], y: Sequence[int], n: int) -> bool:
    """bx_k(x, y) equals the Z2 sum of bx_k(base(x, y), shuf(x, y, I)) over I in diff."""
    D = diff(x, y)
    k = len(D)
    lhs = box_chain(x, y, k, n)
    base = base_point(x, y)
    rhs = Chain.zero(lhs.spec, k)
    for I in _subsets(D):
        rhs = rhs + box_chain(base, shuffle(x, y, I), k, n)
    return lhs == rhs


@dataclass
class Gf2Hom:
    """Homomorphism C_k(G[n]^m) -> (Z2)^b given on cells; values are b-bit ints."""

    n: int
    m: int
    k: int
    b: int
    values: Mapping[Cell, int] = field(default_factory=dict)

    def __post_init__(self):
        limit = 1 << self.b
        for cell, v in self.values.items():
            if not 0 <= v < limit:
                raise ContractViolation(f"value {v} of {cell} does not fit in {self.b} bits")

    @property
    def spec(self) -> GridSpec:
        return GridSpec(self.n, self.m)

    def cell_value(self, cell: Cell) -> int:
        return self.values.get(cell, 0)

    def __call__(self, c: Chain) -> int:
        if c.spec != self.spec:
            raise ContractViolation("chain is not on the homomorphism's grid")
        if c.dim != self.k:
            if c.is_zero():
                return 0
            raise ContractViolation(f"h is defined on {self.k}-chains, got a {c.dim}-chain")
        out = 0
        for cell in c.cells:
            out ^= self.values.get(cell, 0)
        return out

    def is_zero(self) -> bool:
        return not any(self.values.values())


def k_subsets(m: int, k: int) -> list[tuple[int, ...]]:
    """k-subsets of range(m) in colexicographic order."""
    return sorted(combinations(range(m), k), key=lambda F: tuple(reversed(F)))


def chi_coloring(h: Gf2Hom, z: Sequence[int]) -> tuple[int, ...]:
    """chi_h(z): per k-subset F of axes, h of the box from shuf(1, z, F) to z."""
    ones = (1,) * h.m
    return tuple(
        h(box_chain(shuffle(ones, z, F), z, h.k, h.n)) for F in k_subsets(h.m, h.k)
    )


# Ramsey bounds ---------------------------------------------------------------

def mono_bound(m: int, ell: int, q: int) -> int:
    """N(m, ell, q): side length forcing a monochromatic G[ell]^m subgrid."""
    if m < 1 or ell < 1 or q < 1:
        raise ContractViolation("mono_bound needs m, ell, q >= 1")
    N = (ell - 1) * q + 1
    for mm in range(2, m + 1):
        N = (ell - 1) * q * comb(N, ell) ** (mm - 1) + 1
    return N


def kernel_colors(b: int, k: int, m: int, k1_exponent: bool = False) -> int:
    """Number of chi_h colors, 2^(b * C(m, k)); k1_exponent switches to C(m, k + 1)."""
    return 2 ** (b * comb(m, k + 1 if k1_exponent else k))


def kernel_bound(b: int, k: int, m: int, ell: int, k1_exponent: bool = False) -> int:
    """N(b, k, m, ell): side length forcing a kernel subgrid, via the vertex-coloring bound."""
    return mono_bound(m, ell, kernel_colors(b, k, m, k1_exponent))


MAX_LEVEL_ELL = 10 ** 6


def t_sequence(b: int, d: int, m: int, shifted: bool = False,
               k1_exponent: bool = False) -> Iterator[tuple[int, int]]:
    """Yield (i, t_i) from i = ceil(d/2) down to 0.

    t_{ceil(d/2)} = d + 3 and t_i = N(b, i, m, t_{i+1}); with ``shifted`` the
    homomorphism degree i + 1 used by the chain-map induction replaces i.
    Raises ResourceLimitError when a level is too large to evaluate.
    """
    if not m > d >= 1 or b < 0:
        raise ContractViolation("t(b, d, m) needs m > d >= 1 and b >= 0")
    top = (d + 1) // 2
    t = d + 3
    yield top, t
    for i in range(top - 1, -1, -1):
        if t > MAX_LEVEL_ELL:
            raise ResourceLimitError(
                f"t_{i + 1} has {len(str(t))} digits; t_{i} is not computable", partial=t
            )
        t = kernel_bound(b, i + 1 if shifted else i, m, t, k1_exponent)
        yield i, t


@dataclass(frozen=True)
class RamseyBounds:
    mono: int | None = None
    kernel: int | None = None
    t: tuple[tuple[int, int], ...] = ()

    def to_json(self) -> dict:
        out: dict = {}
        if self.mono is not None:
            out["N_mono"] = str(self.mono)
        if self.kernel is not None:
            out["N_kernel"] = str(self.kernel)
        if self.t:
            out["t"] = {str(i): str(v) for i, v in self.t}
        return out


def ramsey_bounds(m: int, ell: int | None = None, q: int | None = None, b: int | None = None,
                  k: int | None = None, d: int | None = None,
                  k1_exponent: bool = False) -> RamseyBounds:
    mono = mono_bound(m, ell, q) if ell is not None and q is not None else None
    kern = None
    if ell is not None and b is not None and k is not None:
        kern = kernel_bound(b, k, m, ell, k1_exponent)
    t: tuple = ()
    if b is not None and d is not None:
        t = tuple(t_sequence(b, d, m, k1_exponent=k1_exponent))
    return RamseyBounds(mono, kern, t)


# Monochromatic subgrids ------------------------------------------------------

Coloring = Callable[[Vertex], Hashable]


def _as_coloring(coloring) -> Coloring:
    if callable(coloring):
        return coloring
    return coloring.__getitem__


def all_subgrids(ell: int, n: int, m: int) -> Iterator[Subgrid]:
    """Every subgrid G[ell]^m -> G[n]^m, lexicographic in the coordinate maps."""
    choices = list(combinations(range(1, n + 1), ell))
    for maps in iproduct(choices, repeat=m):
        yield Subgrid(ell, n, maps)


def is_monochromatic(coloring, gamma: Subgrid) -> bool:
    col = _as_coloring(coloring)
    colors = {col(v) for v in gamma.vertices()}
    return len(colors) <= 1


def _mono_by_induction(col: Coloring, m: int, ell: int, q: int, n: int) -> Subgrid:
    """The pigeonhole induction; only called with n >= mono_bound(m, ell, q)."""
    if m == 1:
        seen: dict = {}
        for a in range(1, n + 1):
            c = col((a,))
            seen.setdefault(c, []).append(a)
            if len(seen[c]) == ell:
                return Subgrid(ell, n, (tuple(seen[c]),))
        raise AssertionError("pigeonhole failed above the bound")
    inner_n = mono_bound(m - 1, ell, q)
    seen = {}
    for i in range(1, n + 1):
        sub = _mono_by_induction(lambda v, i=i: col(v + (i,)), m - 1, ell, q, inner_n)
        key = (col(sub(tuple([1] * (m - 1))) + (i,)), sub.maps)
        seen.setdefault(key, []).append(i)
        if len(seen[key]) == ell:
            maps = tuple(sub.maps) + (tuple(seen[key]),)
            return Subgrid(ell, n, maps)
    raise AssertionError("pigeonhole failed above the bound")


def find_monochromatic_subgrid(coloring, n: int, m: int, ell: int,
                               q: int | None = None, max_candidates: int | None = None):
    """A subgrid G[ell]^m -> G[n]^m on which ``coloring`` is constant, or None.

    Runs the slicing induction when n reaches N(m, ell, q); below the bound it
    searches all subgrids in lexicographic order.  ``q`` defaults to the
    number of colors actually used.
    """
    col = _as_coloring(coloring)
    if q is None:
        q = len({col(v) for v in iproduct(range(1, n + 1), repeat=m)})
    q = max(q, 1)
    if ell <= n and n >= mono_bound(m, ell, q):
        gamma = _mono_by_induction(col, m, ell, q, n)
        return gamma if is_monochromatic(col, gamma) else None
    for count, gamma in enumerate(all_subgrids(ell, n, m)):
        if max_candidates is not None and count >= max_candidates:
            raise ResourceLimitError("monochromatic subgrid search budget exhausted", partial=count)
        if is_monochromatic(col, gamma):
            return gamma
    return None


# Kernel subgrids -------------------------------------------------------------

def kernel_generators(ell: int, m: int, k: int) -> Iterator[tuple[Vertex, Vertex]]:
    """Pairs (z, w) with w reached from z by incrementing exactly k coordinates."""
    for z in iproduct(range(1, ell + 1), repeat=m):
        free = [i for i in range(m) if z[i] < ell]
        for F in combinations(free, k):
            w = tuple(z[i] + 1 if i in F else z[i] for i in range(m))
            yield z, w


def verify_kernel(h: Gf2Hom, gamma: Subgrid) -> bool:
    """h(bx_k(gamma(z), gamma(w))) = 0 on every generator pair."""
    if gamma.n != h.n or gamma.m != h.m:
        raise ContractViolation("subgrid target is not the homomorphism's grid")
    for z, w in kernel_generators(gamma.ell, h.m, h.k):
        if h(box_chain(gamma(z), gamma(w), h.k, h.n)):
            return False
    return True


def kernel_membership_bruteforce(h: Gf2Hom, gamma: Subgrid) -> bool:
    """h(gamma_#(c)) = 0 for every k-cell c of G[ell]^m."""
    for cell in enumerate_cells(gamma.source, h.k):
        if h(subgrid_chain_map(gamma, Chain(gamma.source, h.k, frozenset({cell})))):
            return False
    return True


@dataclass(frozen=True)
class KernelSearch:
    subgrid: Subgrid | None
    route: str | None
    certified: bool


def search_kernel_subgrid(h: Gf2Hom, ell: int, k1_exponent: bool = False,
                          max_candidates: int | None = None) -> KernelSearch:
    """chi_h coloring, then a monochromatic subgrid, then certification; if that
    does not certify, an exhaustive lexicographic search over subgrids."""
    if ell > h.n:
        return KernelSearch(None, None, False)
    if h.is_zero():
        gamma = Subgrid.prefix(ell, h.n, h.m)
        return KernelSearch(gamma, "zero", verify_kernel(h, gamma))
    colors = {v: chi_coloring(h, v) for v in iproduct(range(1, h.n + 1), repeat=h.m)}
    q = kernel_colors(h.b, h.k, h.m, k1_exponent)
    q_used = len(set(colors.values()))
    if h.n >= mono_bound(h.m, ell, q):
        gamma = find_monochromatic_subgrid(colors, h.n, h.m, ell, q=q)
    else:
        gamma = find_monochromatic_subgrid(colors, h.n, h.m, ell, q=q_used,
                                           max_candidates=max_candidates)
    if gamma is not None and verify_kernel(h, gamma):
        return KernelSearch(gamma, "monochromatic", True)
    for count, gamma in enumerate(all_subgrids(ell, h.n, h.m)):
        if max_candidates is not None and count >= max_candidates:
            raise ResourceLimitError("kernel subgrid search budget exhausted", partial=count)
        if verify_kernel(h, gamma):
            return KernelSearch(gamma, "exhaustive", True)
    return KernelSearch(None, None, False)


def find_kernel_subgrid(h: Gf2Hom, ell: int, **kwargs) -> Subgrid | None:
    """A certified subgrid G[ell]^m -> G[n]^m in the kernel of h, or None."""
    return search_kernel_subgrid(h, ell, **kwargs).subgrid
