"""Cells, Z2-chains, products and the boundary operator of grid complexes G[n]^m.

A cell is a tuple of ``m`` intervals ``(a, b)`` with ``b in (a, a + 1)``.
A chain is a frozen set of equal-dimension cells; addition is symmetric
difference.  The zero-axis chain holding the empty cell ``()`` is the unit
for ``product``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product as iproduct
from math import comb
from typing import Iterable, Iterator, Mapping

from .errors import ContractViolation

Interval = tuple[int, int]
Cell = tuple[Interval, ...]
Vertex = tuple[int, ...]


@dataclass(frozen=True)
class GridSpec:
    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 0:
            raise ContractViolation(f"invalid grid spec n={self.n} m={self.m}")

    def cell_count(self, k: int) -> int:
        if not 0 <= k <= self.m:
            return 0
        return comb(self.m, k) * (self.n - 1) ** k * self.n ** (self.m - k)


def cell_dim(cell: Cell) -> int:
    return sum(1 for a, b in cell if b != a)


def check_cell(cell: Cell, spec: GridSpec) -> None:
    if len(cell) != spec.m:
        raise ContractViolation(f"cell {cell} has {len(cell)} axes, spec has {spec.m}")
    for a, b in cell:
        if not (1 <= a <= b <= a + 1 <= spec.n + 1 and b <= spec.n):
            raise ContractViolation(f"invalid interval {(a, b)} in G[{spec.n}]")


def vertex_cell(v: Vertex) -> Cell:
    return tuple((a, a) for a in v)


def cell_vertices(cell: Cell) -> list[Vertex]:
    return list(iproduct(*[(a,) if a == b else (a, b) for a, b in cell]))


def cell_faces(cell: Cell) -> list[Cell]:
    """Codimension-one faces; each appears once so this is the Z2 boundary."""
    faces = []
    for i, (a, b) in enumerate(cell):
        if b != a:
            faces.append(cell[:i] + ((a, a),) + cell[i + 1:])
            faces.append(cell[:i] + ((b, b),) + cell[i + 1:])
    return faces


@dataclass(frozen=True)
class Chain:
    spec: GridSpec
    dim: int
    cells: frozenset

    @classmethod
    def of(cls, spec: GridSpec, dim: int, cells: Iterable[Cell] = (), check: bool = True) -> "Chain":
        """Sum of ``cells`` with Z2 coefficients (repeated cells cancel)."""
        acc: set = set()
        for c in cells:
            if check:
                check_cell(c, spec)
                if cell_dim(c) != dim:
                    raise ContractViolation(f"cell {c} is not {dim}-dimensional")
            acc ^= {c}
        return cls(spec, dim, frozenset(acc))

    @classmethod
    def zero(cls, spec: GridSpec, dim: int) -> "Chain":
        return cls(spec, dim, frozenset())

    @classmethod
    def vertex(cls, spec: GridSpec, v: Vertex) -> "Chain":
        return cls.of(spec, 0, [vertex_cell(tuple(v))])

    def __add__(self, other: "Chain") -> "Chain":
        if self.spec != other.spec:
            raise ContractViolation(f"adding chains of different grids {self.spec} and {other.spec}")
        if self.dim != other.dim:
            raise ContractViolation(f"adding a {self.dim}-chain to a {other.dim}-chain")
        return Chain(self.spec, self.dim, self.cells ^ other.cells)

    __sub__ = __add__

    def __iter__(self) -> Iterator[Cell]:
        return iter(self.sorted_cells())

    def __len__(self) -> int:
        return len(self.cells)

    def __bool__(self) -> bool:
        return bool(self.cells)

    def is_zero(self) -> bool:
        return not self.cells

    def sorted_cells(self) -> list[Cell]:
        return sorted(self.cells)

    def vertices(self) -> set[Vertex]:
        out: set[Vertex] = set()
        for c in self.cells:
            out.update(cell_vertices(c))
        return out

    def __repr__(self) -> str:
        body = " + ".join(format_cell(c) for c in self.sorted_cells()) or "0"
        return f"Chain(n={self.spec.n}, m={self.spec.m}, dim={self.dim}: {body})"


def format_cell(cell: Cell) -> str:
    parts = [f"{{{a}}}" if a == b else f"[{a},{b}]" for a, b in cell]
    return "x".join(parts) if parts else "()"


def cell_key(cell: Cell) -> str:
    """Serialized form "a,b;a,b" (one interval per axis)."""
    return ";".join(f"{a},{b}" for a, b in cell)


def parse_cell_key(key: str) -> Cell:
    if key == "":
        return ()
    try:
        return tuple(tuple(int(x) for x in part.split(",")) for part in key.split(";"))
    except ValueError as exc:
        raise ContractViolation(f"bad cell key {key!r}") from exc


def chain_sum(chains: Iterable[Chain], spec: GridSpec, dim: int) -> Chain:
    acc: set = set()
    for c in chains:
        if c.spec != spec or c.dim != dim:
            raise ContractViolation("chain_sum over mismatched chains")
        acc ^= c.cells
    return Chain(spec, dim, frozenset(acc))


def boundary(c: Chain) -> Chain:
    """Z2 boundary; zero for 0-chains."""
    if c.dim == 0:
        return Chain.zero(c.spec, 0)
    acc: set = set()
    for cell in c.cells:
        for f in cell_faces(cell):
            acc ^= {f}
    return Chain(c.spec, c.dim - 1, frozenset(acc))


def product(c1: Chain, c2: Chain) -> Chain:
    """Bilinear cross product; axes concatenate."""
    if c1.spec.n != c2.spec.n:
        raise ContractViolation("product of chains on grids with different n")
    spec = GridSpec(c1.spec.n, c1.spec.m + c2.spec.m)
    cells = frozenset(a + b for a in c1.cells for b in c2.cells)
    return Chain(spec, c1.dim + c2.dim, cells)


def unit(n: int) -> Chain:
    """The zero-axis 0-chain: identity for ``product``."""
    return Chain(GridSpec(n, 0), 0, frozenset({()}))


def long_interval(a: int, b: int, n: int) -> Chain:
    """``{a}`` if ``a == b``, otherwise the sum of unit segments between them."""
    spec = GridSpec(n, 1)
    if not (1 <= a <= n and 1 <= b <= n):
        raise ContractViolation(f"endpoints {a}, {b} outside [1, {n}]")
    if a == b:
        return Chain(spec, 0, frozenset({((a, a),)}))
    lo, hi = min(a, b), max(a, b)
    return Chain(spec, 1, frozenset(((x, x + 1),) for x in range(lo, hi)))


def interval_segments(a: int, b: int) -> list[Interval]:
    """Per-axis factor of ``long_interval`` as raw intervals."""
    if a == b:
        return [(a, a)]
    lo, hi = min(a, b), max(a, b)
    return [(x, x + 1) for x in range(lo, hi)]


def box(lower: Vertex, upper: Vertex, n: int) -> Chain:
    """Product of long intervals ``[lower_i, upper_i]``."""
    spec = GridSpec(n, len(lower))
    for a, b in zip(lower, upper):
        if not (1 <= a <= n and 1 <= b <= n):
            raise ContractViolation(f"box corner outside [1, {n}]")
    factors = [interval_segments(a, b) for a, b in zip(lower, upper)]
    dim = sum(1 for a, b in zip(lower, upper) if a != b)
    return Chain(spec, dim, frozenset(iproduct(*factors)))


def enumerate_cells(spec: GridSpec, k: int) -> list[Cell]:
    """All k-cells of G[n]^m in lexicographic order."""
    if not 0 <= k <= spec.m:
        return []
    choices = [(a, a) for a in range(1, spec.n + 1)] + [(a, a + 1) for a in range(1, spec.n)]
    choices.sort()
    out = []
    for axes in combinations(range(spec.m), k):
        axset = set(axes)
        per_axis = [
            [iv for iv in choices if (iv[1] != iv[0]) == (i in axset)] for i in range(spec.m)
        ]
        out.extend(iproduct(*per_axis))
    out.sort()
    return out


def enumerate_skeleton(spec: GridSpec, top: int) -> list[Cell]:
    out = []
    for k in range(0, min(top, spec.m) + 1):
        out.extend(enumerate_cells(spec, k))
    return out


@dataclass(frozen=True)
class AxisFlat:
    """Axis-parallel flat of R^m; ``fixed`` maps axis index to coordinate."""

    m: int
    fixed: tuple[tuple[int, int], ...]

    @classmethod
    def from_mapping(cls, m: int, fixed: Mapping[int, int]) -> "AxisFlat":
        return cls(m, tuple(sorted(fixed.items())))

    @property
    def dim(self) -> int:
        return self.m - len(self.fixed)

    def as_dict(self) -> dict[int, int]:
        return dict(self.fixed)

    def contains_vertex(self, v: Vertex) -> bool:
        return all(v[i] == a for i, a in self.fixed)


def affine_span(c: Chain | Iterable[Cell], m: int | None = None) -> AxisFlat:
    """Smallest axis-parallel flat containing the support (axes are 0-based)."""
    cells = list(c.cells) if isinstance(c, Chain) else list(c)
    if not cells:
        raise ContractViolation("affine span of the zero chain is undefined")
    m = len(cells[0]) if m is None else m
    fixed = {}
    for i in range(m):
        vals = {cell[i] for cell in cells}
        if len(vals) == 1:
            a, b = next(iter(vals))
            if a == b:
                fixed[i] = a
    return AxisFlat.from_mapping(m, fixed)


def in_hyperplane(cell: Cell, j: int, a: int) -> bool:
    """Whether ``cell`` lies in ``x_j = a`` (``j`` is 0-based)."""
    return cell[j] == (a, a)


def closed_cells_meet(c1: Cell, c2: Cell) -> bool:
    """Whether the closed geometric cells intersect."""
    return all(max(a, c) <= min(b, d) for (a, b), (c, d) in zip(c1, c2))
