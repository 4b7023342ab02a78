"""Reduced Z2 homology of finite cubical and simplicial complexes.

Cubical cells are grid cells (tuples of intervals); simplicial cells are
sorted tuples of vertex labels.  Chains inside a complex are frozen sets of
cells; grid ``Chain`` objects are accepted wherever a chain is expected.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Hashable, Iterable, Sequence

from .errors import ContractViolation
from .gf2 import EchelonBasis, Gf2Matrix, Gf2Vector, solve
from .grid import (
    Chain,
    GridSpec,
    cell_dim,
    cell_faces,
    cell_vertices,
    enumerate_skeleton,
    vertex_cell,
)

CUBICAL = "cubical"
SIMPLICIAL = "simplicial"


def _dim(kind: str, cell) -> int:
    return cell_dim(cell) if kind == CUBICAL else len(cell) - 1


def _faces(kind: str, cell) -> list:
    if kind == CUBICAL:
        return cell_faces(cell)
    if len(cell) == 1:
        return []
    return [cell[:i] + cell[i + 1:] for i in range(len(cell))]


def _vertex_labels(kind: str, cell) -> list:
    return cell_vertices(cell) if kind == CUBICAL else list(cell)


def closure(kind: str, cells: Iterable) -> set:
    """All faces of all given cells."""
    out: set = set()
    stack = list(cells)
    while stack:
        c = stack.pop()
        if c in out:
            continue
        out.add(c)
        stack.extend(_faces(kind, c))
    return out


class FiniteComplex:
    """An immutable finite cell complex with Z2 boundary matrices."""

    def __init__(self, kind: str, cells: Iterable, check_closed: bool = True):
        if kind not in (CUBICAL, SIMPLICIAL):
            raise ContractViolation(f"unknown complex kind {kind!r}")
        self.kind = kind
        if kind == SIMPLICIAL:
            cells = {tuple(sorted(c)) for c in cells}
        cellset = frozenset(cells)
        if check_closed:
            for c in cellset:
                for f in _faces(kind, c):
                    if f not in cellset:
                        raise ContractViolation(f"complex is not closed: face {f} of {c} missing")
        by_dim: dict[int, list] = {}
        for c in cellset:
            by_dim.setdefault(_dim(kind, c), []).append(c)
        top = max(by_dim) if by_dim else -1
        self.cells_by_dim: tuple[tuple, ...] = tuple(
            tuple(sorted(by_dim.get(k, []))) for k in range(top + 1)
        )
        self.cellset = cellset
        self.index: tuple[dict, ...] = tuple(
            {c: i for i, c in enumerate(cs)} for cs in self.cells_by_dim
        )
        self._bases: dict[int, HomologyBasis] = {}
        self._class_matrices: dict[int, Gf2Matrix] = {}

    @property
    def dim(self) -> int:
        return len(self.cells_by_dim) - 1

    def __len__(self) -> int:
        return len(self.cellset)

    def __contains__(self, cell) -> bool:
        return cell in self.cellset

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteComplex) and self.kind == other.kind and self.cellset == other.cellset

    def __hash__(self) -> int:
        return hash((self.kind, self.cellset))

    def __repr__(self) -> str:
        counts = [len(cs) for cs in self.cells_by_dim]
        return f"FiniteComplex({self.kind}, f={counts})"

    def is_empty(self) -> bool:
        return not self.cellset

    def cells(self, k: int) -> tuple:
        if 0 <= k < len(self.cells_by_dim):
            return self.cells_by_dim[k]
        return ()

    def faces(self, cell) -> list:
        return _faces(self.kind, cell)

    def cell_dim(self, cell) -> int:
        return _dim(self.kind, cell)

    def vertex_labels(self, cell) -> list:
        return _vertex_labels(self.kind, cell)

    def vertex_cell(self, label):
        return vertex_cell(label) if self.kind == CUBICAL else (label,)

    def vertex_set(self) -> set:
        return {self.vertex_labels(c)[0] for c in self.cells(0)}

    def boundary_cells(self, cells: Iterable) -> frozenset:
        acc: set = set()
        for c in cells:
            for f in _faces(self.kind, c):
                acc ^= {f}
        return frozenset(acc)

    def boundary_matrix(self, k: int) -> Gf2Matrix:
        """Matrix of del_k: C_k -> C_{k-1}; for k = 0 the augmentation to Z2."""
        return self._boundary_matrices[k] if 0 <= k <= self.dim else Gf2Matrix.zeros(
            len(self.cells(k - 1)), len(self.cells(k))
        )

    @cached_property
    def _boundary_matrices(self) -> tuple[Gf2Matrix, ...]:
        mats = []
        for k in range(self.dim + 1):
            if k == 0:
                nv = len(self.cells(0))
                mats.append(Gf2Matrix(1, nv, ((1 << nv) - 1,)))
                continue
            idx = self.index[k - 1]
            cols = []
            for c in self.cells_by_dim[k]:
                v = 0
                for f in _faces(self.kind, c):
                    v ^= 1 << idx[f]
                cols.append(v)
            mats.append(Gf2Matrix.from_columns(cols, len(self.cells_by_dim[k - 1])))
        return tuple(mats)

    def to_vector(self, cells: Iterable, k: int) -> Gf2Vector:
        idx = self.index[k] if 0 <= k <= self.dim else {}
        bits = 0
        for c in cells:
            try:
                bits ^= 1 << idx[c]
            except KeyError:
                raise ContractViolation(f"cell {c} is not a {k}-cell of the complex") from None
        return Gf2Vector(bits, len(self.cells(k)))

    def from_vector(self, v: Gf2Vector, k: int) -> frozenset:
        cs = self.cells(k)
        return frozenset(cs[j] for j in range(v.length) if (v.bits >> j) & 1)

    def is_cycle(self, cells: Iterable, k: int) -> bool:
        """Reduced cycle test: del c = 0, and an even vertex count when k = 0."""
        if k == 0:
            return len(_xor(cells)) % 2 == 0
        return not self.boundary_cells(cells)

    def subcomplex(self, cells: Iterable, close: bool = False) -> "FiniteComplex":
        cells = closure(self.kind, cells) if close else set(cells)
        if not cells <= self.cellset:
            raise ContractViolation("cells are not part of the ambient complex")
        return FiniteComplex(self.kind, cells)


def _xor(cells: Iterable) -> set:
    acc: set = set()
    for c in cells:
        acc ^= {c}
    return acc


def simplicial_complex(facets: Iterable[Sequence[Hashable]]) -> FiniteComplex:
    facets = [tuple(sorted(f)) for f in facets]
    for f in facets:
        if not f or len(set(f)) != len(f):
            raise ContractViolation(f"invalid facet {f}")
    return FiniteComplex(SIMPLICIAL, closure(SIMPLICIAL, facets))


def cubical_complex(cells: Iterable, close: bool = False) -> FiniteComplex:
    cells = closure(CUBICAL, cells) if close else set(cells)
    return FiniteComplex(CUBICAL, cells)


def grid_complex(n: int, m: int, top: int | None = None) -> FiniteComplex:
    """G[n]^m, or its ``top``-skeleton."""
    top = m if top is None else top
    return FiniteComplex(CUBICAL, enumerate_skeleton(GridSpec(n, m), top), check_closed=False)


def simplex_skeleton(vertices: Iterable[Hashable], k: int) -> FiniteComplex:
    """The k-skeleton of the full simplex on ``vertices``."""
    vs = sorted(vertices)
    cells = [c for size in range(1, k + 2) for c in combinations(vs, size)]
    return FiniteComplex(SIMPLICIAL, cells, check_closed=False)


def path_complex(length: int, start: int = 1) -> FiniteComplex:
    """Simplicial path on vertices start, ..., start + length - 1."""
    vs = list(range(start, start + length))
    cells = [(v,) for v in vs] + [(v, v + 1) for v in vs[:-1]]
    return FiniteComplex(SIMPLICIAL, cells, check_closed=False)


@dataclass(frozen=True)
class BettiVector:
    values: tuple[int, ...]

    def __getitem__(self, i: int) -> int:
        return self.values[i] if 0 <= i < len(self.values) else 0

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def to_list(self) -> list[int]:
        return list(self.values)


def betti(X: FiniteComplex) -> BettiVector:
    """Reduced Betti numbers beta~_0, ..., beta~_dim over Z2."""
    ranks = [X.boundary_matrix(k).rank for k in range(X.dim + 1)] + [0]
    values = tuple(
        len(X.cells(k)) - ranks[k] - ranks[k + 1] for k in range(X.dim + 1)
    )
    return BettiVector(values)


@dataclass(frozen=True)
class HomologyBasis:
    dim: int
    cycles: tuple[frozenset, ...]

    def __len__(self) -> int:
        return len(self.cycles)


def homology_basis(X: FiniteComplex, k: int) -> HomologyBasis:
    """Deterministic basis of reduced H_k: kernel vectors of del_k kept when
    independent of the image of del_{k+1} and of earlier picks.  Cached on X.
    """
    cached = X._bases.get(k)
    if cached is not None:
        return cached
    if not 0 <= k <= X.dim:
        basis = HomologyBasis(k, ())
    else:
        span = EchelonBasis()
        for col in X.boundary_matrix(k + 1).columns() if k + 1 <= X.dim else []:
            span.add(col)
        picked = []
        for v in X.boundary_matrix(k).kernel_basis():
            if span.add(v.bits):
                picked.append(X.from_vector(v, k))
        basis = HomologyBasis(k, tuple(picked))
    X._bases[k] = basis
    return basis


def _chain_input(c, dim: int | None):
    if isinstance(c, Chain):
        return c.cells, c.dim
    if dim is None:
        raise ContractViolation("dim is required when passing a bare cell set")
    return frozenset(c), dim


def fill_cycle(X: FiniteComplex, c, dim: int | None = None):
    """An (i+1)-chain alpha in X with del alpha = c, or None if [c] != 0.

    Returns a grid ``Chain`` when given one, otherwise a frozen set of cells.
    """
    cells, k = _chain_input(c, dim)
    if not X.is_cycle(cells, k):
        raise ContractViolation("fill_cycle needs a (reduced) cycle")
    if not cells:
        alpha = frozenset()
    else:
        if k > X.dim:
            raise ContractViolation("cycle has cells outside the complex")
        target = X.to_vector(cells, k)
        x = solve(X.boundary_matrix(k + 1), target) if k + 1 <= X.dim else None
        if x is None:
            return None
        alpha = X.from_vector(x, k + 1)
    if isinstance(c, Chain):
        return Chain(c.spec, k + 1, alpha)
    return alpha


def _class_matrix(X: FiniteComplex, k: int, B: HomologyBasis) -> Gf2Matrix:
    """[del_{k+1} | basis cycles]; cached when B is the complex's own basis."""
    own = B is homology_basis(X, k)
    if own and k in X._class_matrices:
        return X._class_matrices[k]
    cols = X.boundary_matrix(k + 1).columns() if k + 1 <= X.dim else []
    cols = cols + [X.to_vector(z, k).bits for z in B.cycles]
    M = Gf2Matrix.from_columns(cols, len(X.cells(k)))
    if own:
        X._class_matrices[k] = M
    return M


def homology_class(X: FiniteComplex, c, B: HomologyBasis | None = None,
                   b: int | None = None, dim: int | None = None) -> Gf2Vector:
    """Coordinates of [c] in the basis B, zero-padded to length ``b``."""
    cells, k = _chain_input(c, dim)
    if B is None:
        B = homology_basis(X, k)
    if B.dim != k:
        raise ContractViolation("basis and cycle dimensions differ")
    size = len(B) if b is None else b
    if size < len(B):
        raise ContractViolation(f"b={size} is smaller than beta~_{k}={len(B)}")
    if not X.is_cycle(cells, k):
        raise ContractViolation("homology_class needs a (reduced) cycle")
    if not cells:
        return Gf2Vector.zeros(size)
    M = _class_matrix(X, k, B)
    x = solve(M, X.to_vector(cells, k))
    if x is None:
        raise ContractViolation("basis does not span the homology of the complex")
    nb = M.ncols - len(B)
    return Gf2Vector(x.bits >> nb, size)


def induced_subcomplex(X: FiniteComplex, vertices: Iterable[Hashable]) -> FiniteComplex:
    """Cells of X all of whose vertices lie in ``vertices``."""
    vs = set(vertices)
    cells = [c for c in X.cellset if all(v in vs for v in X.vertex_labels(c))]
    return FiniteComplex(X.kind, cells, check_closed=False)


def intersect_complexes(complexes: Sequence[FiniteComplex]) -> FiniteComplex:
    if not complexes:
        raise ContractViolation("intersection of no complexes is undefined")
    cells = frozenset.intersection(*[X.cellset for X in complexes])
    return FiniteComplex(complexes[0].kind, cells, check_closed=False)
