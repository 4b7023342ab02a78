"""Colorful Helly pipeline: colorful families indexed by grid vertices and
flats, the inductive constrained chain map, certification of the heavy
intersection, and the stepping-up harness."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product as iproduct
from math import comb
from typing import Iterable, Sequence

from .errors import ContractViolation, HypothesisError, ResourceLimitError, VerificationFailure
from .grid import (
    AxisFlat,
    Cell,
    Chain,
    GridSpec,
    boundary,
    cell_dim,
    enumerate_skeleton,
    cell_key,
    format_cell,
    vertex_cell,
)
from .homology import FiniteComplex, homology_class, fill_cycle
from .nerve import SetSystem, delta, iter_multipartite, nerve_hypergraph
from .subgrid import Gf2Hom, Subgrid, compose, search_kernel_subgrid, subgrid_chain_map, t_sequence

MODE_ALL = "all"
MODE_FLATS = "flats"


def _levels(d: int) -> int:
    return (d + 1) // 2


class ColorfulInstance:
    """m color classes of t members each, drawn from one set system.

    ``classes[i][j - 1]`` is the member S_(j, i+1).  Axes are 0-based, so a
    grid vertex v selects ``classes[i][v[i] - 1]`` on axis i.
    """

    def __init__(self, system: SetSystem, d: int, classes: Sequence[Sequence[str]], mode: str = MODE_ALL):
        m = len(classes)
        if not m > d >= 1:
            raise ContractViolation(f"need m > d >= 1, got m={m}, d={d}")
        sizes = {len(c) for c in classes}
        if len(sizes) != 1 or 0 in sizes:
            raise ContractViolation("all color classes must have the same positive size")
        names = [n for c in classes for n in c]
        if len(set(names)) != len(names):
            raise ContractViolation("color classes must use distinct members")
        if mode not in (MODE_ALL, MODE_FLATS):
            raise ContractViolation(f"unknown hypothesis mode {mode!r}")
        if system.ambient.dim > d:
            raise ContractViolation(f"ambient complex has dimension {system.ambient.dim} > d={d}")
        self.system = system
        self.d = d
        self.m = m
        self.t = sizes.pop()
        self.mode = mode
        self.classes = tuple(tuple(c) for c in classes)
        self._idx = tuple(tuple(system.index_of(n) for n in c) for c in self.classes)
        self._complexes: dict[frozenset, FiniteComplex] = {}
        self._check_vertices()
        self.b = self._shatter_bound()

    @property
    def levels(self) -> int:
        return _levels(self.d)

    def member(self, j: int, axis: int) -> int:
        """Index (in the system) of S_(j, axis+1); j is 1-based."""
        return self._idx[axis][j - 1]

    def name(self, idx: int) -> str:
        return self.system.members[idx].name

    def _check_vertices(self) -> None:
        for v in iproduct(range(1, self.t + 1), repeat=self.m):
            fam = colorful_of_vertex(self, v)
            if not self.system.meets(fam):
                raise HypothesisError(
                    f"colorful family of vertex {v} has empty intersection: "
                    + ", ".join(self.name(i) for i in sorted(fam))
                )

    def colorful_families(self) -> Iterable[frozenset]:
        """Nonempty colorful subfamilies checked by the shatter hypothesis."""
        sizes = range(1, self.m + 1)
        if self.mode == MODE_FLATS:
            sizes = range(self.m - self.levels, self.m)
        for size in sizes:
            for axes in combinations(range(self.m), size):
                for js in iproduct(range(1, self.t + 1), repeat=size):
                    yield frozenset(self.member(j, a) for j, a in zip(js, axes))

    def _shatter_bound(self) -> int:
        b = 0
        for fam in self.colorful_families():
            if not self.system.meets(fam):
                continue
            bv = self.system.intersection_betti(fam)
            b = max([b] + [bv[i] for i in range(min(self.levels, len(bv)))])
        return b

    def intersection(self, family: frozenset) -> FiniteComplex:
        """The complex of the common intersection; the empty family gives the ambient.

        One object per family, so its homology basis is computed once and reused.
        """
        X = self._complexes.get(family)
        if X is None:
            if family:
                cells = self.system.intersection_cells(sorted(family))
                X = FiniteComplex(self.system.ambient.kind, cells, check_closed=False)
            else:
                X = self.system.ambient
            self._complexes[family] = X
        return X


def colorful_of_vertex(inst: ColorfulInstance, v: Sequence[int]) -> frozenset:
    if len(v) != inst.m or not all(1 <= x <= inst.t for x in v):
        raise ContractViolation(f"{tuple(v)} is not a vertex of [{inst.t}]^{inst.m}")
    return frozenset(inst.member(x, i) for i, x in enumerate(v))


def colorful_of_flat(inst: ColorfulInstance, A: AxisFlat) -> frozenset:
    """Members common to the colorful families of all grid vertices on A."""
    if A.m != inst.m:
        raise ContractViolation("flat lives in the wrong dimension")
    fixed = A.as_dict()
    if not all(1 <= x <= inst.t for x in fixed.values()):
        raise ContractViolation("flat does not meet the vertex set")
    return frozenset(inst.member(x, i) for i, x in fixed.items())


def _cell_family(inst: ColorfulInstance, gamma: Subgrid, cell: Cell) -> frozenset:
    """G(span of gamma_#(cell)): a subgrid keeps degenerate axes degenerate."""
    return frozenset(inst.member(gamma.maps[i][a - 1], i) for i, (a, b) in enumerate(cell) if a == b)


def _chain_vertices(X: FiniteComplex, cells: Iterable) -> set:
    out: set = set()
    for c in cells:
        out.update(X.vertex_labels(c))
    return out


@dataclass
class ChainMapRecord:
    """Chain map from the ``top``-skeleton of G[n]^m into the ambient complex."""

    source: GridSpec
    top: int
    target: FiniteComplex
    table: dict
    level: int

    def image(self, c: Chain) -> frozenset:
        out: set = set()
        for cell in c.cells:
            out ^= self.table[cell]
        return frozenset(out)

    def to_json(self) -> dict:
        return {
            "n": self.source.n,
            "m": self.source.m,
            "top": self.top,
            "level": self.level,
            "table": {
                cell_key(c): sorted(_fmt_target(self.target, x) for x in self.table[c])
                for c in sorted(self.table, key=lambda c: (cell_dim(c), c))
            },
        }


def _fmt_target(X: FiniteComplex, cell) -> list:
    return [list(iv) for iv in cell] if X.kind == "cubical" else list(cell)


@dataclass(frozen=True)
class LevelLog:
    level: int
    grid: int
    nonzero_cells: int
    route: str | None

    def to_json(self) -> dict:
        return {"level": self.level, "grid": self.grid, "nonzero_cells": self.nonzero_cells,
                "route": self.route}


@dataclass
class ConstrainedBuild:
    subgrid: Subgrid | None
    record: ChainMapRecord | None
    failed_level: int | None
    log: list[LevelLog] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.record is not None


def _check_grid_sizes(inst: ColorfulInstance, grid_sizes: Sequence[int]) -> list[int]:
    sizes = [int(x) for x in grid_sizes]
    if len(sizes) != inst.levels + 1:
        raise ContractViolation(f"need {inst.levels + 1} grid sizes t_0, ..., t_{inst.levels}")
    if sizes[0] != inst.t:
        raise ContractViolation(f"t_0 must equal the class size {inst.t}")
    if any(a < b for a, b in zip(sizes, sizes[1:])) or sizes[-1] < 1:
        raise ContractViolation("grid sizes must be non-increasing and positive")
    return sizes


def build_constrained_chain_map(inst: ColorfulInstance, grid_sizes: Sequence[int],
                                max_candidates: int | None = None) -> ConstrainedBuild:
    """Run the level-by-level construction of a subgrid gamma and a chain map f
    with supp f(sigma) inside the intersection of G(gamma_#(sigma)).

    Returns a build with ``failed_level`` set when no kernel subgrid of the
    requested size exists at that level.
    """
    sizes = _check_grid_sizes(inst, grid_sizes)
    X = inst.system.ambient
    m = inst.m
    gamma = Subgrid.identity(sizes[0], m)
    table: dict = {}
    for v in iproduct(range(1, sizes[0] + 1), repeat=m):
        common = inst.system.common_vertices(colorful_of_vertex(inst, v))
        table[vertex_cell(v)] = frozenset([common[0]])
    record = ChainMapRecord(GridSpec(sizes[0], m), 0, X, table, 0)
    log: list[LevelLog] = []

    for i in range(inst.levels):
        n_i, n_next = sizes[i], sizes[i + 1]
        spec = GridSpec(n_i, m)
        values = {}
        for sigma in (c for c in enumerate_skeleton(spec, i + 1) if cell_dim(c) == i + 1):
            Y = inst.intersection(_cell_family(inst, gamma, sigma))
            z = record.image(boundary(Chain(spec, i + 1, frozenset([sigma]))))
            cls = homology_class(Y, z, b=inst.b, dim=i).bits if inst.b else 0
            if cls:
                values[sigma] = cls
        h = Gf2Hom(n_i, m, i + 1, inst.b, values)
        found = search_kernel_subgrid(h, n_next, max_candidates=max_candidates)
        log.append(LevelLog(i, n_i, len(values), found.route))
        if found.subgrid is None:
            return ConstrainedBuild(None, None, i, log)
        phi = found.subgrid
        gamma = compose(gamma, phi)
        new_spec = GridSpec(n_next, m)
        new_table: dict = {}
        for cell in enumerate_skeleton(new_spec, i):
            img = subgrid_chain_map(phi, Chain(new_spec, cell_dim(cell), frozenset([cell])))
            new_table[cell] = record.image(img)
        record = ChainMapRecord(new_spec, i + 1, X, new_table, i + 1)
        for tau in (c for c in enumerate_skeleton(new_spec, i + 1) if cell_dim(c) == i + 1):
            Y = inst.intersection(_cell_family(inst, gamma, tau))
            z = record.image(boundary(Chain(new_spec, i + 1, frozenset([tau]))))
            alpha = fill_cycle(Y, z, dim=i)
            if alpha is None:
                raise VerificationFailure(
                    f"level {i + 1}: boundary image of {format_cell(tau)} is not a boundary "
                    "in its colorful intersection",
                    counterexample={"level": i + 1, "cell": cell_key(tau)},
                )
            new_table[tau] = frozenset(alpha)
    return ConstrainedBuild(gamma, record, None, log)


def constrained_violations(record: ChainMapRecord, gamma: Subgrid, inst: ColorfulInstance) -> list[dict]:
    """Cells breaking support containment, the chain-map law or nontriviality."""
    X = record.target
    spec = record.source
    bad = []
    for cell in enumerate_skeleton(spec, record.top):
        img = record.table.get(cell)
        if img is None:
            bad.append({"cell": cell_key(cell), "problem": "missing"})
            continue
        Y = inst.intersection(_cell_family(inst, gamma, cell))
        if not img <= Y.cellset:
            bad.append({"cell": cell_key(cell), "problem": "support"})
        k = cell_dim(cell)
        if k == 0:
            if len(img) % 2 != 1:
                bad.append({"cell": cell_key(cell), "problem": "trivial"})
        elif X.boundary_cells(img) != record.image(boundary(Chain(spec, k, frozenset([cell])))):
            bad.append({"cell": cell_key(cell), "problem": "chain_map"})
    return bad


def verify_constrained(record: ChainMapRecord, gamma: Subgrid, inst: ColorfulInstance) -> bool:
    if gamma.ell != record.source.n or gamma.n != inst.t:
        return False
    return not constrained_violations(record, gamma, inst)


# Colorful Helly conclusion ---------------------------------------------------

@dataclass(frozen=True)
class CellPair:
    sigma: Cell
    tau: Cell
    family: tuple[str, ...]
    point: object

    def to_json(self) -> dict:
        return {"sigma": [list(iv) for iv in self.sigma], "tau": [list(iv) for iv in self.tau],
                "family": list(self.family), "point": _json_label(self.point)}


def _json_label(v):
    return list(v) if isinstance(v, tuple) else v


def _common_hyperplane(s: Cell, t: Cell) -> bool:
    return any(a == b and c == e and a == c for (a, b), (c, e) in zip(s, t))


def find_cell_pair(inst: ColorfulInstance, gamma: Subgrid, record: ChainMapRecord) -> CellPair | None:
    """Exhaustive search for cells sigma, tau of the source skeleton with
    dim sigma + dim tau <= d, no common axis-parallel hyperplane, and
    intersecting image supports.  Returns the first pair in cell order."""
    X = record.target
    cells = enumerate_skeleton(record.source, record.top)
    verts = {c: _chain_vertices(X, record.table[c]) for c in cells}
    for s_i, s in enumerate(cells):
        if not verts[s]:
            continue
        for t in cells[s_i:]:
            if cell_dim(s) + cell_dim(t) > inst.d or _common_hyperplane(s, t):
                continue
            shared = verts[s] & verts[t]
            if not shared:
                continue
            fam = _cell_family(inst, gamma, s) | _cell_family(inst, gamma, t)
            return CellPair(s, t, tuple(sorted(inst.name(i) for i in fam)), min(shared))
    return None


@dataclass(frozen=True)
class HeavyWitness:
    members: tuple[str, ...]
    point: object

    def to_json(self) -> dict:
        return {"members": list(self.members), "point": _json_label(self.point)}


def _heaviest(system: SetSystem, pool: Sequence[int]) -> tuple[object, list[int]]:
    """Ambient vertex lying in the most members of ``pool`` (closed members
    meet iff they share a vertex, so this is an exact maximum)."""
    best_v, best = None, []
    for cell in system.ambient.cells(0):
        hit = [i for i in pool if cell in system.members[i].cells]
        if len(hit) > len(best):
            best_v, best = cell, hit
    label = system.ambient.vertex_labels(best_v)[0] if best_v is not None else None
    return label, best


def find_heavy_intersection(inst: ColorfulInstance) -> HeavyWitness | None:
    """At least 2m - d members of the union of the classes with a common point."""
    pool = [i for cls in inst._idx for i in cls]
    point, hit = _heaviest(inst.system, pool)
    if len(hit) < 2 * inst.m - inst.d:
        return None
    return HeavyWitness(tuple(sorted(inst.name(i) for i in hit)), point)


def hypothesis_report(inst: ColorfulInstance) -> dict:
    """Which premises of the colorful Helly statement the instance meets.

    Nonempty colorful intersections are enforced at load time; the class
    size is compared with t(b, d, m), which is usually far out of reach.
    """
    try:
        required = helly_t(inst.b, inst.d, inst.m)
        req_text = str(required)
        enough = inst.t >= required
    except ResourceLimitError:
        req_text, enough = None, False
    return {"nonempty_colorful_intersections": True, "mode": inst.mode, "b": inst.b,
            "t": inst.t, "t_required": req_text, "t_sufficient": enough}


@dataclass
class HellyReport:
    success: bool
    d: int
    m: int
    t: int
    b: int
    grids: tuple[int, ...]
    failed_level: int | None
    subgrid: Subgrid | None
    record: ChainMapRecord | None
    certified: bool
    pair: CellPair | None
    heavy: HeavyWitness | None
    log: list[LevelLog]
    hypotheses: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "d": self.d,
            "m": self.m,
            "t": self.t,
            "b": self.b,
            "grids": list(self.grids),
            "failed_level": self.failed_level,
            "levels": [x.to_json() for x in self.log],
            "subgrid": self.subgrid.to_json() if self.subgrid else None,
            "certificate": self.record.to_json() if self.record else None,
            "certified": self.certified,
            "pair": self.pair.to_json() if self.pair else None,
            "heavy": self.heavy.to_json() if self.heavy else None,
            "hypotheses": self.hypotheses,
        }


def run_helly(inst: ColorfulInstance, grid_sizes: Sequence[int],
              max_candidates: int | None = None) -> HellyReport:
    """Build, certify, then confirm the 2m - d conclusion from a cell pair."""
    built = build_constrained_chain_map(inst, grid_sizes, max_candidates=max_candidates)
    certified = pair = None
    if built.ok:
        certified = verify_constrained(built.record, built.subgrid, inst)
        if certified:
            pair = find_cell_pair(inst, built.subgrid, built.record)
    if pair is not None:
        fam = [inst.system.index_of(n) for n in pair.family]
        if len(fam) < 2 * inst.m - inst.d or not inst.system.meets(fam):
            raise VerificationFailure("cell pair does not yield a heavy intersection",
                                      counterexample=pair.to_json())
    heavy = find_heavy_intersection(inst)
    return HellyReport(
        success=bool(certified and pair is not None),
        d=inst.d, m=inst.m, t=inst.t, b=inst.b, grids=tuple(int(x) for x in grid_sizes),
        failed_level=built.failed_level, subgrid=built.subgrid, record=built.record,
        certified=bool(certified), pair=pair, heavy=heavy, log=built.log,
        hypotheses=hypothesis_report(inst),
    )


def helly_t(b: int, d: int, m: int, shifted: bool = False, k1_exponent: bool = False) -> int:
    """t_0 from t_{ceil(d/2)} = d + 3 and t_i = N(b, i, m, t_{i+1})."""
    t = None
    for _, t in t_sequence(b, d, m, shifted=shifted, k1_exponent=k1_exponent):
        pass
    return t


# Stepping up ------------------------------------------------------------------

@dataclass
class SteppingUpReport:
    k: int
    t: int
    d: int
    size: int
    copies: int
    hosts: int
    certified_hosts: int
    rho_hat: Fraction
    implied_lower_bound: Fraction
    witnessed_tuples: int
    witnessed_density: Fraction
    delta_k: Fraction
    delta_k1: Fraction
    heavy: list[HeavyWitness]
    partial: bool = False

    def to_json(self) -> dict:
        return {
            "k": self.k, "t": self.t, "d": self.d, "size": self.size,
            "copies": self.copies, "hosts": self.hosts, "certified_hosts": self.certified_hosts,
            "rho_hat": str(self.rho_hat),
            "implied_lower_bound": str(self.implied_lower_bound),
            "witnessed_tuples": self.witnessed_tuples,
            "witnessed_density": str(self.witnessed_density),
            "delta_k": str(self.delta_k), "delta_k_plus_1": str(self.delta_k1),
            "heavy": [h.to_json() for h in self.heavy],
            "partial": self.partial,
        }


def stepping_up_report(F: SetSystem, k: int, t: int, d: int,
                       max_steps: int | None = None, max_heavy: int = 20) -> SteppingUpReport:
    """Count K^k(t) copies in the k-wise nerve and turn each host family into
    intersecting (k+1)-tuples via its heaviest point.

    rho_hat is the fraction of kt-subfamilies hosting a copy with a certified
    heavy point (>= 2k - d >= k + 1 members); the implied lower bound on
    delta(k+1) is rho_hat / C(kt, k+1) by double counting.
    """
    if k < d + 1:
        raise ContractViolation("stepping up needs k >= d + 1")
    n = len(F)
    if k * t > n:
        raise ContractViolation("k * t exceeds the family size")
    H = nerve_hypergraph(F, k)
    index = {name: i for i, name in enumerate(F.names)}
    hosts: set = set()
    certified: set = set()
    tuples: set = set()
    heavy: list[HeavyWitness] = []
    copies = 0
    partial = False
    try:
        for copy in iter_multipartite(H, k, t, max_steps=max_steps):
            copies += 1
            host = frozenset(index[x] for cls in copy for x in cls)
            if host in hosts:
                continue
            hosts.add(host)
            point, hit = _heaviest(F, sorted(host))
            if len(hit) >= max(2 * k - d, k + 1):
                certified.add(host)
                tuples.update(combinations(sorted(hit), k + 1))
                if len(heavy) < max_heavy:
                    heavy.append(HeavyWitness(tuple(F.names[i] for i in hit), point))
    except ResourceLimitError:
        partial = True
    rho = Fraction(len(certified), comb(n, k * t))
    return SteppingUpReport(
        k=k, t=t, d=d, size=n, copies=copies, hosts=len(hosts), certified_hosts=len(certified),
        rho_hat=rho, implied_lower_bound=rho / comb(k * t, k + 1),
        witnessed_tuples=len(tuples), witnessed_density=Fraction(len(tuples), comb(n, k + 1)),
        delta_k=delta(F, k), delta_k1=delta(F, k + 1), heavy=heavy, partial=partial,
    )
