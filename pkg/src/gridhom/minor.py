"""The complexes M_d, the stair-chain map g_# into grid skeleta, and its certificates."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product as iproduct

from .errors import ContractViolation
from .grid import Chain, GridSpec, boundary, chain_sum, closed_cells_meet, enumerate_skeleton
from .stair import stc


@dataclass(frozen=True)
class MinorComplex:
    """M_d on vertices 1..d+3 as the set of all its faces (sorted tuples)."""

    d: int
    faces: frozenset

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(range(1, self.d + 4))

    @property
    def dim(self) -> int:
        return max(len(f) for f in self.faces) - 1

    @property
    def cone_vertex(self) -> int | None:
        return self.d + 3 if self.d % 2 else None

    def facets(self) -> list[tuple[int, ...]]:
        out = [f for f in self.faces if not any(set(f) < set(g) for g in self.faces)]
        return sorted(out, key=lambda f: (len(f), f))

    def __contains__(self, simplex) -> bool:
        return tuple(sorted(simplex)) in self.faces


def _skeleton_faces(vertices, k):
    return {c for size in range(1, k + 2) for c in combinations(vertices, size)}


def build_Md(d: int) -> MinorComplex:
    """Even p: the p/2-skeleton of the simplex on p+3 vertices.  Odd p: the cone
    over M_{p-1} with apex d+3, the highest label."""
    if d < 0:
        raise ContractViolation("M_d needs d >= 0")
    if d % 2 == 0:
        return MinorComplex(d, frozenset(_skeleton_faces(range(1, d + 4), d // 2)))
    base = build_Md(d - 1).faces
    apex = d + 3
    faces = set(base) | {(apex,)} | {f + (apex,) for f in base}
    return MinorComplex(d, frozenset(faces))


def g_sharp(d: int, m: int, simplex) -> Chain:
    """stc^m of the sorted labels, a chain of G[d+3]^m."""
    M = build_Md(d)
    labels = tuple(sorted(simplex))
    if labels not in M.faces:
        raise ContractViolation(f"{labels} is not a face of M_{d}")
    if m <= d:
        raise ContractViolation("g_# needs m > d")
    return stc(m, labels, d + 3)


def g_sharp_chain(d: int, m: int, simplices) -> Chain:
    """Linear extension of g_# to a Z2 sum of equal-dimension simplices."""
    simplices = [tuple(sorted(s)) for s in simplices]
    if not simplices:
        raise ContractViolation("empty simplicial chain has no dimension")
    k = len(simplices[0]) - 1
    return chain_sum((g_sharp(d, m, s) for s in simplices), GridSpec(d + 3, m), k)


def verify_chain_map(d: int, m: int) -> bool:
    """del g_#(s) = g_#(del s) for every face s of M_d of dimension >= 1."""
    M = build_Md(d)
    spec = GridSpec(d + 3, m)
    for s in M.faces:
        if len(s) < 2:
            continue
        facets = [s[:i] + s[i + 1:] for i in range(len(s))]
        rhs = chain_sum((g_sharp(d, m, f) for f in facets), spec, len(s) - 2)
        if boundary(g_sharp(d, m, s)) != rhs:
            return False
    return True


def supports_meet(c1: Chain, c2: Chain) -> bool:
    """Whether the closed supports of two grid chains intersect."""
    return any(closed_cells_meet(a, b) for a in c1.cells for b in c2.cells)


def disjoint_pairs(M: MinorComplex):
    faces = sorted(M.faces, key=lambda f: (len(f), f))
    for s, t in combinations(faces, 2):
        if not set(s) & set(t):
            yield s, t


def verify_disjoint_supports(d: int, m: int) -> bool:
    """Vertex-disjoint faces of M_d have g_# images with disjoint closed supports."""
    M = build_Md(d)
    for s, t in disjoint_pairs(M):
        if supports_meet(g_sharp(d, m, s), g_sharp(d, m, t)):
            return False
    return True


def disjoint_face_dims_ok(M: MinorComplex) -> bool:
    return all(len(s) + len(t) - 2 <= M.d for s, t in disjoint_pairs(M))


def cone_vertex_in_top_faces(M: MinorComplex) -> bool:
    if M.cone_vertex is None:
        return True
    top = (M.d + 1) // 2
    return all(M.cone_vertex in f for f in M.faces if len(f) - 1 == top)


def image_table(d: int, m: int) -> list[dict]:
    M = build_Md(d)
    rows = []
    for s in sorted(M.faces, key=lambda f: (len(f), f)):
        ch = g_sharp(d, m, s)
        rows.append({"simplex": list(s), "dim": ch.dim,
                     "cells": [[list(iv) for iv in c] for c in ch.sorted_cells()]})
    return rows


# Small direct check for chain maps from (G[2]^m)^(1) into a path --------------

def _path_chain_fill(boundary_vertices: frozenset) -> frozenset:
    """The unique 1-chain on the path 1..L whose boundary is the given even set."""
    pts = sorted(boundary_vertices)
    edges: set = set()
    for a, b in zip(pts[0::2], pts[1::2]):
        edges ^= {(x, x + 1) for x in range(a, b)}
    return frozenset(edges)


def _closure_points(vertices: frozenset, edges: frozenset) -> set[int]:
    pts = set(vertices)
    for a, b in edges:
        pts.update((a, b))
    return pts


def _edges_meet(e1: frozenset, e2: frozenset) -> bool:
    return bool(_closure_points(frozenset(), e1) & _closure_points(frozenset(), e2))


def check_line_vkf(m: int = 2, path_len: int = 3) -> dict:
    """Enumerate all nontrivial chain maps from the 1-skeleton of G[2]^m into a
    path on ``path_len`` vertices and test for cells sigma, tau with
    dim sum <= 1, no common axis-parallel hyperplane, and meeting images."""
    spec = GridSpec(2, m)
    cells = enumerate_skeleton(spec, 1)
    verts = [c for c in cells if all(a == b for a, b in c)]
    edges = [c for c in cells if any(a != b for a, b in c)]
    odd_sets = [frozenset(s) for r in range(1, path_len + 1, 2)
                for s in combinations(range(1, path_len + 1), r)]
    pairs = []
    for s, t in combinations(verts + edges, 2):
        if _cell_dim(s) + _cell_dim(t) > 1:
            continue
        if any(s[j] == t[j] and s[j][0] == s[j][1] for j in range(m)):
            continue
        pairs.append((s, t))
    total = 0
    failures = []
    for choice in iproduct(odd_sets, repeat=len(verts)):
        total += 1
        fv = dict(zip(verts, choice))
        fe = {}
        for e in edges:
            ends = [c for c in verts if c in _edge_ends(e)]
            fe[e] = _path_chain_fill(fv[ends[0]] ^ fv[ends[1]])

        def points(c):
            return set(fv[c]) if c in fv else _closure_points(frozenset(), fe[c])

        if not any(points(s) & points(t) for s, t in pairs):
            failures.append({str(k): sorted(v) for k, v in fv.items()})
    return {"m": m, "path_len": path_len, "chain_maps": total,
            "violations": len(failures), "examples": failures[:5]}


def _cell_dim(c) -> int:
    return sum(1 for a, b in c if a != b)


def _edge_ends(e):
    out = []
    for i, (a, b) in enumerate(e):
        if a != b:
            out.append(e[:i] + ((a, a),) + e[i + 1:])
            out.append(e[:i] + ((b, b),) + e[i + 1:])
    return out
