"""Acceptance suite: one test per criterion, reported as PASS/FAIL lines in
the terminal summary (see conftest.py)."""

from __future__ import annotations

import os
import random
import subprocess
import sys
import time
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product as iproduct
from math import comb

import pytest

from gridhom import checks, stair
from gridhom.grid import Chain, GridSpec, enumerate_cells
from gridhom.helly import (
    build_constrained_chain_map,
    find_cell_pair,
    find_heavy_intersection,
    stepping_up_report,
    verify_constrained,
)
from gridhom.homology import betti, grid_complex, simplex_skeleton
from gridhom.io import dumps, instance_from_json, load_json, system_to_json
from gridhom.minor import verify_chain_map, verify_disjoint_supports
from gridhom.nerve import check_stepping_inequality, generate_boxes
from gridhom.subgrid import (
    Gf2Hom,
    Subgrid,
    find_kernel_subgrid,
    find_monochromatic_subgrid,
    kernel_membership_bruteforce,
    mono_bound,
    subgrid_chain_map,
    t_sequence,
    verify_kernel,
)

SEED = 20240917


def assert_suite_clean(report):
    assert report["cases"] > 0
    assert report["failures"] == 0, report["counterexamples"]


# 1 -------------------------------------------------------------------------------

@pytest.mark.criterion(1, "simplex boundary identity, m <= 5, anchors in [6]")
def test_boundary_identity_suite():
    start = time.perf_counter()
    report = stair.boundary_suite(5, 6)
    elapsed = time.perf_counter() - start
    assert_suite_clean(report)
    expected = sum(comb(6, k + 1) for m in range(1, 6) for k in range(1, m + 1))
    assert report["cases"] == expected
    assert elapsed < 300


# 2 -------------------------------------------------------------------------------

@pytest.mark.criterion(2, "recursive stair chain equals the unwrapped sum")
def test_unwrapping_suite():
    report = stair.unwrap_suite(5, 6)
    assert_suite_clean(report)
    assert report["cases"] == sum(comb(6, k + 1) for m in range(1, 6) for k in range(1, m + 1))


# 3 -------------------------------------------------------------------------------

@pytest.mark.criterion(3, "alternating box sum vanishes, m <= 4, anchors in [7]")
def test_alternating_suite():
    report = stair.alternating_suite(4, 7)
    assert_suite_clean(report)
    assert report["cases"] == sum(comb(7, m + 2) for m in range(1, 5))


# 4 -------------------------------------------------------------------------------

@pytest.mark.criterion(4, "boundary squared, product rule and subgrid chain maps on 1000 cases each")
def test_random_chain_identities():
    for suite in (checks.boundary_squared_suite, checks.product_rule_suite,
                  checks.subgrid_chain_map_suite):
        report = suite(1000, SEED)
        assert report["cases"] == 1000
        assert_suite_clean(report)


# 5 -------------------------------------------------------------------------------

def random_hom(rng: random.Random, n: int) -> Gf2Hom:
    spec = GridSpec(n, 2)
    density = rng.choice([0.05, 0.15, 0.3, 0.5, 0.8])
    values = {c: 1 for c in enumerate_cells(spec, 1) if rng.random() < density}
    return Gf2Hom(n, 2, 1, 1, values)


def oracle_kernel_subgrids(h: Gf2Hom, ell: int):
    """Independent exhaustive oracle: every subgrid, checked cell by cell."""
    src = GridSpec(ell, h.m)
    cells = enumerate_cells(src, h.k)
    for maps in iproduct(combinations(range(1, h.n + 1), ell), repeat=h.m):
        gamma = Subgrid(ell, h.n, maps)
        if all(h(subgrid_chain_map(gamma, Chain(src, h.k, frozenset([c])))) == 0 for c in cells):
            yield gamma


@pytest.mark.criterion(5, "kernel subgrid search is certified and matches the exhaustive oracle")
def test_kernel_subgrid_certification():
    start = time.perf_counter()
    rng = random.Random(SEED)
    found_any = 0
    for _ in range(200):
        h = random_hom(rng, 7)
        gamma = find_kernel_subgrid(h, 2)
        exists = next(oracle_kernel_subgrids(h, 2), None) is not None
        if gamma is not None:
            assert verify_kernel(h, gamma) and kernel_membership_bruteforce(h, gamma)
            found_any += 1
        assert (gamma is not None) == exists
    assert found_any > 0
    for _ in range(200):
        n = rng.randint(2, 5)
        h = random_hom(rng, n)
        gamma = find_kernel_subgrid(h, 2)
        exists = next(oracle_kernel_subgrids(h, 2), None) is not None
        assert (gamma is not None) == exists
        if gamma is not None:
            assert verify_kernel(h, gamma) and kernel_membership_bruteforce(h, gamma)
    assert time.perf_counter() - start < 120


# 6 -------------------------------------------------------------------------------

def rows_force_rectangle(n_rows: int) -> bool:
    """Every 2-coloring of [n_rows] x [3] has a monochromatic 2 x 2 subgrid.

    A row is a 3-bit coloring; two rows sharing a monochromatic column pair of
    the same color give the subgrid.  Checked over all multisets of rows.
    """
    def mono_pairs(row):
        return {(i, j, row[i]) for i, j in combinations(range(3), 2) if row[i] == row[j]}

    rows = list(iproduct((0, 1), repeat=3))
    for choice in combinations_with_replacement(rows, n_rows):
        seen: set = set()
        hit = False
        for row in choice:
            pairs = mono_pairs(row)
            if pairs & seen:
                hit = True
                break
            seen |= pairs
        if not hit:
            return False
    return True


@pytest.mark.criterion(6, "Ramsey calculator values and t sequence top level")
def test_ramsey_calculator():
    for ell in range(1, 11):
        for q in range(1, 11):
            assert mono_bound(1, ell, q) == (ell - 1) * q + 1
    assert mono_bound(2, 2, 2) == 7
    assert rows_force_rectangle(7) and not rows_force_rectangle(6)
    rng = random.Random(SEED)
    for _ in range(30):
        colors = {v: rng.randint(0, 1) for v in iproduct(range(1, 8), repeat=2)}
        assert find_monochromatic_subgrid(colors, 7, 2, 2, q=2) is not None
    for d in range(1, 9):
        for b in range(3):
            i, t = next(t_sequence(b, d, d + 1))
            assert i == (d + 1) // 2 and t == d + 3
    big = mono_bound(4, 10, 10)
    ref = (10 - 1) * 10 + 1
    for mm in range(2, 5):
        ref = (10 - 1) * 10 * comb(ref, 10) ** (mm - 1) + 1
    assert big == ref and big > 2 ** 64


# 7 -------------------------------------------------------------------------------

@pytest.mark.criterion(7, "reduced Betti numbers of grids, grid graphs and simplex skeleta")
def test_homology_values():
    for n in range(1, 5):
        for m in range(1, 5):
            assert all(x == 0 for x in betti(grid_complex(n, m)).to_list())
    for n in range(1, 7):
        G = grid_complex(n, 2, top=1)
        V, E = len(G.cells(0)), len(G.cells(1))
        bv = betti(G).to_list() + [0]
        assert bv[:2] == [0, E - V + 1] == [0, (n - 1) ** 2]
    for N in range(1, 8):
        for k in range(0, 4):
            bv = betti(simplex_skeleton(range(N), k)).to_list()
            bv += [0] * (k + 1 - len(bv))
            for j, x in enumerate(bv):
                assert x == (comb(N - 1, k + 1) if j == k else 0), (N, k, j, bv)


# 8 -------------------------------------------------------------------------------

@pytest.mark.criterion(8, "stair map of M_d is a chain map with disjoint supports, d <= 4, m <= 5")
def test_minor_certification():
    for d in range(1, 5):
        for m in range(d + 1, 6):
            assert verify_chain_map(d, m), (d, m)
            assert verify_disjoint_supports(d, m), (d, m)


# 9 -------------------------------------------------------------------------------

@pytest.mark.criterion(9, "constrained chain map fixture and heavy intersection")
def test_constrained_fixture(fixtures_dir):
    start = time.perf_counter()
    inst, grids = instance_from_json(load_json(fixtures_dir / "helly_d1_m2.json"))
    assert (inst.d, inst.m) == (1, 2)
    built = build_constrained_chain_map(inst, grids)
    assert built.ok
    assert verify_constrained(built.record, built.subgrid, inst)
    pair = find_cell_pair(inst, built.subgrid, built.record)
    assert pair is not None
    fam = [inst.system.index_of(x) for x in pair.family]
    assert len(fam) >= 2 * inst.m - inst.d == 3
    assert inst.system.meets(fam)
    heavy = find_heavy_intersection(inst)
    assert heavy is not None and len(heavy.members) >= 3
    assert inst.system.meets([inst.system.index_of(x) for x in heavy.members])
    assert time.perf_counter() - start < 60


# 10 ------------------------------------------------------------------------------

@pytest.mark.criterion(10, "stepping inequality and implied bound on 100 box families")
def test_stepping_up_sanity():
    for seed in range(100):
        F = generate_boxes(1, 10, SEED + seed)
        for ell in (3, 4):
            assert check_stepping_inequality(F, 2, ell).holds, (seed, ell)
        rep = stepping_up_report(F, 2, 2, 1)
        assert not rep.partial
        assert rep.implied_lower_bound <= rep.delta_k1, seed
        assert isinstance(rep.delta_k1, Fraction)


# 11 ------------------------------------------------------------------------------

def cli(args, cwd):
    env = {**os.environ, "GRIDHOM_THREADS": ""}
    out = subprocess.run([sys.executable, "-m", "gridhom.cli", *args], capture_output=True, cwd=cwd, env=env)
    return out.returncode, out.stdout


@pytest.mark.criterion(11, "same seed gives byte-identical reports")
def test_determinism(tmp_path, fixtures_dir):
    boxes = tmp_path / "boxes.json"
    boxes.write_text(dumps(system_to_json(generate_boxes(1, 10, SEED))))
    commands = [
        ["verify-identities", "--samples", "200", "--seed", "7"],
        ["verify-identities", "--samples", "200", "--seed", "7", "--threads", "2"],
        ["gen-boxes", "--d", "2", "--count", "8", "--seed", "7"],
        ["helly-run", "--instance", str(fixtures_dir / "helly_d1_m2.json")],
        ["helly-run", "--instance", str(fixtures_dir / "helly_split_d1_m2.json")],
        ["stepping-up", "--system", str(boxes), "--k", "2", "--t", "2", "--d", "1"],
        ["nerve", "--system", str(boxes), "--k", "3", "--ell", "4"],
        ["minor", "--d", "3", "--m", "4"],
        ["ramsey-bounds", "--m", "2", "--b", "1", "--d", "1", "--format", "json"],
    ]
    outputs = []
    for args in commands:
        first = cli(args, tmp_path)
        second = cli(args, tmp_path)
        assert first[0] == 0, args
        assert first == second, args
        outputs.append(first[1])
    assert outputs[0] == outputs[1]
