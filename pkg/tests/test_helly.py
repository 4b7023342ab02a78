from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product as iproduct
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from gridhom.errors import ContractViolation, HypothesisError
from gridhom.grid import AxisFlat, cell_dim, cell_key, enumerate_skeleton
from gridhom.homology import grid_complex, path_complex, simplicial_complex
from gridhom.helly import (
    ColorfulInstance,
    build_constrained_chain_map,
    colorful_of_flat,
    colorful_of_vertex,
    constrained_violations,
    find_cell_pair,
    find_heavy_intersection,
    helly_t,
    hypothesis_report,
    run_helly,
    stepping_up_report,
    verify_constrained,
)
from gridhom.io import instance_from_json, load_json
from gridhom.nerve import Member, SetSystem, delta, generate_boxes


def load_instance(fixtures_dir, name):
    return instance_from_json(load_json(fixtures_dir / name))


def equal_members(ambient, d, m, t):
    members = [Member(f"S{i}_{j}", ambient.cellset) for i in range(m) for j in range(t)]
    classes = [[f"S{i}_{j}" for j in range(t)] for i in range(m)]
    return ColorfulInstance(SetSystem(ambient, members), d, classes)


def four_points(sets):
    ambient = simplicial_complex([[1], [3], [5], [7]])
    return SetSystem.from_vertex_sets(ambient, sets)


# Colorful families -----------------------------------------------------------------

def test_colorful_family_examples(fixtures_dir):
    inst, _ = load_instance(fixtures_dir, "helly_d1_m2.json")
    fam = colorful_of_vertex(inst, (1, 3))
    assert sorted(inst.name(i) for i in fam) == ["B3", "R1"]
    flat = AxisFlat.from_mapping(2, {0: 2})
    assert sorted(inst.name(i) for i in colorful_of_flat(inst, flat)) == ["R2"]
    assert colorful_of_flat(inst, AxisFlat.from_mapping(2, {})) == frozenset()
    point = AxisFlat.from_mapping(2, {0: 4, 1: 5})
    assert colorful_of_flat(inst, point) == colorful_of_vertex(inst, (4, 5))


def test_colorful_of_vertex_is_injective(fixtures_dir):
    inst, _ = load_instance(fixtures_dir, "helly_d1_m2.json")
    seen = {colorful_of_vertex(inst, v) for v in iproduct(range(1, inst.t + 1), repeat=inst.m)}
    assert len(seen) == inst.t ** inst.m
    assert all(len(f) == inst.m for f in seen)


def test_flats_match_colorful_subfamilies(fixtures_dir):
    inst, _ = load_instance(fixtures_dir, "helly_d1_m2.json")
    m, t = inst.m, inst.t
    for k in range(m + 1):
        flats = set()
        for axes in combinations(range(m), m - k):
            for vals in iproduct(range(1, t + 1), repeat=m - k):
                fam = colorful_of_flat(inst, AxisFlat.from_mapping(m, dict(zip(axes, vals))))
                assert len(fam) == m - k
                flats.add(fam)
        assert len(flats) == comb(m, k) * t ** (m - k)


def test_vertex_outside_grid_rejected(fixtures_dir):
    inst, _ = load_instance(fixtures_dir, "helly_d1_m2.json")
    with pytest.raises(ContractViolation):
        colorful_of_vertex(inst, (0, 1))


# Instance validation ----------------------------------------------------------------

def test_empty_colorful_intersection_is_hypothesis_error():
    F = SetSystem.from_vertex_sets(path_complex(4), [("R1", [1]), ("R2", [2]), ("B1", [1, 2]), ("B2", [4])])
    with pytest.raises(HypothesisError):
        ColorfulInstance(F, 1, [["R1", "R2"], ["B1", "B2"]])


def test_instance_contracts():
    F = SetSystem.from_vertex_sets(path_complex(3), [("A", [1, 2]), ("B", [2, 3])])
    with pytest.raises(ContractViolation):
        ColorfulInstance(F, 1, [["A"]])
    with pytest.raises(ContractViolation):
        ColorfulInstance(F, 1, [["A"], ["A"]])
    with pytest.raises(ContractViolation):
        ColorfulInstance(F, 1, [["A", "B"], ["B"]])
    with pytest.raises(ContractViolation):
        equal_members(grid_complex(3, 2), 1, 2, 2)


def test_shatter_bound_on_fixtures(fixtures_dir):
    nested, _ = load_instance(fixtures_dir, "helly_d1_m2.json")
    split, _ = load_instance(fixtures_dir, "helly_split_d1_m2.json")
    assert nested.b == 0
    assert split.b == 1


def test_flats_mode_checks_fewer_families(fixtures_dir):
    data = load_json(fixtures_dir / "helly_split_d1_m2.json")
    data["mode"] = "flats"
    inst, _ = instance_from_json(data)
    assert inst.mode == "flats"
    assert 0 <= inst.b <= 1


# Constrained chain map -----------------------------------------------------------------

@pytest.mark.parametrize("name", ["helly_d1_m2.json", "helly_split_d1_m2.json"])
def test_fixture_builds_and_certifies(fixtures_dir, name):
    inst, grids = load_instance(fixtures_dir, name)
    built = build_constrained_chain_map(inst, grids)
    assert built.ok and built.failed_level is None
    assert built.subgrid.ell == grids[-1] and built.subgrid.n == inst.t
    assert verify_constrained(built.record, built.subgrid, inst)
    pair = find_cell_pair(inst, built.subgrid, built.record)
    assert pair is not None
    fam = [inst.system.index_of(n) for n in pair.family]
    assert len(fam) >= 2 * inst.m - inst.d
    assert inst.system.meets(fam)


def test_split_fixture_needs_kernel_search(fixtures_dir):
    inst, grids = load_instance(fixtures_dir, "helly_split_d1_m2.json")
    built = build_constrained_chain_map(inst, grids)
    assert built.log[0].nonzero_cells > 0


def test_tampered_record_fails_certification(fixtures_dir):
    inst, grids = load_instance(fixtures_dir, "helly_d1_m2.json")
    built = build_constrained_chain_map(inst, grids)
    record = built.record
    edge = next(c for c in enumerate_skeleton(record.source, 1) if cell_dim(c) == 1 and record.table[c])
    record.table[edge] = frozenset()
    assert not verify_constrained(record, built.subgrid, inst)
    assert {"cell": cell_key(edge), "problem": "chain_map"} in \
        constrained_violations(record, built.subgrid, inst)


def test_tampered_support_detected(fixtures_dir):
    inst, grids = load_instance(fixtures_dir, "helly_d1_m2.json")
    built = build_constrained_chain_map(inst, grids)
    record = built.record
    v = next(c for c in enumerate_skeleton(record.source, 0))
    outside = [c for c in inst.system.ambient.cells(0) if c not in inst.intersection(
        frozenset(inst.member(built.subgrid.maps[i][a - 1], i) for i, (a, _) in enumerate(v))).cellset]
    record.table[v] = frozenset([outside[0]])
    problems = {p["problem"] for p in constrained_violations(record, built.subgrid, inst)}
    assert "support" in problems


def test_level_fails_without_room(fixtures_dir):
    inst, _ = load_instance(fixtures_dir, "helly_split_d1_m2.json")
    built = build_constrained_chain_map(inst, [inst.t, inst.t])
    assert not built.ok
    assert built.failed_level == 0


def test_grid_size_contract(fixtures_dir):
    inst, _ = load_instance(fixtures_dir, "helly_d1_m2.json")
    with pytest.raises(ContractViolation):
        build_constrained_chain_map(inst, [inst.t])
    with pytest.raises(ContractViolation):
        build_constrained_chain_map(inst, [inst.t - 1, 2])
    with pytest.raises(ContractViolation):
        build_constrained_chain_map(inst, [inst.t, inst.t + 1])


@pytest.mark.parametrize("ambient,d,m,t,grids", [
    (path_complex(3), 1, 2, 4, [4, 3]),
    (grid_complex(3, 2), 2, 3, 3, [3, 3]),
])
def test_all_members_equal(ambient, d, m, t, grids):
    inst = equal_members(ambient, d, m, t)
    assert inst.b == 0
    report = run_helly(inst, grids)
    assert report.success and report.certified
    assert len(report.heavy.members) == m * t


# Conclusion ----------------------------------------------------------------------

def test_planted_single_heavy_tuple():
    F = four_points([("R1", [1, 3]), ("R2", [5, 7]), ("B1", [1, 5]), ("B2", [1, 7])])
    inst = ColorfulInstance(F, 1, [["R1", "R2"], ["B1", "B2"]])
    heavy = find_heavy_intersection(inst)
    assert heavy.members == ("B1", "B2", "R1")
    assert heavy.point == 1


def test_no_heavy_tuple_reports_failed_hypothesis():
    F = four_points([("R1", [1, 3]), ("R2", [5, 7]), ("B1", [1, 5]), ("B2", [3, 7])])
    inst = ColorfulInstance(F, 1, [["R1", "R2"], ["B1", "B2"]])
    assert find_heavy_intersection(inst) is None
    hyp = hypothesis_report(inst)
    assert hyp["b"] == 1
    assert hyp["t_required"] == "211"
    assert hyp["t_sufficient"] is False
    report = run_helly(inst, [2, 1])
    assert not report.success and report.heavy is None
    assert report.to_json()["hypotheses"]["t_sufficient"] is False


def test_report_json_shape(fixtures_dir):
    inst, grids = load_instance(fixtures_dir, "helly_d1_m2.json")
    out = run_helly(inst, grids).to_json()
    assert out["success"] is True
    assert out["certificate"]["level"] == inst.levels
    assert len(out["heavy"]["members"]) >= 2 * inst.m - inst.d


# Sizes ------------------------------------------------------------------------

def test_helly_t_golden():
    assert helly_t(1, 1, 2) == 211
    for d in range(1, 6):
        assert helly_t(0, d, d + 1) == d + 3


# Stepping up ----------------------------------------------------------------------

def test_stepping_up_all_intersecting():
    F = SetSystem.from_vertex_sets(path_complex(6), [(f"I{j}", range(1, 7 - (j % 3))) for j in range(6)])
    rep = stepping_up_report(F, 2, 2, 1)
    assert delta(F, 2) == 1
    assert rep.hosts == comb(6, 4) and rep.certified_hosts == rep.hosts
    assert rep.rho_hat == 1
    assert rep.implied_lower_bound == Fraction(1, 4) <= rep.delta_k1


def test_stepping_up_no_edges():
    F = four_points([("A", [1]), ("B", [3]), ("C", [5]), ("D", [7])])
    rep = stepping_up_report(F, 2, 2, 1)
    assert rep.copies == 0 and rep.hosts == 0 and rep.rho_hat == 0


def test_stepping_up_planted_copy():
    F = four_points([("A", [1, 7]), ("B", [1, 3]), ("C", [1, 5]), ("D", [5, 7])])
    rep = stepping_up_report(F, 2, 2, 1)
    assert rep.copies == 1 and rep.hosts == 1 and rep.certified_hosts == 1
    assert rep.heavy[0].members == ("A", "B", "C")
    assert rep.implied_lower_bound <= rep.delta_k1


def test_stepping_up_contract():
    F = four_points([("A", [1]), ("B", [3]), ("C", [5]), ("D", [7])])
    with pytest.raises(ContractViolation):
        stepping_up_report(F, 1, 2, 1)
    with pytest.raises(ContractViolation):
        stepping_up_report(F, 2, 3, 1)


def test_stepping_up_partial_on_budget():
    F = generate_boxes(1, 10, seed=3)
    rep = stepping_up_report(F, 2, 2, 1, max_steps=1)
    assert rep.partial


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_implied_bound_below_delta(seed):
    F = generate_boxes(1, 8, seed=seed)
    rep = stepping_up_report(F, 2, 2, 1)
    assert rep.implied_lower_bound <= rep.delta_k1
    assert rep.witnessed_density <= rep.delta_k1
    assert rep.certified_hosts <= rep.hosts
