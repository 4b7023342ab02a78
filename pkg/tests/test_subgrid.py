from __future__ import annotations

import random
from itertools import product as iproduct

import pytest
from hypothesis import given, settings, strategies as st

from gridhom.errors import ContractViolation
from gridhom.grid import Chain, GridSpec, enumerate_cells, long_interval
from gridhom.checks import random_subgrid, subgrid_chain_map_suite
from gridhom.subgrid import (
    Gf2Hom,
    Subgrid,
    all_subgrids,
    base_point,
    box_chain,
    chi_coloring,
    compose,
    find_kernel_subgrid,
    find_monochromatic_subgrid,
    is_monochromatic,
    k_subsets,
    kernel_bound,
    kernel_colors,
    kernel_membership_bruteforce,
    mono_bound,
    ramsey_bounds,
    search_kernel_subgrid,
    shuffle,
    subgrid_chain_map,
    t_sequence,
    verify_box_inclusion_exclusion,
    verify_kernel,
)


def random_hom(rng, n, m, k, b):
    values = {c: rng.randrange(2 ** b) for c in enumerate_cells(GridSpec(n, m), k)}
    return Gf2Hom(n, m, k, b, {c: v for c, v in values.items() if v})


def test_subgrid_chain_map_examples():
    ident = Subgrid.identity(3, 2)
    c = Chain.of(GridSpec(3, 2), 1, [((1, 2), (3, 3))])
    assert subgrid_chain_map(ident, c) == c
    g = Subgrid(2, 3, ((1, 3),))
    assert subgrid_chain_map(g, Chain.of(GridSpec(2, 1), 1, [((1, 2),)])) == long_interval(1, 3, 3)
    with pytest.raises(ContractViolation):
        subgrid_chain_map(g, c)


def test_chain_map_law_suite():
    assert subgrid_chain_map_suite(300, seed=11)["failures"] == 0


def test_compose_examples():
    g = Subgrid(2, 5, ((2, 4),))
    assert compose(Subgrid.identity(5, 1), g) == g
    assert compose(g, Subgrid(2, 2, ((1, 2),))) == g
    rng = random.Random(0)
    for _ in range(100):
        inner = random_subgrid(rng, 3, 5, 2)
        outer = random_subgrid(rng, 5, 9, 2)
        comp = compose(outer, inner)
        for v in iproduct(range(1, 4), repeat=2):
            assert comp(v) == outer(inner(v))
    with pytest.raises(ContractViolation):
        compose(Subgrid.identity(4, 1), g)


def test_subgrid_rejects_non_increasing():
    with pytest.raises(ContractViolation):
        Subgrid(2, 4, ((3, 3),))


def test_box_examples():
    assert box_chain((2, 2), (2, 2), 0, 3) == Chain.vertex(GridSpec(3, 2), (2, 2))
    assert box_chain((2, 2), (2, 2), 1, 3).is_zero()
    assert box_chain((1, 1), (2, 1), 1, 3) == Chain.of(GridSpec(3, 2), 1, [((1, 2), (1, 1))])
    assert box_chain((1, 1), (3, 1), 1, 3) == Chain.of(GridSpec(3, 2), 1, [((1, 2), (1, 1)), ((2, 3), (1, 1))])
    with pytest.raises(ContractViolation):
        box_chain((2, 1), (1, 1), 1, 3)


def test_shuffle_and_base_point():
    assert shuffle((1, 5), (3, 7), []) == (3, 7)
    assert shuffle((1, 5), (3, 7), [0, 1]) == (1, 5)
    assert shuffle((1, 5), (3, 7), [0]) == (1, 7)
    assert base_point((4, 2), (4, 2)) == (4, 2)
    assert base_point((2, 3), (4, 3)) == (1, 3)
    assert base_point((2, 3), (4, 5)) == (1, 1)


def test_inclusion_exclusion():
    assert verify_box_inclusion_exclusion((2, 3), (4, 3), 4)
    assert verify_box_inclusion_exclusion((2, 3), (2, 3), 4)
    rng = random.Random(5)
    for _ in range(1000):
        m = rng.randint(1, 4)
        x = tuple(rng.randint(1, 6) for _ in range(m))
        y = tuple(rng.randint(a, 6) for a in x)
        assert verify_box_inclusion_exclusion(x, y, 6)


def test_chi_coloring_examples():
    rng = random.Random(1)
    h = random_hom(rng, 3, 2, 1, 1)
    assert chi_coloring(h, (1, 1)) == (0, 0)
    zero = Gf2Hom(3, 2, 1, 1, {})
    assert all(chi_coloring(zero, v) == (0, 0) for v in iproduct(range(1, 4), repeat=2))
    for z in iproduct(range(1, 4), repeat=2):
        # direct evaluation of the two boxes: axis 0 segment [1, z0] x {z1}, axis 1 {z0} x [1, z1]
        seg0 = sum(h.cell_value(((a, a + 1), (z[1], z[1]))) for a in range(1, z[0])) % 2
        seg1 = sum(h.cell_value(((z[0], z[0]), (a, a + 1))) for a in range(1, z[1])) % 2
        assert chi_coloring(h, z) == (seg0, seg1)


def test_k_subsets_colex():
    assert k_subsets(3, 2) == [(0, 1), (0, 2), (1, 2)]
    assert k_subsets(4, 2) == [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]


def test_mono_examples():
    col = {(1,): "red", (2,): "blue", (3,): "red"}
    g = find_monochromatic_subgrid(col, 3, 1, 2, q=2)
    assert g.maps == ((1, 3),)
    const = find_monochromatic_subgrid(lambda v: 0, 5, 2, 3)
    assert const == Subgrid.prefix(3, 5, 2)


def test_mono_random_at_the_bound():
    n = mono_bound(2, 2, 2)
    assert n == 7
    rng = random.Random(2)
    for _ in range(100):
        col = {v: rng.randint(0, 1) for v in iproduct(range(1, n + 1), repeat=2)}
        g = find_monochromatic_subgrid(col, n, 2, 2, q=2)
        assert g is not None and is_monochromatic(col, g)


def test_kernel_examples():
    zero = Gf2Hom(4, 2, 1, 1, {})
    assert find_kernel_subgrid(zero, 2) == Subgrid.prefix(2, 4, 2)
    h = Gf2Hom(3, 1, 1, 1, {((1, 2),): 1, ((2, 3),): 1})
    assert find_kernel_subgrid(h, 2).maps == ((1, 3),)


def test_kernel_random_certified():
    rng = random.Random(3)
    for _ in range(50):
        h = random_hom(rng, 7, 2, 1, 1)
        res = search_kernel_subgrid(h, 2)
        assert res.certified
        assert verify_kernel(h, res.subgrid) and kernel_membership_bruteforce(h, res.subgrid)


def test_kernel_agrees_with_exhaustive_on_small_grids():
    rng = random.Random(4)
    for n in range(2, 6):
        for _ in range(40):
            h = random_hom(rng, n, 2, 1, 1)
            oracle = next((g for g in all_subgrids(2, n, 2) if kernel_membership_bruteforce(h, g)), None)
            found = find_kernel_subgrid(h, 2)
            assert (found is None) == (oracle is None)
            if found is not None:
                assert kernel_membership_bruteforce(h, found)


def test_ramsey_examples():
    assert mono_bound(1, 2, 2) == 3
    assert mono_bound(2, 2, 2) == 7
    for ell in range(1, 11):
        for q in range(1, 11):
            assert mono_bound(1, ell, q) == (ell - 1) * q + 1
    for d in range(1, 9):
        assert next(t_sequence(1, d, d + 1)) == ((d + 1) // 2, d + 3)
    assert kernel_colors(1, 1, 3) == 2 ** 3
    assert kernel_colors(1, 1, 3, k1_exponent=True) == 2 ** 3
    assert kernel_colors(1, 1, 4) == 2 ** 4
    assert kernel_colors(1, 1, 4, k1_exponent=True) == 2 ** 6
    assert kernel_bound(1, 1, 2, 2) == mono_bound(2, 2, 4)
    rb = ramsey_bounds(2, ell=2, q=2)
    assert rb.to_json() == {"N_mono": "7"}


def test_t_sequence_b_zero():
    for d in range(1, 6):
        seq = list(t_sequence(0, d, d + 1))
        assert all(t == d + 3 for _, t in seq)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3))
def test_mono_output_is_monochromatic(seed, q):
    rng = random.Random(seed)
    n = 6
    col = {v: rng.randrange(q) for v in iproduct(range(1, n + 1), repeat=2)}
    g = find_monochromatic_subgrid(col, n, 2, 2)
    if g is not None:
        assert is_monochromatic(col, g)
    else:
        assert not any(is_monochromatic(col, s) for s in all_subgrids(2, n, 2))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 2), st.integers(1, 2))
def test_kernel_output_is_certified(seed, k, b):
    rng = random.Random(seed)
    h = random_hom(rng, 5, 2, k, b)
    res = search_kernel_subgrid(h, 2)
    if res.subgrid is not None:
        assert res.certified and kernel_membership_bruteforce(h, res.subgrid)
