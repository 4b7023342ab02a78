"""Stair-convex chains and exhaustive checks of their boundary identities."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence

from .errors import ContractViolation
from .grid import Chain, GridSpec, boundary, chain_sum, long_interval, product, unit


@dataclass(frozen=True)
class StairArgs:
    m: int
    anchors: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "anchors", tuple(self.anchors))
        if not self.anchors:
            raise ContractViolation("stair chain needs at least one anchor")
        if any(b <= a for a, b in zip(self.anchors, self.anchors[1:])):
            raise ContractViolation(f"anchors {self.anchors} are not strictly increasing")
        if self.anchors[0] < 1 or self.anchors[-1] > self.n:
            raise ContractViolation(f"anchors {self.anchors} outside [1, {self.n}]")
        if self.m < 0:
            raise ContractViolation("m must be non-negative")

    @property
    def k(self) -> int:
        return len(self.anchors) - 1

    @property
    def spec(self) -> GridSpec:
        return GridSpec(self.n, self.m)


def _diagonal(m: int, a: int, n: int) -> Chain:
    if m == 0:
        return unit(n)
    return Chain.vertex(GridSpec(n, m), (a,) * m)


@lru_cache(maxsize=None)
def _stc(m: int, anchors: tuple[int, ...], n: int) -> Chain:
    k = len(anchors) - 1
    if k == 0:
        return _diagonal(m, anchors[0], n)
    if k > m:
        return Chain.zero(GridSpec(n, m), k)
    if k == m:
        out = unit(n)
        for a, b in zip(anchors, anchors[1:]):
            out = product(out, long_interval(a, b, n))
        return out
    head = product(_stc(m - 1, anchors[:-1], n), long_interval(anchors[-2], anchors[-1], n))
    tail = product(_stc(m - 1, anchors, n), long_interval(anchors[-1], anchors[-1], n))
    return head + tail


def stc_recursive(args: StairArgs) -> Chain:
    """stc^m_k(a_1, ..., a_{k+1}) from the four-case recursive definition."""
    return _stc(args.m, args.anchors, args.n)


def stc(m: int, anchors: Sequence[int], n: int) -> Chain:
    return stc_recursive(StairArgs(m, tuple(anchors), n))


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Weak compositions of ``total`` into ``parts`` non-negative summands."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def stc_unwrapped(args: StairArgs) -> Chain:
    """Closed-form sum over compositions t_1 + ... + t_{k+1} = m - k."""
    m, k, n, a = args.m, args.k, args.n, args.anchors
    if k < 1 or k > m:
        raise ContractViolation("unwrapped form needs m >= k >= 1")
    acc = Chain.zero(GridSpec(n, m), k)
    for ts in compositions(m - k, k + 1):
        term = _diagonal(ts[0], a[0], n)
        for i in range(k):
            term = product(term, long_interval(a[i], a[i + 1], n))
            term = product(term, _diagonal(ts[i + 1], a[i + 1], n))
        acc = acc + term
    return acc


def _omit(seq: Sequence[int], i: int) -> tuple[int, ...]:
    return tuple(seq[:i]) + tuple(seq[i + 1:])


def verify_simplex_boundary(args: StairArgs) -> bool:
    """del stc^m_k(a) == sum over i of stc^m_{k-1}(a with a_i omitted)."""
    if args.k < 1 or args.k > args.m:
        raise ContractViolation("simplex boundary check needs m >= k >= 1")
    lhs = boundary(stc_recursive(args))
    rhs = chain_sum(
        (_stc(args.m, _omit(args.anchors, i), args.n) for i in range(args.k + 1)),
        args.spec,
        args.k - 1,
    )
    return lhs == rhs


def verify_alternating_sum(m: int, anchors: Sequence[int], n: int) -> bool:
    """Sum of the m+2 boxes stc^m_m(a with a_i omitted) vanishes."""
    anchors = tuple(anchors)
    if len(anchors) != m + 2:
        raise ContractViolation(f"need {m + 2} anchors, got {len(anchors)}")
    StairArgs(m, anchors, n)
    total = chain_sum((_stc(m, _omit(anchors, i), n) for i in range(m + 2)), GridSpec(n, m), m)
    return total.is_zero()


def support_hyperplane_anchors(args: StairArgs) -> set[int]:
    """Values ``a`` such that some top cell of the support lies in some ``x_j = a``."""
    chain = stc_recursive(args)
    if args.k == 0:
        return {args.anchors[0]}
    values: set[int] = set()
    for cell in chain.cells:
        for a, b in cell:
            if a == b:
                values.add(a)
    return values


def anchor_tuples(n: int, size: int) -> Iterator[tuple[int, ...]]:
    return combinations(range(1, n + 1), size)


def _first_failure(cases, check):
    count = 0
    failures = []
    for case in cases:
        count += 1
        if not check(case):
            failures.append(case)
    return count, failures


def boundary_suite(max_m: int, n: int) -> dict:
    cases = [StairArgs(m, a, n) for m in range(1, max_m + 1) for k in range(1, m + 1)
             for a in anchor_tuples(n, k + 1)]
    count, failures = _first_failure(cases, verify_simplex_boundary)
    return _suite("simplex_boundary", count, failures)


def unwrap_suite(max_m: int, n: int) -> dict:
    cases = [StairArgs(m, a, n) for m in range(1, max_m + 1) for k in range(1, m + 1)
             for a in anchor_tuples(n, k + 1)]
    count, failures = _first_failure(cases, lambda s: stc_recursive(s) == stc_unwrapped(s))
    return _suite("unwrapped_equals_recursive", count, failures)


def alternating_suite(max_m: int, n: int) -> dict:
    cases = [(m, a) for m in range(1, max_m + 1) for a in anchor_tuples(n, m + 2)]
    count, failures = _first_failure(cases, lambda c: verify_alternating_sum(c[0], c[1], n))
    return {
        "suite": "alternating_sum",
        "cases": count,
        "failures": len(failures),
        "counterexamples": [{"m": m, "anchors": list(a), "n": n} for m, a in failures[:10]],
    }


def hyperplane_suite(max_m: int, n: int) -> dict:
    cases = [StairArgs(m, a, n) for m in range(1, max_m + 1) for k in range(1, m + 1)
             for a in anchor_tuples(n, k + 1)]
    count, failures = _first_failure(
        cases, lambda s: support_hyperplane_anchors(s) <= set(s.anchors)
    )
    return _suite("hyperplane_anchors", count, failures)


def _suite(name: str, count: int, failures: list[StairArgs]) -> dict:
    return {
        "suite": name,
        "cases": count,
        "failures": len(failures),
        "counterexamples": [{"m": s.m, "anchors": list(s.anchors), "n": s.n} for s in failures[:10]],
    }
