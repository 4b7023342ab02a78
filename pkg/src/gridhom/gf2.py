"""Dense GF(2) linear algebra on Python-int bitsets.

Rows are stored as integers with bit ``j`` holding column ``j``.  Plain
Gaussian elimination throughout; instances here are desk-scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import ContractViolation


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


@dataclass(frozen=True)
class Gf2Vector:
    bits: int
    length: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.length:
            raise ContractViolation("vector bits exceed its length")

    @classmethod
    def from_list(cls, entries: Sequence[int]) -> "Gf2Vector":
        bits = 0
        for j, e in enumerate(entries):
            if e & 1:
                bits |= 1 << j
        return cls(bits, len(entries))

    @classmethod
    def zeros(cls, length: int) -> "Gf2Vector":
        return cls(0, length)

    def to_list(self) -> list[int]:
        return [(self.bits >> j) & 1 for j in range(self.length)]

    def to_bitstring(self) -> str:
        return "".join(str(e) for e in self.to_list())

    @classmethod
    def from_bitstring(cls, s: str) -> "Gf2Vector":
        if any(ch not in "01" for ch in s):
            raise ContractViolation(f"not a bitstring: {s!r}")
        return cls.from_list([int(ch) for ch in s])

    def __add__(self, other: "Gf2Vector") -> "Gf2Vector":
        if self.length != other.length:
            raise ContractViolation("vector length mismatch")
        return Gf2Vector(self.bits ^ other.bits, self.length)

    def __iter__(self):
        return iter(self.to_list())

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def is_zero(self) -> bool:
        return self.bits == 0

    def padded(self, length: int) -> "Gf2Vector":
        if length < self.length:
            raise ContractViolation(f"cannot pad length {self.length} down to {length}")
        return Gf2Vector(self.bits, length)


@dataclass(frozen=True)
class Gf2Matrix:
    nrows: int
    ncols: int
    data: tuple[int, ...]

    def __post_init__(self):
        if len(self.data) != self.nrows:
            raise ContractViolation("row count does not match data")
        limit = 1 << self.ncols
        for r in self.data:
            if r < 0 or r >= limit:
                raise ContractViolation("row has bits beyond ncols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "Gf2Matrix":
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        data = []
        for row in rows:
            if len(row) != ncols:
                raise ContractViolation("ragged rows")
            data.append(Gf2Vector.from_list(row).bits)
        return cls(len(rows), ncols, tuple(data))

    @classmethod
    def from_columns(cls, columns: Sequence[int], nrows: int) -> "Gf2Matrix":
        """Build from column bitsets (bit ``i`` of a column is row ``i``)."""
        data = [0] * nrows
        for j, col in enumerate(columns):
            c = col
            while c:
                low = c & -c
                data[low.bit_length() - 1] |= 1 << j
                c ^= low
        return cls(nrows, len(columns), tuple(data))

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Gf2Matrix":
        return cls(nrows, ncols, (0,) * nrows)

    def entry(self, i: int, j: int) -> int:
        return (self.data[i] >> j) & 1

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.data]

    def transpose(self) -> "Gf2Matrix":
        return Gf2Matrix.from_columns(self.data, self.ncols)

    def columns(self) -> list[int]:
        return list(self.transpose().data)

    def matvec(self, x: Gf2Vector) -> Gf2Vector:
        if x.length != self.ncols:
            raise ContractViolation("matvec dimension mismatch")
        bits = 0
        for i, r in enumerate(self.data):
            if _parity(r & x.bits):
                bits |= 1 << i
        return Gf2Vector(bits, self.nrows)

    @cached_property
    def _reduced(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        return _rref(self.data, self.ncols)

    @cached_property
    def rank(self) -> int:
        return _rank(self.data)

    def solve(self, b: Gf2Vector) -> Gf2Vector | None:
        return solve(self, b)

    def kernel_basis(self) -> list[Gf2Vector]:
        return kernel_basis(self)


def _rank(rows: Iterable[int]) -> int:
    pivots: dict[int, int] = {}
    for r in rows:
        while r:
            low = r & -r
            p = pivots.get(low)
            if p is None:
                pivots[low] = r
                break
            r ^= p
    return len(pivots)


def _rref(rows: Sequence[int], ncols: int):
    """Reduced row echelon form.

    Returns ``(R, pivots, T)`` where ``R = T * M`` row by row, ``pivots[r]``
    is the pivot column of row ``r`` for ``r < rank`` and ``T`` records the
    row operations as bitsets over the original rows.
    """
    R = list(rows)
    T = [1 << i for i in range(len(R))]
    pivots: list[int] = []
    top = 0
    for col in range(ncols):
        bit = 1 << col
        found = -1
        for i in range(top, len(R)):
            if R[i] & bit:
                found = i
                break
        if found < 0:
            continue
        R[top], R[found] = R[found], R[top]
        T[top], T[found] = T[found], T[top]
        prow, ptrans = R[top], T[top]
        for i in range(len(R)):
            if i != top and R[i] & bit:
                R[i] ^= prow
                T[i] ^= ptrans
        pivots.append(col)
        top += 1
        if top == len(R):
            break
    return tuple(R), tuple(pivots), tuple(T)


def rank(M: Gf2Matrix) -> int:
    """Dimension of the row space of ``M`` over GF(2)."""
    return M.rank


def solve(M: Gf2Matrix, b: Gf2Vector) -> Gf2Vector | None:
    """One solution of ``M x = b`` with free variables set to zero, or None."""
    if b.length != M.nrows:
        raise ContractViolation(f"rhs length {b.length} != rows {M.nrows}")
    R, pivots, T = M._reduced
    x = 0
    for r in range(len(R)):
        rhs = _parity(T[r] & b.bits)
        if r < len(pivots):
            if rhs:
                x |= 1 << pivots[r]
        elif rhs:
            return None
    return Gf2Vector(x, M.ncols)


def kernel_basis(M: Gf2Matrix) -> list[Gf2Vector]:
    """Basis of ``{x : M x = 0}``, one vector per free column, in column order."""
    R, pivots, _ = M._reduced
    pivot_set = set(pivots)
    basis = []
    for f in range(M.ncols):
        if f in pivot_set:
            continue
        v = 1 << f
        for r, p in enumerate(pivots):
            if (R[r] >> f) & 1:
                v |= 1 << p
        basis.append(Gf2Vector(v, M.ncols))
    return basis


class EchelonBasis:
    """Incrementally maintained span of bitset vectors.

    ``add`` reports whether the vector was independent of everything added
    so far; ``reduce`` returns the residue of a vector modulo the span.
    """

    def __init__(self):
        self._pivots: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._pivots)

    def reduce(self, v: int) -> int:
        out = 0
        while v:
            low = v & -v
            p = self._pivots.get(low)
            if p is None:
                out |= low
                v ^= low
            else:
                v ^= p
        return out

    def add(self, v: int) -> bool:
        while v:
            low = v & -v
            p = self._pivots.get(low)
            if p is None:
                self._pivots[low] = v
                return True
            v ^= p
        return False
