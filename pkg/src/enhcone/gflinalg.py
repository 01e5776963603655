"""Exact linear algebra over prime fields GF(p).

Everything is immutable and hashable: matrices are tuples of row tuples
with entries in [0, p); subspaces are stored in reduced row echelon form
so that equal subspaces have identical representations and can be used
as cache keys.  Enumeration of subspaces walks RREF pivot patterns, so
each subspace appears exactly once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def check_prime(p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    return p


@dataclass(frozen=True)
class PrimeField:
    """A checked prime modulus with scalar helpers."""

    p: int

    def __post_init__(self):
        check_prime(self.p)

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF(p)")
        return pow(a, self.p - 2, self.p)

    def neg(self, a: int) -> int:
        return (-a) % self.p


def primes_first(k: int) -> tuple[int, ...]:
    """The first k primes, ascending."""
    out: list[int] = []
    n = 2
    while len(out) < k:
        if is_prime(n):
            out.append(n)
        n += 1
    return tuple(out)


def next_prime_after(n: int) -> int:
    n += 1
    while not is_prime(n):
        n += 1
    return n


@dataclass(frozen=True)
class MatrixGF:
    """Dense matrix over GF(p); rows is a tuple of row tuples."""

    p: int
    rows: tuple[tuple[int, ...], ...]
    ncols: int

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], p: int, ncols: int | None = None) -> "MatrixGF":
        check_prime(p)
        tup = tuple(tuple(x % p for x in row) for row in rows)
        if ncols is None:
            if not tup:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(tup[0])
        if any(len(row) != ncols for row in tup):
            raise ValueError("ragged rows")
        return cls(p, tup, ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, p: int) -> "MatrixGF":
        check_prime(p)
        return cls(p, tuple((0,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int, p: int) -> "MatrixGF":
        check_prime(p)
        return cls(p, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), n)

    def is_zero(self) -> bool:
        return all(not any(row) for row in self.rows)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def column(self, c: int) -> tuple[int, ...]:
        return tuple(row[c] for row in self.rows)

    def matvec(self, v: Sequence[int]) -> tuple[int, ...]:
        p = self.p
        return tuple(sum(a * b for a, b in zip(row, v)) % p for row in self.rows)

    def mul(self, other: "MatrixGF") -> "MatrixGF":
        if self.p != other.p or self.ncols != other.nrows:
            raise ValueError("matrix shape/field mismatch")
        p = self.p
        cols = list(zip(*other.rows)) if other.rows else []
        rows = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) % p for col in cols)
            for row in self.rows
        )
        return MatrixGF(p, rows, other.ncols)

    def __matmul__(self, other: "MatrixGF") -> "MatrixGF":
        return self.mul(other)

    def sub(self, other: "MatrixGF") -> "MatrixGF":
        if self.p != other.p or self.nrows != other.nrows or self.ncols != other.ncols:
            raise ValueError("matrix shape/field mismatch")
        p = self.p
        rows = tuple(
            tuple((a - b) % p for a, b in zip(r1, r2))
            for r1, r2 in zip(self.rows, other.rows)
        )
        return MatrixGF(p, rows, self.ncols)

    def transpose(self) -> "MatrixGF":
        if self.rows:
            rows = tuple(tuple(r) for r in zip(*self.rows))
        else:
            rows = tuple(() for _ in range(self.ncols))
        return MatrixGF(self.p, rows, self.nrows)


def _rref_rows(rows: list[list[int]], p: int, ncols: int) -> tuple[list[list[int]], list[int]]:
    """In-place row reduction; returns (reduced rows, pivot columns)."""
    nrows = len(rows)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = None
        for rr in range(r, nrows):
            if rows[rr][c]:
                pivot = rr
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        if inv != 1:
            rows[r] = [(x * inv) % p for x in rows[r]]
        lead = rows[r]
        for rr in range(nrows):
            f = rows[rr][c]
            if rr != r and f:
                rows[rr] = [(x - f * y) % p for x, y in zip(rows[rr], lead)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rref(m: MatrixGF) -> MatrixGF:
    """Reduced row echelon form, same shape (zero rows kept at the bottom)."""
    rows = [list(row) for row in m.rows]
    rows, _ = _rref_rows(rows, m.p, m.ncols)
    return MatrixGF(m.p, tuple(tuple(row) for row in rows), m.ncols)


def rank(m: MatrixGF) -> int:
    rows = [list(row) for row in m.rows]
    _, pivots = _rref_rows(rows, m.p, m.ncols)
    return len(pivots)


@dataclass(frozen=True)
class SubspaceGF:
    """Subspace of GF(p)^n in canonical form: RREF basis + pivot columns."""

    p: int
    ambient: int
    basis: tuple[tuple[int, ...], ...]
    pivots: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def span(cls, vectors: Sequence[Sequence[int]], ambient: int, p: int) -> "SubspaceGF":
        check_prime(p)
        rows = [[x % p for x in v] for v in vectors]
        for row in rows:
            if len(row) != ambient:
                raise ValueError("vector length does not match ambient dimension")
        if rows:
            rows, pivots = _rref_rows(rows, p, ambient)
            basis = tuple(tuple(row) for row in rows[: len(pivots)])
        else:
            basis, pivots = (), []
        return cls(p, ambient, basis, tuple(pivots))

    @classmethod
    def zero(cls, ambient: int, p: int) -> "SubspaceGF":
        check_prime(p)
        return cls(p, ambient, (), ())

    @classmethod
    def full(cls, ambient: int, p: int) -> "SubspaceGF":
        check_prime(p)
        basis = tuple(tuple(1 if i == j else 0 for j in range(ambient)) for i in range(ambient))
        return cls(p, ambient, basis, tuple(range(ambient)))

    @classmethod
    def coordinate(cls, coords: Sequence[int], ambient: int, p: int) -> "SubspaceGF":
        """Span of the standard basis vectors e_c for c in coords."""
        check_prime(p)
        cs = tuple(sorted(set(coords)))
        basis = tuple(tuple(1 if j == c else 0 for j in range(ambient)) for c in cs)
        return cls(p, ambient, basis, cs)

    def _check_compatible(self, other: "SubspaceGF") -> None:
        if self.p != other.p or self.ambient != other.ambient:
            raise ValueError("subspace field/ambient mismatch")

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        """Canonical representative of v modulo this subspace."""
        p = self.p
        out = [x % p for x in v]
        for row, c in zip(self.basis, self.pivots):
            f = out[c]
            if f:
                out = [(x - f * y) % p for x, y in zip(out, row)]
        return tuple(out)

    def contains(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v))

    def contains_subspace(self, other: "SubspaceGF") -> bool:
        self._check_compatible(other)
        return all(self.contains(row) for row in other.basis)

    def sum(self, other: "SubspaceGF") -> "SubspaceGF":
        self._check_compatible(other)
        return SubspaceGF.span(self.basis + other.basis, self.ambient, self.p)

    def intersect(self, other: "SubspaceGF") -> "SubspaceGF":
        """Intersection via the left kernel of the stacked basis matrix."""
        self._check_compatible(other)
        a, b = self.dim, other.dim
        if a == 0 or b == 0:
            return SubspaceGF.zero(self.ambient, self.p)
        stacked = MatrixGF(self.p, self.basis + other.basis, self.ambient)
        ker = kernel(stacked.transpose())
        vecs = []
        for coeffs in ker.basis:
            v = [0] * self.ambient
            for s in range(a):
                f = coeffs[s]
                if f:
                    v = [(x + f * y) % self.p for x, y in zip(v, self.basis[s])]
            vecs.append(v)
        return SubspaceGF.span(vecs, self.ambient, self.p)

    def basis_matrix(self) -> MatrixGF:
        return MatrixGF(self.p, self.basis, self.ambient)


def kernel(m: MatrixGF) -> SubspaceGF:
    """Null space {u : m u = 0}, canonical."""
    p = m.p
    ncols = m.ncols
    rows = [list(row) for row in m.rows]
    rows, pivots = _rref_rows(rows, p, ncols)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    vecs = []
    for c in free:
        v = [0] * ncols
        v[c] = 1
        for r, pc in enumerate(pivots):
            v[pc] = (-rows[r][c]) % p
        vecs.append(v)
    return SubspaceGF.span(vecs, ncols, p)


def image(m: MatrixGF) -> SubspaceGF:
    """Column space of m, as a canonical subspace of GF(p)^nrows."""
    cols = [m.column(c) for c in range(m.ncols)]
    return SubspaceGF.span(cols, m.nrows, m.p)


@dataclass(frozen=True)
class QuotientMap:
    """Projection GF(p)^n -> GF(p)^(n-d) whose kernel is span(basis_rows).

    basis_rows need not be globally RREF; it suffices that each row has
    entry 1 at its own pivot column and 0 at every other row's pivot
    column (true of RREF bases, and of unions of per-block RREF bases
    with disjoint coordinate supports).  The quotient coordinates are
    the non-pivot coordinates, in ascending order.
    """

    p: int
    ambient: int
    basis_rows: tuple[tuple[int, ...], ...]
    pivots: tuple[int, ...]
    nonpivots: tuple[int, ...]

    @property
    def codim(self) -> int:
        return len(self.nonpivots)

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        p = self.p
        out = [x % p for x in v]
        for row, c in zip(self.basis_rows, self.pivots):
            f = out[c]
            if f:
                out = [(x - f * y) % p for x, y in zip(out, row)]
        return tuple(out)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        reduced = self.reduce(v)
        return tuple(reduced[c] for c in self.nonpivots)

    def push_matrix(self, x: MatrixGF) -> MatrixGF:
        """Induced map on the quotient; requires x(kernel) <= kernel."""
        cols = [self.apply(x.column(c)) for c in self.nonpivots]
        rows = tuple(tuple(col[t] for col in cols) for t in range(self.codim))
        return MatrixGF(self.p, rows, self.codim)

    def lift(self, v: Sequence[int]) -> tuple[int, ...]:
        out = [0] * self.ambient
        for val, c in zip(v, self.nonpivots):
            out[c] = val % self.p
        return tuple(out)

    def preimage(self, sub: SubspaceGF) -> SubspaceGF:
        vecs = [self.lift(row) for row in sub.basis] + list(self.basis_rows)
        return SubspaceGF.span(vecs, self.ambient, self.p)

    def kernel_subspace(self) -> SubspaceGF:
        return SubspaceGF.span(self.basis_rows, self.ambient, self.p)


def projection_from_rows(
    p: int, ambient: int, basis_rows: Sequence[Sequence[int]], pivots: Sequence[int]
) -> QuotientMap:
    pivot_set = set(pivots)
    if len(pivot_set) != len(tuple(pivots)):
        raise ValueError("duplicate pivot columns")
    nonpivots = tuple(c for c in range(ambient) if c not in pivot_set)
    return QuotientMap(
        p, ambient, tuple(tuple(r) for r in basis_rows), tuple(pivots), nonpivots
    )


def quotient_map(w: SubspaceGF) -> QuotientMap:
    """Quotient map by w onto the non-pivot coordinate space of GF(p)^n."""
    return projection_from_rows(w.p, w.ambient, w.basis, w.pivots)


def _rref_patterns(k: int, d: int, p: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All d x k RREF matrices of full row rank, each rowspace once."""
    for pivots in itertools.combinations(range(k), d):
        pivot_set = set(pivots)
        free_positions = [
            (r, c)
            for r in range(d)
            for c in range(pivots[r] + 1, k)
            if c not in pivot_set
        ]
        base = [[0] * k for _ in range(d)]
        for r, c in enumerate(pivots):
            base[r][c] = 1
        if not free_positions:
            yield tuple(tuple(row) for row in base)
            continue
        for values in itertools.product(range(p), repeat=len(free_positions)):
            rows = [row[:] for row in base]
            for (r, c), val in zip(free_positions, values):
                rows[r][c] = val
            yield tuple(tuple(row) for row in rows)


def enumerate_subspaces(ambient: SubspaceGF, d: int) -> Iterator[SubspaceGF]:
    """Every d-dimensional subspace of ambient, exactly once.

    Works in the coordinates of the ambient RREF basis; the product of an
    RREF coefficient pattern with an RREF basis is again RREF, so results
    are canonical without re-reduction.
    """
    k, p, n = ambient.dim, ambient.p, ambient.ambient
    if d < 0 or d > k:
        raise ValueError(f"cannot take {d}-dim subspaces of a {k}-dim space")
    if d == 0:
        yield SubspaceGF.zero(n, p)
        return
    amb_rows = ambient.basis
    amb_pivots = ambient.pivots
    for pattern in _rref_patterns(k, d, p):
        rows = []
        pivots = []
        for prow in pattern:
            acc = [0] * n
            lead = None
            for s, f in enumerate(prow):
                if f:
                    if lead is None:
                        lead = s
                    src = amb_rows[s]
                    acc = [(x + f * y) % p for x, y in zip(acc, src)]
            rows.append(tuple(acc))
            pivots.append(amb_pivots[lead])
        yield SubspaceGF(p, n, tuple(rows), tuple(pivots))


def gaussian_binomial(m: int, d: int, q: int) -> int:
    """q-binomial coefficient [m choose d]_q; 0 outside 0 <= d <= m.

    >>> gaussian_binomial(2, 1, 2)
    3
    >>> gaussian_binomial(4, 2, 2)
    35
    """
    if d < 0 or d > m:
        return 0
    num = 1
    den = 1
    for i in range(d):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


@dataclass(frozen=True)
class FlagGF:
    """Nested sequence of subspaces W_1 <= ... <= W_m with fixed dimensions."""

    subspaces: tuple[SubspaceGF, ...]

    def __post_init__(self):
        subs = self.subspaces
        for i in range(len(subs) - 1):
            if not subs[i + 1].contains_subspace(subs[i]):
                raise ValueError("flag subspaces are not nested")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.subspaces)
