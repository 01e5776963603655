"""Exact point counts of resolution fibers over GF(p).

The fiber of the resolution attached to a flag shape (r_0 < ... < r_m, j)
over a pair (v, x) consists of the flags W of that shape with
x(W_i) <= W_{i-1} for all i and v in W_j.  Counting recurses on the
first step: x(W_1) <= W_0 = 0 forces W_1 <= ker x, and the rest of the
flag is a fiber flag for the induced pair on V / W_1 with the shifted
shape and marker j - 1 (a marker of 0 requires v = 0 up front).

Counts depend only on the orbit of (v, x), so the memoized counter keys
its cache on the classified bipartition of the pair rather than on raw
matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from .combinatorics import Bipartition, FlagShape, bipartitions, flag_shape
from .gflinalg import (
    MatrixGF,
    SubspaceGF,
    enumerate_subspaces,
    kernel,
    next_prime_after,
    primes_first,
    quotient_map,
    rank,
)
from .normalform import (
    GradedPair,
    NormalPair,
    classify_pair,
    enumerate_graded_subspaces,
    graded_kernel_blocks,
    graded_projection,
    normal_pair,
)


@dataclass(frozen=True)
class FiberQuery:
    """A pair (v, x) over GF(p) together with a flag shape and marker.

    weights, when present, record the cocharacter grading of the pair's
    normal basis and enable fixed-point counting.
    """

    v: tuple[int, ...]
    x: MatrixGF
    shape: FlagShape
    weights: tuple[int, ...] | None = None

    def __post_init__(self):
        if not self.x.is_square() or len(self.v) != self.x.ncols:
            raise ValueError("pair dimensions disagree")
        if self.shape.n != self.x.ncols:
            raise ValueError(
                f"shape ends at {self.shape.n} but the ambient space has dim {self.x.ncols}"
            )
        if self.weights is not None and len(self.weights) != self.x.ncols:
            raise ValueError("one weight per coordinate required")

    @property
    def p(self) -> int:
        return self.x.p

    @classmethod
    def of(cls, np_: NormalPair, shape: FlagShape) -> "FiberQuery":
        return cls(np_.v, np_.x, shape, np_.weights)

    @classmethod
    def raw(cls, v: Sequence[int], x: MatrixGF, shape: FlagShape) -> "FiberQuery":
        return cls(tuple(a % x.p for a in v), x, shape)

    @classmethod
    def over_orbit(cls, small: Bipartition, big: Bipartition, p: int) -> "FiberQuery":
        """Fiber of big's resolution over the normal point of small's orbit."""
        return cls.of(normal_pair(small, p), flag_shape(big))

    def graded_pair(self) -> GradedPair:
        if self.weights is None:
            raise ValueError("query carries no weights")
        return GradedPair(self.x, self.v, self.weights)


def count_fiber(q: FiberQuery) -> int:
    """Exact number of fiber flags over GF(p), by direct recursion."""
    return _count(q.v, q.x, q.shape.dims, q.shape.marker)


def _count(v: tuple[int, ...], x: MatrixGF, dims: tuple[int, ...], j: int) -> int:
    if j == 0 and any(v):
        return 0
    m = len(dims) - 1
    if m == 0:
        return 1
    r1 = dims[1]
    ker = kernel(x)
    if r1 > ker.dim:
        return 0
    rest = tuple(r - r1 for r in dims[1:])
    jj = j - 1 if j >= 1 else 0
    total = 0
    for w in enumerate_subspaces(ker, r1):
        qm = quotient_map(w)
        total += _count(qm.apply(v), qm.push_matrix(x), rest, jj)
    return total


class FiberCache:
    """Shared memo table for orbit-keyed fiber counts.

    Keys are (mu, nu, dims, j, p); values exact counts.  Lookups and
    idempotent inserts are safe under concurrent use; no lock is held
    while a missing value is being computed.
    """

    FORMAT = 1

    def __init__(self):
        self._table: dict = {}
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._table)

    def get(self, key):
        value = self._table.get(key)
        if value is None:
            self.misses += 1
        else:
            self.hits += 1
        return value

    def put(self, key, value: int) -> None:
        self._table.setdefault(key, value)

    def clear(self) -> None:
        self._table.clear()
        self.hits = 0
        self.misses = 0

    @property
    def stats(self) -> dict:
        return {"hits": self.hits, "misses": self.misses, "entries": len(self._table)}

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(json.dumps({"cache_format": self.FORMAT}) + "\n")
            for key, count in sorted(self._table.items()):
                mu, nu, dims, j, p = key
                record = {"key": [list(mu), list(nu), list(dims), j, p], "count": count}
                fh.write(json.dumps(record) + "\n")

    def load(self, path) -> None:
        with open(path) as fh:
            header = json.loads(fh.readline())
            if header.get("cache_format") != self.FORMAT:
                raise ValueError(f"unsupported cache format: {header}")
            for line in fh:
                record = json.loads(line)
                mu, nu, dims, j, p = record["key"]
                key = (tuple(mu), tuple(nu), tuple(dims), j, p)
                self._table.setdefault(key, record["count"])


_default_cache = FiberCache()


def fiber_cache() -> FiberCache:
    return _default_cache


def count_fiber_memo(q: FiberQuery, cache: FiberCache | None = None) -> int:
    """Same contract as count_fiber, memoized on the orbit type of the pair."""
    if cache is None:
        cache = _default_cache
    return _count_memo(q.v, q.x, q.shape.dims, q.shape.marker, cache)


def _orbit_key(v: tuple[int, ...], x: MatrixGF) -> tuple[tuple[int, ...], tuple[int, ...]]:
    b = classify_pair(v, x)
    return (b.first.parts, b.second.parts)


def _count_memo(
    v: tuple[int, ...], x: MatrixGF, dims: tuple[int, ...], j: int, cache: FiberCache
) -> int:
    if j == 0 and any(v):
        return 0
    m = len(dims) - 1
    if m == 0:
        return 1
    mu, nu = _orbit_key(v, x)
    key = (mu, nu, dims, j, x.p)
    hit = cache.get(key)
    if hit is not None:
        return hit
    r1 = dims[1]
    ker = kernel(x)
    total = 0
    if r1 <= ker.dim:
        rest = tuple(r - r1 for r in dims[1:])
        jj = j - 1 if j >= 1 else 0
        for w in enumerate_subspaces(ker, r1):
            qm = quotient_map(w)
            total += _count_memo(qm.apply(v), qm.push_matrix(x), rest, jj, cache)
    cache.put(key, total)
    return total


def count_lambda_fixed(q: FiberQuery) -> int:
    """Number of fiber flags all of whose subspaces are weight-graded."""
    return _count_lambda(q.graded_pair(), q.shape.dims, q.shape.marker)


def _count_lambda(pair: GradedPair, dims: tuple[int, ...], j: int) -> int:
    if j == 0 and any(pair.v):
        return 0
    m = len(dims) - 1
    if m == 0:
        return 1
    r1 = dims[1]
    blocks = graded_kernel_blocks(pair)
    if r1 > sum(b[2].dim for b in blocks):
        return 0
    rest = tuple(r - r1 for r in dims[1:])
    jj = j - 1 if j >= 1 else 0
    total = 0
    for sel in enumerate_graded_subspaces(blocks, r1):
        qm = graded_projection(sel, pair.n, pair.p)
        sub = GradedPair(
            qm.push_matrix(pair.x),
            qm.apply(pair.v),
            tuple(pair.weights[c] for c in qm.nonpivots),
        )
        total += _count_lambda(sub, rest, jj)
    return total


def enumerate_fiber_flags(q: FiberQuery) -> Iterator[tuple[SubspaceGF, ...]]:
    """All fiber flags, as tuples of canonical subspaces of the ambient space."""
    yield from _enum_flags(q.v, q.x, q.shape.dims, q.shape.marker)


def _enum_flags(
    v: tuple[int, ...], x: MatrixGF, dims: tuple[int, ...], j: int
) -> Iterator[tuple[SubspaceGF, ...]]:
    if j == 0 and any(v):
        return
    m = len(dims) - 1
    if m == 0:
        yield ()
        return
    r1 = dims[1]
    ker = kernel(x)
    if r1 > ker.dim:
        return
    rest = tuple(r - r1 for r in dims[1:])
    jj = j - 1 if j >= 1 else 0
    for w in enumerate_subspaces(ker, r1):
        qm = quotient_map(w)
        for tail in _enum_flags(qm.apply(v), qm.push_matrix(x), rest, jj):
            yield (w,) + tuple(qm.preimage(sub) for sub in tail)


def enumerate_lambda_fixed_flags(q: FiberQuery) -> Iterator[tuple[SubspaceGF, ...]]:
    """All weight-graded fiber flags, lifted to the ambient space."""
    yield from _enum_lambda_flags(q.graded_pair(), q.shape.dims, q.shape.marker)


def _enum_lambda_flags(
    pair: GradedPair, dims: tuple[int, ...], j: int
) -> Iterator[tuple[SubspaceGF, ...]]:
    if j == 0 and any(pair.v):
        return
    m = len(dims) - 1
    if m == 0:
        yield ()
        return
    r1 = dims[1]
    blocks = graded_kernel_blocks(pair)
    if r1 > sum(b[2].dim for b in blocks):
        return
    rest = tuple(r - r1 for r in dims[1:])
    jj = j - 1 if j >= 1 else 0
    for sel in enumerate_graded_subspaces(blocks, r1):
        qm = graded_projection(sel, pair.n, pair.p)
        sub = GradedPair(
            qm.push_matrix(pair.x),
            qm.apply(pair.v),
            tuple(pair.weights[c] for c in qm.nonpivots),
        )
        w1 = qm.kernel_subspace()
        for tail in _enum_lambda_flags(sub, rest, jj):
            yield (w1,) + tuple(qm.preimage(s) for s in tail)


# ---------------------------------------------------------------------------
# q-polynomials


class InterpolationError(ArithmeticError):
    """Samples do not fit an integer polynomial within the degree bound.

    This is a falsification signal, not a usage error; callers surface it
    in reports rather than swallowing it.
    """


@dataclass(frozen=True)
class QPolynomial:
    """Polynomial in q with exact integer coefficients c_0..c_d."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def evaluate(self, q: int) -> int:
        total = 0
        for c in reversed(self.coeffs):
            total = total * q + c
        return total

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for d in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[d]
            if c == 0:
                continue
            if d == 0:
                body = str(abs(c))
            else:
                var = "q" if d == 1 else f"q^{d}"
                body = var if abs(c) == 1 else f"{abs(c)}{var}"
            terms.append(("-" if c < 0 else "+", body))
        sign, first = terms[0]
        out = ("-" if sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += sign + body
        return out


def interpolate_qpoly(samples: Mapping[int, int], degree_bound: int) -> QPolynomial:
    """The unique polynomial of degree <= degree_bound through the samples,
    solved exactly over the rationals.

    Raises ValueError when fewer than degree_bound + 1 samples are given
    and InterpolationError when the interpolant has non-integral
    coefficients or exceeds the bound -- a falsification signal, never
    swallowed.
    """
    points = sorted(samples.items())
    if len(points) < degree_bound + 1:
        raise ValueError(
            f"need at least {degree_bound + 1} samples, got {len(points)}"
        )
    if len(set(x for x, _ in points)) != len(points):
        raise ValueError("sample points must be distinct")
    acc = [Fraction(0)] * len(points)
    for i, (xi, yi) in enumerate(points):
        term = [Fraction(yi)]
        denom = Fraction(1)
        for k, (xk, _) in enumerate(points):
            if k == i:
                continue
            term = [Fraction(0)] + term
            for t in range(len(term) - 1):
                term[t] -= term[t + 1] * xk
            denom *= xi - xk
        for t in range(len(term)):
            acc[t] += term[t] / denom
    while acc and acc[-1] == 0:
        acc.pop()
    if len(acc) - 1 > degree_bound:
        raise InterpolationError(
            f"interpolant has degree {len(acc) - 1} > bound {degree_bound}: {acc}"
        )
    if any(c.denominator != 1 for c in acc):
        raise InterpolationError(f"non-integral coefficients: {[str(c) for c in acc]}")
    return QPolynomial(tuple(int(c) for c in acc))


def fiber_dimension_bound(shape: FlagShape) -> int:
    """Dimension of the partial flag variety of the shape: sum over pairs
    of step products; a sound degree cap for fiber polynomials."""
    steps = shape.steps
    total = sum(steps)
    return (total * total - sum(d * d for d in steps)) // 2


def prime_schedule(degree_bound: int) -> tuple[int, ...]:
    """Default sampling schedule: the first degree_bound + 1 primes."""
    return primes_first(degree_bound + 1)


def held_out_prime(schedule: Sequence[int]) -> int:
    return next_prime_after(max(schedule))


# ---------------------------------------------------------------------------
# orbit dimension and the closure order


@lru_cache(maxsize=None)
def orbit_dimension(b: Bipartition) -> int:
    """Dimension of the orbit of b: n^2 minus the dimension of the joint
    solution space of y.v = 0 and yx = xy at the normal pair, with ranks
    taken over two large primes (they must agree)."""
    ranks = []
    for p in (101, 10007):
        np_ = normal_pair(b, p)
        n = np_.n
        if n == 0:
            ranks.append(0)
            continue
        nn = n * n
        rows = []
        for r in range(n):
            row = [0] * nn
            for c in range(n):
                if np_.v[c]:
                    row[r * n + c] = np_.v[c]
            rows.append(tuple(row))
        xr = np_.x.rows
        for r in range(n):
            for c in range(n):
                row = [0] * nn
                for k in range(n):
                    row[r * n + k] = (row[r * n + k] + xr[k][c]) % p
                    row[k * n + c] = (row[k * n + c] - xr[r][k]) % p
                rows.append(tuple(row))
        ranks.append(rank(MatrixGF(p, tuple(rows), nn)))
    if ranks[0] != ranks[1]:
        raise ArithmeticError(
            f"stabilizer rank disagrees between primes for {b}: {ranks}"
        )
    return ranks[0]


def closure_contains(big: Bipartition, small: Bipartition, p: int = 2) -> bool:
    """Whether small's orbit lies in the image of big's resolution, i.e.
    the fiber over small's normal point is nonempty over GF(p)."""
    if big.n != small.n:
        raise ValueError("bipartitions must have equal total size")
    return count_fiber_memo(FiberQuery.over_orbit(small, big, p)) > 0


def closure_pairs(n: int, p: int = 2) -> tuple[tuple[Bipartition, Bipartition], ...]:
    """All ordered pairs (big, small) of bipartitions of n with small's
    orbit contained in the closure resolved by big."""
    bs = bipartitions(n)
    return tuple(
        (big, small) for big in bs for small in bs if closure_contains(big, small, p)
    )
