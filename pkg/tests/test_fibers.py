import itertools
import random
from functools import lru_cache

import pytest

from enhcone.combinatorics import FlagShape, bipartition, bipartitions, flag_shape
from enhcone.gflinalg import MatrixGF, SubspaceGF, enumerate_subspaces, rank, rref
from enhcone.normalform import jordan_type, normal_pair
from enhcone.fibers import (
    FiberCache,
    FiberQuery,
    InterpolationError,
    QPolynomial,
    closure_contains,
    closure_pairs,
    count_fiber,
    count_fiber_memo,
    count_lambda_fixed,
    enumerate_fiber_flags,
    fiber_dimension_bound,
    held_out_prime,
    interpolate_qpoly,
    orbit_dimension,
    prime_schedule,
)


@lru_cache(maxsize=None)
def _subspaces(n: int, p: int, d: int):
    return tuple(enumerate_subspaces(SubspaceGF.full(n, p), d))


def brute_fiber_count(q: FiberQuery) -> int:
    """Independent oracle: filter chains of subspaces of the ambient space
    and test the flag conditions by direct matrix arithmetic."""
    dims = q.shape.dims
    n, p, j = dims[-1], q.p, q.shape.marker
    levels = dims[1:]

    def chains(prefix):
        i = len(prefix)
        if i == len(levels):
            yield prefix
            return
        for s in _subspaces(n, p, levels[i]):
            if prefix and not s.contains_subspace(prefix[-1]):
                continue
            yield from chains(prefix + (s,))

    if j == 0 and any(q.v):
        return 0
    count = 0
    for flag in chains(()):
        ok = True
        for i, w in enumerate(flag):
            for row in w.basis:
                img = q.x.matvec(row)
                if i == 0:
                    ok = ok and not any(img)
                else:
                    ok = ok and flag[i - 1].contains(img)
            if not ok:
                break
        if ok and j >= 1:
            ok = flag[j - 1].contains(q.v)
        count += ok
    return count


class TestCountFiber:
    def test_projective_line(self):
        q = FiberQuery.over_orbit(bipartition((), (1, 1)), bipartition((), (2,)), 2)
        assert count_fiber(q) == 3

    def test_matches_brute_force_exhaustively(self):
        for n in range(4):
            for p in (2, 3):
                for big in bipartitions(n):
                    shape = flag_shape(big)
                    for small in bipartitions(n):
                        q = FiberQuery.over_orbit(small, big, p)
                        assert count_fiber(q) == brute_fiber_count(q), (
                            str(big),
                            str(small),
                            p,
                        )

    def test_matches_brute_force_n4_spot(self):
        big = bipartition((1, 1), (2,))
        small = bipartition((), (1, 1, 1, 1))
        q = FiberQuery.over_orbit(small, big, 2)
        assert count_fiber(q) == brute_fiber_count(q)

    def test_birational_over_own_orbit(self):
        for n in range(4):
            for b in bipartitions(n):
                for p in (2, 3):
                    assert count_fiber(FiberQuery.over_orbit(b, b, p)) == 1

    def test_one_step_shape_needs_zero_nilpotent(self):
        # x(W_1) <= W_0 = 0 forces x = 0 when the flag is the single step V
        shape = FlagShape((0, 2), 1)
        zero_pair = FiberQuery.raw((1, 0), MatrixGF.zeros(2, 2, 2), shape)
        assert count_fiber(zero_pair) == 1
        reg = normal_pair(bipartition((), (2,)), 2)
        assert count_fiber(FiberQuery.raw(reg.v, reg.x, shape)) == 0

    def test_marker_zero_requires_zero_vector(self):
        shape = FlagShape((0, 1, 2), 0)
        np_ = normal_pair(bipartition((1,), (1,)), 2)
        assert count_fiber(FiberQuery.raw(np_.v, np_.x, shape)) == 0

    def test_query_validation(self):
        with pytest.raises(ValueError):
            FiberQuery.raw((0, 0, 0), MatrixGF.zeros(2, 2, 2), FlagShape((0, 2), 0))
        with pytest.raises(ValueError):
            FiberQuery.raw((0, 0), MatrixGF.zeros(2, 2, 2), FlagShape((0, 3), 0))


class TestSpringerBenchmarks:
    def test_full_flag_over_zero(self):
        big = bipartition((), (3,))
        small = bipartition((), (1, 1, 1))
        counts = {
            p: count_fiber(FiberQuery.over_orbit(small, big, p)) for p in (2, 3, 5, 7)
        }
        assert counts[2] == 21 and counts[3] == 52
        poly = interpolate_qpoly(counts, 3)
        assert poly.coeffs == (1, 2, 2, 1)
        assert str(poly) == "q^3+2q^2+2q+1"

    def test_full_flag_n2(self):
        big = bipartition((), (2,))
        small = bipartition((), (1, 1))
        counts = {p: count_fiber(FiberQuery.over_orbit(small, big, p)) for p in (2, 3)}
        assert counts == {2: 3, 3: 4}
        assert str(interpolate_qpoly(counts, 1)) == "q+1"

    def test_subregular(self):
        big = bipartition((), (3,))
        small = bipartition((), (2, 1))
        counts = {
            p: count_fiber(FiberQuery.over_orbit(small, big, p)) for p in (2, 3, 5, 7)
        }
        assert counts[2] == 5 and counts[3] == 7
        assert str(interpolate_qpoly(counts, 3)) == "2q+1"


class TestMemo:
    def test_agrees_with_plain_count(self):
        cache = FiberCache()
        for n in range(4):
            for big, small in itertools.product(bipartitions(n), repeat=2):
                q = FiberQuery.over_orbit(small, big, 2)
                assert count_fiber_memo(q, cache) == count_fiber(q)

    def test_cache_statistics(self):
        cache = FiberCache()
        q = FiberQuery.over_orbit(
            bipartition((), (1, 1, 1)), bipartition((), (3,)), 2
        )
        first = count_fiber_memo(q, cache)
        misses = cache.misses
        assert misses > 0
        again = count_fiber_memo(q, cache)
        assert again == first
        assert cache.misses == misses  # fully served from cache
        assert cache.hits > 0

    def test_persistence_roundtrip(self, tmp_path):
        cache = FiberCache()
        q = FiberQuery.over_orbit(bipartition((), (2, 1)), bipartition((), (3,)), 3)
        value = count_fiber_memo(q, cache)
        path = tmp_path / "counts.jsonl"
        cache.save(path)
        fresh = FiberCache()
        fresh.load(path)
        assert len(fresh) == len(cache)
        assert count_fiber_memo(q, fresh) == value
        # nothing was recomputed
        assert fresh.misses == 0

    def test_bad_cache_version_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"cache_format": 99}\n')
        with pytest.raises(ValueError):
            FiberCache().load(path)


def invert(g: MatrixGF) -> MatrixGF:
    n, p = g.nrows, g.p
    aug = MatrixGF.from_rows(
        [list(g.rows[r]) + [1 if c == r else 0 for c in range(n)] for r in range(n)], p
    )
    return MatrixGF.from_rows([row[n:] for row in rref(aug).rows], p)


class TestEquivariance:
    def test_permuting_jordan_strings(self):
        b = bipartition((2, 1), ())
        np_ = normal_pair(b, 2)
        shape = flag_shape(bipartition((), (1, 1, 1)))
        base = count_fiber(FiberQuery.raw(np_.v, np_.x, shape))
        # swap the two strings: coordinates (0,1),(2) -> (2),(0,1)
        perm = (2, 0, 1)
        pmat = MatrixGF.from_rows(
            [[1 if c == perm[r] else 0 for c in range(3)] for r in range(3)], 2
        )
        v2 = pmat.matvec(np_.v)
        x2 = pmat @ np_.x @ invert(pmat)
        assert count_fiber(FiberQuery.raw(v2, x2, shape)) == base

    def test_random_conjugation(self):
        rng = random.Random(17)
        for n in (3, 4):
            for b in bipartitions(n):
                np_ = normal_pair(b, 2)
                shape = flag_shape(b)
                base = count_fiber(FiberQuery.of(np_, shape))
                trials = 0
                while trials < 3:
                    g = MatrixGF.from_rows(
                        [[rng.randrange(2) for _ in range(n)] for _ in range(n)], 2
                    )
                    if rank(g) < n:
                        continue
                    trials += 1
                    v2 = g.matvec(np_.v)
                    x2 = g @ np_.x @ invert(g)
                    assert count_fiber(FiberQuery.raw(v2, x2, shape)) == base


class TestLambdaFixed:
    def test_regular_pairs_give_at_most_one(self):
        for n in range(1, 5):
            np_ = normal_pair(bipartition((), (n,)), 2)
            for dims in itertools.chain.from_iterable(
                itertools.combinations(range(1, n), m) for m in range(n)
            ):
                shape = FlagShape((0,) + dims + (n,), 0)
                assert count_lambda_fixed(FiberQuery.of(np_, shape)) in (0, 1)

    def test_bounded_by_total(self):
        for n in range(4):
            for big, small in itertools.product(bipartitions(n), repeat=2):
                q = FiberQuery.over_orbit(small, big, 2)
                assert count_lambda_fixed(q) <= count_fiber(q)

    def test_single_weight_pair_fixes_everything(self):
        # all basis vectors of (0, 0) have equal weight, so every flag is graded
        small = bipartition((), (1, 1, 1))
        big = bipartition((), (3,))
        for p in (2, 3):
            q = FiberQuery.over_orbit(small, big, p)
            assert count_lambda_fixed(q) == count_fiber(q)

    def test_needs_weights(self):
        q = FiberQuery.raw((0, 0), MatrixGF.zeros(2, 2, 2), FlagShape((0, 2), 0))
        with pytest.raises(ValueError):
            count_lambda_fixed(q)


class TestInterpolation:
    def test_line(self):
        assert interpolate_qpoly({2: 3, 3: 4, 5: 6, 7: 8}, 3).coeffs == (1, 1)

    def test_constant(self):
        assert interpolate_qpoly({2: 1, 3: 1, 5: 1}, 2).coeffs == (1,)

    def test_insufficient_samples(self):
        with pytest.raises(ValueError):
            interpolate_qpoly({2: 1, 3: 2}, 2)

    def test_non_integral_rejected(self):
        with pytest.raises(InterpolationError):
            interpolate_qpoly({2: 1, 3: 2, 5: 5}, 2)

    def test_degree_overflow_rejected(self):
        with pytest.raises(InterpolationError):
            interpolate_qpoly({2: 4, 3: 9, 5: 25, 7: 49}, 1)

    def test_polynomial_display(self):
        assert str(QPolynomial(())) == "0"
        assert str(QPolynomial((1,))) == "1"
        assert str(QPolynomial((0, 1))) == "q"
        assert str(QPolynomial((1, 2))) == "2q+1"
        assert str(QPolynomial((0, -1, 1))) == "q^2-q"
        assert QPolynomial((1, 2, 2, 1)).evaluate(3) == 52

    def test_trailing_zeros_stripped(self):
        p = QPolynomial((1, 1, 0, 0))
        assert p.coeffs == (1, 1)
        assert p.degree == 1


class TestDimensionBound:
    def test_examples(self):
        assert fiber_dimension_bound(FlagShape((0, 1, 2, 3), 0)) == 3
        assert fiber_dimension_bound(FlagShape((0, 5), 1)) == 0
        assert fiber_dimension_bound(FlagShape((0, 1, 2, 5, 7, 9, 10), 3)) == 40

    def test_schedule(self):
        sched = prime_schedule(3)
        assert sched == (2, 3, 5, 7)
        assert held_out_prime(sched) == 11


class TestOrbitDimension:
    def test_examples(self):
        assert orbit_dimension(bipartition((), (1, 1))) == 0
        assert orbit_dimension(bipartition((1,), ())) == 1
        assert orbit_dimension(bipartition((), (2,))) == 2

    def test_monotone_under_closure(self):
        for n in range(5):
            for big, small in closure_pairs(n):
                if big != small:
                    assert orbit_dimension(big) > orbit_dimension(small)


class TestClosure:
    def test_reflexive(self):
        for n in range(4):
            for b in bipartitions(n):
                assert closure_contains(b, b)

    def test_vector_obstruction(self):
        assert not closure_contains(bipartition((), (2,)), bipartition((1,), (1,)))

    def test_nilpotent_degeneration(self):
        assert closure_contains(bipartition((), (2,)), bipartition((), (1, 1)))

    def test_n1_comparable(self):
        assert closure_contains(bipartition((1,), ()), bipartition((), (1,)))
        assert not closure_contains(bipartition((), (1,)), bipartition((1,), ()))

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            closure_contains(bipartition((), (2,)), bipartition((), (1,)))


class TestHeldOutConsistency:
    def test_interpolation_predicts_fresh_prime(self):
        for n in range(4):
            for big, small in closure_pairs(n):
                shape = flag_shape(big)
                bound = fiber_dimension_bound(shape)
                sched = prime_schedule(bound)
                counts = {
                    p: count_fiber_memo(FiberQuery.over_orbit(small, big, p))
                    for p in sched
                }
                poly = interpolate_qpoly(counts, bound)
                extra = held_out_prime(sched)
                fresh = count_fiber_memo(FiberQuery.over_orbit(small, big, extra))
                assert poly.evaluate(extra) == fresh


class TestFlagEnumeration:
    def test_enumeration_matches_count(self):
        for n in range(4):
            for big, small in itertools.product(bipartitions(n), repeat=2):
                q = FiberQuery.over_orbit(small, big, 2)
                flags = list(enumerate_fiber_flags(q))
                assert len(flags) == count_fiber(q)
                assert len(set(flags)) == len(flags)

    def test_flags_satisfy_conditions(self):
        q = FiberQuery.over_orbit(bipartition((), (2, 1)), bipartition((), (3,)), 2)
        shape = q.shape
        for flag in enumerate_fiber_flags(q):
            assert tuple(w.dim for w in flag) == shape.dims[1:]
            for i, w in enumerate(flag):
                for row in w.basis:
                    img = q.x.matvec(row)
                    if i == 0:
                        assert not any(img)
                    else:
                        assert flag[i - 1].contains(img)
