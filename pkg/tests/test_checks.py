import json

import pytest

from enhcone.combinatorics import (
    FlagShape,
    bipartition,
    bipartitions,
    flag_shape,
    is_distinguished,
)
from enhcone.normalform import normal_pair
from enhcone.fibers import (
    FiberQuery,
    closure_pairs,
    count_fiber_memo,
    count_lambda_fixed,
    fiber_dimension_bound,
    interpolate_qpoly,
    prime_schedule,
)
from enhcone.checks import (
    check_alpha_partition,
    check_distinguished_lemma,
    check_kernel_recursion,
    check_polynomial_count,
    check_semismall,
    check_split_product,
    suite_instances,
)


class TestPolynomialCount:
    def test_projective_line(self):
        rep = check_polynomial_count(bipartition((), (2,)), bipartition((), (1, 1)))
        assert rep.passed
        assert rep.witness["display"] == "q+1"

    def test_own_orbit_is_point(self):
        for n in range(4):
            for b in bipartitions(n):
                rep = check_polynomial_count(b, b)
                assert rep.passed
                assert rep.witness["display"] == "1"

    def test_full_flag_variety(self):
        rep = check_polynomial_count(
            bipartition((), (3,)), bipartition((), (1, 1, 1))
        )
        assert rep.passed
        assert rep.witness["display"] == "q^3+2q^2+2q+1"

    def test_empty_fiber_notes(self):
        rep = check_polynomial_count(bipartition((), (2,)), bipartition((1,), (1,)))
        assert rep.passed
        assert rep.witness["display"] == "0"
        assert any("empty fiber" in note for note in rep.notes)


class TestAlphaPartition:
    def test_own_orbit_single_piece(self):
        rep = check_alpha_partition(bipartition((1,), (1,)), bipartition((1,), (1,)))
        assert rep.passed
        assert len(rep.witness["pieces"]) == 1

    def test_projective_line_single_piece(self):
        # the pair (0, 0) is graded in a single weight, so its parabolic is
        # the whole group and the profile partition has exactly one piece
        rep = check_alpha_partition(bipartition((), (2,)), bipartition((), (1, 1)))
        assert rep.passed
        (piece,) = rep.witness["pieces"].values()
        assert piece["counts"][2] == 3
        assert piece["polynomial"] == "q+1"

    def test_subregular_pieces(self):
        # the 2q+1 fiber over the subregular pair splits into pieces of
        # sizes q and q+1 under the weight-filtration parabolic
        rep = check_alpha_partition(bipartition((), (3,)), bipartition((), (2, 1)))
        assert rep.passed
        polys = sorted(piece["polynomial"] for piece in rep.witness["pieces"].values())
        assert polys == ["q", "q+1"]
        sizes_at_2 = sorted(
            piece["counts"][2] for piece in rep.witness["pieces"].values()
        )
        assert sizes_at_2 == [2, 3]

    def test_sum_consistency_small(self):
        for n in range(3):
            for big, small in closure_pairs(n):
                rep = check_alpha_partition(big, small)
                assert rep.passed
                for record in rep.witness["totals"].values():
                    assert record["enumerated"] == record["counted"]

    def test_too_few_primes_rejected(self):
        with pytest.raises(ValueError):
            check_alpha_partition(
                bipartition((), (3,)), bipartition((), (1, 1, 1)), primes=(2, 3)
            )


class TestDistinguishedLemma:
    def test_regular_is_distinguished(self):
        rep = check_distinguished_lemma(bipartition((), (3,)), 2)
        assert rep.passed
        assert rep.witness["splitting_found"] is False

    def test_equal_parts_split(self):
        rep = check_distinguished_lemma(bipartition((2, 2), (1,)), 2)
        assert rep.passed
        assert rep.witness["splitting_found"] is True
        assert rep.witness["explicit_construction"]["violations"] == []

    def test_exhaustive_small(self):
        for n in range(4):
            for b in bipartitions(n):
                rep = check_distinguished_lemma(b, 2)
                assert rep.passed, (str(b), rep.witness)

    def test_budget_exhaustion_reported(self):
        rep = check_distinguished_lemma(bipartition((2, 2), (1,)), 2, budget=3)
        assert rep.verdict == "budget-exceeded"
        assert rep.witness["limit"] == 3


class TestSplitProduct:
    def test_two_lines(self):
        b = bipartition((1, 1), ())
        rep = check_split_product(b, b, 2)
        assert rep.passed
        assert rep.witness["product_total"] == rep.witness["split_flags"]

    def test_applicable_pairs_small(self):
        for n in range(4):
            for big, small in closure_pairs(n):
                if is_distinguished(small):
                    continue
                for p in (2, 3):
                    rep = check_split_product(small, big, p)
                    assert rep.passed, (str(big), str(small), p, rep.witness)

    def test_rejects_distinguished(self):
        with pytest.raises(ValueError):
            check_split_product(bipartition((), (2,)), bipartition((), (2,)), 2)


class TestKernelRecursion:
    def test_own_shape(self):
        b = bipartition((2,), (1,))
        rep = check_kernel_recursion(b, flag_shape(b), 2)
        assert rep.passed
        assert rep.witness["lhs"] == rep.witness["rhs"]

    def test_oversized_first_step_gives_zero(self):
        b = bipartition((2,), (1,))
        rep = check_kernel_recursion(b, FlagShape((0, 2, 3), 1), 2)
        assert rep.passed
        assert rep.witness["lhs"] == rep.witness["rhs"] == 0

    def test_rejects_marker_zero(self):
        b = bipartition((2,), (1,))
        with pytest.raises(ValueError):
            check_kernel_recursion(b, FlagShape((0, 1, 2, 3), 0), 2)

    def test_rejects_pure_nilpotent_case(self):
        b = bipartition((), (3,))
        with pytest.raises(ValueError):
            check_kernel_recursion(b, flag_shape(b), 2)

    def test_applicable_pairs_small(self):
        for n in range(4):
            for big, small in closure_pairs(n):
                if not is_distinguished(small) or small.first.length == 0:
                    continue
                shape = flag_shape(big)
                if shape.marker == 0:
                    continue
                for p in (2, 3):
                    rep = check_kernel_recursion(small, shape, p)
                    assert rep.passed, (str(big), str(small), p, rep.witness)


class TestSemismall:
    def test_regular_two(self):
        rep = check_semismall(bipartition((), (2,)))
        assert rep.passed
        stratum = rep.witness["strata"]["mu=;nu=1,1"]
        assert stratum["2*deg"] == 2 and stratum["codim"] == 2

    def test_all_small(self):
        for n in range(4):
            for b in bipartitions(n):
                rep = check_semismall(b)
                assert rep.passed, (str(b), rep.witness)


class TestEulerBridge:
    def test_cell_counts_match_fixed_locus(self):
        # coefficient sums of the fiber polynomial and of the graded-fixed
        # fiber polynomial agree: cells lift one to one
        for n in range(4):
            for big, small in closure_pairs(n):
                shape = flag_shape(big)
                bound = fiber_dimension_bound(shape)
                primes = prime_schedule(bound)
                total = {
                    p: count_fiber_memo(FiberQuery.over_orbit(small, big, p))
                    for p in primes
                }
                fixed = {
                    p: count_lambda_fixed(FiberQuery.of(normal_pair(small, p), shape))
                    for p in primes
                }
                pt = interpolate_qpoly(total, bound)
                pf = interpolate_qpoly(fixed, bound)
                assert pt.evaluate(1) == pf.evaluate(1), (str(big), str(small))


class TestReports:
    def test_reports_serialize(self):
        reports = [
            check_polynomial_count(bipartition((), (2,)), bipartition((), (1, 1))),
            check_alpha_partition(bipartition((), (2,)), bipartition((), (1, 1))),
            check_distinguished_lemma(bipartition((1,), (1,)), 2),
            check_split_product(bipartition((1, 1), ()), bipartition((1, 1), ()), 2),
            check_kernel_recursion(
                bipartition((2,), (1,)), flag_shape(bipartition((2,), (1,))), 2
            ),
            check_semismall(bipartition((), (2,))),
        ]
        for rep in reports:
            blob = json.dumps(rep.to_json_dict(), sort_keys=True)
            assert rep.name in blob
            assert rep.millis >= 0

    def test_suite_rejects_unknown_names(self):
        with pytest.raises(ValueError):
            suite_instances(1, ("bogus",))
