"""Named verifications of the finite-checkable paving consequences.

Each check runs an exact computation over small prime fields and returns
a CheckReport whose fail verdicts always carry a concrete counterexample
witness.  The checks falsify (or fail to falsify) statements that are
theorems over any field, so a fail on any tested instance signals an
implementation bug, never an acceptable tolerance.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .combinatorics import (
    Bipartition,
    FlagShape,
    bipartitions,
    flag_shape,
    format_bipartition,
    is_distinguished,
)
from .gflinalg import SubspaceGF, enumerate_subspaces, MatrixGF, primes_first
from .normalform import (
    Decomposition,
    GradedPair,
    decomposition_failures,
    explicit_decomposition,
    graded_kernel_blocks,
    graded_projection,
    normal_pair,
    restrict_pair,
    weight_blocks,
)
from .fibers import (
    FiberQuery,
    InterpolationError,
    QPolynomial,
    closure_contains,
    closure_pairs,
    count_fiber_memo,
    count_lambda_fixed,
    enumerate_fiber_flags,
    enumerate_lambda_fixed_flags,
    fiber_dimension_bound,
    held_out_prime,
    interpolate_qpoly,
    orbit_dimension,
    prime_schedule,
)

DEFAULT_BUDGET = 10**7

PASS = "pass"
FAIL = "fail"
BUDGET_EXCEEDED = "budget-exceeded"


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one named verification."""

    name: str
    inputs: dict
    verdict: str
    witness: dict
    millis: float
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_json_dict(self) -> dict:
        return {
            "check": self.name,
            "inputs": self.inputs,
            "verdict": self.verdict,
            "witness": self.witness,
            "millis": round(self.millis, 3),
            "notes": list(self.notes),
        }


class BudgetExceeded(RuntimeError):
    def __init__(self, nodes: int, limit: int):
        super().__init__(f"search budget exhausted: {nodes} nodes > limit {limit}")
        self.nodes = nodes
        self.limit = limit


class SearchBudget:
    """Node counter for brute-force searches; never silently truncates."""

    def __init__(self, limit: int = DEFAULT_BUDGET):
        self.limit = limit
        self.nodes = 0

    def spend(self, amount: int = 1) -> None:
        self.nodes += amount
        if self.nodes > self.limit:
            raise BudgetExceeded(self.nodes, self.limit)


def _bp_json(b: Bipartition) -> dict:
    return {"mu": list(b.first.parts), "nu": list(b.second.parts)}


def _report(name, inputs, verdict, witness, started, notes=()) -> CheckReport:
    millis = (time.perf_counter() - started) * 1000.0
    return CheckReport(name, inputs, verdict, witness, millis, tuple(notes))


# ---------------------------------------------------------------------------
# polynomial point counts


def fiber_polynomial(
    big: Bipartition, small: Bipartition, primes: Sequence[int] | None = None
) -> tuple[QPolynomial, dict[int, int]]:
    """Interpolated point-count polynomial of big's fiber over small's
    normal point, with the sampled counts."""
    shape = flag_shape(big)
    bound = fiber_dimension_bound(shape)
    if primes is None:
        primes = prime_schedule(bound)
    counts = {
        p: count_fiber_memo(FiberQuery.over_orbit(small, big, p)) for p in primes
    }
    return interpolate_qpoly(counts, bound), counts


def check_polynomial_count(
    big: Bipartition,
    small: Bipartition,
    primes: Sequence[int] | None = None,
    holdout: int | None = None,
) -> CheckReport:
    """Paving certificate: the fiber polynomial must have nonnegative
    integer coefficients and predict a held-out prime exactly."""
    started = time.perf_counter()
    inputs = {"big": _bp_json(big), "small": _bp_json(small)}
    shape = flag_shape(big)
    bound = fiber_dimension_bound(shape)
    schedule = tuple(primes) if primes is not None else prime_schedule(bound)
    holdout = holdout if holdout is not None else held_out_prime(schedule)
    inputs["primes"] = list(schedule)
    inputs["holdout"] = holdout
    try:
        poly, counts = fiber_polynomial(big, small, schedule)
    except InterpolationError as exc:
        counts = {
            p: count_fiber_memo(FiberQuery.over_orbit(small, big, p)) for p in schedule
        }
        witness = {"counts": counts, "reason": str(exc)}
        return _report("polynomial-count", inputs, FAIL, witness, started)
    fresh = count_fiber_memo(FiberQuery.over_orbit(small, big, holdout))
    witness = {
        "counts": counts,
        "polynomial": list(poly.coeffs),
        "display": str(poly),
        "holdout_prediction": poly.evaluate(holdout),
        "holdout_count": fresh,
    }
    notes = []
    if poly.is_zero():
        notes.append("empty fiber: small's orbit is not in the resolved closure")
    ok = all(c >= 0 for c in poly.coeffs) and poly.evaluate(holdout) == fresh
    return _report(
        "polynomial-count", inputs, PASS if ok else FAIL, witness, started, notes
    )


# ---------------------------------------------------------------------------
# alpha-partition by parabolic-orbit profiles


def _flag_profile(
    flag: Sequence[SubspaceGF], filtrations: Sequence[SubspaceGF]
) -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(w.intersect(f).dim for f in filtrations) for w in flag
    )


def check_alpha_partition(
    big: Bipartition,
    small: Bipartition,
    primes: Sequence[int] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> CheckReport:
    """Partition the fiber by the orbit profile dim(W_i intersect V>=w) of
    the parabolic preserving the weight filtration; piece counts must sum
    to the total at every prime and each piece must interpolate to a
    polynomial with nonnegative integer coefficients."""
    started = time.perf_counter()
    inputs = {"big": _bp_json(big), "small": _bp_json(small)}
    shape = flag_shape(big)
    bound = fiber_dimension_bound(shape)
    if primes is None:
        primes = primes_first(max(3, bound + 1))
    if len(primes) < bound + 1:
        raise ValueError(
            f"schedule of {len(primes)} primes cannot determine a degree-{bound} piece"
        )
    inputs["primes"] = list(primes)
    wts = normal_pair(small, 2).weights
    levels = sorted(set(wts), reverse=True)
    piece_counts: dict = {}
    totals: dict[int, tuple[int, int]] = {}
    spent = SearchBudget(budget)
    try:
        for p in primes:
            q = FiberQuery.over_orbit(small, big, p)
            expected = count_fiber_memo(q)
            spent.spend(max(expected, 1))
            filtrations = [
                SubspaceGF.coordinate(
                    [c for c, w in enumerate(wts) if w >= lvl], shape.n, p
                )
                for lvl in levels
            ]
            seen = 0
            for flag in enumerate_fiber_flags(q):
                seen += 1
                profile = _flag_profile(flag, filtrations)
                bucket = piece_counts.setdefault(profile, {})
                bucket[p] = bucket.get(p, 0) + 1
            totals[p] = (seen, expected)
    except BudgetExceeded as exc:
        witness = {"nodes": exc.nodes, "limit": exc.limit}
        return _report("alpha-partition", inputs, BUDGET_EXCEEDED, witness, started)
    sum_ok = all(seen == expected for seen, expected in totals.values())
    pieces_witness = {}
    pieces_ok = True
    for profile in sorted(piece_counts):
        samples = {p: piece_counts[profile].get(p, 0) for p in primes}
        key = "|".join(",".join(map(str, row)) for row in profile)
        try:
            poly = interpolate_qpoly(samples, bound)
            good = all(c >= 0 for c in poly.coeffs)
            pieces_witness[key] = {"counts": samples, "polynomial": str(poly)}
        except InterpolationError as exc:
            good = False
            pieces_witness[key] = {"counts": samples, "reason": str(exc)}
        pieces_ok = pieces_ok and good
    witness = {
        "totals": {p: {"enumerated": s, "counted": e} for p, (s, e) in totals.items()},
        "pieces": pieces_witness,
    }
    verdict = PASS if (sum_ok and pieces_ok) else FAIL
    return _report("alpha-partition", inputs, verdict, witness, started)


# ---------------------------------------------------------------------------
# distinguished pairs: brute-force splitting search


def _block_transport(pair: GradedPair, coords_from, coords_to) -> MatrixGF:
    rows = tuple(
        tuple(pair.x.rows[r][c] for c in coords_from) for r in coords_to
    )
    return MatrixGF(pair.p, rows, len(coords_from))


def search_decomposition(
    pair: GradedPair, budget: SearchBudget
) -> Decomposition | None:
    """Brute force over graded splittings: each weight space splits
    independently, so search per-block subspaces for V1 (with v's block
    component inside) and per-block complements for V2, both x-stable."""
    n, p = pair.n, pair.p
    if n == 0:
        return None
    blocks = weight_blocks(pair.weights)
    nblocks = len(blocks)
    weight_of = {w: i for i, (w, _) in enumerate(blocks)}
    transports = []
    for i, (w, coords) in enumerate(blocks):
        up = weight_of.get(w + 1)
        transports.append(
            (_block_transport(pair, coords, blocks[up][1]) if up is not None else None, up)
        )
    v_blocks = [tuple(pair.v[c] for c in coords) for _, coords in blocks]
    fulls = [SubspaceGF.full(len(coords), p) for _, coords in blocks]

    def stable(choice: list[SubspaceGF], i: int, sub: SubspaceGF) -> bool:
        transport, up = transports[i]
        if transport is None:
            return True
        target = choice[up]
        return all(target.contains(transport.matvec(row)) for row in sub.basis)

    def embed(choice: list[SubspaceGF]) -> SubspaceGF:
        vecs = []
        for (w, coords), sub in zip(blocks, choice):
            for brow in sub.basis:
                row = [0] * n
                for c, val in zip(coords, brow):
                    row[c] = val
                vecs.append(row)
        return SubspaceGF.span(vecs, n, p)

    def candidates(i: int) -> Iterator[SubspaceGF]:
        k = fulls[i].dim
        for d in range(k + 1):
            yield from enumerate_subspaces(fulls[i], d)

    # blocks are ordered heaviest first, so the x-image constraint on a
    # block refers to an already-chosen one
    def search_v1(i: int, choice: list[SubspaceGF]) -> Iterator[list[SubspaceGF]]:
        if i == nblocks:
            yield choice
            return
        for sub in candidates(i):
            budget.spend()
            if not sub.contains(v_blocks[i]):
                continue
            choice.append(sub)
            if stable(choice, i, sub):
                yield from search_v1(i + 1, choice)
            choice.pop()

    def search_v2(i: int, v1_choice: list[SubspaceGF], choice: list[SubspaceGF]):
        if i == nblocks:
            yield choice
            return
        s = v1_choice[i]
        k = fulls[i].dim
        for sub in candidates(i):
            budget.spend()
            if sub.dim != k - s.dim or sub.intersect(s).dim != 0:
                continue
            choice.append(sub)
            if stable(choice, i, sub):
                yield from search_v2(i + 1, v1_choice, choice)
            choice.pop()

    for v1_choice in search_v1(0, []):
        d1 = sum(s.dim for s in v1_choice)
        if d1 in (0, n):
            continue
        for v2_choice in search_v2(0, v1_choice, []):
            return Decomposition(embed(v1_choice), embed(v2_choice))
    return None


def check_distinguished_lemma(
    b: Bipartition, p: int, budget: int = DEFAULT_BUDGET
) -> CheckReport:
    """A nontrivial graded x-stable splitting with v in V1 exists over
    GF(p) exactly when the bipartition is not distinguished; for the
    non-distinguished ones the explicit construction must verify."""
    started = time.perf_counter()
    inputs = {"b": _bp_json(b), "p": p, "budget": budget}
    np_ = normal_pair(b, p)
    predicted = is_distinguished(b)
    try:
        found = search_decomposition(np_.pair, SearchBudget(budget))
    except BudgetExceeded as exc:
        witness = {"nodes": exc.nodes, "limit": exc.limit}
        return _report("distinguished-lemma", inputs, BUDGET_EXCEEDED, witness, started)
    witness: dict = {"predicted_distinguished": predicted, "splitting_found": found is not None}
    ok = (found is not None) == (not predicted)
    if found is not None:
        bad = decomposition_failures(np_.pair, found)
        witness["found"] = {
            "V1": [list(r) for r in found.v1.basis],
            "V2": [list(r) for r in found.v2.basis],
        }
        if bad:
            ok = False
            witness["search_result_invalid"] = bad
    if not predicted:
        dec = explicit_decomposition(np_)
        bad = decomposition_failures(np_.pair, dec)
        witness["explicit_construction"] = {
            "V1": [list(r) for r in dec.v1.basis],
            "V2": [list(r) for r in dec.v2.basis],
            "violations": bad,
        }
        if bad or dec.v1.dim == 0 or dec.v2.dim == 0:
            ok = False
    return _report(
        "distinguished-lemma", inputs, PASS if ok else FAIL, witness, started
    )


# ---------------------------------------------------------------------------
# product splitting along a decomposition


def _dedup_increasing(values: Sequence[int]) -> tuple[int, ...]:
    out = [0]
    for v in values:
        if v != out[-1]:
            out.append(v)
    return tuple(out)


def check_split_product(
    b: Bipartition, big: Bipartition, p: int, budget: int = DEFAULT_BUDGET
) -> CheckReport:
    """For a non-distinguished pair split as V1 (+) V2, the graded fiber
    flags that respect the splitting, bucketed by the profile
    dim(W_i intersect V1), must match products of the two factors'
    graded fiber counts with shapes read off the profile."""
    started = time.perf_counter()
    if is_distinguished(b):
        raise ValueError(f"{b} is distinguished; the splitting step does not apply")
    if b.n != big.n:
        raise ValueError("bipartitions must have equal total size")
    inputs = {"b": _bp_json(b), "big": _bp_json(big), "p": p}
    np_ = normal_pair(b, p)
    dec = explicit_decomposition(np_)
    shape = flag_shape(big)
    j = shape.marker
    q = FiberQuery.of(np_, shape)
    spent = SearchBudget(budget)
    try:
        spent.spend(max(count_fiber_memo(q), 1))
        lflags = list(enumerate_lambda_fixed_flags(q))
    except BudgetExceeded as exc:
        witness = {"nodes": exc.nodes, "limit": exc.limit}
        return _report("split-product", inputs, BUDGET_EXCEEDED, witness, started)
    buckets: dict[tuple[int, ...], int] = {}
    split_total = 0
    for flag in lflags:
        dims1 = tuple(w.intersect(dec.v1).dim for w in flag)
        dims2 = tuple(w.intersect(dec.v2).dim for w in flag)
        if any(a + bdim != w.dim for a, bdim, w in zip(dims1, dims2, flag)):
            continue
        split_total += 1
        buckets[dims1] = buckets.get(dims1, 0) + 1
    pair1 = restrict_pair(np_.pair, dec.v1)
    pair2 = restrict_pair(np_.pair, dec.v2)
    notes = []
    profile_witness = {}
    ok = True
    product_total = 0
    for profile in sorted(buckets):
        rho1 = _dedup_increasing(profile)
        rho2 = _dedup_increasing(
            tuple(r - a for r, a in zip(shape.dims[1:], profile))
        )
        if j == 0:
            j1 = 0
        else:
            val = profile[j - 1]
            if val == 0:
                j1 = 0
                notes.append(
                    f"profile {profile}: dim(W_j ^ V1) = 0, using marker 0 by convention"
                )
            else:
                j1 = rho1.index(val)
        c1 = count_lambda_fixed(
            FiberQuery(pair1.v, pair1.x, FlagShape(rho1, j1), pair1.weights)
        )
        c2 = count_lambda_fixed(
            FiberQuery(pair2.v, pair2.x, FlagShape(rho2, 0), pair2.weights)
        )
        expected = c1 * c2
        product_total += expected
        good = buckets[profile] == expected
        ok = ok and good
        profile_witness[",".join(map(str, profile))] = {
            "flags": buckets[profile],
            "factor_v1": c1,
            "factor_v2": c2,
            "product": expected,
        }
    euler_ok = product_total == split_total
    witness = {
        "lambda_fixed_flags": len(lflags),
        "split_flags": split_total,
        "profiles": profile_witness,
        "product_total": product_total,
    }
    verdict = PASS if (ok and euler_ok) else FAIL
    return _report("split-product", inputs, verdict, witness, started, notes)


# ---------------------------------------------------------------------------
# kernel-line recursion for distinguished pairs


def check_kernel_recursion(
    b: Bipartition, shape: FlagShape, p: int, budget: int = DEFAULT_BUDGET
) -> CheckReport:
    """For a distinguished pair with nonzero v-part, ker x must split into
    one-dimensional weight lines with distinct weights, and the graded
    fiber count must equal the sum over r_1-subsets of those lines of
    the graded count of the quotient pair with the reduced shape."""
    started = time.perf_counter()
    if not is_distinguished(b) or b.first.length == 0:
        raise ValueError(f"{b} is not a distinguished bipartition with nonzero v-part")
    if shape.marker == 0:
        raise ValueError(
            "marker 0 requires v = 0, which never holds here; the quotient "
            "recursion does not apply to the empty fiber"
        )
    inputs = {"b": _bp_json(b), "shape": list(shape.dims), "j": shape.marker, "p": p}
    np_ = normal_pair(b, p)
    pair = np_.pair
    blocks = graded_kernel_blocks(pair)
    mults = {w: piece.dim for w, _, piece in blocks if piece.dim > 0}
    if any(d > 1 for d in mults.values()):
        witness = {"kernel_weight_multiplicities": mults}
        return _report("kernel-recursion", inputs, FAIL, witness, started)
    lines = [(coords, piece) for _, coords, piece in blocks if piece.dim == 1]
    lhs = count_lambda_fixed(FiberQuery.of(np_, shape))
    r1 = shape.dims[1]
    rest = tuple(r - r1 for r in shape.dims[1:])
    jbar = shape.marker - 1
    terms = []
    spent = SearchBudget(budget)
    try:
        for subset in itertools.combinations(lines, r1):
            spent.spend()
            qm = graded_projection(tuple(subset), pair.n, pair.p)
            sub = GradedPair(
                qm.push_matrix(pair.x),
                qm.apply(pair.v),
                tuple(pair.weights[c] for c in qm.nonpivots),
            )
            terms.append(
                count_lambda_fixed(
                    FiberQuery(sub.v, sub.x, FlagShape(rest, jbar), sub.weights)
                )
            )
    except BudgetExceeded as exc:
        witness = {"nodes": exc.nodes, "limit": exc.limit}
        return _report("kernel-recursion", inputs, BUDGET_EXCEEDED, witness, started)
    rhs = sum(terms)
    witness = {
        "kernel_weight_multiplicities": mults,
        "lhs": lhs,
        "rhs": rhs,
        "terms": terms,
    }
    return _report(
        "kernel-recursion", inputs, PASS if lhs == rhs else FAIL, witness, started
    )


# ---------------------------------------------------------------------------
# semismallness


def check_semismall(big: Bipartition) -> CheckReport:
    """Twice the fiber polynomial degree over each contained orbit must be
    at most the difference of orbit dimensions."""
    started = time.perf_counter()
    inputs = {"big": _bp_json(big)}
    dim_big = orbit_dimension(big)
    strata = {}
    ok = True
    for small in bipartitions(big.n):
        if not closure_contains(big, small):
            continue
        try:
            poly, _ = fiber_polynomial(big, small)
        except InterpolationError as exc:
            ok = False
            strata[format_bipartition(small)] = {"reason": str(exc)}
            continue
        dim_small = orbit_dimension(small)
        good = 2 * poly.degree <= dim_big - dim_small
        ok = ok and good
        strata[format_bipartition(small)] = {
            "fiber_poly": str(poly),
            "2*deg": 2 * poly.degree,
            "codim": dim_big - dim_small,
            "ok": good,
        }
    witness = {"orbit_dim": dim_big, "strata": strata}
    return _report("semismall", inputs, PASS if ok else FAIL, witness, started)


# ---------------------------------------------------------------------------
# suite assembly (used by the CLI and the acceptance tests)


CHECK_NAMES = (
    "polynomial",
    "alpha",
    "distinguished",
    "split",
    "kernel",
    "semismall",
)


def suite_instances(
    n: int,
    checks: Sequence[str] = CHECK_NAMES,
    budget: int = DEFAULT_BUDGET,
    recursion_primes: Sequence[int] = (2,),
) -> list[tuple[dict, Callable[[], CheckReport]]]:
    """All (description, thunk) pairs of the selected checks over every
    bipartition / closure pair of sizes 0..n, in deterministic order."""
    unknown = set(checks) - set(CHECK_NAMES)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    out: list[tuple[dict, Callable[[], CheckReport]]] = []

    def add(desc: dict, thunk: Callable[[], CheckReport]) -> None:
        out.append((desc, thunk))

    pair_checks = {"polynomial", "alpha", "split", "kernel"}
    for size in range(n + 1):
        pairs = closure_pairs(size) if pair_checks & set(checks) else ()
        if "polynomial" in checks:
            for big, small in pairs:
                add(
                    {"check": "polynomial", "big": format_bipartition(big), "small": format_bipartition(small)},
                    lambda big=big, small=small: check_polynomial_count(big, small),
                )
        if "alpha" in checks:
            for big, small in pairs:
                add(
                    {"check": "alpha", "big": format_bipartition(big), "small": format_bipartition(small)},
                    lambda big=big, small=small: check_alpha_partition(big, small, budget=budget),
                )
        if "distinguished" in checks:
            for b in bipartitions(size):
                for p in recursion_primes:
                    add(
                        {"check": "distinguished", "b": format_bipartition(b), "p": p},
                        lambda b=b, p=p: check_distinguished_lemma(b, p, budget),
                    )
        if "split" in checks:
            for big, small in pairs:
                if is_distinguished(small):
                    continue
                for p in recursion_primes:
                    add(
                        {"check": "split", "b": format_bipartition(small), "big": format_bipartition(big), "p": p},
                        lambda small=small, big=big, p=p: check_split_product(small, big, p, budget),
                    )
        if "kernel" in checks:
            for big, small in pairs:
                if not is_distinguished(small) or small.first.length == 0:
                    continue
                shape = flag_shape(big)
                if shape.marker == 0:
                    continue
                for p in recursion_primes:
                    add(
                        {"check": "kernel", "b": format_bipartition(small), "big": format_bipartition(big), "p": p},
                        lambda small=small, shape=shape, p=p: check_kernel_recursion(small, shape, p, budget),
                    )
        if "semismall" in checks:
            for big in bipartitions(size):
                add(
                    {"check": "semismall", "big": format_bipartition(big)},
                    lambda big=big: check_semismall(big),
                )
    return out
