#!/usr/bin/env python3
"""Distinguished pairs and explicit splittings.

A pair (v, x) is distinguished when the space admits no nontrivial
direct sum V1 (+) V2 with both parts x-stable and weight-graded and
v in V1.  The distinguished bipartitions are exactly (; (n)) and those
with strictly decreasing mu and strictly decreasing zero-padded nu.
For every other bipartition an explicit splitting exists, built from
one of three constructions on the diagram rows.
"""

from enhcone import (
    bipartitions,
    decomposition_failures,
    explicit_decomposition,
    is_distinguished,
    normal_pair,
)
from enhcone.checks import check_distinguished_lemma

print("Bipartitions of 4, split or certified unsplittable over GF(2):")
for b in bipartitions(4):
    report = check_distinguished_lemma(b, 2)
    tag = "distinguished" if is_distinguished(b) else "splits"
    agree = "confirmed by brute force" if report.passed else "DISAGREES"
    print(f"  {str(b):16} {tag:14} [{agree}, {report.millis:.1f} ms]")

print()
print("Explicit constructions for the non-distinguished bipartitions of 4:")
for b in bipartitions(4):
    if is_distinguished(b):
        continue
    np_ = normal_pair(b, 2)
    dec = explicit_decomposition(np_)
    problems = decomposition_failures(np_.pair, dec)
    print(
        f"  {str(b):16} V1 dim {dec.v1.dim}, V2 dim {dec.v2.dim}"
        f"{'' if not problems else '  VIOLATES ' + str(problems)}"
    )
    for row in dec.v1.basis:
        print(f"      V1 basis vector {row}")
