#!/usr/bin/env python3
"""Certifying good projective quotients across a polarization line.

For 2*O(-2) + O(-1) -> 3*O the only constant involved vanishes, so the
sufficient conditions collapse to positivity of the associated weights:
every t above 3/5 certifies, everything below is UNKNOWN (the machinery
never claims non-existence).
"""

from fractions import Fraction as F

from gitpol.certifier import (admissible_region, certify, expected_dimension,
                              family22_region, family22_system4, thresholds_152)
from gitpol.polarization import Polarization, param_22
from gitpol.setting import ProblemSpec, build_line_bundle_system

sys21 = build_line_bundle_system(ProblemSpec(2, ((-2, 2), (-1, 1)), ((0, 3),)))
print("expected quotient dimension:", expected_dimension(sys21))

for t in (F(1, 2), F(13, 20), F(7, 10), F(9, 10)):
    pol = Polarization(((1 - t) / 2, t), (F(1, 3),))
    verdict = certify(sys21, pol)
    print(f"t = {t}: {verdict.status}" + (f" ({verdict.reason})" if verdict.reason else ""))

print()
print("explicit lower bounds for the gap-one family (n, m1, m2, n1):")
for args in ((2, 2, 2, 3), (3, 1, 2, 5)):
    print(" ", args, "->", tuple(str(b) for b in thresholds_152(*args)))

print()
print("two-parameter family on three-space (two middle multiplicities):")
sys22 = build_line_bundle_system(ProblemSpec(3, ((-2, 1), (-1, 1)), ((0, 1), (1, 3))))
region = admissible_region(sys22, param_22((1, 1), (1, 3)))
print("admissible rectangle vertices:",
      [(str(x), str(y)) for x, y in region.vertices])

for m1, n2 in ((3, 5), (5, 20), (7, 8)):
    reg = family22_region(m1, n2)
    state = "empty" if reg.is_empty else f"witness {tuple(map(str, reg.witness))}"
    print(f"family (m1={m1}, n2={n2}): {state}")
print("reduced inequality system for (3, 5):", family22_system4(3, 5))
