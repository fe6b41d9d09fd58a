#!/usr/bin/env python3
"""Hunting destabilizing data on explicit morphisms.

Certificates are pairs (unipotent move, invariant family); they re-verify
from their serialized form.  The two-by-two pencil shape has an exact
decider on top of the general semi-decision search.
"""

from fractions import Fraction as F

from gitpol.poly import Poly
from gitpol.polarization import Polarization
from gitpol.setting import MorphismElement, ProblemSpec, build_line_bundle_system
from gitpol.stability import (MU1_GT_HALF, MU1_LT_HALF, decide_pencil,
                              destabilizer_search, reverify, saturate_up,
                              verify_jh, FiltrationFamily, family_from_flags)
from gitpol.exact import RatMatrix

sys21 = build_line_bundle_system(ProblemSpec(2, ((-2, 2), (-1, 1)), ((0, 3),)))
pol = Polarization((F(1, 6), F(2, 3)), (F(1, 3),))

# a block-diagonal morphism sitting exactly on the t = 2/3 wall
wall_matrix = MorphismElement.from_polynomials(
    sys21, [[[["0", "0"], ["0", "0"], ["x0^2", "x1^2"]],
             [["x0"], ["x1"], ["0"]]]])
verdict = destabilizer_search(wall_matrix, pol, budget=300, seed=1)
print("wall matrix at t = 2/3:", verdict.status,
      "family dims:", verdict.witness_family.dimension_vector())
print("witness re-verifies:", reverify(wall_matrix, pol.lam, pol.mu, verdict))

# its two-step filtration is consistent with a composition series
level1 = saturate_up(wall_matrix, (RatMatrix.zeros(2, 0), RatMatrix.identity(1)))
filt = FiltrationFamily((level1, family_from_flags(wall_matrix, (True, True), (True,))))
print("two-step filtration verifies:", verify_jh(wall_matrix, filt, pol))

# the pencil shape 2*O(-2) -> O(-1) + O on the plane has an exact decision
sys_pencil = build_line_bundle_system(ProblemSpec(2, ((-2, 2),), ((-1, 1), (0, 1))))
nv = 3
z1 = Poly.parse("x0", nv)
q = Poly.parse("x1^2 + x2^2", nv)
stable = MorphismElement.from_polynomials(
    sys_pencil, [[[[z1, Poly.zero(nv)]]], [[[q, z1 * z1]]]])
print("pencil (z, 0 / q, z^2), small first weight:",
      decide_pencil(stable, MU1_LT_HALF).status)

z = Poly.parse("x0 + 2x1 - x2", nv)
sheared = MorphismElement.from_polynomials(
    sys_pencil, [[[[z1, Poly.parse("x1", nv)]]],
                 [[[z * z1, z * Poly.parse("x1", nv)]]]])
verdict = decide_pencil(sheared, MU1_GT_HALF)
print("pencil with a common shear, large first weight:", verdict.status,
      "- the witness move kills the quadratic row")
