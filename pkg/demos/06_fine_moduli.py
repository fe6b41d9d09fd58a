#!/usr/bin/env python3
"""Fine-moduli numerology for the pencil-of-cubics family.

Morphisms C^2 (x) O(-2) -> O(-1) + (O (x) C^k) carry finitely many critical
polarization values inside the guaranteed window; off those values the
quotients are fine moduli spaces of torsion-free sheaves.
"""

from gitpol.finemoduli import (build_phi_from_pk, classify, f_prime_injective,
                               fm_params, guaranteed_window_low, ideal_h0_check,
                               injectivity_codim2_check,
                               planted_common_factor_datum,
                               standard_pk_construction)
from gitpol.polarization import singular_polarizations

for n, k in ((2, 7), (3, 12), (4, 18)):
    p = fm_params(n, k)
    print(f"(n, k) = ({n}, {k}): valid={p.valid}, spaces={p.q_body}, "
          f"dimension={p.dimension}")
    print("  critical values:", [str(t) for t in p.critical_values],
          "inside window starting at", guaranteed_window_low(n, k))
    walls = singular_polarizations((2,), (1, k))
    print("  all critical values appear among the singular values:",
          all(t in walls for t in p.critical_values))

print("square count identity for ambient 2..6:",
      [ideal_h0_check(n) for n in range(2, 7)])

datum = standard_pk_construction(2, 7)
phi = build_phi_from_pk(datum)
print("split construction classifies as:", classify(phi))
print("induced map has full rank:", f_prime_injective(phi))
print("no hypersurface of non-injectivity (gcd check):",
      injectivity_codim2_check(datum))
print("planted common factor is detected:",
      not injectivity_codim2_check(planted_common_factor_datum(2)))
