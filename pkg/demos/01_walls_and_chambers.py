#!/usr/bin/env python3
"""Walls and chambers for one-parameter polarizations.

The running example: morphisms 2*O(-2) + O(-1) -> 3*O on the projective
plane.  A normalized polarization is determined by the single parameter
t = lambda_2, and the sign pattern of the discriminant over all proper
dimension vectors is constant between consecutive walls.
"""

from fractions import Fraction as F

from gitpol.polarization import (DimensionVector, Polarization, chambers,
                                 discriminant, proper_dimension_vectors,
                                 singular_polarizations)

m, n = (2, 1), (3,)

walls = singular_polarizations(m, n)
print("singular parameter values:", [str(t) for t in walls])

dec = chambers(m, n, (0, 1))
print("chambers of (0,1):", [(str(a), str(b)) for a, b in dec.chambers])
print("distinct stability notions:", dec.notion_count)

# the discriminant at the wall t = 2/3 vanishes on two dimension vectors
pol = Polarization((F(1, 6), F(2, 3)), (F(1, 3),))
flat = [d for d in proper_dimension_vectors(m, n) if discriminant(pol, d) == 0]
print("dimension vectors on the t = 2/3 wall:",
      [(d.mprime, d.nprime) for d in flat])

# between walls nothing changes: sample two parameters in the top chamber
for t in (F(7, 10), F(9, 10)):
    p = Polarization(((1 - t) / 2, t), (F(1, 3),))
    signs = tuple(1 if discriminant(p, d) > 0 else (-1 if discriminant(p, d) < 0 else 0)
                  for d in proper_dimension_vectors(m, n))
    print(f"t = {t}: discriminant sign pattern hash {hash(signs)}")
