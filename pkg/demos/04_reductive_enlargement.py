#!/usr/bin/env python3
"""The reductive enlargement: embedding, equivariance, orbit saturation.

Morphisms embed into a bigger space acted on by a product of general linear
groups; the embedding intertwines the actions, and membership in the orbit
saturation of the image is decided by ranks and factorization tests.
"""

from fractions import Fraction as F

from gitpol.embedding import (BigElement, big_act, build_big,
                              gamma_injectivity_check, theta, z_membership, zeta)
from gitpol.exact import RatMatrix
from gitpol.polarization import Polarization, associated
from gitpol.setting import (ProblemSpec, act, build_line_bundle_system,
                            compose_group, random_morphism, random_reductive,
                            random_unipotent)

sysm = build_line_bundle_system(ProblemSpec(2, ((-2, 2), (-1, 1)), ((0, 3),)))
big = build_big(sysm)
print("block-sum dimensions:", big.p, big.q)
print("embedding is injective on morphisms:", gamma_injectivity_check(big))

w = random_morphism(sysm, seed=1, bound=2)
g = compose_group(random_reductive(sysm, 2), random_unipotent(sysm, 3, 2))
lhs = zeta(big, act(g, w))
rhs = big_act(big, theta(big, g), zeta(big, w))
print("equivariance on a sample pair:",
      lhs.gamma == rhs.gamma and all(lhs.x[i] == rhs.x[i] for i in lhs.x))

bw = zeta(big, w)
print("image of the embedding:", z_membership(bw).status)
degenerate = BigElement(big, {2: RatMatrix.zeros(*big.xi[2].shape)},
                        bw.gamma, dict(bw.y))
print("chain map collapsed to zero:", z_membership(degenerate).status)
pert = RatMatrix.from_rows([list(r) for r in big.xi[2].rows])
pert.rows[0][0] += 1
print("generic perturbation:", z_membership(
    BigElement(big, {2: pert}, bw.gamma, dict(bw.y))).status)

# weights transform through two unitriangular systems
pol = Polarization((F(1, 6), F(2, 3)), (F(1, 3),))
assoc = associated(pol, sysm)
print("associated weights:", [str(a) for a in assoc.alpha],
      [str(b) for b in assoc.beta])
print("normalization carries over:",
      sum(a * p for a, p in zip(assoc.alpha, assoc.p)) == 1)
