#!/usr/bin/env python3
"""Codimension constants: closed forms, reference values, certified bounds.

The constants measure how much the image of a contraction can drop on
admissible subspaces.  Closed forms exist for a few configurations; the
sampler produces certified lower bounds with recorded witnesses everywhere.
"""

from gitpol.constants import (c_closed_form_21, c_closed_form_triple,
                              membership, resolve_c, resolve_d, rho_problem_c,
                              rho_value, sampled_lower_bound)
from gitpol.exact import RatMatrix
from gitpol.setting import ProblemSpec, build_line_bundle_system

print("gap-one closed form (ambient 3, multiplicity 2):", c_closed_form_21(3, 2))
print("gap-one closed form saturates:", c_closed_form_21(2, 5))
print("triple closed form (ambient 3, degree 4):", c_closed_form_triple(3, 4))

sys_fam = build_line_bundle_system(ProblemSpec(3, ((-2, 3), (-1, 2)), ((0, 2), (1, 5))))
for l in (1, 2):
    v = resolve_c(sys_fam, l)
    print(f"left constant level {l}: {v.value} ({v.source})")
for i in (1, 2):
    v = resolve_d(sys_fam, i)
    print(f"right constant level {i}: {v.value} ({v.source})")

# sample the triple configuration; the graph witness {(f, f z)} attains it
sys_triple = build_line_bundle_system(ProblemSpec(3, ((-4, 1), (-2, 1), (-1, 1)), ((0, 5),)))
prob = rho_problem_c(sys_triple, 1)
bound = sampled_lower_bound(prob, seed=0, trials=60)
print("sampled lower bound for the triple:", bound.value,
      "over", bound.trials_used, "trials")
witness = RatMatrix.from_json(bound.witness)
print("witness is admissible:", membership(prob, witness),
      "and evaluates to:", rho_value(prob, witness))
