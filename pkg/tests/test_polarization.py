import random
from fractions import Fraction as F

import pytest

from gitpol.polarization import (AssociatedPolarization, DimensionVector,
                                 Polarization, associated, associated_roundtrip,
                                 big_dims, chambers, char_exponents, default_param,
                                 discriminant, param_22, param_31, param_t_21,
                                 param_u_12, proper_case_check,
                                 proper_dimension_vectors, saturated_dims,
                                 singular_hyperplanes, singular_polarizations,
                                 weight_conditions, weighted_discriminant)
from gitpol.setting import ProblemSpec, SchemaError, build_line_bundle_system

SYS_21 = build_line_bundle_system(ProblemSpec(2, ((-2, 2), (-1, 1)), ((0, 3),)))
SYS_22 = build_line_bundle_system(ProblemSpec(3, ((-2, 1), (-1, 1)), ((0, 1), (1, 3))))
SYS_31 = build_line_bundle_system(ProblemSpec(3, ((-4, 1), (-2, 1), (-1, 1)), ((0, 5),)))
SYS_FAM22 = build_line_bundle_system(ProblemSpec(3, ((-2, 3), (-1, 2)), ((0, 2), (1, 5))))

POL_21 = Polarization.make((F(1, 6), F(2, 3)), (F(1, 3),), (2, 1), (3,))


def random_pol(rng, m, n):
    lam = [F(rng.randint(1, 30), rng.randint(1, 30)) for _ in m]
    mu = [F(rng.randint(1, 30), rng.randint(1, 30)) for _ in n]
    sl = sum(x * mi for x, mi in zip(lam, m))
    sm = sum(x * nl for x, nl in zip(mu, n))
    return Polarization(tuple(x / sl for x in lam), tuple(x / sm for x in mu))


def test_discriminant_examples():
    assert discriminant(POL_21, DimensionVector((0, 1), (2,))) == 0
    assert discriminant(POL_21, DimensionVector((0, 0), (0,))) == 0
    assert discriminant(POL_21, DimensionVector((1, 0), (1,))) == F(-1, 6)


def test_normalization_enforced():
    with pytest.raises(SchemaError):
        Polarization.make((F(1, 2), F(1, 2)), (F(1, 3),), (2, 1), (3,))


def test_singular_values_type_21():
    assert singular_polarizations((2, 1), (3,)) == [F(1, 3), F(2, 3)]
    assert singular_polarizations((1, 1), (1,)) == []


def test_singular_lines_22():
    param = param_22((1, 1), (1, 3), flip_mu=True)
    walls = singular_polarizations((1, 1), (1, 3), param)
    expected = set()
    for k in (1, 2, 3):
        # nu = (3/k) x  and  nu = -(3/k) x + 3/k, written primitively
        from math import gcd

        g = gcd(3, k)
        expected.add((3 // g, -k // g, 0))
        expected.add((3 // g, k // g, 3 // g))
    assert set(walls) == expected and len(walls) == 6


def test_chambers_one_parameter():
    dec = chambers((2, 1), (3,), (0, 1))
    assert dec.walls == [F(1, 3), F(2, 3)]
    assert len(dec.chambers) == 3
    assert dec.notion_count == 5
    sub = chambers((2, 1), (3,), (F(3, 5), 1))
    assert sub.walls == [F(2, 3)]


def test_chambers_two_parameters_rectangle():
    param = param_22((1, 1), (1, 3), flip_mu=True)
    dec = chambers((1, 1), (1, 3), ((F(4, 5), 1), (0, F(3, 7))), param)
    assert len(dec.walls) == 3
    assert len(dec.chambers) == 4
    empty = chambers((1, 1), (1, 3), ((F(81, 100), F(82, 100)), (F(2, 5), F(41, 100))),
                     param)
    assert len(empty.walls) == 0 and len(empty.chambers) == 1


def test_chamber_sign_patterns_constant():
    # all proper dimension vectors keep one sign of the discriminant per chamber
    rng = random.Random(0)
    for lo, hi in ((F(0), F(1, 3)), (F(1, 3), F(2, 3)), (F(2, 3), F(1))):
        samples = [lo + (hi - lo) * F(k, 7) for k in (1, 3, 6)]
        patterns = []
        for t in samples:
            pol = Polarization((F(1 - t, 2) if False else (1 - t) / 2, t), (F(1, 3),))
            pat = tuple(
                0 if discriminant(pol, d) == 0 else (1 if discriminant(pol, d) > 0 else -1)
                for d in proper_dimension_vectors((2, 1), (3,)))
            patterns.append(pat)
        assert patterns[0] == patterns[1] == patterns[2]
    _ = rng


def test_associated_examples_and_roundtrip():
    assoc = associated(POL_21, SYS_21)
    assert assoc.alpha == (F(1, 6), F(1, 6))       # alpha2 = lambda2 - 3 lambda1
    assert assoc.p == (5, 1) and assoc.q == (3,)
    assert associated_roundtrip(assoc, SYS_21) == POL_21
    # one left summand: unchanged
    sys_12 = build_line_bundle_system(ProblemSpec(2, ((-2, 2),), ((-1, 1), (0, 1))))
    pol = Polarization.make((F(1, 2),), (F(2, 3), F(1, 3)), (2,), (1, 1))
    assert associated(pol, sys_12).alpha == (F(1, 2),)


def test_associated_positivity_reduces_to_weight_windows():
    # two-by-two family: beta1 > 0 iff mu1 > 4 mu2
    pol = Polarization.make((F(1, 10), F(9, 10)), (F(3, 4), F(1, 12)), (1, 1), (1, 3))
    assoc = associated(pol, SYS_22)
    assert (assoc.beta[0] > 0) == (pol.mu[0] > 4 * pol.mu[1])
    assert (assoc.alpha[1] > 0) == (pol.lam[1] > 4 * pol.lam[0])


def test_roundtrip_and_sums_random():
    rng = random.Random(1)
    for sysm in (SYS_21, SYS_22, SYS_31, SYS_FAM22):
        for _ in range(60):
            pol = random_pol(rng, sysm.m, sysm.n)
            assoc = associated(pol, sysm)
            assert associated_roundtrip(assoc, sysm) == pol
            assert sum(a * p for a, p in zip(assoc.alpha, assoc.p)) == 1
            assert sum(b * q for b, q in zip(assoc.beta, assoc.q)) == 1


def test_saturated_family_weight_identity_random():
    rng = random.Random(2)
    for sysm in (SYS_21, SYS_22, SYS_FAM22):
        for _ in range(60):
            pol = random_pol(rng, sysm.m, sysm.n)
            assoc = associated(pol, sysm)
            d = DimensionVector(tuple(rng.randint(0, mi) for mi in sysm.m),
                                tuple(rng.randint(0, nl) for nl in sysm.n))
            sp, sq = saturated_dims(sysm, d)
            lhs = sum(a * x for a, x in zip(assoc.alpha, sp)) \
                - sum(b * y for b, y in zip(assoc.beta, sq))
            assert lhs == weighted_discriminant(pol.lam, pol.mu, d.mprime, d.nprime)


def test_weight_conditions_31_worked_values():
    pol = Polarization.make((F(1, 100), F(1, 5), F(79, 100)), (F(1, 5),),
                            (1, 1, 1), (5,))
    assoc = associated(pol, SYS_31)
    conds = {c.name: c for c in weight_conditions(assoc, pol)}
    # alpha2 > 0 is lambda2 > 10 lambda1; alpha3 > 0 is lambda3 - 4 lambda2 + 20 lambda1 > 0
    assert conds["alpha[2]>0"].slack == pol.lam[1] - 10 * pol.lam[0]
    assert conds["alpha[3]>0"].slack == pol.lam[2] - 4 * pol.lam[1] + 20 * pol.lam[0]
    assert conds["alpha[2]>0"].holds and conds["alpha[3]>0"].holds
    # the tail condition at the second node is 1 - lambda1 p1 > 0
    p1 = 1 + 10 + 20
    assert conds["tail_alpha[2]>0"].slack == 1 - pol.lam[0] * p1


def test_weight_conditions_boundary_slack_zero():
    pol = Polarization.make((F(1, 5), F(3, 5)), (F(1, 3),), (2, 1), (3,))
    assoc = associated(pol, SYS_21)
    conds = {c.name: c for c in weight_conditions(assoc)}
    assert conds["alpha[2]>0"].slack == 0 and not conds["alpha[2]>0"].holds


def test_weight_conditions_22_rectangle():
    pol = Polarization.make((F(1, 10), F(9, 10)), (F(2, 3), F(1, 9)), (1, 1), (1, 3))
    assoc = associated(pol, SYS_22)
    conds = {c.name: c for c in weight_conditions(assoc, pol)}
    needed = ["lambda[1]>0", "mu[2]>0", "alpha[2]>0", "beta[1]>0"]
    assert all(conds[k].holds for k in needed)


def test_proper_case_checks():
    ok1 = proper_case_check(((1, 2), (-1, -1)), ((2, 1), (1, 1)), 1)
    assert all(c.holds for c in ok1)
    bad1 = proper_case_check(((0, 2), (-1, -1)), ((2, 1), (1, 1)), 1)
    assert not all(c.holds for c in bad1)
    # case 2 tails and heads
    ok2 = proper_case_check(((-1, 2), (-1, 1)), ((1, 1), (1, 2)), 2)
    by = {c.name: c for c in ok2}
    assert by["tail_left[1]>0"].holds and by["tail_left[2]>0"].holds
    assert by["head_right[1]<0"].holds and not by["head_right[2]<0"].holds
    # case 3 mixed
    ok3 = proper_case_check(((-1, 2), (-1, -1)), ((1, 1), (1, 2)), 3)
    assert all(c.holds for c in ok3)


def test_case2_check_matches_weight_conditions():
    # the chain-shape sign conditions on (alpha, -beta) agree with the
    # tail/head sums reported by the weight-condition op
    pol = Polarization.make((F(1, 10), F(9, 10)), (F(2, 3), F(1, 9)), (1, 1), (1, 3))
    assoc = associated(pol, SYS_22)
    conds = {c.name: c for c in weight_conditions(assoc)}
    case2 = {c.name: c for c in proper_case_check(
        (assoc.alpha, tuple(-b for b in assoc.beta)), (assoc.p, assoc.q), 2)}
    for i in range(2, len(assoc.alpha) + 1):
        assert case2[f"tail_left[{i}]>0"].slack == conds[f"tail_alpha[{i}]>0"].slack
    for m in range(1, len(assoc.beta)):
        assert case2[f"head_right[{m}]<0"].slack == conds[f"head_beta[{m}]>0"].slack


def test_char_exponents():
    ev, t = char_exponents(POL_21.lam, POL_21.mu, ((2, 1), (3,)), 1)
    assert ev == [1, 4, -2] and t == 6
    from math import gcd

    assert gcd(gcd(abs(ev[0]), abs(ev[1])), abs(ev[2])) == 1
    # uniform symmetric case gives equal weights
    ev2, _ = char_exponents((F(1, 4), F(1, 4)), (F(1, 2),), ((2, 2), (2,)), 1)
    assert ev2[0] == ev2[1]
    # chain-degree formula on the associated data
    assoc = associated(POL_21, SYS_21)
    ev3, t3 = char_exponents(assoc.alpha, assoc.beta, (assoc.p, assoc.q), 2)
    scale = 6
    expected = (1 * (scale * assoc.alpha[0]) * assoc.p[0]
                + 2 * (scale * assoc.alpha[1]) * assoc.p[1]
                - 0 * (-scale * assoc.beta[0]) * assoc.q[0])
    assert t3 == expected


def test_singular_hyperplanes_general():
    walls = singular_hyperplanes((2, 1), (3,))
    assert walls  # nonempty, primitive integer vectors
    from math import gcd

    for w in walls:
        g = 0
        for v in w:
            g = gcd(g, abs(v))
        assert g == 1


def test_default_param_dispatch():
    assert default_param((2, 1), (3,)).names == ("t",)
    assert default_param((2,), (1, 7)).names == ("u",)
    assert default_param((1, 1), (1, 3)).nvars == 2
    assert default_param((1, 1, 1), (5,)).nvars == 2
    with pytest.raises(SchemaError):
        default_param((1, 1, 1, 1), (1,))
