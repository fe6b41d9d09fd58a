from fractions import Fraction as F

import pytest

from gitpol.constants import (ConstantQuery, LowerBound, c_closed_form_21,
                              c_closed_form_triple, membership, pad_witness,
                              reference_table, resolve, resolve_c, resolve_d,
                              rho_problem_c, rho_problem_cprime_31, rho_value,
                              sampled_lower_bound, sampled_lower_bound_query,
                              transpose_spec)
from gitpol.exact import RatMatrix
from gitpol.setting import ProblemSpec, SchemaError, build_line_bundle_system

SYS_FAM22 = build_line_bundle_system(ProblemSpec(3, ((-2, 3), (-1, 2)), ((0, 2), (1, 5))))
SYS_31P3 = build_line_bundle_system(ProblemSpec(3, ((-4, 1), (-2, 1), (-1, 1)), ((0, 5),)))
SYS_21P2 = build_line_bundle_system(ProblemSpec(2, ((-2, 2), (-1, 1)), ((0, 3),)))
SYS_22P3 = build_line_bundle_system(ProblemSpec(3, ((-2, 1), (-1, 1)), ((0, 1), (1, 3))))


def test_closed_form_gap_one():
    assert c_closed_form_21(3, 2) == F(1, 7)
    assert c_closed_form_21(5, 1) == 0
    assert c_closed_form_21(2, 5) == F(3, 8)
    # the two branches agree where they meet
    for n in range(2, 6):
        m = n + 1
        assert F(m * (m - 1), 2 * (m * (n + 1) - 1)) == F(n + 1, 2 * (n + 2))


def test_closed_form_triple():
    assert c_closed_form_triple(3, 4) == F(1, 5)
    assert c_closed_form_triple(4, 2) == 1
    assert c_closed_form_triple(2, 3) == F(1, 2)


def test_resolution_and_table():
    assert resolve_c(SYS_FAM22, 1).value == F(1, 7)
    assert resolve_c(SYS_FAM22, 2).value == F(4, 7)
    assert resolve_c(SYS_FAM22, 2).source == "table"
    assert resolve_d(SYS_FAM22, 1).value == F(4, 7)
    assert resolve_d(SYS_FAM22, 2).value == F(1, 7)
    assert resolve_c(SYS_31P3, 1).value == F(1, 5)
    # single-block multiplicity one is exactly zero
    assert resolve_c(SYS_22P3, 1).value == 0
    assert resolve_c(SYS_22P3, 2).value == 0
    assert resolve_d(SYS_22P3, 1).value == 0
    assert resolve_c(SYS_21P2, 1).value == 0
    assert resolve_c(SYS_31P3, 1, blocks=(3,)).value == 0


def test_reference_table_absent_when_unlisted():
    q = ConstantQuery(SYS_21P2, "left", 1)
    assert reference_table(q) is None
    assert reference_table(ConstantQuery(SYS_FAM22, "left", 2)) == F(4, 7)
    assert reference_table(ConstantQuery(SYS_FAM22, "right", 1)) == F(4, 7)


def test_transpose_spec_shape():
    t = transpose_spec(SYS_FAM22.spec)
    assert t.e == (-1, 0) and t.f == (1, 2)
    assert t.m == (5, 2) and t.n == (2, 3)


def test_membership_rejects_block_deficient_subspaces():
    prob = rho_problem_c(SYS_FAM22, 1)
    # K inside (one copy of M_2) x A_21 misses the second copy's support
    basis = RatMatrix.from_columns([[1 if i == c else 0 for i in range(prob.src_dim)]
                                    for c in range(4)])
    assert not membership(prob, basis)
    # the witness line with two distinct coordinate forms is admissible
    vec = [0] * prob.src_dim
    vec[0] = 1
    vec[4 + 1] = 1
    assert membership(prob, RatMatrix.from_columns([vec]))


def test_witness_line_attains_main_value():
    prob = rho_problem_c(SYS_FAM22, 1)
    vec = [0] * prob.src_dim
    vec[0] = 1        # first copy: the form x0
    vec[4 + 1] = 1    # second copy: the form x1
    assert rho_value(prob, RatMatrix.from_columns([vec])) == F(1, 7)


def test_graph_witness_attains_triple_value():
    prob = rho_problem_c(SYS_31P3, 1)
    lb = sampled_lower_bound(prob, seed=0, trials=40)
    assert lb.value == F(1, 5)
    assert lb.witness is not None


def test_lower_bounds_never_exceed_exact_values():
    checks = [(rho_problem_c(SYS_FAM22, 1), F(1, 7)),
              (rho_problem_c(SYS_FAM22, 2), F(4, 7)),
              (rho_problem_c(SYS_31P3, 1), F(1, 5))]
    for prob, bound in checks:
        lb = sampled_lower_bound(prob, seed=11, trials=60)
        assert lb.value <= bound


def test_lower_bound_right_side_query():
    lb = sampled_lower_bound_query(ConstantQuery(SYS_FAM22, "right", 2), seed=3, trials=40)
    assert isinstance(lb, LowerBound)
    assert lb.value <= F(1, 7)


def test_trials_must_be_positive():
    with pytest.raises(SchemaError):
        sampled_lower_bound(rho_problem_c(SYS_FAM22, 1), seed=0, trials=0)


def test_monotonicity_by_padding():
    prob = rho_problem_c(SYS_31P3, 1)
    lb = sampled_lower_bound(prob, seed=0, trials=40)
    witness = RatMatrix.from_json(lb.witness)
    bigger, padded = pad_witness(prob, witness, extra_block=0, extra_copies=1)
    assert membership(bigger, padded)
    assert rho_value(bigger, padded) == lb.value


def test_cprime_problem_shape():
    prob = rho_problem_cprime_31(SYS_31P3)
    assert prob.src_dim == SYS_31P3.a(3, 2)
    assert prob.h_src == SYS_31P3.h(1, 2)


def test_resolve_query_dispatch():
    assert resolve(ConstantQuery(SYS_FAM22, "left", 2)).value == F(4, 7)
    assert resolve(ConstantQuery(SYS_FAM22, "right", 2)).value == F(1, 7)
    with pytest.raises(SchemaError):
        ConstantQuery(SYS_FAM22, "middle", 1)
