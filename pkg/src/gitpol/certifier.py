"""Quotient-existence certificates.

Every sufficient condition is evaluated exactly, with its slack, and tagged
with the provenance of every codimension constant it consumed.  Conditions
that need a constant known only through a lower bound are reported undecided
(a lower bound weakens such inequalities, so nothing can be certified from
it), and the combined verdict degrades to UNKNOWN.  The verdict never claims
non-existence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .constants import ConstantValue, resolve_c, resolve_d, rho_problem_cprime_31
from .exact import ONE, ZERO, rat, rat_str
from .polarization import (Affine, AssociatedPolarization, Param, Polarization,
                           associated, big_dims, weight_conditions)
from .regions import HalfPlane, interior_witness, intersect_halfplanes, line_primitive
from .setting import CompositionSystem, ProblemSpec, SchemaError, build_line_bundle_system

GOOD_PROJECTIVE_QUOTIENT = "GOOD_PROJECTIVE_QUOTIENT"
GEOMETRIC_QUOTIENT_ONLY = "GEOMETRIC_QUOTIENT_ONLY"
UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class ConditionReport:
    condition_id: str
    holds: bool
    slack: Fraction | None
    strict: bool = False
    constant_sources: tuple[str, ...] = ()
    note: str = ""

    @property
    def decided(self) -> bool:
        return self.slack is not None or self.note == ""

    def to_json(self) -> dict:
        return {"id": self.condition_id, "holds": self.holds,
                "slack": None if self.slack is None else rat_str(self.slack),
                "strict": self.strict,
                "constant_sources": list(self.constant_sources),
                "note": self.note}


def _ineq(condition_id: str, value: Fraction, strict: bool = False,
          sources: tuple[str, ...] = ()) -> ConditionReport:
    holds = value > 0 if strict else value >= 0
    return ConditionReport(condition_id, holds, value, strict, sources)


def _undecided(condition_id: str, sources: tuple[str, ...]) -> ConditionReport:
    return ConditionReport(condition_id, False, None, False, sources,
                           "constant not exactly known")


def cond_equivalence_s1(sys: CompositionSystem, pol: Polarization) -> list[ConditionReport]:
    """Single-target equivalence: all associated left weights positive and the
    second weight dominates the constant threshold."""
    if sys.s != 1:
        raise SchemaError("this condition applies to a single right summand")
    assoc = associated(pol, sys)
    out = [_ineq(f"alpha[{i}]>0", a, strict=True)
           for i, a in enumerate(assoc.alpha, 1)]
    if sys.r >= 2:
        c1 = resolve_c(sys, 1)
        if not c1.exact:
            out.append(_undecided("equivalence-threshold", (c1.source,)))
        else:
            thr = Fraction(sys.a(2, 1), sys.n[0]) * c1.value
            out.append(_ineq("equivalence-threshold", pol.lam[1] - thr,
                             sources=(c1.source,)))
    return out


def cond_equality_general(sys: CompositionSystem, pol: Polarization) -> list[ConditionReport]:
    """Equality of (semi-)stable loci through the embedding: positivity of the
    associated weights plus the left and right constant thresholds."""
    assoc = associated(pol, sys)
    out = [_ineq(f"alpha[{i}]>0", a, strict=True)
           for i, a in enumerate(assoc.alpha, 1)]
    out += [_ineq(f"beta[{l}]>0", b, strict=True)
            for l, b in enumerate(assoc.beta, 1)]
    if sys.r >= 2:
        cs = [resolve_c(sys, l) for l in range(1, sys.s + 1)]
        if all(c.exact for c in cs):
            thr = sys.a(2, 1) * sum((pol.mu[l - 1] * cs[l - 1].value
                                     for l in range(1, sys.s + 1)), ZERO)
            out.append(_ineq("equality-left", pol.lam[1] - thr,
                             sources=tuple(c.source for c in cs)))
        else:
            out.append(_undecided("equality-left", tuple(c.source for c in cs)))
    if sys.s >= 2:
        d1 = resolve_d(sys, 1)
        if d1.exact:
            thr = (sys.b(sys.s, sys.s - 1) * d1.value
                   * sum((assoc.alpha[i - 1] * sys.a(i, 1)
                          for i in range(1, sys.r + 1)), ZERO))
            out.append(_ineq("equality-right", pol.mu[sys.s - 2] - thr,
                             sources=(d1.source,)))
        else:
            out.append(_undecided("equality-right", (d1.source,)))
    return out


def cond_projectivity(sys: CompositionSystem, pol: Polarization) -> list[ConditionReport]:
    """Conditions forcing the boundary of the orbit saturation to carry no
    semi-stable point, by shape."""
    shape = (sys.r, sys.s)
    assoc = associated(pol, sys)
    if shape == (1, 1):
        return [ConditionReport("boundary-trivial", True, ZERO)]
    if shape == (2, 1):
        c1 = resolve_c(sys, 1)
        if not c1.exact:
            return [_undecided("boundary-2-1", (c1.source,))]
        thr = c1.value * sys.a(2, 1) * pol.mu[0]
        return [_ineq("boundary-2-1", pol.lam[1] - thr, sources=(c1.source,))]
    if shape == (2, 2):
        c1, c2 = resolve_c(sys, 1), resolve_c(sys, 2)
        d1, d2 = resolve_d(sys, 1), resolve_d(sys, 2)
        out = []
        if c1.exact and c2.exact:
            thr = (pol.mu[0] * c1.value
                   + pol.mu[1] * (c2.value - sys.b(2, 1) * c1.value)) * sys.a(2, 1)
            out.append(_ineq("boundary-2-2-left", pol.lam[1] - thr,
                             sources=(c1.source, c2.source)))
        else:
            out.append(_undecided("boundary-2-2-left", (c1.source, c2.source)))
        if d1.exact and d2.exact:
            thr = (pol.lam[0] * (d1.value - d2.value * sys.a(2, 1))
                   + pol.lam[1] * d2.value) * sys.b(2, 1)
            out.append(_ineq("boundary-2-2-right", pol.mu[0] - thr,
                             sources=(d1.source, d2.source)))
        else:
            out.append(_undecided("boundary-2-2-right", (d1.source, d2.source)))
        return out
    if shape == (3, 1):
        return _projectivity_31(sys, pol, assoc)
    return [ConditionReport("boundary-unavailable", False, None, False, (),
                            "no projectivity criterion available for this shape")]


def _projectivity_31(sys, pol, assoc) -> list[ConditionReport]:
    mu1 = pol.mu[0]
    lam = pol.lam
    a21, a31, a32 = sys.a(2, 1), sys.a(3, 1), sys.a(3, 2)
    c1 = resolve_c(sys, 1)
    c3 = resolve_c(sys, 1, blocks=(3,))
    cp3 = _resolve_cprime_31(sys)
    out = []
    if c1.exact:
        out.append(_ineq("boundary-3-1-mid", lam[1] - a21 * mu1 * c1.value,
                         sources=(c1.source,)))
        out.append(_ineq("boundary-3-1-top", lam[2] - a31 * mu1 * c1.value,
                         sources=(c1.source,)))
    else:
        out.append(_undecided("boundary-3-1-mid", (c1.source,)))
        out.append(_undecided("boundary-3-1-top", (c1.source,)))
    if c3.exact and cp3.exact:
        src = (c3.source, cp3.source)
        out.append(_ineq("boundary-3-1-alt-main",
                         assoc.alpha[1] * c3.value + lam[0] * cp3.value
                         - mu1 * c3.value * cp3.value, sources=src))
        out.append(_ineq("boundary-3-1-alt-i",
                         lam[2] - mu1 * cp3.value * a32 - a31 * lam[0], sources=src))
        out.append(_ineq("boundary-3-1-alt-ii",
                         lam[2] - mu1 * c3.value * a31 - a32 * assoc.alpha[1],
                         sources=src))
        out.append(_ineq("boundary-3-1-alt-iii",
                         lam[2] - mu1 * c3.value * a32 * a21, sources=src))
        out.append(_ineq("boundary-3-1-direct-a", lam[0] - mu1 * c3.value,
                         sources=(c3.source,)))
        out.append(_ineq("boundary-3-1-direct-b", assoc.alpha[1] - mu1 * cp3.value,
                         sources=(cp3.source,)))
        out.append(_ineq("boundary-3-1-direct-c1",
                         assoc.alpha[2] - mu1 * c3.value * a31, sources=(c3.source,)))
        out.append(_ineq("boundary-3-1-direct-c2",
                         assoc.alpha[2] - mu1 * cp3.value * a32, sources=(cp3.source,)))
    else:
        out.append(_undecided("boundary-3-1-alternatives", (c3.source, cp3.source)))
    return out


def _resolve_cprime_31(sys: CompositionSystem) -> ConstantValue:
    if sys.m[2] == 1 and sys.spec is not None:
        return ConstantValue(ZERO, "zero-single-block")
    return ConstantValue(None, "unknown")


def projectivity_holds(reports: list[ConditionReport]) -> bool:
    """Combine the per-shape reports into one boundary verdict."""
    by_id = {r.condition_id: r for r in reports}
    if "boundary-trivial" in by_id:
        return True
    if "boundary-2-1" in by_id:
        return by_id["boundary-2-1"].holds
    if "boundary-2-2-left" in by_id:
        return by_id["boundary-2-2-left"].holds and by_id["boundary-2-2-right"].holds
    if "boundary-3-1-mid" in by_id:
        base = by_id["boundary-3-1-mid"].holds and by_id["boundary-3-1-top"].holds
        alts = [r.holds for cid, r in by_id.items()
                if cid.startswith("boundary-3-1-alt") or cid.startswith("boundary-3-1-direct")]
        return base and any(alts)
    return False


@dataclass
class CertifyVerdict:
    status: str
    reports: list[ConditionReport]
    transposed: bool = False
    reason: str = ""

    def to_json(self) -> dict:
        return {"schema": "1", "status": self.status, "transposed": self.transposed,
                "reason": self.reason,
                "conditions": [r.to_json() for r in self.reports]}


def _transpose_pol(pol: Polarization) -> Polarization:
    return Polarization(tuple(reversed(pol.mu)), tuple(reversed(pol.lam)))


def certify(sys: CompositionSystem, pol: Polarization) -> CertifyVerdict:
    """Combine equality and boundary conditions into a quotient verdict.

    The dual shapes with one left summand are evaluated on the transposed
    data.  The verdict is monotone in the condition slacks and never asserts
    non-existence.
    """
    from .constants import transpose_system

    if sys.r == 1 and sys.s > 1:
        if sys.spec is None:
            return CertifyVerdict(UNKNOWN, [], reason="cannot transpose an abstract system")
        verdict = certify(transpose_system(sys), _transpose_pol(pol))
        verdict.transposed = True
        return verdict
    reports: list[ConditionReport] = []
    if not pol.is_proper:
        return CertifyVerdict(UNKNOWN, reports, reason="polarization is not proper")
    equality = (cond_equivalence_s1(sys, pol) if sys.s == 1
                else cond_equality_general(sys, pol))
    reports.extend(equality)
    undecided = [r for r in equality if r.slack is None]
    if undecided:
        return CertifyVerdict(UNKNOWN, reports,
                              reason="constant not exactly known: "
                              + ", ".join(r.condition_id for r in undecided))
    if not all(r.holds for r in equality):
        failed = [r.condition_id for r in equality if not r.holds]
        return CertifyVerdict(UNKNOWN, reports,
                              reason="equality conditions failed: " + ", ".join(failed))
    boundary = cond_projectivity(sys, pol)
    reports.extend(boundary)
    if projectivity_holds(boundary):
        return CertifyVerdict(GOOD_PROJECTIVE_QUOTIENT, reports)
    return CertifyVerdict(GEOMETRIC_QUOTIENT_ONLY, reports,
                          reason="boundary conditions not certified")


# ----------------------------------------------------------------------
# explicit thresholds for the gap-one family
# ----------------------------------------------------------------------


def thresholds_152(n: int, m1: int, m2: int, n1: int) -> tuple[Fraction, Fraction]:
    """The two explicit lower bounds on t for m1 O(-2) + m2 O(-1) -> n1 O."""
    if n < 2:
        raise SchemaError("need ambient dimension at least 2")
    first = Fraction((n + 1) * m2, (n + 1) * m2 + m1)
    if m2 == 1:
        second = ZERO
    elif m2 <= n + 1:
        second = Fraction((n + 1) * m2 * m2 * (m2 - 1), 2 * n1 * (m2 * (n + 1) - 1))
    else:
        second = Fraction((n + 1) * (n + 1) * m2, 2 * (n + 2) * n1)
    return first, second


def thresholds_from_constants(n: int, m1: int, m2: int, n1: int) -> tuple[Fraction, Fraction]:
    """Same bounds assembled from the general statement and the closed form."""
    from .constants import c_closed_form_21

    a = n + 1  # hom dimension between twists -2 and -1
    first = Fraction(a * m2, a * m2 + m1)
    second = Fraction(a * m2, n1) * c_closed_form_21(n, m2)
    return first, second


def expected_dimension(sys: CompositionSystem) -> int:
    """dim W - dim G + 1 (one-dimensional generic stabilizer)."""
    return sys.dim_w - sys.dim_g + 1


# ----------------------------------------------------------------------
# admissible regions in two parameters
# ----------------------------------------------------------------------


@dataclass
class Region2D:
    param: Param
    halfplanes: list[HalfPlane]
    vertices: list
    witness: tuple | None

    @property
    def is_empty(self) -> bool:
        return self.witness is None

    def to_json(self) -> dict:
        return {"schema": "1",
                "params": list(self.param.names),
                "inequalities": [
                    {"coeffs": list(hp.primitive()), "strict": hp.strict,
                     "label": hp.label} for hp in self.halfplanes],
                "vertices": [[rat_str(x), rat_str(y)] for x, y in self.vertices],
                "witness": None if self.witness is None else
                [rat_str(self.witness[0]), rat_str(self.witness[1])],
                "empty": self.is_empty}


def _affine_associated(sys: CompositionSystem, param: Param):
    """Associated weights as affine functions of the parameters."""
    r, s = sys.r, sys.s
    alpha: list[Affine] = []
    for i in range(1, r + 1):
        val = param.lam[i - 1]
        for j in range(1, i):
            val = val - alpha[j - 1].scale(sys.a(i, j))
        alpha.append(val)
    beta: list[Affine | None] = [None] * s
    for l in range(s, 0, -1):
        val = param.mu[l - 1]
        for k in range(l + 1, s + 1):
            val = val - beta[k - 1].scale(sys.b(k, l))
        beta[l - 1] = val
    return alpha, beta


def _hp(aff: Affine, strict: bool, label: str) -> HalfPlane:
    c0, cx, cy = aff.coeffs
    return HalfPlane(cx, cy, -c0, strict, label)


def admissible_region(sys: CompositionSystem, param: Param,
                      require_projectivity: bool = True) -> Region2D:
    """Exact polygon of polarizations passing positivity, weight, equality
    and (optionally) boundary conditions, in two free parameters."""
    if param.nvars != 2:
        raise SchemaError("admissible regions are computed in two parameters")
    hps: list[HalfPlane] = []
    for i, aff in enumerate(param.lam, 1):
        hps.append(_hp(aff, True, f"lambda[{i}]>0"))
    for l, aff in enumerate(param.mu, 1):
        hps.append(_hp(aff, True, f"mu[{l}]>0"))
    alpha, beta = _affine_associated(sys, param)
    for i, aff in enumerate(alpha, 1):
        hps.append(_hp(aff, True, f"alpha[{i}]>0"))
    for l, aff in enumerate(beta, 1):
        hps.append(_hp(aff, True, f"beta[{l}]>0"))
    if sys.r >= 2:
        cs = [resolve_c(sys, l) for l in range(1, sys.s + 1)]
        if not all(c.exact for c in cs):
            raise SchemaError("equality threshold needs exact constants")
        thr = Affine((ZERO,) * (param.nvars + 1))
        for l in range(1, sys.s + 1):
            thr = thr + param.mu[l - 1].scale(sys.a(2, 1) * cs[l - 1].value)
        hps.append(_hp(param.lam[1] - thr, False, "equality-left"))
    if sys.s >= 2:
        d1 = resolve_d(sys, 1)
        if not d1.exact:
            raise SchemaError("equality threshold needs exact constants")
        thr = Affine((ZERO,) * (param.nvars + 1))
        for i in range(1, sys.r + 1):
            thr = thr + alpha[i - 1].scale(sys.b(sys.s, sys.s - 1) * d1.value * sys.a(i, 1))
        hps.append(_hp(param.mu[sys.s - 2] - thr, False, "equality-right"))
    if require_projectivity:
        hps.extend(_projectivity_halfplanes(sys, param, alpha))
    hps = [hp for hp in hps if not (hp.is_trivial() and hp.holds((ZERO, ZERO)))]
    bbox = list(param.domain)
    vertices = intersect_halfplanes(hps, bbox)
    witness = interior_witness(vertices, [hp for hp in hps if hp.strict])
    return Region2D(param, hps, vertices, witness)


def _projectivity_halfplanes(sys, param, alpha) -> list[HalfPlane]:
    shape = (sys.r, sys.s)
    if shape == (2, 1):
        c1 = resolve_c(sys, 1)
        if not c1.exact:
            raise SchemaError("boundary threshold needs exact constants")
        thr = param.mu[0].scale(c1.value * sys.a(2, 1))
        return [_hp(param.lam[1] - thr, False, "boundary-2-1")]
    if shape == (2, 2):
        c1, c2 = resolve_c(sys, 1), resolve_c(sys, 2)
        d1, d2 = resolve_d(sys, 1), resolve_d(sys, 2)
        if not all(v.exact for v in (c1, c2, d1, d2)):
            raise SchemaError("boundary threshold needs exact constants")
        thr_l = (param.mu[0].scale(c1.value)
                 + param.mu[1].scale(c2.value - sys.b(2, 1) * c1.value)).scale(sys.a(2, 1))
        thr_r = (param.lam[0].scale(d1.value - d2.value * sys.a(2, 1))
                 + param.lam[1].scale(d2.value)).scale(sys.b(2, 1))
        return [_hp(param.lam[1] - thr_l, False, "boundary-2-2-left"),
                _hp(param.mu[0] - thr_r, False, "boundary-2-2-right")]
    if shape == (3, 1):
        c1 = resolve_c(sys, 1)
        c3 = resolve_c(sys, 1, blocks=(3,))
        cp3 = _resolve_cprime_31(sys)
        if not (c1.exact and c3.exact and cp3.exact):
            raise SchemaError("boundary threshold needs exact constants")
        out = [_hp(param.lam[1] - param.mu[0].scale(sys.a(2, 1) * c1.value),
                   False, "boundary-3-1-mid"),
               _hp(param.lam[2] - param.mu[0].scale(sys.a(3, 1) * c1.value),
                   False, "boundary-3-1-top")]
        if c3.value == 0 and cp3.value == 0:
            return out  # every alternative degenerates to a trivial inequality
        out.append(_hp(param.lam[2] - param.mu[0].scale(sys.a(3, 2) * sys.a(2, 1)
                                                        * c3.value),
                       False, "boundary-3-1-alt-iii"))
        return out
    raise SchemaError("no boundary criterion for this shape")


# ----------------------------------------------------------------------
# the two-parameter gap-one family with two middle multiplicities
# ----------------------------------------------------------------------


def family22_spec(m1: int, n2: int) -> ProblemSpec:
    """m1 O(-2) + 2 O(-1) -> 2 O + n2 O(1) on three-space."""
    return ProblemSpec(3, ((-2, m1), (-1, 2)), ((0, 2), (1, n2)))


def param_22_weights(m, n) -> Param:
    """Raw weights (x, y) = (lambda_2, mu_1) as the two free parameters."""
    from .polarization import _aff

    box = ((ZERO, ZERO), (ONE, ZERO), (ONE, ONE), (ZERO, ONE))
    return Param(("lambda2", "mu1"),
                 (_aff(Fraction(1, m[0]), Fraction(-m[1], m[0]), 0),
                  _aff(0, 1, 0)),
                 (_aff(0, 0, 1),
                  _aff(Fraction(1, n[1]), 0, Fraction(-n[0], n[1]))),
                 box)


def family22_region(m1: int, n2: int) -> Region2D:
    sys = build_line_bundle_system(family22_spec(m1, n2))
    return admissible_region(sys, param_22_weights(sys.m, sys.n))


def family22_system4(m1: int, n2: int) -> list[tuple[int, int, int]]:
    """The three reduced non-strict inequalities in (lambda_2, mu_1), as
    primitive integer triples (a, b, c) meaning a*x + b*y >= c.

    The boundary inequality on lambda_2 is implied by the left equality
    threshold and is dropped.
    """
    region = family22_region(m1, n2)
    labeled = {hp.label: hp.primitive() for hp in region.halfplanes if not hp.strict}
    return [labeled[k] for k in ("equality-left", "equality-right", "boundary-2-2-right")]


def family22_system5(m1: int, n2: int) -> dict:
    """Eliminating lambda_2 at its infimum 4/(8+m1): a single closed bound
    A * mu_1 <= B (primitive integers) plus the strict window lower bound."""
    from math import gcd

    a, b, c = family22_system4(m1, n2)[0]
    lam_inf = Fraction(4, 8 + m1)
    # a*x + b*y >= c at x = lam_inf, cleared:  -b(8+m1) * y <= a*4 - c(8+m1)
    big_a, big_b = -b * (8 + m1), 4 * a - c * (8 + m1)
    g = gcd(abs(big_a), abs(big_b))
    if g:
        big_a, big_b = big_a // g, big_b // g
    return {"upper_coeff": big_a, "upper_rhs": big_b,
            "strict_lower": Fraction(16, 7 * (8 + m1)), "lambda_infimum": lam_inf}


def family22_system6(m1: int, n2: int) -> dict:
    """For n2 > 8: the window for mu_1 with both of its lower bounds."""
    if n2 <= 8:
        raise SchemaError("this reduction needs the last multiplicity above eight")
    upper = Fraction(7 * n2 - 4 * m1 - 32, (n2 - 8) * (m1 + 8))
    return {"upper": upper, "lower": Fraction(4, n2 + 8),
            "solvable": (7 * n2 - 4 * m1 - 32 > 0
                         and (7 * n2 - 4 * m1 - 32) * (n2 + 8) > 4 * (n2 - 8) * (m1 + 8)
                         and 7 * (7 * n2 - 4 * m1 - 32) > 16 * (n2 - 8))}


def family22_claim_case(m1: int, n2: int) -> str | None:
    """Which sufficient case of the existence claim applies, if any."""
    if m1 < 6 and n2 < 8:
        return "i"
    if m1 <= 6 and n2 == 8:
        return "i-prime"
    if 8 <= m1 + 3 <= n2 and 8 * m1 + 8 < 7 * n2:
        return "ii"
    return None
