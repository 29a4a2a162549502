"""The named constraint filters and their staged evaluation.

Every filter carries a citation string: a self-contained statement of the
inequality or structural fact it enforces.  Verdicts are pass, fail or
inapplicable; a filter whose hypotheses do not hold reports inapplicable
and can never eliminate.  Elimination is the first failure in the fixed
order below, and the stages are cumulative: arithmetic, then boundary
graph shape, then the orbifold-count stage, then case-specific extras
(the generic pack adds nothing at the last stage).

The orbifold-count filter replaces the reciprocal local group order of
the middle part Q0 by the reciprocal of its discriminant, an upper bound;
the filter therefore only ever under-eliminates and stays sound.  Every
report states this through the witness values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .chains import d_double_prime, d_prime, discriminant
from .embedding import (INCONSISTENT, BoundaryGraph, EmbeddingCandidate,
                        assemble_boundary, boundary_e_value, epsilon,
                        gamma_prime, t_value)
from .trees import (WeightedTree, classify_component, gamma_order_lower,
                    maximal_admissible_twigs, twig_chain)

PASS = "pass"
FAIL = "fail"
INAPPLICABLE = "inapplicable"

STAGE_ARITHMETIC = "arithmetic"
STAGE_GRAPH = "graph"
STAGE_BMY = "bmy"
STAGE_CASE = "case"
STAGES = (STAGE_ARITHMETIC, STAGE_GRAPH, STAGE_BMY, STAGE_CASE)

F_CONSISTENCY = "F_CONSISTENCY"
F_EPS = "F_EPS"
F_GAMMA_LO = "F_GAMMA_LO"
F_GAMMA8 = "F_GAMMA8"
F_BASIC = "F_BASIC"
F_GAMMA5 = "F_GAMMA5"
F_J1 = "F_J1"
F_JT6 = "F_JT6"
F_NOASY_GEN = "F_NOASY_GEN"
F_NOASY_03 = "F_NOASY_03"
F_NOASY_11 = "F_NOASY_11"
F_PSI_SHAPE = "F_PSI_SHAPE"
F_Q0_MINIMAL = "F_Q0_MINIMAL"
F_EBOUND = "F_EBOUND"
F_BMY = "F_BMY"
F_DELTA_EPS = "F_DELTA_EPS"

CITATIONS = {
    F_CONSISTENCY: "multiplicity-sum and square-sum equations must give the same gamma'",
    F_EPS: "epsilon >= 0",
    F_GAMMA_LO: "gamma >= 2",
    F_GAMMA8: "gamma <= 8",
    F_BASIC: "2*epsilon + gamma <= 7 + t",
    F_GAMMA5: "gamma <= 5",
    F_J1: "j <= 1",
    F_JT6: "jt <= 6",
    F_NOASY_GEN: "line tangent to a jumping branch meets the curve twice: "
                 "c1 - pt1 >= 2 when jt >= 1, c1 - ct1 >= 2 when jt > 1, symmetrically in j",
    F_NOASY_03: "conic following the jumping branch meets the curve twice: "
                "2*c1 - ct1 >= p1 + pt1 when jt = 3, 2*(c1 - ct1) >= p1 when jt > 3",
    F_NOASY_11: "ct1 - p1 >= 2 and c1 - pt1 >= 2 for type (1,1)",
    F_PSI_SHAPE: "minimalization leaves C, C~, E untouched, keeps E's weight at gamma', "
                 "and C, C~ meet different middle components",
    F_Q0_MINIMAL: "Q0 carries only curves of negative self-intersection and "
                  "no non-branching (-1)-curve",
    F_EBOUND: "e(D+E) <= 1 + epsilon",
    F_BMY: "orbifold count 1/ch + 1/cth + 1/gamma + 1/|Gamma(Q0)| >= 1, "
           "with 1/|Gamma(Q0)| bounded above by 1/d(Q0)",
    F_DELTA_EPS: "twig count bound s - 3 - epsilon <= -(d'(Q1) + d''(Q1) - 7)/ch "
                 "on both one-sided surgeries",
}

FILTER_STAGE = {
    F_CONSISTENCY: STAGE_ARITHMETIC, F_EPS: STAGE_ARITHMETIC,
    F_GAMMA_LO: STAGE_ARITHMETIC, F_GAMMA8: STAGE_ARITHMETIC,
    F_BASIC: STAGE_ARITHMETIC, F_GAMMA5: STAGE_ARITHMETIC,
    F_J1: STAGE_ARITHMETIC, F_JT6: STAGE_ARITHMETIC,
    F_NOASY_GEN: STAGE_ARITHMETIC, F_NOASY_03: STAGE_ARITHMETIC,
    F_NOASY_11: STAGE_ARITHMETIC,
    F_PSI_SHAPE: STAGE_GRAPH, F_Q0_MINIMAL: STAGE_GRAPH, F_EBOUND: STAGE_GRAPH,
    F_BMY: STAGE_BMY, F_DELTA_EPS: STAGE_BMY,
}

FILTER_ORDER = (F_CONSISTENCY, F_EPS, F_GAMMA_LO, F_GAMMA8, F_BASIC, F_GAMMA5,
                F_J1, F_JT6, F_NOASY_GEN, F_NOASY_03, F_NOASY_11,
                F_PSI_SHAPE, F_Q0_MINIMAL, F_EBOUND, F_BMY, F_DELTA_EPS)


@dataclass(frozen=True)
class Verdict:
    name: str
    status: str
    citation: str
    witness: tuple[tuple[str, str], ...] = ()

    def to_json_dict(self) -> dict:
        return {"filter": self.name, "status": self.status,
                "citation": self.citation, "witness": dict(self.witness)}


@dataclass(frozen=True)
class ConstraintReport:
    verdicts: tuple[Verdict, ...]
    eliminated_by: str | None

    @property
    def passed(self) -> bool:
        return self.eliminated_by is None

    def to_json_dict(self) -> dict:
        return {"eliminated_by": self.eliminated_by,
                "verdicts": [v.to_json_dict() for v in self.verdicts]}


def _wit(**kwargs) -> tuple[tuple[str, str], ...]:
    return tuple((k, str(v)) for k, v in kwargs.items())


def arithmetic_scan(jA: int, c1: int, p1: int, hA: int, spA: int, scpA: int, tA: int,
                    jB: int, ct1: int, pt1: int, hB: int, spB: int, scpB: int, tB: int):
    """First failing arithmetic filter for raw branch data, or None.

    The A side is the branch with the smaller jump count.  Returns
    ``(eliminated_by, gamma, eps, t)``; gamma and eps are None when the
    two defining equations disagree.  This is the hot path of the search
    and must stay in exact int arithmetic.
    """
    d = c1 + ct1
    t = tA + tB
    g = jA * c1 + spA + jB * ct1 + spB - 2 * d
    if g != jA * c1 * c1 + scpA + jB * ct1 * ct1 + scpB - d * d:
        return F_CONSISTENCY, None, None, t
    eps = hA + jA + hB + jB - g - 2
    if eps < 0:
        return F_EPS, g, eps, t
    if g < 2:
        return F_GAMMA_LO, g, eps, t
    if g > 8:
        return F_GAMMA8, g, eps, t
    if 2 * eps + g > 7 + t:
        return F_BASIC, g, eps, t
    if g > 5:
        return F_GAMMA5, g, eps, t
    if jA > 1:
        return F_J1, g, eps, t
    if jB > 6:
        return F_JT6, g, eps, t
    if (jB >= 1 and c1 - pt1 < 2) or (jB > 1 and c1 - ct1 < 2) \
            or (jA >= 1 and ct1 - p1 < 2):
        return F_NOASY_GEN, g, eps, t
    if jA == 0 and jB >= 3:
        if jB == 3 and 2 * c1 - ct1 - p1 - pt1 < 0:
            return F_NOASY_03, g, eps, t
        if jB > 3 and 2 * (c1 - ct1) - p1 < 0:
            return F_NOASY_03, g, eps, t
    if jA == 1 and jB == 1 and (ct1 - p1 < 2 or c1 - pt1 < 2):
        return F_NOASY_11, g, eps, t
    return None, g, eps, t


def _arithmetic_verdicts(candidate: EmbeddingCandidate):
    """Full verdict list for the arithmetic stage, stopping at a failure."""
    a, b = candidate.lam, candidate.lam_tilde
    g = gamma_prime(candidate)
    t = t_value(candidate)
    out = []

    def emit(name, ok, applicable=True, **witness):
        status = PASS if ok else FAIL
        if not applicable:
            status = INAPPLICABLE
        out.append(Verdict(name, status, CITATIONS[name], _wit(**witness)))
        return status == FAIL

    if emit(F_CONSISTENCY, g is not INCONSISTENT, gamma=g):
        return out, g, None, t
    eps = epsilon(candidate)
    checks = [
        (F_EPS, eps >= 0, True, dict(epsilon=eps)),
        (F_GAMMA_LO, g >= 2, True, dict(gamma=g)),
        (F_GAMMA8, g <= 8, True, dict(gamma=g)),
        (F_BASIC, 2 * eps + g <= 7 + t, True, dict(gamma=g, epsilon=eps, t=t)),
        (F_GAMMA5, g <= 5, True, dict(gamma=g)),
        (F_J1, a.j <= 1, True, dict(j=a.j)),
        (F_JT6, b.j <= 6, True, dict(jt=b.j)),
    ]
    for name, ok, applicable, witness in checks:
        if emit(name, ok, applicable, **witness):
            return out, g, eps, t

    gen_applicable = b.j >= 1 or a.j >= 1
    gen_ok = not ((b.j >= 1 and a.c1 - b.p1 < 2) or (b.j > 1 and a.c1 - b.c1 < 2)
                  or (a.j >= 1 and b.c1 - a.p1 < 2))
    if emit(F_NOASY_GEN, gen_ok, gen_applicable,
            c1=a.c1, p1=a.p1, ct1=b.c1, pt1=b.p1, j=a.j, jt=b.j):
        return out, g, eps, t

    a03 = a.j == 0 and b.j >= 3
    ok03 = True
    if a03:
        ok03 = (2 * a.c1 - b.c1 - a.p1 - b.p1 >= 0 if b.j == 3
                else 2 * (a.c1 - b.c1) - a.p1 >= 0)
    if emit(F_NOASY_03, ok03, a03, c1=a.c1, p1=a.p1, ct1=b.c1, pt1=b.p1, jt=b.j):
        return out, g, eps, t

    a11 = a.j == 1 and b.j == 1
    ok11 = not a11 or (b.c1 - a.p1 >= 2 and a.c1 - b.p1 >= 2)
    if emit(F_NOASY_11, ok11, a11, c1=a.c1, p1=a.p1, ct1=b.c1, pt1=b.p1):
        return out, g, eps, t
    return out, g, eps, t


def _graph_verdicts(candidate: EmbeddingCandidate, g: int, eps: int, t: int,
                    stage: str):
    out = []
    boundary = assemble_boundary(candidate)

    shape_ok = boundary.psi_ok and boundary.g_distinct and boundary.gamma_graph == g
    out.append(Verdict(F_PSI_SHAPE, PASS if shape_ok else FAIL, CITATIONS[F_PSI_SHAPE],
                       _wit(psi_untouched=boundary.psi_ok,
                            g_distinct=boundary.g_distinct,
                            e_weight=boundary.gamma_graph, gamma=g)))
    if not shape_ok:
        return out, boundary

    tree = boundary.tree
    bad_q0 = [v for v in boundary.q0
              if tree.weight(v) <= 0 or (tree.weight(v) == 1 and tree.degree(v) <= 2)]
    out.append(Verdict(F_Q0_MINIMAL, FAIL if bad_q0 else PASS, CITATIONS[F_Q0_MINIMAL],
                       _wit(offending=bad_q0)))
    if bad_q0:
        return out, boundary

    e_val = boundary_e_value(boundary)
    ok_e = e_val <= 1 + eps
    out.append(Verdict(F_EBOUND, PASS if ok_e else FAIL, CITATIONS[F_EBOUND],
                       _wit(e=e_val, bound=1 + eps)))
    if not ok_e:
        return out, boundary

    if STAGES.index(stage) < STAGES.index(STAGE_BMY):
        return out, boundary

    out.extend(_bmy_verdicts(candidate, boundary, g, eps, t))
    return out, boundary


def _bmy_verdicts(candidate: EmbeddingCandidate, boundary: BoundaryGraph,
                  g: int, eps: int, t: int):
    out = []
    q0_tree = boundary.q0_tree()
    ch = candidate.lam.last.c
    cth = candidate.lam_tilde.last.c

    q0_class = classify_component(q0_tree)
    ruled_shape = _branched_with_two_twig(q0_tree, g)
    # The curve complement has nonnegative Kodaira dimension when
    # gamma + t >= 6 or epsilon <= t, and also whenever Q0 is neither of
    # quotient type nor of the special ruled shape.
    guard = (g + t >= 6) or (eps <= t) or not (q0_class.is_quotient or ruled_shape)
    if not guard:
        out.append(Verdict(F_BMY, INAPPLICABLE, CITATIONS[F_BMY],
                           _wit(gamma=g, t=t, epsilon=eps, q0=q0_class.tag)))
    else:
        order = gamma_order_lower(q0_tree)
        lhs = (Fraction(1, ch) + Fraction(1, cth) + Fraction(1, g)
               + order.reciprocal_upper)
        ok = lhs >= 1
        out.append(Verdict(F_BMY, PASS if ok else FAIL, CITATIONS[F_BMY],
                           _wit(lhs=lhs, ch=ch, cth=cth, gamma=g,
                                d_q0=order.value if order.value is not None else "infinite")))
        if not ok:
            return out

    applicable = eps <= 1 or g >= 5
    if not applicable:
        out.append(Verdict(F_DELTA_EPS, INAPPLICABLE, CITATIONS[F_DELTA_EPS],
                           _wit(epsilon=eps, gamma=g)))
        return out
    for side, (drop_id, twig_ids, c_last) in {
        "C": (boundary.c_id, boundary.q1, ch),
        "Ct": (boundary.ct_id, boundary.qt1, cth),
    }.items():
        chain = twig_chain(boundary.tree, twig_ids)
        rest = boundary.tree.without((drop_id,) + tuple(twig_ids))
        s = len(maximal_admissible_twigs(rest))
        dp, dpp = d_prime(chain), d_double_prime(chain)
        ok = Fraction(s - 3 - eps) <= Fraction(7 - dp - dpp, c_last)
        out.append(Verdict(F_DELTA_EPS, PASS if ok else FAIL, CITATIONS[F_DELTA_EPS],
                           _wit(side=side, s=s, d_prime=dp, d_double_prime=dpp,
                                ch=c_last, epsilon=eps)))
        if not ok:
            return out
    return out


def _branched_with_two_twig(q0_tree: WeightedTree, gamma: int) -> bool:
    """Q0 is branched and has a maximal twig made of gamma-1 (-2)-curves."""
    if all(q0_tree.degree(v) <= 2 for v in q0_tree.vertex_ids):
        return False
    target = (2,) * (gamma - 1)
    return any(twig_chain(q0_tree, t).weights == target
               for t in maximal_admissible_twigs(q0_tree))


def apply_filters(candidate: EmbeddingCandidate,
                  stage: str = STAGE_CASE) -> ConstraintReport:
    """Run the filter pack through the requested stage, cumulatively.

    The report holds the ordered verdicts up to and including the first
    failure; filters with unmet hypotheses appear as inapplicable and
    never eliminate.
    """
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}")
    verdicts, g, eps, t = _arithmetic_verdicts(candidate)
    eliminated = next((v.name for v in verdicts if v.status == FAIL), None)
    if eliminated is None and STAGES.index(stage) >= STAGES.index(STAGE_GRAPH):
        more, _ = _graph_verdicts(candidate, g, eps, t, stage)
        verdicts = list(verdicts) + more
        eliminated = next((v.name for v in verdicts if v.status == FAIL), None)
    return ConstraintReport(verdicts=tuple(verdicts), eliminated_by=eliminated)
