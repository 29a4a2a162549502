"""Two-branch candidate configurations and their derived invariants.

A candidate is nothing but the normalized pair of branches; the degree,
the curve self-intersection gamma', the defect epsilon and the tail count
t are all computed from the pair data.  gamma' is produced twice, from
the multiplicity-sum equation and from the square-sum equation, and a
candidate whose two values disagree corresponds to no planar
configuration at all -- that is a reportable outcome, not an error.

``assemble_boundary`` builds the full boundary graph: both branches are
resolved against a common line at infinity, the curve vertex E is
attached to the two last exceptional curves, and the boundary is
minimalized; the named pieces Q0, Q1, Q1~, C, C~, G, G~ are read off the
result.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable

from .chains import Chain, discriminant, e_twig
from .resolution import BlowupSurface, HNBranch, resolve_onto
from .trees import (CURVE, CURVE_TILDE, ECURVE, LINE_INFTY, WeightedTree,
                    maximal_admissible_twigs, snc_minimalize, twig_chain)


class _Inconsistent:
    """Singleton marking a candidate whose two gamma' equations disagree."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INCONSISTENT"


INCONSISTENT = _Inconsistent()


class _NotApplicable:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NOT_APPLICABLE"


NOT_APPLICABLE = _NotApplicable()


@dataclass(frozen=True)
class EmbeddingCandidate:
    """Normalized branch pair: (j, pairs) of ``lam`` <= those of ``lam_tilde``."""

    lam: HNBranch
    lam_tilde: HNBranch

    def __post_init__(self) -> None:
        if self.lam.sort_key() > self.lam_tilde.sort_key():
            raise ValueError("candidate branches must be in normalized order")

    @classmethod
    def normalized(cls, a: HNBranch, b: HNBranch) -> "EmbeddingCandidate":
        if a.sort_key() <= b.sort_key():
            return cls(a, b)
        return cls(b, a)

    @property
    def j(self) -> int:
        return self.lam.j

    @property
    def j_tilde(self) -> int:
        return self.lam_tilde.j

    @property
    def type_at_infinity(self) -> tuple[int, int]:
        return (self.lam.j, self.lam_tilde.j)

    def sort_key(self):
        return (degree(self), self.lam.sort_key(), self.lam_tilde.sort_key())

    def to_json_dict(self) -> dict:
        return {
            "lambda": {"j": self.lam.j,
                       "pairs": [[p.c, p.p] for p in self.lam.pairs]},
            "lambda_tilde": {"j": self.lam_tilde.j,
                             "pairs": [[p.c, p.p] for p in self.lam_tilde.pairs]},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "EmbeddingCandidate":
        def branch(part) -> HNBranch:
            return HNBranch(int(part["j"]),
                            tuple((int(c), int(p)) for c, p in part["pairs"]))
        return cls(branch(data["lambda"]), branch(data["lambda_tilde"]))

    def __str__(self) -> str:
        return f"{self.lam.literal()} | {self.lam_tilde.literal()}"


def degree(candidate: EmbeddingCandidate) -> int:
    return candidate.lam.c1 + candidate.lam_tilde.c1


def gamma_prime(candidate: EmbeddingCandidate):
    """Common value of the two fundamental equations, or INCONSISTENT.

    The multiplicity-sum form gives
    ``gamma' = j*c1 + sum(p) + j~*c1~ + sum(p~) - 2d`` and the square-sum
    form gives ``gamma' = j*c1^2 + sum(c*p) + (tilde) - d^2``.
    """
    a, b = candidate.lam, candidate.lam_tilde
    d = a.c1 + b.c1
    by_sum = a.j * a.c1 + a.sum_p + b.j * b.c1 + b.sum_p - 2 * d
    by_square = a.j * a.c1 ** 2 + a.sum_cp + b.j * b.c1 ** 2 + b.sum_cp - d * d
    return by_sum if by_sum == by_square else INCONSISTENT


def epsilon(candidate: EmbeddingCandidate):
    """Defect from the component-count equation; INCONSISTENT propagates."""
    g = gamma_prime(candidate)
    if g is INCONSISTENT:
        return INCONSISTENT
    a, b = candidate.lam, candidate.lam_tilde
    return a.h + a.j + b.h + b.j - g - 2


def t_value(candidate: EmbeddingCandidate) -> int:
    return candidate.lam.t_flag + candidate.lam_tilde.t_flag


def e_contribution_formula(candidate: EmbeddingCandidate) -> Fraction:
    """Per-pair closed form for e of the boundary: sum of (c-p)/c."""
    total = Fraction(0)
    for branch in (candidate.lam, candidate.lam_tilde):
        for pair in branch.pairs:
            total += Fraction(pair.c - pair.p, pair.c)
    return total


# -- boundary assembly -----------------------------------------------------


@dataclass(frozen=True)
class BoundaryGraph:
    """Minimalized boundary with its named decomposition.

    ``psi_ok`` records that minimalization left C, C~ and E untouched and
    that E's weight still equals gamma'; ``g_distinct`` that C and C~ meet
    different components of Q0.  Both are verdicts for the filter pack,
    never exceptions.
    """

    tree: WeightedTree
    e_id: int | None
    c_id: int | None
    ct_id: int | None
    q1: tuple[int, ...]
    qt1: tuple[int, ...]
    q0: tuple[int, ...]
    g_id: int | None
    gt_id: int | None
    psi_ok: bool
    g_distinct: bool
    gamma_graph: int | None

    def q0_tree(self) -> WeightedTree:
        return self.tree.subgraph(self.q0)

    def q1_chain(self) -> Chain:
        return twig_chain(self.tree, self.q1)

    def qt1_chain(self) -> Chain:
        return twig_chain(self.tree, self.qt1)


def assemble_boundary(candidate: EmbeddingCandidate) -> BoundaryGraph:
    """Resolve both branches, attach E, minimalize, and decompose."""
    g = gamma_prime(candidate)
    if g is INCONSISTENT:
        raise ValueError("boundary assembly needs a consistent candidate")
    surface = BlowupSurface()
    line = surface.add_vertex(-1, LINE_INFTY)
    _, c_id, _ = resolve_onto(surface, line, candidate.lam)
    _, ct_id, _ = resolve_onto(surface, line, candidate.lam_tilde)
    surface.label[c_id] = CURVE
    surface.label[ct_id] = CURVE_TILDE
    e_id = surface.add_vertex(g, ECURVE)
    surface.add_edge(e_id, c_id)
    surface.add_edge(e_id, ct_id)
    full = surface.freeze()
    minimal = snc_minimalize(full, protected=(ECURVE,))

    ok = all(v in minimal for v in (c_id, ct_id, e_id))
    if ok:
        ok = (minimal.weight(c_id) == 1 and minimal.weight(ct_id) == 1
              and minimal.weight(e_id) == g)
    gamma_graph = minimal.weight(e_id) if e_id in minimal else None
    if not ok:
        return BoundaryGraph(tree=minimal, e_id=e_id if e_id in minimal else None,
                             c_id=c_id if c_id in minimal else None,
                             ct_id=ct_id if ct_id in minimal else None,
                             q1=(), qt1=(), q0=(), g_id=None, gt_id=None,
                             psi_ok=False, g_distinct=False, gamma_graph=gamma_graph)

    d_part = minimal.without((e_id,))
    q1 = _component_without(d_part, drop=c_id, avoiding=ct_id)
    qt1 = _component_without(d_part, drop=ct_id, avoiding=c_id)
    q0 = tuple(v for v in d_part.vertex_ids
               if v not in q1 and v not in qt1 and v not in (c_id, ct_id))
    g_id = next((v for v in minimal.neighbors(c_id) if v in q0), None)
    gt_id = next((v for v in minimal.neighbors(ct_id) if v in q0), None)
    q1 = _tip_first(minimal, q1, attach=c_id)
    qt1 = _tip_first(minimal, qt1, attach=ct_id)
    return BoundaryGraph(tree=minimal, e_id=e_id, c_id=c_id, ct_id=ct_id,
                         q1=q1, qt1=qt1, q0=q0, g_id=g_id, gt_id=gt_id,
                         psi_ok=True,
                         g_distinct=g_id is not None and g_id != gt_id,
                         gamma_graph=gamma_graph)


def _component_without(d_part: WeightedTree, drop: int, avoiding: int) -> tuple[int, ...]:
    """Component of the D-part minus ``drop`` that does not contain ``avoiding``."""
    rest = d_part.without((drop,))
    for comp in rest.components():
        if avoiding not in comp:
            return comp
    return ()


def _tip_first(tree: WeightedTree, ids: Iterable[int], attach: int) -> tuple[int, ...]:
    """Order a hanging chain from its free tip toward the attachment curve."""
    ids = list(ids)
    if not ids:
        return ()
    inner = [v for v in ids if attach in tree.neighbors(v)]
    order = [inner[0]]
    while True:
        nxt = [n for n in tree.neighbors(order[-1])
               if n in ids and n != (order[-2] if len(order) > 1 else attach)]
        if not nxt:
            break
        order.append(nxt[0])
    return tuple(reversed(order))


def boundary_e_value(graph: BoundaryGraph) -> Fraction:
    """e of the boundary: sum of e over its maximal admissible twigs."""
    total = Fraction(0)
    for twig in maximal_admissible_twigs(graph.tree):
        total += e_twig(twig_chain(graph.tree, twig))
    return total


# -- type (0, j~) reduction bookkeeping ------------------------------------


@dataclass(frozen=True)
class Type0Reduction:
    new_type: tuple[int, int]
    new_degree: int
    drops: bool


def reduce_type0(candidate: EmbeddingCandidate):
    """Coordinate-change bookkeeping for low-jump types (0, j~ <= 2).

    With ``k = c1 / gcd(c1, p1)`` and ``r`` leading (c2, c2) pairs after
    the first, the change produces type ``(0, r - k + 1)`` and degree
    ``k*c1~ + c2``; the degree strictly drops exactly when ``c1~ < c2``.
    Returns NOT_APPLICABLE when the candidate is not of that shape or
    ``r < k - 1``.
    """
    lam, lt = candidate.lam, candidate.lam_tilde
    if lam.j != 0 or lt.j > 2:
        return NOT_APPLICABLE
    c1, p1 = lam.c1, lam.p1
    c2 = gcd(c1, p1)
    if c2 < 2:
        return NOT_APPLICABLE
    k = c1 // c2
    r = 0
    for pair in lam.pairs[1:]:
        if pair.c == c2 and pair.p == c2:
            r += 1
        else:
            break
    if r < k - 1:
        return NOT_APPLICABLE
    ct1 = lt.c1
    return Type0Reduction(new_type=(0, r - k + 1), new_degree=k * ct1 + c2,
                          drops=ct1 < c2)
