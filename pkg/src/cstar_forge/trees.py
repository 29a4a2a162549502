"""Weighted trees of boundary curves and their exact lattice invariants.

A vertex weight is the negated self-intersection of the curve it stands
for.  The full boundary of a two-branch configuration carries exactly one
cycle, threaded through the vertex labelled ``E``; every edge incident to
``E`` counts as a cycle-closing attachment, and all chain/twig machinery
runs on the tree left after deleting ``E``.

Operations return new trees; instances are never mutated after
construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .chains import Chain, discriminant, e_twig, is_admissible

# Role labels.  At most one vertex may carry each of C, Ctilde, E.
LINE_INFTY = "Linfty"
CURVE = "C"
CURVE_TILDE = "Ctilde"
ECURVE = "E"
GCOMP = "G"
GCOMP_TILDE = "Gtilde"
PLAIN = "plain"

_LABELS = {LINE_INFTY, CURVE, CURVE_TILDE, ECURVE, GCOMP, GCOMP_TILDE, PLAIN}
_UNIQUE_LABELS = (CURVE, CURVE_TILDE, ECURVE)

ALLOWED_FORK_TRIPLES = ((2, 3, 3), (2, 3, 4), (2, 3, 5))


class NotContractibleError(ValueError):
    """Bark system is singular: the component is not negative definite."""


class WeightedTree:
    """Immutable vertex-weighted graph with cycle rank at most one."""

    __slots__ = ("_weight", "_label", "_adj")

    def __init__(self, vertices: Iterable[tuple[int, int, str]],
                 edges: Iterable[tuple[int, int]]):
        weight: dict[int, int] = {}
        label: dict[int, str] = {}
        adj: dict[int, frozenset[int]] = {}
        tmp: dict[int, set[int]] = {}
        for vid, w, lab in vertices:
            vid = int(vid)
            if vid in weight:
                raise ValueError(f"duplicate vertex id {vid}")
            if lab not in _LABELS:
                raise ValueError(f"unknown label {lab!r}")
            weight[vid] = int(w)
            label[vid] = lab
            tmp[vid] = set()
        n_edges = 0
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self-loop at {a}")
            if a not in weight or b not in weight:
                raise ValueError(f"edge {a}-{b} touches a missing vertex")
            if b in tmp[a]:
                continue
            tmp[a].add(b)
            tmp[b].add(a)
            n_edges += 1
        for lab in _UNIQUE_LABELS:
            if sum(1 for v in weight if label[v] == lab) > 1:
                raise ValueError(f"label {lab} may occur at most once")
        # Cycle rank = edges - vertices + components; only the cycle through
        # E is allowed, so the graph minus E must be a forest.
        for vid in tmp:
            adj[vid] = frozenset(tmp[vid])
        self._weight = weight
        self._label = label
        self._adj = adj
        if n_edges - len(weight) + len(self.components()) > 1:
            raise ValueError("more than one independent cycle")
        e_ids = [v for v in weight if label[v] == ECURVE]
        if e_ids:
            rest = [v for v in weight if v not in e_ids]
            sub_edges = sum(1 for a, b in self.edges() if a in rest and b in rest
                            and a < b) if rest else 0
            comps = len(_components_of(set(rest), self._adj))
            if rest and sub_edges - len(rest) + comps > 0:
                raise ValueError("cycle not threaded through E")

    # -- inspection ----------------------------------------------------

    @property
    def vertex_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._weight))

    def __len__(self) -> int:
        return len(self._weight)

    def __contains__(self, vid: int) -> bool:
        return vid in self._weight

    def weight(self, vid: int) -> int:
        return self._weight[vid]

    def label(self, vid: int) -> str:
        return self._label[vid]

    def neighbors(self, vid: int) -> tuple[int, ...]:
        return tuple(sorted(self._adj[vid]))

    def degree(self, vid: int) -> int:
        return len(self._adj[vid])

    def edges(self) -> tuple[tuple[int, int], ...]:
        out = []
        for a in sorted(self._adj):
            for b in self._adj[a]:
                if a < b:
                    out.append((a, b))
        return tuple(out)

    def vertices_with_label(self, lab: str) -> tuple[int, ...]:
        return tuple(v for v in self.vertex_ids if self._label[v] == lab)

    def single_vertex_with_label(self, lab: str) -> int | None:
        found = self.vertices_with_label(lab)
        return found[0] if found else None

    def components(self) -> tuple[tuple[int, ...], ...]:
        comps = _components_of(set(self._weight), self._adj)
        return tuple(tuple(sorted(c)) for c in sorted(comps, key=min))

    def subgraph(self, ids: Iterable[int]) -> "WeightedTree":
        keep = set(ids)
        verts = [(v, self._weight[v], self._label[v]) for v in sorted(keep)]
        edges = [(a, b) for a, b in self.edges() if a in keep and b in keep]
        return WeightedTree(verts, edges)

    def without(self, ids: Iterable[int]) -> "WeightedTree":
        drop = set(ids)
        return self.subgraph(v for v in self._weight if v not in drop)

    def is_chain(self) -> bool:
        if not self._weight:
            return False
        if len(self.components()) != 1:
            return False
        return all(len(self._adj[v]) <= 2 for v in self._weight)

    def as_chain(self) -> Chain:
        """Weight list of a chain-shaped graph, read from the lower-id tip."""
        if not self.is_chain():
            raise ValueError("graph is not a chain")
        if len(self._weight) == 1:
            return Chain((next(iter(self._weight.values())),))
        tips = sorted(v for v in self._weight if len(self._adj[v]) == 1)
        order = _walk_chain(self._adj, tips[0])
        return Chain(tuple(self._weight[v] for v in order))

    # -- serialization -------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{v} {self._weight[v]} {self._label[v]}" for v in self.vertex_ids]
        lines += [f"{a}-{b}" for a, b in self.edges()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "WeightedTree":
        verts: list[tuple[int, int, str]] = []
        edges: list[tuple[int, int]] = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "-" in line and " " not in line:
                a, b = line.split("-")
                edges.append((int(a), int(b)))
            else:
                parts = line.split()
                if len(parts) != 3:
                    raise ValueError(f"vertex line needs 'id weight label': {raw!r}")
                verts.append((int(parts[0]), int(parts[1]), parts[2]))
        return cls(verts, edges)

    def to_dot(self, name: str = "boundary") -> str:
        lines = [f"graph {name} {{"]
        for v in self.vertex_ids:
            lab = self._label[v]
            tag = f"{lab} " if lab != PLAIN else ""
            lines.append(f'  n{v} [label="{tag}{-self._weight[v]}"];')
        for a, b in self.edges():
            lines.append(f"  n{a} -- n{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedTree):
            return NotImplemented
        return (self._weight == other._weight and self._label == other._label
                and self._adj == other._adj)

    def __repr__(self) -> str:
        return f"WeightedTree({len(self._weight)} vertices, {len(self.edges())} edges)"


def _components_of(ids: set[int], adj: Mapping[int, frozenset[int]]) -> list[set[int]]:
    comps = []
    left = set(ids)
    while left:
        seed = left.pop()
        comp = {seed}
        stack = [seed]
        while stack:
            for nb in adj[stack.pop()]:
                if nb in left:
                    left.discard(nb)
                    comp.add(nb)
                    stack.append(nb)
        comps.append(comp)
    return comps


def _walk_chain(adj: Mapping[int, frozenset[int]], tip: int) -> list[int]:
    order = [tip]
    prev, cur = None, tip
    while True:
        nxt = [n for n in adj[cur] if n != prev]
        if not nxt:
            return order
        prev, cur = cur, nxt[0]
        order.append(cur)


# -- integer lattice tests ---------------------------------------------


def minor_matrix(tree: WeightedTree, order: Sequence[int] | None = None) -> list[list[int]]:
    """Negated intersection matrix: weights on the diagonal, -1 per edge."""
    ids = list(order) if order is not None else list(tree.vertex_ids)
    index = {v: i for i, v in enumerate(ids)}
    n = len(ids)
    m = [[0] * n for _ in range(n)]
    for i, v in enumerate(ids):
        m[i][i] = tree.weight(v)
        for nb in tree.neighbors(v):
            if nb in index:
                m[i][index[nb]] = -1
    return m


def det_int(matrix: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(matrix)
    if n == 0:
        return 1
    m = [list(row) for row in matrix]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def tree_discriminant(tree: WeightedTree) -> int:
    return det_int(minor_matrix(tree))


def is_negative_definite(tree: WeightedTree) -> bool:
    """All leading principal minors of the negated matrix are positive."""
    m = minor_matrix(tree)
    for k in range(1, len(m) + 1):
        if det_int([row[:k] for row in m[:k]]) <= 0:
            return False
    return True


# -- twigs and delta -----------------------------------------------------


def maximal_admissible_twigs(tree: WeightedTree) -> tuple[tuple[int, ...], ...]:
    """Tip-first vertex tuples of the maximal admissible twigs.

    A twig grows from a tip through degree-2 vertices of weight >= 2 and
    stops at a branching vertex or at the first weight <= 1.  On a pure
    chain the two end twigs are capped at half the length so they stay
    disjoint and leave the middle unclaimed.
    """
    if len(tree) <= 1:
        return ()
    branching = {v for v in tree.vertex_ids if tree.degree(v) >= 3}
    tips = [v for v in tree.vertex_ids if tree.degree(v) == 1]
    cap = None
    if not branching:
        if not tree.is_chain():
            return ()
        cap = (len(tree) - 1) // 2
    twigs = []
    for tip in tips:
        walk: list[int] = []
        prev, cur = None, tip
        while (cur is not None and cur not in branching and tree.weight(cur) >= 2
               and (cap is None or len(walk) < cap)):
            walk.append(cur)
            nxt = [n for n in tree.neighbors(cur) if n != prev]
            prev, cur = cur, (nxt[0] if nxt else None)
        if walk:
            twigs.append(tuple(walk))
    return tuple(twigs)


def twig_chain(tree: WeightedTree, twig: Sequence[int]) -> Chain:
    return Chain(tuple(tree.weight(v) for v in twig))


def delta(tree: WeightedTree) -> tuple[Fraction, int]:
    """Sum of reciprocal twig discriminants and the number of twigs."""
    twigs = maximal_admissible_twigs(tree)
    total = sum((Fraction(1, discriminant(twig_chain(tree, t))) for t in twigs),
                Fraction(0))
    return total, len(twigs)


# -- classification ------------------------------------------------------


@dataclass(frozen=True)
class ComponentClass:
    """Contraction type of a connected negative-definite configuration."""

    tag: str  # "not_negative_definite" | "cyclic" | "fork" | "not_quotient"
    order: int | None = None
    fork_type: tuple[int, int, int, int] | None = None  # (b, d1, d2, d3)
    note: str | None = None

    @property
    def is_quotient(self) -> bool:
        return self.tag in ("cyclic", "fork")


NOT_NEGATIVE_DEFINITE = "not_negative_definite"
CYCLIC = "cyclic"
FORK = "fork"
NOT_QUOTIENT = "not_quotient"


def classify_component(tree: WeightedTree) -> ComponentClass:
    """Quotient-type test for one connected component.

    Admissible chains contract to cyclic points; forks qualify only when
    the central weight is >= 2, the three twigs are admissible chains and
    their discriminants form (2,2,n) or (2,3,3), (2,3,4), (2,3,5).
    """
    if len(tree.components()) != 1:
        raise ValueError("classify_component wants a connected graph")
    if not is_negative_definite(tree):
        return ComponentClass(NOT_NEGATIVE_DEFINITE)
    if tree.is_chain():
        chain = tree.as_chain()
        if chain.weights == (1,):
            return ComponentClass(CYCLIC, order=1, note="lone (-1)-curve, trivial group")
        if chain.is_admissible:
            return ComponentClass(CYCLIC, order=discriminant(chain))
        return ComponentClass(NOT_QUOTIENT)
    branch = [v for v in tree.vertex_ids if tree.degree(v) >= 3]
    if len(branch) == 1 and tree.degree(branch[0]) == 3 and tree.weight(branch[0]) >= 2:
        twig_comps = tree.without(branch).components()
        chains = []
        for comp in twig_comps:
            sub = tree.subgraph(comp)
            if not sub.is_chain():
                return ComponentClass(NOT_QUOTIENT)
            attach = [v for v in comp if branch[0] in tree.neighbors(v)]
            if len(attach) != 1:
                return ComponentClass(NOT_QUOTIENT)
            chains.append(sub.as_chain())
        if all(c.is_admissible for c in chains):
            ds = tuple(sorted(discriminant(c) for c in chains))
            ok = ds in ALLOWED_FORK_TRIPLES or (ds[0] == 2 and ds[1] == 2 and ds[2] >= 2)
            if ok:
                return ComponentClass(FORK, order=tree_discriminant(tree),
                                      fork_type=(tree.weight(branch[0]),) + ds)
    return ComponentClass(NOT_QUOTIENT)


@dataclass(frozen=True)
class GammaOrder:
    """Lower bound for the local fundamental group order of a contraction."""

    value: int | None  # None encodes infinity
    exact: bool

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    @property
    def reciprocal_upper(self) -> Fraction:
        """Upper bound for 1/|group|; zero when the order is infinite."""
        return Fraction(0) if self.value is None else Fraction(1, self.value)


def gamma_order_lower(tree: WeightedTree) -> GammaOrder:
    """Discriminant bound for the group order; infinity without definiteness.

    The bound is exact on cyclic components, where the group is abelian of
    order d; on forks d only divides the order.
    """
    if not is_negative_definite(tree):
        return GammaOrder(None, exact=True)
    cls = classify_component(tree)
    return GammaOrder(tree_discriminant(tree), exact=cls.tag == CYCLIC)


# -- barks ---------------------------------------------------------------

TWIG_SET = "twig_set"
QUOTIENT = "quotient"


@dataclass(frozen=True)
class BarkResult:
    coefficients: tuple[tuple[int, Fraction], ...]  # sorted by vertex id
    square: Fraction
    proper: bool  # every coefficient lies in [0, 1)

    def coefficient(self, vid: int) -> Fraction:
        for v, c in self.coefficients:
            if v == vid:
                return c
        return Fraction(0)


def _solve_linear(matrix: Sequence[Sequence[int]], rhs: Sequence[int]) -> list[Fraction]:
    n = len(matrix)
    m = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise NotContractibleError("bark system is singular")
        m[col], m[pivot] = m[pivot], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def bark_solve(tree: WeightedTree, mode: str) -> BarkResult:
    """Solve the bark's defining equations exactly over the rationals.

    ``quotient`` mode supports the whole (negative definite) component:
    the rational divisor Bk with (K + D - Bk) orthogonal to every
    component.  ``twig_set`` mode supports only the maximal admissible
    twigs, where Bk meets a tip in -1 and other twig components in 0.
    """
    if mode == QUOTIENT:
        if len(tree.components()) != 1:
            raise ValueError("quotient bark wants a connected component")
        if not is_negative_definite(tree):
            raise NotContractibleError("component is not negative definite")
        ids = list(tree.vertex_ids)
        m = minor_matrix(tree, ids)
        rhs = [2 - tree.degree(v) for v in ids]
        sol = _solve_linear(m, rhs)
        square = sum((c * (tree.degree(v) - 2) for v, c in zip(ids, sol)), Fraction(0))
        coeffs = tuple(zip(ids, sol))
    elif mode == TWIG_SET:
        coeff_list: list[tuple[int, Fraction]] = []
        square = Fraction(0)
        for twig in maximal_admissible_twigs(tree):
            ids = list(twig)
            m = minor_matrix(tree.subgraph(ids), ids)
            rhs = [1 if i == 0 else 0 for i in range(len(ids))]
            sol = _solve_linear(m, rhs)
            square += -sol[0]  # tip coefficient carries the whole square
            coeff_list.extend(zip(ids, sol))
        coeffs = tuple(sorted(coeff_list))
    else:
        raise ValueError(f"unknown bark mode {mode!r}")
    proper = all(0 <= c < 1 for _, c in coeffs)
    return BarkResult(coefficients=tuple(sorted(coeffs)), square=square, proper=proper)


# -- blowdown minimalization ---------------------------------------------


def snc_minimalize(tree: WeightedTree,
                   protected: Iterable[str] = (ECURVE,)) -> WeightedTree:
    """Contract non-branching (-1)-vertices outside the protected labels.

    A contraction removes the vertex, lifts each neighbor's
    self-intersection by one, and joins the two neighbors; it is refused
    when the neighbors already meet, since the image would stop being
    simple normal crossing.  Vertices labelled ``E`` are never touched.
    Candidates are tried with the line at infinity first, then by
    ascending id, and the loop stops when no legal contraction remains.
    """
    protected_set = set(protected) | {ECURVE}
    weight = {v: tree.weight(v) for v in tree.vertex_ids}
    label = {v: tree.label(v) for v in tree.vertex_ids}
    adj = {v: set(tree.neighbors(v)) for v in tree.vertex_ids}

    def eligible() -> list[int]:
        found = [v for v in sorted(weight)
                 if weight[v] == 1 and label[v] not in protected_set
                 and len(adj[v]) <= 2]
        found.sort(key=lambda v: (label[v] != LINE_INFTY, v))
        return found

    changed = True
    while changed:
        changed = False
        for v in eligible():
            nbs = sorted(adj[v])
            if len(nbs) == 2 and nbs[1] in adj[nbs[0]]:
                continue  # would create a tangency or triple point
            for nb in nbs:
                adj[nb].discard(v)
                weight[nb] -= 1
            if len(nbs) == 2:
                adj[nbs[0]].add(nbs[1])
                adj[nbs[1]].add(nbs[0])
            del weight[v], label[v], adj[v]
            changed = True
            break
    verts = [(v, weight[v], label[v]) for v in sorted(weight)]
    edges = [(a, b) for a in sorted(adj) for b in adj[a] if a < b]
    return WeightedTree(verts, edges)
