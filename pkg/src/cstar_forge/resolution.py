"""Hamburger-Noether pair sequences and the blowup walk realizing them.

A branch at infinity is stored as a jump count ``j`` (the number of
leading ``(c1, c1)`` pairs in normal form) followed by pairs
``(c_i, p_i)`` with ``c_{i+1} = gcd(c_i, p_i)`` and a final coprime pair.
The walk below reproduces the embedded resolution purely combinatorially:
it tracks which two boundary curves the branch currently sits between and
runs the subtractive Euclidean algorithm on the local intersection
numbers.  Each blowup inserts a fresh (-1)-vertex, bumps the weights of
the curves through its center, and records ``min(a, b)`` as the
multiplicity of the infinitely near point.

Complex moduli of the branch (one per pair) never enter: only the dual
graph is needed downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd

from .chains import Chain
from .trees import CURVE, LINE_INFTY, PLAIN, WeightedTree


class InvalidBranchError(ValueError):
    """Pair data violating the normal-form invariants."""


class BranchLiteralError(ValueError):
    """Unparseable branch literal; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class HNPair:
    c: int
    p: int

    def __post_init__(self) -> None:
        if not (1 <= self.p <= self.c):
            raise InvalidBranchError(f"pair needs 1 <= p <= c, got ({self.c},{self.p})")


@dataclass(frozen=True)
class HNBranch:
    """One branch at infinity: ``j`` leading (c1,c1) pairs, then ``pairs``."""

    j: int
    pairs: tuple[HNPair, ...]

    def __post_init__(self) -> None:
        pairs = tuple(p if isinstance(p, HNPair) else HNPair(*p) for p in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if self.j < 0:
            raise InvalidBranchError("jump count must be nonnegative")
        if not pairs:
            raise InvalidBranchError("at least one (c, p) pair is required")
        if pairs[0].c < 2:
            raise InvalidBranchError("branch must not be simple: c1 >= 2")
        if pairs[0].p >= pairs[0].c:
            raise InvalidBranchError("first listed pair needs p1 < c1")
        for a, b in zip(pairs, pairs[1:]):
            if b.c != gcd(a.c, a.p):
                raise InvalidBranchError(
                    f"consecutive pairs need c_next = gcd(c, p): ({a.c},{a.p}) -> c {b.c}")
        last = pairs[-1]
        if gcd(last.c, last.p) != 1 or last.p >= last.c:
            raise InvalidBranchError("final pair must be coprime with p < c")

    # -- accessors -------------------------------------------------------

    @property
    def c1(self) -> int:
        return self.pairs[0].c

    @property
    def p1(self) -> int:
        return self.pairs[0].p

    @property
    def h(self) -> int:
        return len(self.pairs)

    @property
    def last(self) -> HNPair:
        return self.pairs[-1]

    @property
    def sum_p(self) -> int:
        return sum(p.p for p in self.pairs)

    @property
    def sum_cp(self) -> int:
        return sum(p.c * p.p for p in self.pairs)

    @property
    def tail_sum_p(self) -> int:
        """Sum of p_i over the pairs after the first."""
        return sum(p.p for p in self.pairs[1:])

    @property
    def t_flag(self) -> int:
        """1 when the last pair has p = 1, the (-2)-twig tail situation."""
        return 1 if self.last.p == 1 else 0

    def sort_key(self):
        return (self.j, tuple((p.c, p.p) for p in self.pairs))

    def literal(self) -> str:
        body = "".join(f"({p.c},{p.p})" for p in self.pairs)
        return f"j:{self.j} pairs:{body}"

    def __str__(self) -> str:
        return self.literal()


def jumping_prefix(branch: HNBranch) -> int:
    """Number of leading (c1, c1) pairs, i.e. the jumping number."""
    return branch.j


def mult_sum(branch: HNBranch) -> int:
    """Closed form for the sum of infinitely near multiplicities."""
    return (branch.j + 1) * branch.c1 + branch.sum_p - 1


def mult_sq_sum(branch: HNBranch) -> int:
    """Closed form for the sum of squared multiplicities."""
    return branch.j * branch.c1 ** 2 + branch.sum_cp


def parse_branch(text: str) -> HNBranch:
    """Strict, whitespace-insensitive parser for ``j:0 pairs:(2,1)(3,1)``."""
    squeezed = []
    positions = []
    for i, ch in enumerate(text):
        if not ch.isspace():
            squeezed.append(ch)
            positions.append(i)
    flat = "".join(squeezed)

    def where(flat_index: int) -> int:
        if flat_index < len(positions):
            return positions[flat_index]
        return len(text)

    if not flat.startswith("j:"):
        raise BranchLiteralError("expected 'j:'", where(0))
    m = re.match(r"j:(\d+)", flat)
    if not m:
        raise BranchLiteralError("expected an integer after 'j:'", where(2))
    j = int(m.group(1))
    rest = flat[m.end():]
    if not rest.startswith("pairs:"):
        raise BranchLiteralError("expected 'pairs:'", where(m.end()))
    body = rest[len("pairs:"):]
    offset = m.end() + len("pairs:")
    pairs = []
    pos = 0
    pair_re = re.compile(r"\((\d+),(\d+)\)")
    while pos < len(body):
        pm = pair_re.match(body, pos)
        if not pm:
            raise BranchLiteralError("expected '(c,p)'", where(offset + pos))
        pairs.append((int(pm.group(1)), int(pm.group(2))))
        pos = pm.end()
    if not pairs:
        raise BranchLiteralError("at least one pair is required", where(offset))
    try:
        return HNBranch(j, tuple(HNPair(c, p) for c, p in pairs))
    except InvalidBranchError as exc:
        raise BranchLiteralError(str(exc), 0) from None


# -- the blowup surface ---------------------------------------------------


class BlowupSurface:
    """Mutable builder for the boundary dual graph during resolution."""

    def __init__(self) -> None:
        self._next = 0
        self.weight: dict[int, int] = {}
        self.label: dict[int, str] = {}
        self.adj: dict[int, set[int]] = {}

    def add_vertex(self, weight: int, label: str = PLAIN) -> int:
        vid = self._next
        self._next += 1
        self.weight[vid] = weight
        self.label[vid] = label
        self.adj[vid] = set()
        return vid

    def add_edge(self, a: int, b: int) -> None:
        self.adj[a].add(b)
        self.adj[b].add(a)

    def remove_edge(self, a: int, b: int) -> None:
        self.adj[a].discard(b)
        self.adj[b].discard(a)

    def blowup_outer(self, center_curve: int) -> int:
        """Blow up a free point of one boundary curve."""
        self.weight[center_curve] += 1
        fresh = self.add_vertex(1)
        self.add_edge(center_curve, fresh)
        return fresh

    def blowup_inner(self, a: int, b: int) -> int:
        """Blow up the node of two boundary curves."""
        assert b in self.adj[a], "inner blowup needs an existing node"
        self.weight[a] += 1
        self.weight[b] += 1
        fresh = self.add_vertex(1)
        self.remove_edge(a, b)
        self.add_edge(a, fresh)
        self.add_edge(b, fresh)
        return fresh

    def freeze(self) -> WeightedTree:
        verts = [(v, self.weight[v], self.label[v]) for v in sorted(self.weight)]
        edges = [(a, b) for a in sorted(self.adj) for b in self.adj[a] if a < b]
        return WeightedTree(verts, edges)


@dataclass(frozen=True)
class ResolutionResult:
    """Dual-graph contribution of one branch, hung on the line at infinity."""

    graph: WeightedTree
    multiplicities: tuple[int, ...]
    blowup_count: int
    line_id: int
    curve_id: int  # the final (-1)-curve, labelled C
    pair_twigs: tuple[tuple[int, ...], ...]  # tip-first vertex ids, one per pair

    def twig_chains(self) -> tuple[Chain, ...]:
        return tuple(Chain(tuple(self.graph.weight(v) for v in t))
                     for t in self.pair_twigs)


def run_pair(surface: BlowupSurface, start_curve: int, c: int, p: int):
    """Blow up along one pair starting at a free point of ``start_curve``.

    Returns ``(terminal_curve, multiplicities, twig_ids)`` where the twig
    is the hanging chain left behind the terminal curve, tip first.
    """
    mults = [min(c, p)]
    first = surface.blowup_outer(start_curve)
    a, b = c - p, p
    side_a, side_b = start_curve, first
    terminal = first
    while a > 0 and b > 0:
        m = min(a, b)
        mults.append(m)
        fresh = surface.blowup_inner(side_a, side_b)
        terminal = fresh
        if a - m > 0:
            a, side_b = a - m, fresh
            b = m
        elif b - m > 0:
            b, side_a = b - m, fresh
            a = m
        else:
            a = b = 0
    twig: list[int] = []
    if p < c:
        # hanging chain behind the terminal curve, away from start_curve
        candidates = [n for n in surface.adj[terminal] if n != start_curve]
        hang = [n for n in candidates if _hangs_away(surface, n, terminal, start_curve)]
        if hang:
            cur = hang[0]
            walk = [cur]
            while True:
                nxt = [n for n in surface.adj[walk[-1]] if n != (walk[-2] if len(walk) > 1 else terminal)]
                if not nxt:
                    break
                walk.append(nxt[0])
            twig = list(reversed(walk))  # tip first
    return terminal, mults, twig


def _hangs_away(surface: BlowupSurface, node: int, terminal: int, base: int) -> bool:
    """True when ``node``'s side of ``terminal`` does not reach ``base``."""
    seen = {terminal}
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur == base:
            return False
        if cur in seen:
            continue
        seen.add(cur)
        stack.extend(surface.adj[cur])
    return True


def resolve_onto(surface: BlowupSurface, line_id: int, branch: HNBranch):
    """Resolve one branch attached at a free point of ``line_id``.

    Returns ``(multiplicities, terminal_id, pair_twigs)``; the terminal
    curve is the final (-1)-curve the branch meets transversally.
    """
    mults: list[int] = []
    cur = line_id
    c1 = branch.c1
    for _ in range(branch.j):
        cur = surface.blowup_outer(cur)
        mults.append(c1)
    twigs: list[tuple[int, ...]] = []
    for pair in branch.pairs:
        cur, pair_mults, twig = run_pair(surface, cur, pair.c, pair.p)
        mults.extend(pair_mults)
        twigs.append(tuple(twig))
    return mults, cur, tuple(twigs)


def resolve_branch(branch: HNBranch) -> ResolutionResult:
    """Embedded resolution of a single branch against the line at infinity."""
    surface = BlowupSurface()
    line = surface.add_vertex(-1, LINE_INFTY)  # a line has self-intersection +1
    mults, terminal, twigs = resolve_onto(surface, line, branch)
    surface.label[terminal] = CURVE
    graph = surface.freeze()
    return ResolutionResult(graph=graph, multiplicities=tuple(mults),
                            blowup_count=len(mults), line_id=line,
                            curve_id=terminal, pair_twigs=twigs)


def twig_of_pair(c: int, p: int) -> Chain:
    """Hanging chain created by one pair with p < c, tip first.

    Its discriminant is ``c / gcd(c, p)`` and its ``e`` value reduces to
    ``(c - p) / c``; both facts are exercised exhaustively in the tests.
    """
    if not 1 <= p < c:
        raise InvalidBranchError(f"a twig needs 1 <= p < c, got ({c},{p})")
    surface = BlowupSurface()
    base = surface.add_vertex(-1, LINE_INFTY)
    _, _, twig = run_pair(surface, base, c, p)
    return Chain(tuple(surface.weight[v] for v in twig))
