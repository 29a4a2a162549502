"""Exact discriminant arithmetic on weighted chains.

A chain ``[w1, ..., wn]`` records a linear string of rational curves with
self-intersections ``-w1, ..., -wn``; its discriminant is the determinant of
the negated intersection matrix.  Everything here is integer or
:class:`fractions.Fraction` arithmetic -- the library never touches floats.

Chains that appear as twigs are stored tip first: the first entry is the
component meeting only one other component of the ambient divisor.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator


class NotAdmissibleError(ValueError):
    """Raised when an operation requires every weight to be at least 2."""


@dataclass(frozen=True)
class Chain:
    """Ordered weight list of a linear divisor (empty = zero divisor)."""

    weights: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))

    def __iter__(self) -> Iterator[int]:
        return iter(self.weights)

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, index):
        picked = self.weights[index]
        return Chain(picked) if isinstance(index, slice) else picked

    def __str__(self) -> str:
        return "[" + ",".join(str(w) for w in self.weights) + "]"

    @classmethod
    def parse(cls, text: str) -> "Chain":
        """Parse the ``[w1,w2,...]`` form produced by ``str``."""
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"chain literal must look like [2,3,...]: {text!r}")
        inner = body[1:-1].strip()
        if not inner:
            return cls()
        return cls(tuple(int(part) for part in inner.split(",")))

    def reversed(self) -> "Chain":
        return Chain(tuple(reversed(self.weights)))

    @property
    def is_admissible(self) -> bool:
        return all(w >= 2 for w in self.weights)


def _weights(chain: Chain | Iterable[int]) -> tuple[int, ...]:
    if isinstance(chain, Chain):
        return chain.weights
    return tuple(int(w) for w in chain)


def discriminant(chain: Chain | Iterable[int]) -> int:
    """det of the negated intersection matrix; 1 for the empty chain.

    Computed by the two-term recurrence
    ``d(w1..wn) = w1 * d(w2..wn) - d(w3..wn)``, scanning from the right.
    """
    d, d_next = 1, 0
    for w in reversed(_weights(chain)):
        d, d_next = w * d - d_next, d
    return d


def d_prime(chain: Chain | Iterable[int]) -> int:
    """Discriminant of the chain with its first component removed."""
    ws = _weights(chain)
    if not ws:
        raise ValueError("d_prime needs a nonempty chain")
    return discriminant(ws[1:])


def d_double_prime(chain: Chain | Iterable[int]) -> int:
    """Discriminant of the chain with its last component removed."""
    ws = _weights(chain)
    if not ws:
        raise ValueError("d_double_prime needs a nonempty chain")
    return discriminant(ws[:-1])


def is_admissible(chain: Chain | Iterable[int]) -> bool:
    return all(w >= 2 for w in _weights(chain))


def e_twig(chain: Chain | Iterable[int]) -> Fraction:
    """Inductance ``e`` of an admissible twig, ordered tip first.

    ``e = d(chain minus tip) / d(chain)``; a ``(2)_k`` string gives
    ``k/(k+1)``.
    """
    ws = _weights(chain)
    if not ws or not is_admissible(ws):
        raise NotAdmissibleError(f"e is defined for nonempty admissible chains, got {list(ws)}")
    return Fraction(discriminant(ws[1:]), discriminant(ws))


def e_quotient_chain(chain: Chain | Iterable[int]) -> Fraction:
    """Negated bark square of an admissible chain contracted as a whole.

    Equals ``(d' + d'' + 2) / d`` and agrees with the value obtained by
    solving the bark's defining linear system in quotient mode.
    """
    ws = _weights(chain)
    if not ws or not is_admissible(ws):
        raise NotAdmissibleError(f"quotient e needs a nonempty admissible chain, got {list(ws)}")
    return Fraction(d_prime(ws) + d_double_prime(ws) + 2, discriminant(ws))
