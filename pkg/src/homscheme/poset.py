"""Finite posets over dense integer carriers, order arithmetic and subset operators.

Elements of a poset with ``n`` elements are the integers ``0..n-1``.  Subsets of
the carrier are plain ``int`` bitmasks (bit ``x`` set iff ``x`` is a member).
The order is stored as one up-set mask per element: bit ``y`` of ``up[x]`` is
set iff ``x <= y``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import (
    CycleDetected,
    ElementNotInSet,
    EmptyCarrier,
    InvalidPoset,
    UnknownLabel,
)


def bits(mask: int) -> Iterator[int]:
    """Yield the members of a bitmask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for x in elements:
        m |= 1 << x
    return m


def _closure(up: list[int]) -> list[int]:
    n = len(up)
    up = list(up)
    for k in range(n):
        bk = 1 << k
        uk = up[k]
        for i in range(n):
            if up[i] & bk:
                up[i] |= uk
    return up


@dataclass(frozen=True, eq=False)
class Poset:
    """An immutable finite poset.

    Equality and hashing look only at the order relation; labels are for
    presentation.
    """

    up: tuple[int, ...]
    labels: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        if self.labels is not None and len(self.labels) != len(self.up):
            raise InvalidPoset("label count does not match element count")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_leq(cls, matrix: Sequence[Sequence[bool]], labels=None) -> "Poset":
        """Build from a boolean matrix, validating the partial-order axioms."""
        n = len(matrix)
        up = [mask_of(j for j in range(n) if matrix[i][j]) for i in range(n)]
        P = cls(tuple(up), tuple(labels) if labels is not None else None)
        P.validate()
        return P

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]], labels=None) -> "Poset":
        """Order generated by ``pairs`` (reflexive-transitive closure)."""
        up = [1 << i for i in range(n)]
        for a, b in pairs:
            up[a] |= 1 << b
        up = _closure(up)
        for i in range(n):
            for j in bits(up[i] & ~(1 << i)):
                if up[j] >> i & 1:
                    raise CycleDetected(f"elements {i} and {j} lie on a cycle")
        return cls(tuple(up), tuple(labels) if labels is not None else None)

    def validate(self) -> None:
        n = self.n
        for x in range(n):
            if not self.up[x] >> x & 1:
                raise InvalidPoset(f"not reflexive at {x}")
            if self.up[x] >> n:
                raise InvalidPoset(f"row {x} references elements outside the carrier")
            for y in bits(self.up[x]):
                if y != x and self.up[y] >> x & 1:
                    raise InvalidPoset(f"not antisymmetric at ({x}, {y})")
                if self.up[y] & ~self.up[x]:
                    raise InvalidPoset(f"not transitive through {y}")

    # -- basic queries ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.up)

    def __len__(self) -> int:
        return len(self.up)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poset) and self.up == other.up

    def __hash__(self) -> int:
        return hash(self.up)

    def __repr__(self) -> str:
        covers = ", ".join(f"{self.label(a)}<{self.label(b)}" for a, b in self.covers())
        return f"Poset(n={self.n}, covers=[{covers}])"

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels is not None else str(x)

    def with_labels(self, labels: Sequence[str] | None) -> "Poset":
        return Poset(self.up, tuple(labels) if labels is not None else None)

    def leq(self, x: int, y: int) -> bool:
        return bool(self.up[x] >> y & 1)

    def lt(self, x: int, y: int) -> bool:
        return x != y and bool(self.up[x] >> y & 1)

    @cached_property
    def down(self) -> tuple[int, ...]:
        down = [0] * self.n
        for x in range(self.n):
            for y in bits(self.up[x]):
                down[y] |= 1 << x
        return tuple(down)

    @cached_property
    def up_strict(self) -> tuple[int, ...]:
        return tuple(u & ~(1 << x) for x, u in enumerate(self.up))

    @cached_property
    def down_strict(self) -> tuple[int, ...]:
        return tuple(d & ~(1 << x) for x, d in enumerate(self.down))

    @cached_property
    def comparable(self) -> tuple[int, ...]:
        """Mask of elements strictly comparable with each element."""
        return tuple(u | d for u, d in zip(self.up_strict, self.down_strict))

    @cached_property
    def linear_extension(self) -> tuple[int, ...]:
        return tuple(sorted(range(self.n), key=lambda x: (popcount(self.down[x]), x)))

    def covers(self) -> list[tuple[int, int]]:
        """Cover pairs ``(a, b)``: ``a < b`` with nothing strictly in between."""
        out = []
        for a in range(self.n):
            above = self.up_strict[a]
            for b in bits(above):
                if not (above & self.down_strict[b]):
                    out.append((a, b))
        return out

    def leq_matrix(self) -> list[list[bool]]:
        return [[self.leq(i, j) for j in range(self.n)] for i in range(self.n)]


# -- standard posets --------------------------------------------------------


def chain(n: int) -> Poset:
    """The n-chain ``C_n`` on ``0 < 1 < ... < n-1``."""
    return Poset(tuple(((1 << n) - 1) & ~((1 << i) - 1) for i in range(n)))


def antichain(n: int) -> Poset:
    """The n-antichain ``A_n``."""
    return Poset(tuple(1 << i for i in range(n)))


def empty_poset() -> Poset:
    return Poset(())


def from_covers(elements: Sequence[str], covers: Iterable[tuple[str, str]]) -> Poset:
    """Build a poset from element labels and ``(lower, upper)`` cover pairs.

    Redundant covers (implied by transitivity) are accepted with a warning.
    """
    if len(set(elements)) != len(elements):
        raise InvalidPoset("element labels must be distinct")
    index = {name: i for i, name in enumerate(elements)}
    pairs = []
    for a, b in covers:
        for name in (a, b):
            if name not in index:
                raise UnknownLabel(name)
        if a == b:
            raise CycleDetected(f"self cover {a}<{a}")
        pairs.append((index[a], index[b]))
    P = Poset.from_pairs(len(elements), pairs, labels=list(elements))
    real = set(P.covers())
    redundant = sorted({p for p in pairs if p not in real})
    if redundant:
        names = ", ".join(f"{elements[a]}<{elements[b]}" for a, b in redundant)
        warnings.warn(f"redundant covers implied by transitivity: {names}", stacklevel=2)
    return P


# -- order arithmetic ---------------------------------------------------------


def _joined_labels(P: Poset, Q: Poset) -> tuple[str, ...] | None:
    if P.labels is None and Q.labels is None:
        return None
    left = [P.label(x) for x in range(P.n)]
    right = [Q.label(y) for y in range(Q.n)]
    if set(left) & set(right):
        left = [f"{s}.1" for s in left]
        right = [f"{s}.2" for s in right]
    return tuple(left + right)


def dual(P: Poset) -> Poset:
    return Poset(P.down, P.labels)


def direct_sum(P: Poset, Q: Poset) -> Poset:
    """``P + Q``: P occupies ``0..|P|-1``, Q is shifted by ``|P|``."""
    m = P.n
    up = P.up + tuple(u << m for u in Q.up)
    return Poset(up, _joined_labels(P, Q))


def ordinal_sum(P: Poset, Q: Poset) -> Poset:
    """``P (+) Q``: every element of P lies below every element of Q."""
    m = P.n
    top = ((1 << Q.n) - 1) << m
    up = tuple(u | top for u in P.up) + tuple(u << m for u in Q.up)
    return Poset(up, _joined_labels(P, Q))


def product(P: Poset, Q: Poset) -> Poset:
    """Componentwise order; the pair ``(x, y)`` has index ``x * |Q| + y``."""
    m = Q.n
    up = []
    for x in range(P.n):
        for y in range(Q.n):
            mask = 0
            for x2 in bits(P.up[x]):
                mask |= Q.up[y] << (x2 * m)
            up.append(mask)
    labels = None
    if P.labels is not None or Q.labels is not None:
        labels = tuple(f"({P.label(x)},{Q.label(y)})" for x in range(P.n) for y in range(Q.n))
    return Poset(tuple(up), labels)


def disjoint_copies(P: Poset, k: int) -> Poset:
    """Direct sum of ``k`` copies of P; copy ``j`` starts at index ``j * |P|``."""
    if k < 1:
        raise ValueError("k must be positive")
    out = P
    for _ in range(k - 1):
        out = direct_sum(out, P)
    if P.labels is not None:
        out = out.with_labels([f"{P.label(x)}#{j}" for j in range(k) for x in range(P.n)])
    return out


def induced(P: Poset, A: int, *, allow_empty: bool = False) -> Poset:
    """Order induced on A, with A's members renumbered in increasing order."""
    members = list(bits(A))
    if not members and not allow_empty:
        raise EmptyCarrier("induced subposet on the empty set")
    pos = {x: i for i, x in enumerate(members)}
    up = tuple(mask_of(pos[y] for y in bits(P.up[x] & A)) for x in members)
    labels = tuple(P.label(x) for x in members) if P.labels is not None else None
    return Poset(up, labels)


# -- subset operators ---------------------------------------------------------


def down_set(P: Poset, A: int) -> int:
    m = 0
    for a in bits(A):
        m |= P.down[a]
    return m


def up_set(P: Poset, A: int) -> int:
    m = 0
    for a in bits(A):
        m |= P.up[a]
    return m


def down_strict(P: Poset, A: int) -> int:
    return down_set(P, A) & ~A


def up_strict(P: Poset, A: int) -> int:
    return up_set(P, A) & ~A


def height(P: Poset) -> int:
    """Cardinality of a longest chain (0 for the empty poset)."""
    h = [0] * P.n
    for x in P.linear_extension:
        h[x] = 1 + max((h[y] for y in bits(P.down_strict[x])), default=0)
    return max(h, default=0)


def zigzag_class(P: Poset, A: int, x: int) -> int:
    """Elements of A joined to x by a zigzag line running inside A."""
    if not A >> x & 1:
        raise ElementNotInSet(f"{x} is not a member of the given set")
    seen = 1 << x
    frontier = seen
    comp = P.comparable
    while frontier:
        nxt = 0
        for y in bits(frontier):
            nxt |= comp[y]
        nxt &= A & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def zigzag_classes(P: Poset, A: int) -> list[int]:
    """Partition of A into its zigzag classes, ordered by least member."""
    out = []
    rest = A
    while rest:
        x = (rest & -rest).bit_length() - 1
        c = zigzag_class(P, rest, x)
        out.append(c)
        rest &= ~c
    return out


def components(P: Poset) -> list[int]:
    return zigzag_classes(P, P.full)


def is_connected(P: Poset) -> bool:
    return P.n > 0 and zigzag_class(P, P.full, 0) == P.full


def upsets(P: Poset) -> list[int]:
    """All up-closed subsets, including the empty set and the full carrier."""
    order = list(reversed(P.linear_extension))
    out: list[int] = []

    def rec(i: int, chosen: int) -> None:
        if i == len(order):
            out.append(chosen)
            return
        x = order[i]
        rec(i + 1, chosen)
        if P.up_strict[x] & ~chosen == 0:
            rec(i + 1, chosen | 1 << x)

    rec(0, 0)
    return sorted(out)


def downsets(P: Poset) -> list[int]:
    return sorted(P.full & ~u for u in upsets(P))


def is_hom(P: Poset, Q: Poset, image: Sequence[int]) -> bool:
    """Whether ``image`` (indexed by P's elements) is order preserving into Q."""
    for x in range(P.n):
        for y in bits(P.up_strict[x]):
            if not Q.up[image[x]] >> image[y] & 1:
                return False
    return True


def is_strict_hom(P: Poset, Q: Poset, image: Sequence[int]) -> bool:
    for x in range(P.n):
        for y in bits(P.up_strict[x]):
            if not Q.up_strict[image[x]] >> image[y] & 1:
                return False
    return True
