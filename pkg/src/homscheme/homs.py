"""Enumeration and counting of (strict) homomorphisms and related invariants.

A homomorphism ``P -> Q`` is a tuple of target elements indexed by the
elements of P.  Tuples compare and hash elementwise, which is all the
deduplication and grouping below needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import OverlappingCarriers, SearchBudgetExceeded
from .poset import Poset, bits, down_strict, mask_of, up_strict, zigzag_class

Hom = tuple  # tuple[int, ...]

DEFAULT_BUDGET = 10**8


class _Budget:
    __slots__ = ("left", "cap")

    def __init__(self, cap: int | None):
        self.cap = DEFAULT_BUDGET if cap is None else cap
        self.left = self.cap

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise SearchBudgetExceeded(f"search visited more than {self.cap} nodes")


def _plan(P: Poset, order: Sequence[int] | None):
    order = list(P.linear_extension if order is None else order)
    if sorted(order) != list(range(P.n)):
        raise ValueError("variable order must be a permutation of the carrier")
    placed = 0
    steps = []
    for x in order:
        below = [y for y in bits(P.down_strict[x] & placed)]
        above = [y for y in bits(P.up_strict[x] & placed)]
        steps.append((x, below, above))
        placed |= 1 << x
    return steps


def _search(P: Poset, Q: Poset, strict: bool, order, budget, count_only: bool):
    steps = _plan(P, order)
    qup = Q.up_strict if strict else Q.up
    qdown = Q.down_strict if strict else Q.down
    full = Q.full
    image = [0] * P.n
    last = len(steps) - 1
    budget = _Budget(budget)
    out: list = []
    total = 0

    def candidates(i: int) -> int:
        _, below, above = steps[i]
        m = full
        for y in below:
            m &= qup[image[y]]
        for y in above:
            m &= qdown[image[y]]
        return m

    def rec(i: int) -> None:
        nonlocal total
        budget.spend()
        m = candidates(i)
        if i == last and count_only:
            total += bin(m).count("1")
            return
        x = steps[i][0]
        for v in bits(m):
            image[x] = v
            if i == last:
                out.append(tuple(image))
            else:
                rec(i + 1)

    if P.n == 0:
        return 1 if count_only else [()]
    rec(0)
    if count_only:
        return total
    out.sort()
    return out


def enumerate_homs(P: Poset, Q: Poset, *, order=None, budget: int | None = None) -> list[Hom]:
    """All order-preserving maps ``P -> Q``, sorted lexicographically.

    The empty source yields the single empty map.
    """
    return _search(P, Q, False, order, budget, False)


def count_homs(P: Poset, Q: Poset, *, order=None, budget: int | None = None) -> int:
    return _search(P, Q, False, order, budget, True)


def enumerate_strict(P: Poset, Q: Poset, *, order=None, budget: int | None = None) -> list[Hom]:
    """Homomorphisms that send every strict pair ``x < y`` to a strict pair."""
    return _search(P, Q, True, order, budget, False)


def count_strict(P: Poset, Q: Poset, *, order=None, budget: int | None = None) -> int:
    return _search(P, Q, True, order, budget, True)


def constant_hom(P: Poset, q: int) -> Hom:
    return (q,) * P.n


def is_constant(xi: Sequence[int]) -> bool:
    return len(set(xi)) <= 1


def image_mask(xi: Sequence[int], A: int | None = None) -> int:
    """Mask of ``xi(A)`` (all of xi's image when A is None)."""
    if A is None:
        return mask_of(xi)
    return mask_of(xi[x] for x in bits(A))


# -- fibre components -----------------------------------------------------


def fiber(xi: Sequence[int], x: int) -> int:
    v = xi[x]
    return mask_of(y for y, w in enumerate(xi) if w == v)


def fiber_component(P: Poset, xi: Sequence[int], x: int) -> int:
    """Zigzag class of x inside the fibre of ``xi(x)``.

    ``xi`` may be any map on P's carrier; it need not be order preserving.
    """
    return zigzag_class(P, fiber(xi, x), x)


def fingerprint(P: Poset, xi: Sequence[int]) -> tuple[int, ...]:
    return tuple(fiber_component(P, xi, x) for x in range(P.n))


class EvElement(NamedTuple):
    """A triple ``(base, down, up)`` of an EV-system; down/up are masks."""

    base: int
    down: int
    up: int


def ev_image(P: Poset, xi: Sequence[int], x: int) -> EvElement:
    """The EV-triple of x under xi: image of x, images of the strict cones of its fibre component."""
    G = fiber_component(P, xi, x)
    return EvElement(
        xi[x],
        image_mask(xi, down_strict(P, G)),
        image_mask(xi, up_strict(P, G)),
    )


def ev_images(P: Poset, xi: Sequence[int]) -> tuple[EvElement, ...]:
    return tuple(ev_image(P, xi, x) for x in range(P.n))


@dataclass
class FingerprintClass:
    """Homomorphisms sharing one complete fibre-component fingerprint."""

    fingerprint: tuple[int, ...]
    homs: list


def fingerprint_classes(P: Poset, R: Poset, *, budget: int | None = None) -> list[FingerprintClass]:
    groups: dict[tuple, list] = {}
    for xi in enumerate_homs(P, R, budget=budget):
        groups.setdefault(fingerprint(P, xi), []).append(xi)
    return [FingerprintClass(fp, hs) for fp, hs in sorted(groups.items())]


# -- restriction and union ------------------------------------------------


def restrict_hom(xi: Sequence[int], K: int) -> Hom:
    """Pre-restriction to K, indexed like ``induced(P, K)``."""
    return tuple(xi[x] for x in bits(K))


def corestrict_hom(xi: Sequence[int], B: int) -> Hom:
    """Post-restriction to a target subset B containing the image, indexed like ``induced(Q, B)``."""
    pos = {b: i for i, b in enumerate(bits(B))}
    return tuple(pos[v] for v in xi)


def union_homs(n: int, parts: Sequence[tuple[int, Sequence[int]]]) -> Hom:
    """Glue maps given on disjoint carrier masks into one map on ``0..n-1``."""
    image: list = [None] * n
    seen = 0
    for K, part in parts:
        if seen & K:
            raise OverlappingCarriers("restricted carriers overlap")
        seen |= K
        members = list(bits(K))
        if len(members) != len(part):
            raise ValueError("part size does not match its carrier")
        for x, v in zip(members, part):
            image[x] = v
    if seen != (1 << n) - 1:
        raise ValueError("parts do not cover the carrier")
    return tuple(image)


# -- hom posets -------------------------------------------------------------


def hom_poset(Q: Poset, R: Poset, *, budget: int | None = None) -> Poset:
    """``H(Q, R)`` under the pointwise order; element i is ``enumerate_homs(Q, R)[i]``."""
    homs = enumerate_homs(Q, R, budget=budget)
    up = []
    for f in homs:
        m = 0
        for j, g in enumerate(homs):
            if all(R.up[a] >> b & 1 for a, b in zip(f, g)):
                m |= 1 << j
        up.append(m)
    labels = tuple("[" + ",".join(R.label(v) for v in f) + "]" for f in homs)
    return Poset(tuple(up), labels)


def format_hom(P: Poset, Q: Poset, xi: Sequence[int]) -> str:
    return ", ".join(f"{P.label(x)}->{Q.label(v)}" for x, v in enumerate(xi))
