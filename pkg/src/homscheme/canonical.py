"""Canonical forms and isomorphism tests for small posets.

Colour refinement on (colour, colours of strict up-set, colours of strict
down-set) followed by individualisation of the first non-singleton cell.  The
canonical key is the lexicographically least row-major adjacency string over
all leaves of the search tree.  Elements that are interchangeable by a
transposition (same strict up- and down-sets) are individualised once.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

from .poset import Poset, bits

CanonicalKey = tuple  # (n, row_0, ..., row_{n-1})


def _refine(P: Poset, colors: list[int]) -> list[int]:
    n = P.n
    ncells = len(set(colors))
    while True:
        sigs = []
        for x in range(n):
            ups = tuple(sorted(colors[y] for y in bits(P.up_strict[x])))
            dns = tuple(sorted(colors[y] for y in bits(P.down_strict[x])))
            sigs.append((colors[x], ups, dns))
        ranking = {s: i for i, s in enumerate(sorted(set(sigs)))}
        colors = [ranking[s] for s in sigs]
        if len(ranking) == ncells:
            return colors
        ncells = len(ranking)


def _key_for(P: Poset, labeling: Sequence[int]) -> tuple[int, ...]:
    # labeling[x] = new position of x; row i holds bit (n-1-j) for new j
    n = P.n
    inv = [0] * n
    for x, p in enumerate(labeling):
        inv[p] = x
    rows = []
    for i in range(n):
        row = 0
        for y in bits(P.up[inv[i]]):
            row |= 1 << (n - 1 - labeling[y])
        rows.append(row)
    return tuple(rows)


def _twins(P: Poset, x: int, y: int) -> bool:
    # the transposition (x y) is an automorphism
    return (
        not P.comparable[x] >> y & 1
        and P.up_strict[x] == P.up_strict[y]
        and P.down_strict[x] == P.down_strict[y]
    )


def canonical_labeling(P: Poset) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Return ``(labeling, rows)`` where ``labeling[x]`` is x's canonical position."""
    n = P.n
    if n == 0:
        return (), ()
    best: list = [None, None]

    def search(colors: list[int]) -> None:
        colors = _refine(P, colors)
        if len(set(colors)) == n:
            rows = _key_for(P, colors)
            if best[0] is None or rows < best[0]:
                best[0], best[1] = rows, tuple(colors)
            return
        counts: dict[int, list[int]] = {}
        for x, c in enumerate(colors):
            counts.setdefault(c, []).append(x)
        target = min(c for c, members in counts.items() if len(members) > 1)
        cell = counts[target]
        tried: list[int] = []
        for x in cell:
            if any(_twins(P, x, t) for t in tried):
                continue
            tried.append(x)
            nc = [2 * c + (1 if c == target and y != x else 0) for y, c in enumerate(colors)]
            search(nc)

    search([0] * n)
    return best[1], best[0]


@lru_cache(maxsize=65536)
def _cached_key(up: tuple[int, ...]) -> CanonicalKey:
    _, rows = canonical_labeling(Poset(up))
    return (len(up),) + rows


def canonical_form(P: Poset) -> CanonicalKey:
    """A key that is equal for two posets iff they are isomorphic."""
    return _cached_key(P.up)


def canonical_poset(P: Poset) -> Poset:
    """The representative of P's isomorphism class with canonical numbering."""
    key = canonical_form(P)
    n = key[0]
    rows = key[1:]
    up = tuple(sum(1 << j for j in range(n) if rows[i] >> (n - 1 - j) & 1) for i in range(n))
    return Poset(up)


def find_isomorphism(P: Poset, Q: Poset) -> tuple[int, ...] | None:
    """An order isomorphism ``P -> Q`` as an image tuple, or ``None``."""
    if P.n != Q.n or canonical_form(P) != canonical_form(Q):
        return None
    lp, _ = canonical_labeling(P)
    lq, _ = canonical_labeling(Q)
    inv_q = [0] * Q.n
    for y, p in enumerate(lq):
        inv_q[p] = y
    iso = tuple(inv_q[lp[x]] for x in range(P.n))
    assert all(P.leq(a, b) == Q.leq(iso[a], iso[b]) for a in range(P.n) for b in range(P.n))
    return iso


def is_isomorphic(P: Poset, Q: Poset) -> bool:
    return P.n == Q.n and canonical_form(P) == canonical_form(Q)
