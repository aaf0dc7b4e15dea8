"""EV-systems: triples ``(x, D, U)`` with D, U inside the strict cones of x.

The relation ``a <+ b`` holds iff ``a.base`` is in ``b.down`` and ``b.base`` is
in ``a.up``.  It is reflexive-antisymmetric once the diagonal is added but in
general not transitive, so it is stored as explicit successor masks and never
closed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .errors import EvSizeCapExceeded, NotAnOrdinalSum, NotInjective
from .homs import EvElement
from .poset import Poset, bits, dual, direct_sum, is_hom, ordinal_sum, popcount, product

DEFAULT_EV_CAP = 20_000


def lt_plus(a: EvElement, b: EvElement) -> bool:
    return bool(b.down >> a.base & 1) and bool(a.up >> b.base & 1)


def leq_plus(a: EvElement, b: EvElement) -> bool:
    return a == b or lt_plus(a, b)


def submasks(m: int):
    """All submasks of m, in increasing numeric order."""
    out = []
    s = 0
    while True:
        out.append(s)
        if s == m:
            break
        s = (s - m) & m
    return out


def ev_size(P: Poset) -> int:
    return sum(1 << (popcount(P.down_strict[x]) + popcount(P.up_strict[x])) for x in range(P.n))


class EvSystem:
    """The EV-system of a poset, with elements sorted by (base, down, up)."""

    def __init__(self, source: Poset, elements: Sequence[EvElement]):
        self.source = source
        self.elements = sorted(elements)
        self.index = {a: i for i, a in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, a) -> bool:
        return a in self.index

    @cached_property
    def succ(self) -> tuple[int, ...]:
        """``succ[i]``: mask over element indices j with ``elements[i] <+ elements[j]``."""
        n = self.source.n
        by_base = [0] * n
        has_in_down = [0] * n
        for j, b in enumerate(self.elements):
            by_base[b.base] |= 1 << j
            for x in bits(b.down):
                has_in_down[x] |= 1 << j
        out = []
        for a in self.elements:
            m = 0
            for y in bits(a.up):
                m |= by_base[y]
            out.append(m & has_in_down[a.base])
        return tuple(out)

    @cached_property
    def pred(self) -> tuple[int, ...]:
        pred = [0] * len(self.elements)
        for i, m in enumerate(self.succ):
            for j in bits(m):
                pred[j] |= 1 << i
        return tuple(pred)

    def lt_pairs(self) -> list[tuple[EvElement, EvElement]]:
        els = self.elements
        return [(els[i], els[j]) for i, m in enumerate(self.succ) for j in bits(m)]

    def transitivity_violations(self) -> int:
        """Number of triples a <+ b <+ c with a not <+ c (statistics only)."""
        count = 0
        for i, m in enumerate(self.succ):
            for j in bits(m):
                count += popcount(self.succ[j] & ~m)
        return count


def build_ev(P: Poset, cap: int = DEFAULT_EV_CAP) -> EvSystem:
    size = ev_size(P)
    if size > cap:
        raise EvSizeCapExceeded(f"EV-system would have {size} elements (cap {cap})")
    els = [
        EvElement(x, D, U)
        for x in range(P.n)
        for D in submasks(P.down_strict[x])
        for U in submasks(P.up_strict[x])
    ]
    return EvSystem(P, els)


def ev_height(E: EvSystem) -> int:
    """Length of a longest ``<+`` chain.

    ``a <+ b`` forces ``a.base < b.base``, so processing bases along a linear
    extension visits every predecessor first.
    """
    rank = {x: i for i, x in enumerate(E.source.linear_extension)}
    order = sorted(range(len(E)), key=lambda i: rank[E.elements[i].base])
    h = [0] * len(E)
    for i in order:
        h[i] = 1 + max((h[j] for j in bits(E.pred[i])), default=0)
    return max(h, default=0)


def embed_point(P: Poset) -> tuple[EvElement, ...]:
    """``x -> (x, strict down-set of x, strict up-set of x)``."""
    return tuple(EvElement(x, P.down_strict[x], P.up_strict[x]) for x in range(P.n))


def project_base(E: EvSystem) -> tuple[int, ...]:
    return tuple(a.base for a in E.elements)


# -- maps between EV-systems ------------------------------------------------


@dataclass
class EvMap:
    """A map between the element sets of two EV-systems."""

    source: EvSystem
    target: EvSystem
    mapping: dict = field(default_factory=dict)

    def __call__(self, a: EvElement) -> EvElement:
        return self.mapping[a]

    def is_total(self) -> bool:
        return all(a in self.mapping for a in self.source.elements)

    def is_injective(self) -> bool:
        return len(set(self.mapping.values())) == len(self.mapping)

    def in_target(self) -> bool:
        return all(b in self.target.index for b in self.mapping.values())

    def strictness_violation(self):
        """First pair ``a <+ b`` whose images are not ``<+``-related, or None."""
        for a, b in self.source.lt_pairs():
            if not lt_plus(self.mapping[a], self.mapping[b]):
                return a, b
        return None

    def is_embedding_hom(self) -> bool:
        """Total, injective, lands in the target and preserves ``<+``."""
        return (
            self.is_total()
            and self.in_target()
            and self.is_injective()
            and self.strictness_violation() is None
        )


def map_triple(sigma: Sequence[int], a: EvElement) -> EvElement:
    def img(m: int) -> int:
        out = 0
        for x in bits(m):
            out |= 1 << sigma[x]
        return out

    return EvElement(sigma[a.base], img(a.down), img(a.up))


def ev_map_from_injection(
    sigma: Sequence[int], R: Poset, S: Poset, cap: int = DEFAULT_EV_CAP
) -> EvMap:
    """The EV-map ``(x, D, U) -> (s(x), s(D), s(U))`` of an injective homomorphism s."""
    if len(set(sigma)) != len(sigma) or not is_hom(R, S, sigma):
        raise NotInjective("expected an injective homomorphism")
    ER, ES = build_ev(R, cap), build_ev(S, cap)
    return EvMap(ER, ES, {a: map_triple(sigma, a) for a in ER.elements})


# -- identities under order arithmetic ---------------------------------------


@dataclass
class IdentityCheck:
    """Outcome of comparing an EV-system with its predicted shape."""

    name: str
    ok: bool
    witness: dict = field(default_factory=dict)
    detail: str = ""


def _predicted(*posets: Poset) -> int:
    return max(ev_size(p) for p in posets)


def _check_cap(cap: int, *posets: Poset) -> None:
    if _predicted(*posets) > cap:
        raise EvSizeCapExceeded(f"predicted EV size {_predicted(*posets)} exceeds cap {cap}")


def _edges_match(E1: EvSystem, E2: EvSystem, phi: Mapping, reverse: bool = False) -> bool:
    mapped = set()
    for a, b in E1.lt_pairs():
        mapped.add((phi[b], phi[a]) if reverse else (phi[a], phi[b]))
    return mapped == set(E2.lt_pairs())


def ev_identity_dual(P: Poset, cap: int = DEFAULT_EV_CAP) -> IdentityCheck:
    """The EV-system of the dual is the dual of the EV-system via ``(x, D, U) -> (x, U, D)``."""
    _check_cap(cap, P)
    Ed, E = build_ev(dual(P), cap), build_ev(P, cap)
    phi = {a: EvElement(a.base, a.up, a.down) for a in Ed.elements}
    bijective = set(phi.values()) == set(E.elements) and len(phi) == len(E)
    ok = bijective and _edges_match(Ed, E, phi, reverse=True)
    return IdentityCheck("dual", ok, {"iso": phi})


def _shift(a: EvElement, k: int) -> EvElement:
    return EvElement(a.base + k, a.down << k, a.up << k)


def ev_identity_dirsum(P: Poset, Q: Poset, cap: int = DEFAULT_EV_CAP) -> IdentityCheck:
    """The EV-system of ``P + Q`` is the direct sum of the two EV-systems."""
    _check_cap(cap, P, Q, direct_sum(P, Q))
    EP, EQ, ES = build_ev(P, cap), build_ev(Q, cap), build_ev(direct_sum(P, Q), cap)
    phi = {("P", a): a for a in EP.elements}
    phi.update({("Q", a): _shift(a, P.n) for a in EQ.elements})
    bijective = set(phi.values()) == set(ES.elements) and len(phi) == len(ES)
    mapped = {(phi["P", a], phi["P", b]) for a, b in EP.lt_pairs()}
    mapped |= {(phi["Q", a], phi["Q", b]) for a, b in EQ.lt_pairs()}
    ok = bijective and mapped == set(ES.lt_pairs())
    return IdentityCheck("dirsum", ok, {"iso": phi})


def ordsum_family(P: Poset, Q: Poset) -> set[EvElement]:
    """Triples predicted for the EV-system of ``P (+) Q`` from those of P and Q."""
    m = P.n
    qmask = ((1 << Q.n) - 1) << m
    fam = set()
    for a in build_ev(P, cap=10**9).elements:
        for V in submasks(qmask):
            fam.add(EvElement(a.base, a.down, a.up | V))
    for a in build_ev(Q, cap=10**9).elements:
        for Dp in submasks(P.full):
            fam.add(EvElement(a.base + m, (a.down << m) | Dp, a.up << m))
    return fam


def ev_identity_ordsum(P: Poset, Q: Poset, cap: int = DEFAULT_EV_CAP) -> IdentityCheck:
    S = ordinal_sum(P, Q)
    _check_cap(cap, S)
    E = build_ev(S, cap)
    fam = ordsum_family(P, Q)
    ok = fam == set(E.elements)
    return IdentityCheck("ordsum", ok, {"size": len(fam)})


def product_family(P: Poset, Q: Poset) -> set[EvElement]:
    """Triples predicted for the EV-system of ``P x Q``: cones are products of cones minus the point."""
    m = Q.n
    fam = set()
    for x in range(P.n):
        for y in range(Q.n):
            me = 1 << (x * m + y)
            dn = up = 0
            for x2 in bits(P.down[x]):
                dn |= Q.down[y] << (x2 * m)
            for x2 in bits(P.up[x]):
                up |= Q.up[y] << (x2 * m)
            for D in submasks(dn & ~me):
                for U in submasks(up & ~me):
                    fam.add(EvElement(x * m + y, D, U))
    return fam


def ev_identity_prod(P: Poset, Q: Poset, cap: int = DEFAULT_EV_CAP) -> IdentityCheck:
    S = product(P, Q)
    _check_cap(cap, S)
    E = build_ev(S, cap)
    fam = product_family(P, Q)
    ok = fam == set(E.elements)
    return IdentityCheck("prod", ok, {"size": len(fam)})


# -- ordinal-sum decorations ---------------------------------------------------


def _check_ambient(lower: Poset, upper: Poset, ambient: EvSystem | None) -> None:
    if ambient is not None and ambient.source != ordinal_sum(lower, upper):
        raise NotAnOrdinalSum("ambient EV-system is not built on the declared ordinal sum")


def decorated_summand(
    lower: Poset, upper: Poset, part: str, ambient: EvSystem | None = None
) -> list[EvElement]:
    """Copy of one summand's EV-system inside the EV-system of ``lower (+) upper``.

    ``part="lower"`` adds the whole upper carrier to each up-set;
    ``part="upper"`` adds the whole lower carrier to each down-set.
    """
    _check_ambient(lower, upper, ambient)
    m = lower.n
    if part == "lower":
        top = ((1 << upper.n) - 1) << m
        return [EvElement(a.base, a.down, a.up | top) for a in build_ev(lower, cap=10**9)]
    if part == "upper":
        return [lift_upper(lower, a) for a in build_ev(upper, cap=10**9)]
    raise ValueError("part must be 'lower' or 'upper'")


def lift_upper(lower: Poset, a: EvElement) -> EvElement:
    """Move a triple of the upper summand into ``lower (+) upper``, adding the lower carrier below."""
    m = lower.n
    return EvElement(a.base + m, (a.down << m) | lower.full, a.up << m)


def strip_lower(lower: Poset, a: EvElement) -> EvElement | None:
    """Inverse direction: drop the lower carrier from the down-set; None on lower-summand bases."""
    m = lower.n
    if a.base < m:
        return None
    return EvElement(a.base - m, (a.down & ~lower.full) >> m, a.up >> m)


def lift_map(lower: Poset, upper: Poset, cap: int = DEFAULT_EV_CAP) -> EvMap:
    """The embedding of the upper summand's EV-system into that of the ordinal sum."""
    E = build_ev(upper, cap)
    amb = build_ev(ordinal_sum(lower, upper), cap)
    return EvMap(E, amb, {a: lift_upper(lower, a) for a in E.elements})


def ev_dot(E: EvSystem, name: str = "E") -> str:
    P = E.source

    def lbl(a: EvElement) -> str:
        def s(m: int) -> str:
            return "{" + ",".join(P.label(x) for x in bits(m)) + "}"

        return f'"({P.label(a.base)},{s(a.down)},{s(a.up)})"'

    lines = [f'digraph "{name}" {{', "  rankdir=BT;"]
    for a in E.elements:
        lines.append(f"  {lbl(a)};")
    for a, b in E.lt_pairs():
        lines.append(f"  {lbl(a)} -> {lbl(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def swap_cones(a: EvElement) -> EvElement:
    return EvElement(a.base, a.up, a.down)
