"""Hom-schemes as finite tables over a catalog, their flag checks, builders and order checks."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Sequence

from .catalog import Catalog, connected_only
from .errors import (
    CatalogNotDualClosed,
    ComplexityCapExceeded,
    InvariantViolated,
    MissingComponentPoset,
    NotInjective,
    OutsideCatalog,
    SearchBudgetExceeded,
)
from .ev import DEFAULT_EV_CAP, EvMap, EvSystem, build_ev, lt_plus
from .homs import (
    DEFAULT_BUDGET,
    EvElement,
    count_homs,
    count_strict,
    enumerate_homs,
    ev_image,
    ev_images,
    fingerprint,
    hom_poset,
    restrict_hom,
    union_homs,
)
from .poset import (
    Poset,
    bits,
    components,
    direct_sum,
    dual,
    induced,
    is_connected,
    is_hom,
    product,
)

Rule = Callable[[Poset, tuple], tuple]

DEFAULT_I_CAP = 2_000_000


def poset_data(P: Poset) -> dict:
    """JSON-friendly description of a poset: size plus cover pairs."""
    return {"n": P.n, "covers": [list(c) for c in P.covers()]}


def mask_list(m: int) -> list[int]:
    return list(bits(m))


def ev_data(a: EvElement) -> list:
    return [a.base, mask_list(a.down), mask_list(a.up)]


@dataclass
class Verdict:
    claim: str
    status: str  # "holds" | "refuted" | "skipped"
    bound: str
    witness: dict | None = None
    detail: str = ""

    @property
    def holds(self) -> bool:
        return self.status == "holds"

    @property
    def refuted(self) -> bool:
        return self.status == "refuted"

    def to_dict(self) -> dict:
        return asdict(self)


def _bound(catalog: Catalog) -> str:
    return f"catalog n<={catalog.max_n} ({len(catalog)} posets)"


class SchemeTable:
    """A map ``H(P,R) -> H(P,S)`` for every catalog poset P.

    ``maps[i]`` is a dict for ``catalog[i]``.  Posets isomorphic to a catalog
    member are handled by transport along the canonical isomorphism; an
    optional ``rule`` covers posets outside the catalog.
    """

    def __init__(
        self,
        source: Poset,
        target: Poset,
        catalog: Catalog,
        maps: dict[int, dict],
        rule: Rule | None = None,
        name: str = "scheme",
        validate: bool = True,
    ):
        self.source = source
        self.target = target
        self.catalog = catalog
        self.maps = maps
        self.rule = rule
        self.name = name
        self.flags: dict[str, bool | None] = {"strong": None, "g": None, "i": None}
        if validate:
            self._validate()

    def _validate(self) -> None:
        for i, P in enumerate(self.catalog):
            m = self.maps.get(i)
            if m is None:
                raise InvariantViolated(f"{self.name}: no map for catalog poset #{i}")
            homs = enumerate_homs(P, self.source)
            if len(m) != len(homs) or any(xi not in m for xi in homs):
                raise InvariantViolated(f"{self.name}: map for catalog poset #{i} is not total")
            for xi, eta in m.items():
                if not is_hom(P, self.target, eta):
                    raise InvariantViolated(
                        f"{self.name}: image of {xi} at catalog poset #{i} is not a homomorphism"
                    )

    @classmethod
    def from_rule(cls, source: Poset, target: Poset, catalog: Catalog, rule: Rule, name: str = "scheme"):
        maps = {
            i: {xi: tuple(rule(P, xi)) for xi in enumerate_homs(P, source)}
            for i, P in enumerate(catalog)
        }
        return cls(source, target, catalog, maps, rule, name)

    def items(self):
        """Yield ``(position, P, xi, image)`` over the whole catalog."""
        for i, P in enumerate(self.catalog):
            for xi, eta in self.maps[i].items():
                yield i, P, xi, eta

    def apply(self, P: Poset, xi: Sequence[int], allow_rule: bool = True) -> tuple:
        xi = tuple(xi)
        found = self.catalog.locate(P)
        if found is not None:
            pos, iso = found
            if iso == tuple(range(P.n)):
                return self.maps[pos][xi]
            moved = [0] * P.n
            for x, p in enumerate(iso):
                moved[p] = xi[x]
            eta = self.maps[pos][tuple(moved)]
            return tuple(eta[iso[x]] for x in range(P.n))
        if allow_rule and self.rule is not None:
            return tuple(self.rule(P, xi))
        raise OutsideCatalog(f"{self.name}: poset of size {P.n} is outside the catalog and no rule is set")

    def with_overrides(self, pos: int, changes: dict, name: str | None = None) -> "SchemeTable":
        maps = {i: dict(m) for i, m in self.maps.items()}
        maps[pos].update(changes)
        return SchemeTable(self.source, self.target, self.catalog, maps, None, name or self.name + "*")

    def check_all(self) -> dict[str, Verdict]:
        return {
            "strong": check_strong(self),
            "g": check_g_property(self),
            "i": check_i_property(self),
        }


# -- flag checks -----------------------------------------------------------------


def check_strong(T: SchemeTable) -> Verdict:
    claim = f"{T.name} is strong"
    for i, P in enumerate(T.catalog):
        seen: dict = {}
        for xi, eta in T.maps[i].items():
            if eta in seen:
                T.flags["strong"] = False
                return Verdict(
                    claim, "refuted", _bound(T.catalog),
                    {"P": poset_data(P), "xi": list(seen[eta]), "xi2": list(xi), "image": list(eta)},
                    "two homomorphisms share one image",
                )
            seen[eta] = xi
    T.flags["strong"] = True
    return Verdict(claim, "holds", _bound(T.catalog))


def check_g_property(T: SchemeTable) -> Verdict:
    claim = f"{T.name} preserves fibre components"
    for _, P, xi, eta in T.items():
        f1, f2 = fingerprint(P, xi), fingerprint(P, eta)
        if f1 != f2:
            x = next(x for x in range(P.n) if f1[x] != f2[x])
            T.flags["g"] = False
            return Verdict(
                claim, "refuted", _bound(T.catalog),
                {"P": poset_data(P), "xi": list(xi), "image": list(eta), "x": x,
                 "component": mask_list(f1[x]), "image_component": mask_list(f2[x])},
                "fibre component changed",
            )
    T.flags["g"] = True
    return Verdict(claim, "holds", _bound(T.catalog))


def check_i_property(T: SchemeTable, cap: int = DEFAULT_I_CAP) -> Verdict:
    """Transfer of ``<+``/``=`` between EV-images, over all catalog pairs.

    Occurrences are grouped by source EV-value, so the pair scan is quadratic
    in the number of distinct values rather than in the number of homs.
    """
    claim = f"{T.name} is image-controlled"
    image_of: dict[EvElement, tuple[EvElement, dict]] = {}
    seen = 0
    for _, P, xi, eta in T.items():
        src, dst = ev_images(P, xi), ev_images(P, eta)
        seen += P.n
        if seen > cap:
            raise ComplexityCapExceeded(f"I-check exceeded {cap} evaluated points")
        for x in range(P.n):
            where = {"P": poset_data(P), "xi": list(xi), "image": list(eta), "x": x}
            prev = image_of.get(src[x])
            if prev is None:
                image_of[src[x]] = (dst[x], where)
            elif prev[0] != dst[x]:
                T.flags["i"] = False
                return Verdict(
                    claim, "refuted", _bound(T.catalog),
                    {"case": "equal", "value": ev_data(src[x]), "first": prev[1], "second": where,
                     "images": [ev_data(prev[0]), ev_data(dst[x])]},
                    "equal EV-images are sent to different EV-images",
                )
    values = sorted(image_of)
    for a in values:
        for b in values:
            if lt_plus(a, b) and not lt_plus(image_of[a][0], image_of[b][0]):
                T.flags["i"] = False
                return Verdict(
                    claim, "refuted", _bound(T.catalog),
                    {"case": "strict", "lower": ev_data(a), "upper": ev_data(b),
                     "first": image_of[a][1], "second": image_of[b][1]},
                    "a <+ pair of EV-images is not preserved",
                )
    T.flags["i"] = True
    return Verdict(claim, "holds", _bound(T.catalog))


# -- basic builders ----------------------------------------------------------------


def scheme_from_injection(sigma: Sequence[int], R: Poset, S: Poset, catalog: Catalog) -> SchemeTable:
    """``rho_P(xi) = sigma o xi`` for an injective homomorphism sigma."""
    sigma = tuple(sigma)
    if len(sigma) != R.n or len(set(sigma)) != R.n or not is_hom(R, S, sigma):
        raise NotInjective("sigma must be an injective homomorphism R -> S")
    return SchemeTable.from_rule(
        R, S, catalog, lambda P, xi: tuple(sigma[v] for v in xi), name=f"sigma{list(sigma)}"
    )


def scheme_from_ev_map(eps: EvMap, R: Poset, S: Poset, catalog: Catalog) -> SchemeTable:
    """``eta(xi)(x) = eps(ev_image(xi, x)).base``."""

    def rule(P: Poset, xi: tuple) -> tuple:
        return tuple(eps(ev_image(P, xi, x)).base for x in range(P.n))

    return SchemeTable.from_rule(R, S, catalog, rule, name="eta")


def ordered_injection_scheme(R: Poset, S: Poset, catalog: Catalog) -> SchemeTable:
    """Send the i-th hom of ``H(P,R)`` to the i-th hom of ``H(P,S)`` (lexicographic order)."""
    maps = {}
    for i, P in enumerate(catalog):
        src, dst = enumerate_homs(P, R), enumerate_homs(P, S)
        if len(src) > len(dst):
            raise NotInjective(f"#H(P,R)={len(src)} > #H(P,S)={len(dst)} at catalog poset #{i}")
        maps[i] = dict(zip(src, dst))
    return SchemeTable(R, S, catalog, maps, name="ordered")


def fingerprint_scheme(R: Poset, S: Poset, catalog: Catalog) -> SchemeTable:
    """Match homs fingerprint class by fingerprint class; a G-scheme when it exists."""
    maps = {}
    for i, P in enumerate(catalog):
        groups_s: dict = {}
        for eta in enumerate_homs(P, S):
            groups_s.setdefault(fingerprint(P, eta), []).append(eta)
        groups_r: dict = {}
        for xi in enumerate_homs(P, R):
            groups_r.setdefault(fingerprint(P, xi), []).append(xi)
        m = {}
        for fp, homs in groups_r.items():
            targets = groups_s.get(fp, [])
            if len(homs) > len(targets):
                raise NotInjective(f"fingerprint class too small in H(P,S) at catalog poset #{i}")
            m.update(zip(homs, targets))
        maps[i] = m
    return SchemeTable(R, S, catalog, maps, name="fingerprint")


# -- calculation rules ---------------------------------------------------------------


def extend_connected(T_conn: SchemeTable, catalog: Catalog, name: str | None = None) -> SchemeTable:
    """Extend a table given on connected posets to all of ``catalog`` componentwise."""

    def rule(P: Poset, xi: tuple) -> tuple:
        parts = []
        for K in components(P):
            sub = induced(P, K)
            try:
                parts.append((K, T_conn.apply(sub, restrict_hom(xi, K), allow_rule=False)))
            except OutsideCatalog as exc:
                raise MissingComponentPoset(f"component of size {sub.n} is not covered") from exc
        return union_homs(P.n, parts)

    return SchemeTable.from_rule(
        T_conn.source, T_conn.target, catalog, rule, name or f"ext({T_conn.name})"
    )


def dual_scheme(T: SchemeTable) -> SchemeTable:
    """``rho^d_P = rho_{P^d}``, a table from ``R^d`` to ``S^d``."""
    for P in T.catalog:
        if T.catalog.position(dual(P)) is None:
            raise CatalogNotDualClosed("catalog is not closed under duality")
    return SchemeTable.from_rule(
        dual(T.source), dual(T.target), T.catalog,
        lambda P, xi: T.apply(dual(P), xi), name=f"dual({T.name})",
    )


def dirsum_scheme(T1: SchemeTable, T2: SchemeTable) -> SchemeTable:
    """Table from ``R1+R2`` to ``S1+S2`` acting as T1 or T2 on each connected piece."""
    r1, s1 = T1.source.n, T1.target.n
    R = direct_sum(T1.source, T2.source)
    S = direct_sum(T1.target, T2.target)
    conn = connected_only(T1.catalog)

    def on_connected(P: Poset, xi: tuple) -> tuple:
        if all(v < r1 for v in xi):
            return T1.apply(P, xi)
        if all(v >= r1 for v in xi):
            return tuple(v + s1 for v in T2.apply(P, tuple(v - r1 for v in xi)))
        raise InvariantViolated("connected poset mapped into both summands")

    T_conn = SchemeTable.from_rule(R, S, conn, on_connected, "conn")
    return extend_connected(T_conn, T1.catalog, name=f"({T1.name}+{T2.name})")


def prod_scheme(T1: SchemeTable, T2: SchemeTable) -> SchemeTable:
    """``(xi1, xi2) -> (rho1(xi1), rho2(xi2))`` with pairs indexed as ``a*|second|+b``."""
    r2, s2 = T2.source.n, T2.target.n
    R = product(T1.source, T2.source)
    S = product(T1.target, T2.target)

    def rule(P: Poset, xi: tuple) -> tuple:
        first = T1.apply(P, tuple(v // r2 for v in xi))
        second = T2.apply(P, tuple(v % r2 for v in xi))
        return tuple(a * s2 + b for a, b in zip(first, second))

    return SchemeTable.from_rule(R, S, T1.catalog, rule, name=f"({T1.name}x{T2.name})")


def homset_scheme(T: SchemeTable, Q: Poset) -> SchemeTable:
    """``tau_P(xi) = rho_Q o xi`` from ``H(Q,R)`` to ``H(Q,S)``.

    Raises InvariantViolated when ``rho_Q`` is not order preserving on
    ``H(Q,R)``, since ``rho_Q o xi`` then fails to be a homomorphism.
    """
    HR, HS = hom_poset(Q, T.source), hom_poset(Q, T.target)
    homs_r, homs_s = enumerate_homs(Q, T.source), enumerate_homs(Q, T.target)
    pos_s = {h: i for i, h in enumerate(homs_s)}
    step = tuple(pos_s[T.apply(Q, h)] for h in homs_r)
    if not is_hom(HR, HS, step):
        raise InvariantViolated("rho_Q is not order preserving on H(Q,R); rho_Q o xi is no homomorphism")
    return SchemeTable.from_rule(
        HR, HS, T.catalog, lambda P, xi: tuple(step[v] for v in xi), name=f"H(Q,{T.name})"
    )


# -- bounded order checks -------------------------------------------------------------


def check_hom_order(R: Poset, S: Poset, catalog: Catalog, budget: int | None = None) -> Verdict:
    """``#H(P,R) <= #H(P,S)`` for every catalog P; the witness is the first (smallest) violator."""
    claim = "R below S (hom counts)"
    for P in catalog:
        a, b = count_homs(P, R, budget=budget), count_homs(P, S, budget=budget)
        if a > b:
            return Verdict(claim, "refuted", _bound(catalog),
                           {"P": poset_data(P), "count_R": a, "count_S": b}, f"{a} > {b}")
    return Verdict(claim, "holds", _bound(catalog))


def check_g_order(R: Poset, S: Poset, catalog: Catalog, budget: int | None = None) -> Verdict:
    """``#S(P,R) <= #S(P,S)`` for connected catalog P.

    Among all violators the reported witness has the smallest strict count
    into S (ties: catalog order); every violator is listed as well.
    """
    claim = "R below S (strict counts, connected P)"
    bad = []
    for P in catalog:
        if not is_connected(P):
            continue
        a, b = count_strict(P, R, budget=budget), count_strict(P, S, budget=budget)
        if a > b:
            bad.append((b, len(bad), P, a))
    if not bad:
        return Verdict(claim, "holds", _bound(catalog))
    b, _, P, a = min(bad, key=lambda t: (t[0], t[1]))
    return Verdict(
        claim, "refuted", _bound(catalog),
        {"P": poset_data(P), "count_R": a, "count_S": b,
         "all": [{"P": poset_data(Q), "count_R": x, "count_S": y} for y, _, Q, x in bad]},
        f"{a} > {b}",
    )


@dataclass
class _Group:
    poset: Poset
    points: tuple[int, ...]  # EV indices of alpha(xi)(x), x in P


def _alpha_groups(ER: EvSystem, R: Poset, catalog: Catalog) -> list[_Group]:
    groups: dict = {}
    for P in catalog:
        for xi in enumerate_homs(P, R):
            pts = tuple(ER.index[a] for a in ev_images(P, xi))
            groups.setdefault((P.up, pts), _Group(P, pts))
    return list(groups.values())


def _group_ok(g: _Group, images: Sequence[EvElement]) -> bool:
    # eta(x) = eps(alpha(x)).base must reproduce eps(alpha(x)) as its own EV-image
    P = g.poset
    eta = tuple(images[k].base for k in g.points)
    return all(ev_image(P, eta, x) == images[k] for x, k in enumerate(g.points))


def validate_ev_map(eps: EvMap, R: Poset, S: Poset, catalog: Catalog) -> Verdict:
    """Injective ``<+``-homomorphism satisfying the EV-image identity on the catalog."""
    claim = "EV-map certifies an image-controlled scheme"
    if not eps.is_total() or not eps.in_target():
        return Verdict(claim, "refuted", _bound(catalog), {"reason": "not a total map into E(S)"})
    if not eps.is_injective():
        return Verdict(claim, "refuted", _bound(catalog), {"reason": "not injective"})
    bad = eps.strictness_violation()
    if bad is not None:
        return Verdict(claim, "refuted", _bound(catalog),
                       {"reason": "<+ not preserved", "pair": [ev_data(bad[0]), ev_data(bad[1])]})
    ER = eps.source
    images = [eps(a) for a in ER.elements]
    for g in _alpha_groups(ER, R, catalog):
        if not _group_ok(g, images):
            return Verdict(claim, "refuted", _bound(catalog),
                           {"reason": "EV-image identity fails", "P": poset_data(g.poset),
                            "points": [ev_data(ER.elements[k]) for k in g.points]})
    return Verdict(claim, "holds", _bound(catalog))


def search_ev_map(
    R: Poset,
    S: Poset,
    catalog: Catalog,
    *,
    cap: int = DEFAULT_EV_CAP,
    budget: int | None = None,
) -> EvMap | None:
    """Backtracking search for an EV-map accepted by :func:`validate_ev_map`."""
    ER, ES = build_ev(R, cap), build_ev(S, cap)
    nR = len(ER)
    if nR > len(ES):
        return None
    succR, predR, succS, predS = ER.succ, ER.pred, ES.succ, ES.pred
    pc = lambda m: bin(m).count("1")  # noqa: E731
    degR = [(pc(succR[i]), pc(predR[i])) for i in range(nR)]
    degS = [(pc(succS[j]), pc(predS[j])) for j in range(len(ES))]

    # most constrained first, then grow along <+ neighbours
    order: list[int] = []
    placed = 0
    remaining = set(range(nR))
    while remaining:
        def score(i):
            nb = pc((succR[i] | predR[i]) & placed)
            return (-nb, -(degR[i][0] + degR[i][1]), i)
        i = min(remaining, key=score)
        order.append(i)
        placed |= 1 << i
        remaining.discard(i)
    rank = {i: k for k, i in enumerate(order)}

    groups = _alpha_groups(ER, R, catalog)
    checks_at: list[list[_Group]] = [[] for _ in range(nR)]
    for g in groups:
        checks_at[max(rank[k] for k in g.points)].append(g)

    cand_base = []
    for i in order:
        a = ER.elements[i]
        cands = [j for j in range(len(ES)) if degS[j][0] >= degR[i][0] and degS[j][1] >= degR[i][1]]
        own = ES.index.get(a)
        if own in cands:
            cands.remove(own)
            cands.insert(0, own)
        cand_base.append(cands)

    assign = [-1] * nR
    used = 0
    images: list = [None] * nR
    left = [DEFAULT_BUDGET if budget is None else budget]

    def rec(k: int) -> bool:
        nonlocal used
        if k == nR:
            return True
        i = order[k]
        for j in cand_base[k]:
            left[0] -= 1
            if left[0] < 0:
                raise SearchBudgetExceeded("EV-map search exceeded its budget")
            if used >> j & 1:
                continue
            ok = True
            for b in bits(succR[i]):
                if assign[b] >= 0 and not succS[j] >> assign[b] & 1:
                    ok = False
                    break
            if ok:
                for b in bits(predR[i]):
                    if assign[b] >= 0 and not predS[j] >> assign[b] & 1:
                        ok = False
                        break
            if not ok:
                continue
            assign[i] = j
            images[i] = ES.elements[j]
            used |= 1 << j
            if all(_group_ok(g, images) for g in checks_at[k]) and rec(k + 1):
                return True
            used &= ~(1 << j)
            assign[i] = -1
            images[i] = None
        return False

    if not rec(0):
        return None
    return EvMap(ER, ES, {ER.elements[i]: ES.elements[assign[i]] for i in range(nR)})


def check_i_order(
    R: Poset, S: Poset, catalog: Catalog, *, cap: int = DEFAULT_EV_CAP, budget: int | None = None
) -> tuple[Verdict, EvMap | None]:
    claim = "R below S (image-controlled)"
    nR, nS = len(build_ev(R, cap)), len(build_ev(S, cap))
    if nR > nS:
        return Verdict(claim, "refuted", _bound(catalog),
                       {"size_E_R": nR, "size_E_S": nS}, f"|E(R)|={nR} > |E(S)|={nS}, no injection"), None
    eps = search_ev_map(R, S, catalog, cap=cap, budget=budget)
    if eps is None:
        return Verdict(claim, "refuted", _bound(catalog),
                       {"size_E_R": nR, "size_E_S": nS}, "exhaustive search found no admissible EV-map"), None
    mapping = [[ev_data(a), ev_data(eps(a))] for a in eps.source.elements]
    return Verdict(claim, "holds", _bound(catalog), {"ev_map": mapping}), eps
