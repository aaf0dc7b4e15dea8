"""Cancellation pipelines for direct sums, ordinal sums and products.

Each pipeline turns data for ``Q * R -> Q * S`` into data for ``R -> S`` and
asserts the intermediate facts its correctness argument relies on.  A failed
assertion raises InvariantViolated with the offending objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lcm
from typing import Callable, Hashable, Mapping, Sequence

from .catalog import Catalog
from .errors import (
    ComplexityCapExceeded,
    ConstantsNotPreserved,
    CycleConditionViolated,
    DisjointnessViolated,
    FirstComponentNotInjective,
    InvariantViolated,
    NotInjective,
    PremiseFailed,
)
from .ev import (
    EvMap,
    build_ev,
    decorated_summand,
    lift_upper,
    lt_plus,
    leq_plus,
    strip_lower,
    swap_cones,
)
from .homs import (
    EvElement,
    constant_hom,
    count_homs,
    count_strict,
    enumerate_homs,
    enumerate_strict,
    ev_image,
    ev_images,
    fiber_component,
    fingerprint,
    is_constant,
)
from .poset import (
    Poset,
    bits,
    direct_sum,
    disjoint_copies,
    down_strict,
    dual,
    is_connected,
    is_strict_hom,
    ordinal_sum,
    up_strict,
)
from .schemes import (
    SchemeTable,
    Verdict,
    _bound,
    check_g_property,
    check_i_property,
    check_strong,
    poset_data,
    validate_ev_map,
)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvariantViolated(msg)


@dataclass
class IterationTrace:
    """``start`` followed by its iterates; ``depth`` is the index of the terminal iterate."""

    start: Hashable
    iterates: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.iterates)

    @property
    def end(self):
        return self.iterates[-1]


# -- set-theoretic iteration for direct sums ---------------------------------------


def iterate_injection(f: Mapping, b: Hashable, A: set, C: set) -> IterationTrace:
    """Apply f to b until the orbit leaves A; it must then be in C.

    ``f`` is an injective map on ``A | B`` into ``A | C`` with A, B, C pairwise
    disjoint and ``b`` in B.  The depth never exceeds ``|A| + 1``.
    """
    if A & C or b in A or b in C:
        raise DisjointnessViolated("A, B and C must be pairwise disjoint")
    trace = IterationTrace(b)
    cur = b
    for _ in range(len(A) + 1):
        cur = f[cur]
        trace.iterates.append(cur)
        if cur in C:
            return trace
        if cur not in A:
            raise DisjointnessViolated(f"iterate {cur!r} lies outside A and C")
    raise InvariantViolated("orbit stayed in A longer than |A| steps; f is not injective")


def iterate_all(f: Mapping, B: Sequence, A: set, C: set) -> tuple[dict, dict]:
    """Terminal map ``F: B -> C`` and the depth of every b; F is checked to be injective."""
    if len(set(f.values())) != len(f):
        raise NotInjective("f is not injective")
    if set(B) & (A | C):
        raise DisjointnessViolated("B meets A or C")
    F, depth = {}, {}
    for b in B:
        t = iterate_injection(f, b, A, C)
        F[b], depth[b] = t.end, t.depth
    _require(len(set(F.values())) == len(F), "terminal map is not injective")
    return F, depth


# -- direct sums ---------------------------------------------------------------------


def _shift_down(a: EvElement, k: int) -> EvElement:
    return EvElement(a.base - k, a.down >> k, a.up >> k)


@dataclass
class DirsumCancellation:
    ev_map: EvMap
    depth: dict
    verdict: Verdict


def dirsum_cancel(eps: EvMap, Q: Poset, R: Poset, S: Poset, catalog: Catalog) -> DirsumCancellation:
    """From ``eps: E(Q+R) -> E(Q+S)`` build ``E(R) -> E(S)`` by iterating eps out of E(Q)."""
    m = Q.n
    _require(eps.source.source == direct_sum(Q, R), "eps must start at E(Q+R)")
    _require(eps.target.source == direct_sum(Q, S), "eps must end at E(Q+S)")
    if not eps.is_injective():
        raise NotInjective("eps is not injective")
    # tag points so that the three sets are disjoint
    tag = lambda a, side: ("Q", a) if a.base < m else (side, a)  # noqa: E731
    f = {tag(a, "R"): tag(eps(a), "S") for a in eps.source.elements}
    A = {("Q", a) for a in eps.source.elements if a.base < m}
    B = [("R", a) for a in eps.source.elements if a.base >= m]
    C = {("S", a) for a in eps.target.elements if a.base >= m}
    F, depth_tagged = iterate_all(f, B, A, C)

    ER, ES = build_ev(R), build_ev(S)
    mapping, depth = {}, {}
    for (_, a), (_, img) in F.items():
        mapping[_shift_down(a, m)] = _shift_down(img, m)
        depth[_shift_down(a, m)] = depth_tagged[("R", a)]
    E = EvMap(ER, ES, mapping)
    for a, b in ER.lt_pairs():
        _require(depth[a] == depth[b], f"comparable points {a}, {b} have different depths")
    _require(E.is_total() and E.in_target() and E.is_injective(), "E is not an injection into E(S)")
    _require(E.strictness_violation() is None, "E does not preserve <+")
    verdict = validate_ev_map(E, R, S, catalog)
    verdict.claim = "direct-sum cancellation yields an admissible EV-map"
    return DirsumCancellation(E, depth, verdict)


def dirsum_cancel_counts(Q: Poset, R: Poset, S: Poset, catalog: Catalog) -> Verdict:
    """Counting form: hom (and strict) inequalities for ``Q+R`` vs ``Q+S`` imply those for R vs S on connected P."""
    claim = "direct-sum cancellation (counts)"
    QR, QS = direct_sum(Q, R), direct_sum(Q, S)
    for P in catalog:
        if not is_connected(P):
            continue
        for counter, kind in ((count_homs, "hom"), (count_strict, "strict")):
            big_r, big_s = counter(P, QR), counter(P, QS)
            q, r, s = counter(P, Q), counter(P, R), counter(P, S)
            _require(big_r == q + r and big_s == q + s, f"{kind} counts do not split over the sum")
            if big_r <= big_s and r > s:
                return Verdict(claim, "refuted", _bound(catalog), {"kind": kind, "r": r, "s": s})
    return Verdict(claim, "holds", _bound(catalog))


# -- ordinal sums ----------------------------------------------------------------------


def _check_ordsum_map(eps: EvMap, Q: Poset, R: Poset, S: Poset) -> None:
    _require(eps.source.source == ordinal_sum(Q, R), "eps must start at E(Q (+) R)")
    _require(eps.target.source == ordinal_sum(Q, S), "eps must end at E(Q (+) S)")


def ordsum_cancel_premise(eps: EvMap, Q: Poset, R: Poset, S: Poset) -> bool:
    """Every element of Q is the base of some eps-image of the decorated copy of E(Q)."""
    _check_ordsum_map(eps, Q, R, S)
    starred = decorated_summand(Q, R, "lower", eps.source)
    bases = {eps(a).base for a in starred}
    return all(y in bases for y in range(Q.n))


def _in_starred_target(Q: Poset, a: EvElement) -> bool:
    return a.base >= Q.n and a.down & Q.full == Q.full


def ordsum_cancel_ev_map(eps: EvMap, Q: Poset, R: Poset, S: Poset) -> EvMap:
    """``strip o eps o lift``: the EV-map ``E(R) -> E(S)``; needs the premise."""
    if not ordsum_cancel_premise(eps, Q, R, S):
        raise PremiseFailed("Q is not covered by bases of eps applied to the decorated E(Q)")
    ER, ES = build_ev(R), build_ev(S)
    mapping = {}
    for a in ER.elements:
        img = eps(lift_upper(Q, a))
        _require(_in_starred_target(Q, img), f"eps(lift({a})) is not in the decorated E(S)")
        mapping[a] = strip_lower(Q, img)
    return EvMap(ER, ES, mapping)


def ordsum_cancel_check(eps: EvMap, Q: Poset, R: Poset, S: Poset, catalog: Catalog) -> tuple[EvMap, Verdict]:
    """Run the ordinal-sum pipeline and assert every intermediate identity."""
    _check_ordsum_map(eps, Q, R, S)
    m = Q.n
    # images of the decorated E(R) always have bases in S
    for a in decorated_summand(Q, R, "upper", eps.source):
        _require(eps(a).base >= m, f"eps({a}) has a base in Q")
    T = ordsum_cancel_ev_map(eps, Q, R, S)
    _require(T.is_total() and T.in_target() and T.is_injective(), "T is not injective into E(S)")
    _require(T.strictness_violation() is None, "T does not preserve <+")

    lifted = lambda P, xi, y: eps(lift_upper(Q, ev_image(P, xi, y)))  # noqa: E731
    for P in catalog:
        for xi in enumerate_homs(P, R):
            for x in range(P.n):
                G = fiber_component(P, xi, x)
                img = lifted(P, xi, x)
                below = {lifted(P, xi, y).base for y in bits(down_strict(P, G))}
                above = {lifted(P, xi, y).base for y in bits(up_strict(P, G))}
                Y = set(range(m))
                _require(not (below & Y), "down-set identity: the two parts overlap")
                _require(set(bits(img.down)) == below | Y, "down-set identity fails")
                _require(set(bits(img.up)) == above, "up-set identity fails")
    verdict = validate_ev_map(T, R, S, catalog)
    verdict.claim = "ordinal-sum cancellation yields an admissible EV-map"
    return T, verdict


def _lower_first(lower: Poset, upper: Poset) -> list[int]:
    # index map from dual(upper (+) lower) to dual(lower) (+) dual(upper): swap the blocks
    u, l = upper.n, lower.n
    return [i + l if i < u else i - u for i in range(u + l)]


def _relabel(a: EvElement, perm: Sequence[int]) -> EvElement:
    def img(mask: int) -> int:
        return sum(1 << perm[x] for x in bits(mask))

    return EvElement(perm[a.base], img(a.down), img(a.up))


def ordsum_cancel_dual(eps: EvMap, Q: Poset, R: Poset, S: Poset, catalog: Catalog) -> tuple[EvMap, Verdict]:
    """The mirrored statement for ``R (+) Q -> S (+) Q``, by dualising and reusing the pipeline."""
    _require(eps.source.source == ordinal_sum(R, Q), "eps must start at E(R (+) Q)")
    _require(eps.target.source == ordinal_sum(S, Q), "eps must end at E(S (+) Q)")
    Qd, Rd, Sd = dual(Q), dual(R), dual(S)
    pr, ps = _lower_first(Qd, Rd), _lower_first(Qd, Sd)
    inv_r = {v: i for i, v in enumerate(pr)}
    src, dst = build_ev(ordinal_sum(Qd, Rd)), build_ev(ordinal_sum(Qd, Sd))
    mapping = {}
    for a in src.elements:
        back = swap_cones(_relabel(a, [inv_r[i] for i in range(len(pr))]))
        mapping[a] = _relabel(swap_cones(eps(back)), ps)
    eps_d = EvMap(src, dst, mapping)
    if not ordsum_cancel_premise(eps_d, Qd, Rd, Sd):
        raise PremiseFailed("Q is not covered by bases of eps applied to the decorated E(Q)")
    Td, _ = ordsum_cancel_check(eps_d, Qd, Rd, Sd, catalog)
    ER, ES = build_ev(R), build_ev(S)
    T = EvMap(ER, ES, {a: swap_cones(Td(swap_cones(a))) for a in ER.elements})
    verdict = validate_ev_map(T, R, S, catalog)
    verdict.claim = "dual ordinal-sum cancellation yields an admissible EV-map"
    return T, verdict


def _longest_chain(Q: Poset) -> list[int]:
    best: dict[int, list[int]] = {}
    for x in Q.linear_extension:
        below = [best[y] for y in bits(Q.down_strict[x])]
        best[x] = max(below, key=len, default=[]) + [x]
    return max(best.values(), key=len)


def ordsum_cancel_g_evidence(
    T: SchemeTable, Q: Poset, R: Poset, S: Poset, P: Poset, k_max: int
) -> Verdict:
    """Counting evidence for ``R below_G S`` from a G-table ``Q (+) R -> Q (+) S``.

    For each xi in ``H(P,R)`` and k up to ``k_max`` the set M_k of strict
    self-maps of Q glued to k maps from xi's fingerprint class is pushed
    through T on ``Q (+) kP``; the structural facts of the argument are
    asserted and the inequality ``#S(Q,Q)*g_R^k <= #S(Q,Q(+)S)*g_S^k`` checked.
    """
    claim = "ordinal-sum cancellation, G-counting evidence"
    m = Q.n
    _require(T.source == ordinal_sum(Q, R) and T.target == ordinal_sum(Q, S), "table has the wrong operands")
    QS = ordinal_sum(Q, S)
    strict_qq = enumerate_strict(Q, Q)
    n_strict_qs = count_strict(Q, QS)
    chain_q = _longest_chain(Q)
    homs_r, homs_s = enumerate_homs(P, R), enumerate_homs(P, S)
    rows = []
    for xi in homs_r:
        fp = fingerprint(P, xi)
        gamma_r = [h for h in homs_r if fingerprint(P, h) == fp]
        gamma_s = {h for h in homs_s if fingerprint(P, h) == fp}
        for k in range(1, k_max + 1):
            K = ordinal_sum(Q, disjoint_copies(P, k))
            images = set()
            n_m = 0
            for zeta in strict_qq:
                for chis in _tuples(gamma_r, k):
                    theta = tuple(zeta) + tuple(v + m for chi in chis for v in chi)
                    n_m += 1
                    out = T.apply(K, theta)
                    _require(is_strict_hom(Q, QS, out[:m]), "image restricted to Q is not strict")
                    _require(all(QS.lt(out[a], out[b]) for a, b in zip(chain_q, chain_q[1:])),
                             "maximal chain image not strict")
                    _require(all(v >= m for v in out[m:]), "copies of P are not mapped into S")
                    for j in range(k):
                        part = tuple(v - m for v in out[m + j * P.n : m + (j + 1) * P.n])
                        _require(part in gamma_s, "a copy leaves the fingerprint class in H(P,S)")
                    images.add(out)
            _require(n_m == len(strict_qq) * len(gamma_r) ** k, "size of M_k is off")
            _require(len(images) == n_m, "table is not injective on M_k")
            rhs = n_strict_qs * len(gamma_s) ** k
            _require(n_m <= rhs, f"counting inequality fails: {n_m} > {rhs}")
            rows.append({"xi": list(xi), "k": k, "M_k": n_m, "bound": rhs,
                         "gamma_R": len(gamma_r), "gamma_S": len(gamma_s)})
    return Verdict(claim, "holds", f"k<={k_max}, P size {P.n}", {"rows": rows})


def _tuples(items: list, k: int):
    if k == 0:
        yield ()
        return
    for head in items:
        for rest in _tuples(items, k - 1):
            yield (head,) + rest


# -- products ----------------------------------------------------------------------------


def product_cycle(f: Callable, g: Callable, A: Sequence, a0: Hashable, b: Hashable) -> IterationTrace:
    """Iterate ``a -> g(f(a, b))`` from a0 until a0 comes back.

    The step must be injective on A for this b; that is checked first by a full
    scan and CycleConditionViolated is raised otherwise.
    """
    step = {a: g(f(a, b)) for a in A}
    if len(set(step.values())) != len(step):
        raise CycleConditionViolated(f"a -> g(f(a, {b!r})) is not injective")
    trace = IterationTrace(a0)
    cur = a0
    for _ in range(len(step)):
        cur = step[cur]
        trace.iterates.append(cur)
        if cur == a0:
            return trace
    raise InvariantViolated("cycle did not return to its start")


def _pair(q_hom: Sequence[int], r_hom: Sequence[int], nR: int) -> tuple:
    return tuple(a * nR + b for a, b in zip(q_hom, r_hom))


def _first(hom: Sequence[int], nS: int) -> tuple:
    return tuple(v // nS for v in hom)


def _second(hom: Sequence[int], nS: int) -> tuple:
    return tuple(v % nS for v in hom)


def check_first_component_injective(T: SchemeTable, Q: Poset, R: Poset, S: Poset) -> Verdict:
    """For fixed theta, distinct xi give distinct first components of ``rho(xi, theta)``."""
    claim = "first component of the product table is injective in the Q-part"
    for P in T.catalog:
        homs_q = enumerate_homs(P, Q)
        for theta in enumerate_homs(P, R):
            seen: dict = {}
            for xi in homs_q:
                first = _first(T.apply(P, _pair(xi, theta, R.n)), S.n)
                if first in seen:
                    return Verdict(claim, "refuted", _bound(T.catalog),
                                   {"P": poset_data(P), "theta": list(theta), "xi": list(seen[first]),
                                    "zeta": list(xi), "first": list(first)})
                seen[first] = xi
    return Verdict(claim, "holds", _bound(T.catalog))


def check_constants_preserved(T: SchemeTable, Q: Poset, R: Poset, S: Poset) -> Verdict:
    """A constant Q-part is sent to a constant Q-part."""
    claim = "product table keeps constant first components constant"
    for P in T.catalog:
        for q in range(Q.n):
            for theta in enumerate_homs(P, R):
                xi = _pair(constant_hom(P, q), theta, R.n)
                first = _first(T.apply(P, xi), S.n)
                if not is_constant(first):
                    return Verdict(claim, "refuted", _bound(T.catalog),
                                   {"P": poset_data(P), "q": q, "theta": list(theta), "first": list(first)})
    return Verdict(claim, "holds", _bound(T.catalog))


def first_component_orbit(
    T: SchemeTable, Q: Poset, R: Poset, S: Poset, q: int, P: Poset, xi: Sequence[int], steps: int | None = None
) -> IterationTrace:
    """Orbit of the constant map at q under ``phi -> rho(phi, xi)_1``.

    The trace holds the Q-parts phi^1, phi^2, ... and stops at the first return
    to the constant (or after ``steps`` iterates when given).  Along the way the
    fingerprint of ``(phi^i, xi)`` is asserted to equal that of xi.
    """
    xi = tuple(xi)
    c = constant_hom(P, q)
    fp = fingerprint(P, xi)
    limit = len(enumerate_homs(P, Q))
    trace = IterationTrace(c)
    cur = c
    while True:
        _require(fingerprint(P, _pair(cur, xi, R.n)) == fp, "fingerprint changed along the orbit")
        cur = _first(T.apply(P, _pair(cur, xi, R.n)), S.n)
        trace.iterates.append(cur)
        if steps is not None:
            if len(trace.iterates) >= steps:
                return trace
        elif cur == c:
            return trace
        else:
            _require(len(trace.iterates) <= limit, "orbit did not return to the constant map")


def _orbit_state(trace: IterationTrace, i: int) -> tuple:
    return trace.start if i == 0 else trace.iterates[i - 1]


def product_cancel_scheme(
    T: SchemeTable, Q: Poset, R: Poset, S: Poset, q: int = 0, variant: str = "G", periods: int = 3
) -> SchemeTable:
    """``tau_P(xi) = rho(Phi^{n-1}(xi))_2`` where n is the return time of the orbit."""
    v = check_first_component_injective(T, Q, R, S)
    if v.refuted:
        raise FirstComponentNotInjective(str(v.witness))
    if variant == "I":
        v = check_constants_preserved(T, Q, R, S)
        if v.refuted:
            raise ConstantsNotPreserved(str(v.witness))
    elif variant != "G":
        raise ValueError("variant must be 'G' or 'I'")

    cache: dict = {}

    def orbit(P: Poset, xi: tuple) -> IterationTrace:
        key = (P.up, xi)
        if key not in cache:
            cache[key] = first_component_orbit(T, Q, R, S, q, P, xi)
        return cache[key]

    def rule(P: Poset, xi: tuple) -> tuple:
        tr = orbit(P, xi)
        n = tr.depth
        long = first_component_orbit(T, Q, R, S, q, P, xi, steps=periods * n)
        for k in range(1, periods + 1):
            _require(_orbit_state(long, k * n - 1) == _orbit_state(tr, n - 1), "orbit is not periodic")
        out = T.apply(P, _pair(_orbit_state(tr, n - 1), xi, R.n))
        _require(_first(out, S.n) == tr.start, "last step does not return to the constant map")
        return _second(out, S.n)

    tau = SchemeTable.from_rule(R, S, T.catalog, rule, name=f"cancel({T.name})")
    _require(check_strong(tau).holds, "cancelled table is not strong")
    _require(check_g_property(tau).holds, "cancelled table is not a G-table")
    if variant == "I":
        _assert_orbit_coherence(T, Q, R, S, tau, orbit)
        _require(check_i_property(tau).holds, "cancelled table is not image-controlled")
    return tau


def _assert_orbit_coherence(T, Q, R, S, tau, orbit, cap: int = 4_000_000) -> None:
    # related EV-images keep equal constant Q-parts along the orbit and stay related
    points = []
    for P in tau.catalog:
        for xi in enumerate_homs(P, R):
            for x, a in enumerate(ev_images(P, xi)):
                points.append((a, P, xi, x))
    if len(points) ** 2 > cap:
        raise ComplexityCapExceeded("orbit coherence scan too large")
    for a, P, xi, x in points:
        for b, P2, zeta, y in points:
            if not leq_plus(a, b):
                continue
            t1, t2 = orbit(P, xi), orbit(P2, zeta)
            N = lcm(t1.depth, t2.depth)
            l1 = first_component_orbit(T, Q, R, S, q_of(t1), P, xi, steps=N)
            l2 = first_component_orbit(T, Q, R, S, q_of(t2), P2, zeta, steps=N)
            for i in range(N):
                f1, f2 = _orbit_state(l1, i), _orbit_state(l2, i)
                _require(is_constant(f1) and is_constant(f2) and f1[:1] == f2[:1],
                         "Q-parts along related orbits differ")
            s1 = ev_image(P, _pair(_orbit_state(l1, N - 1), xi, R.n), x)
            s2 = ev_image(P2, _pair(_orbit_state(l2, N - 1), zeta, R.n), y)
            if a == b:
                _require(s1 == s2, "equal EV-images separate along the orbit")
            else:
                _require(lt_plus(s1, s2), "<+ pair lost along the orbit")


def q_of(trace: IterationTrace) -> int:
    return trace.start[0]
