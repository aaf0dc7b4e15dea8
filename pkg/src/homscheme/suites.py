"""Verification suites behind ``rules verify``: one report row per claim."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from itertools import product as iproduct
from typing import Callable

from .cancel import (
    check_constants_preserved,
    check_first_component_injective,
    dirsum_cancel,
    dirsum_cancel_counts,
    ordsum_cancel_check,
    ordsum_cancel_dual,
    ordsum_cancel_g_evidence,
    ordsum_cancel_premise,
    product_cancel_scheme,
)
from .catalog import Catalog, load_or_generate
from .errors import InvariantViolated, NotInjective, PremiseFailed
from .ev import ev_map_from_injection
from .homs import count_homs, count_strict, enumerate_homs
from .poset import (
    Poset,
    antichain,
    chain,
    direct_sum,
    induced,
    ordinal_sum,
    product,
    upsets,
)
from .schemes import (
    SchemeTable,
    Verdict,
    _bound,
    check_hom_order,
    dirsum_scheme,
    dual_scheme,
    fingerprint_scheme,
    homset_scheme,
    ordered_injection_scheme,
    prod_scheme,
    scheme_from_injection,
)

SUITES = ("calc", "cancel-dirsum", "cancel-ordsum", "cancel-prod")


@dataclass
class Row:
    claim: str
    status: str
    bound: str
    witness: dict | None
    runtime_ms: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Report:
    suite: str
    rows: list[Row]

    @property
    def refuted(self) -> bool:
        return any(r.status == "refuted" for r in self.rows)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "rows": [r.to_dict() for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        d = json.loads(text)
        return cls(d["suite"], [Row(**r) for r in d["rows"]])

    def to_text(self) -> str:
        """Deterministic text form; runtimes are left out."""
        lines = [f"suite {self.suite}"]
        for r in self.rows:
            lines.append(f"[{r.status.upper()}] {r.claim} ({r.bound})")
            if r.status == "refuted" and r.witness is not None:
                lines.append("  witness: " + json.dumps(r.witness, sort_keys=True))
        return "\n".join(lines) + "\n"


def _timed(fn: Callable[[], Verdict]) -> Row:
    t0 = time.perf_counter()
    v = fn()
    ms = (time.perf_counter() - t0) * 1000.0
    return Row(v.claim, v.status, v.bound, v.witness, round(ms, 3))


OPERANDS = {"A1": antichain(1), "A2": antichain(2), "C2": chain(2)}


def _injections(R: Poset, S: Poset) -> list[tuple]:
    return [h for h in enumerate_homs(R, S) if len(set(h)) == R.n]


def table_pool(catalog: Catalog) -> list[SchemeTable]:
    """Tables between operands of size <= 2: injection tables plus order- and fingerprint-matched ones."""
    pool = []
    for (rn, R), (sn, S) in iproduct(OPERANDS.items(), repeat=2):
        for sigma in _injections(R, S):
            T = scheme_from_injection(sigma, R, S, catalog)
            T.name = f"{rn}->{sn} sigma{list(sigma)}"
            pool.append(T)
        for build, tag in ((ordered_injection_scheme, "ordered"), (fingerprint_scheme, "fingerprint")):
            try:
                T = build(R, S, catalog)
            except NotInjective:
                continue
            T.name = f"{rn}->{sn} {tag}"
            pool.append(T)
    for T in pool:
        T.check_all()
    return pool


def _implies(pre: bool, post: bool) -> bool:
    return (not pre) or post


def _flag_rule(claim: str, catalog: Catalog, cases, claimed: dict[str, Callable]) -> Verdict:
    """``cases`` yields ``(label, inputs, result_table)``; each claimed flag must follow from the inputs."""
    n = 0
    for label, inputs, res in cases:
        res.check_all()
        n += 1
        for flag, premise in claimed.items():
            if not _implies(premise(inputs), bool(res.flags[flag])):
                return Verdict(claim, "refuted", _bound(catalog),
                               {"case": label, "flag": flag,
                                "inputs": [dict(T.flags) for T in inputs], "result": dict(res.flags)})
    return Verdict(claim, "holds", _bound(catalog) + f", {n} tables")


def _all(flag):
    return lambda ts: all(T.flags[flag] for T in ts)


def _calc_dual(catalog: Catalog, pool) -> Verdict:
    claim = "dual tables keep exactly the flags of the original"
    for T in pool:
        D = dual_scheme(T)
        D.check_all()
        if D.flags != T.flags:
            return Verdict(claim, "refuted", _bound(catalog), {"table": T.name, "flags": T.flags, "dual": D.flags})
        if T.name.split()[-1].startswith("sigma"):
            DD = dual_scheme(D)
            if DD.maps != T.maps:
                return Verdict(claim, "refuted", _bound(catalog), {"table": T.name, "reason": "double dual differs"})
    return Verdict(claim, "holds", _bound(catalog) + f", {len(pool)} tables")


def _calc_dirsum(catalog: Catalog, pool) -> Verdict:
    cases = ((f"{a.name} + {b.name}", (a, b), dirsum_scheme(a, b)) for a in pool for b in pool)
    return _flag_rule("direct sums of tables inherit strong, G and I", catalog, cases,
                      {"strong": _all("strong"), "g": _all("g"), "i": _all("i")})


def _calc_prod(catalog: Catalog, pool) -> Verdict:
    cases = ((f"{a.name} x {b.name}", (a, b), prod_scheme(a, b)) for a in pool for b in pool)
    return _flag_rule("products of tables inherit strong and G", catalog, cases,
                      {"strong": _all("strong"), "g": _all("g")})


def _calc_homsets(catalog: Catalog, pool) -> Verdict:
    claim = "tables on hom posets built from a strong table are strong G-tables"
    n = skipped = 0
    for T in pool:
        if not T.flags["strong"]:
            continue
        for qn, Q in OPERANDS.items():
            try:
                H = homset_scheme(T, Q)
            except InvariantViolated:
                skipped += 1  # rho_Q not monotone: the composite is not a homomorphism
                continue
            H.check_all()
            n += 1
            if not (H.flags["strong"] and H.flags["g"]):
                return Verdict(claim, "refuted", _bound(catalog), {"table": T.name, "Q": qn, "result": H.flags})
    return Verdict(claim, "holds", _bound(catalog) + f", {n} tables",
                   {"non_monotone_skipped": skipped} if skipped else None)


def ordsum_hom_decomposition(P: Poset, A: Poset, B: Poset, strict: bool = False) -> int:
    """Count maps into ``A (+) B`` by splitting P along its upsets."""
    counter = count_strict if strict else count_homs
    total = 0
    for U in upsets(P):
        lower = P.full & ~U
        a = counter(induced(P, lower, allow_empty=True), A) if lower else 1
        b = counter(induced(P, U, allow_empty=True), B) if U else 1
        total += a * b
    return total


def _calc_ordsum(catalog: Catalog) -> Verdict:
    claim = "ordinal sums respect the hom and strict orders (counting level)"
    ops = list(OPERANDS.values())
    n = 0
    for P in catalog:
        for A, B in iproduct(ops, repeat=2):
            for strict in (False, True):
                direct = (count_strict if strict else count_homs)(P, ordinal_sum(A, B))
                if direct != ordsum_hom_decomposition(P, A, B, strict):
                    return Verdict(claim, "refuted", _bound(catalog), {"reason": "decomposition mismatch"})
    for R1, S1, R2, S2 in iproduct(ops, repeat=4):
        for strict in (False, True):
            counter = count_strict if strict else count_homs
            below = lambda R, S: all(counter(P, R) <= counter(P, S) for P in catalog)  # noqa: E731
            if below(R1, S1) and below(R2, S2):
                n += 1
                RR, SS = ordinal_sum(R1, R2), ordinal_sum(S1, S2)
                for P in catalog:
                    if counter(P, RR) > counter(P, SS):
                        return Verdict(claim, "refuted", _bound(catalog),
                                       {"strict": strict, "count_R": counter(P, RR), "count_S": counter(P, SS)})
    return Verdict(claim, "holds", _bound(catalog) + f", {n} operand pairs")


def suite_calc(catalog: Catalog, kmax: int, anchor: int = 0) -> list[Row]:
    pool = table_pool(catalog)
    return [
        _timed(lambda: _calc_dual(catalog, pool)),
        _timed(lambda: _calc_dirsum(catalog, pool)),
        _timed(lambda: _calc_ordsum(catalog)),
        _timed(lambda: _calc_prod(catalog, pool)),
        _timed(lambda: _calc_homsets(catalog, pool)),
    ]


def suite_cancel_dirsum(catalog: Catalog, kmax: int, anchor: int = 0) -> list[Row]:
    A1, C2 = antichain(1), chain(2)

    def counts() -> Verdict:
        ops = list(OPERANDS.values())
        for Q, R, S in iproduct(ops, repeat=3):
            v = dirsum_cancel_counts(Q, R, S, catalog)
            if v.refuted:
                return v
        return Verdict("direct-sum cancellation for hom and strict counts", "holds", _bound(catalog))

    def ev() -> Verdict:
        eps = ev_map_from_injection((1, 0), direct_sum(A1, A1), direct_sum(A1, C2))
        res = dirsum_cancel(eps, A1, A1, C2, catalog)
        v = res.verdict
        v.claim = "direct-sum cancellation for image-controlled tables (Q=A1, R=A1, S=C2)"
        v.witness = {"depths": sorted(res.depth.values())}
        return v

    return [_timed(counts), _timed(ev)]


def suite_cancel_ordsum(catalog: Catalog, kmax: int, anchor: int = 0) -> list[Row]:
    A1, C2, C3 = antichain(1), chain(2), chain(3)

    def g_evidence() -> Verdict:
        T = scheme_from_injection((0, 2), C2, C3, catalog)
        rows = []
        for P in (A1, C2):
            rows += ordsum_cancel_g_evidence(T, A1, A1, C2, P, kmax).witness["rows"]
        return Verdict("ordinal-sum cancellation, G-counting evidence (Q=A1, R=A1, S=C2)", "holds",
                       f"k<={kmax}, P in {{A1, C2}}", {"rows": len(rows)})

    def ev() -> Verdict:
        eps = ev_map_from_injection((0, 2), C2, C3)
        _, v = ordsum_cancel_check(eps, A1, A1, C2, catalog)
        v.claim = "ordinal-sum cancellation for image-controlled tables (Q=A1, R=A1, S=C2)"
        return v

    def ev_dual() -> Verdict:
        eps = ev_map_from_injection((0, 2), C2, C3)
        _, v = ordsum_cancel_dual(eps, A1, A1, C2, catalog)
        v.claim = "mirrored ordinal-sum cancellation (R (+) Q)"
        return v

    def premise_negative() -> Verdict:
        claim = "premise detects an EV-map missing a base of Q"
        eps = ev_map_from_injection((1, 2), C2, C3)
        if ordsum_cancel_premise(eps, A1, A1, C2):
            return Verdict(claim, "refuted", _bound(catalog), {"sigma": [1, 2]})
        try:
            ordsum_cancel_check(eps, A1, A1, C2, catalog)
        except PremiseFailed:
            return Verdict(claim, "holds", _bound(catalog))
        return Verdict(claim, "refuted", _bound(catalog), {"reason": "pipeline ran without premise"})

    return [_timed(g_evidence), _timed(ev), _timed(ev_dual), _timed(premise_negative)]


def suite_cancel_prod(catalog: Catalog, kmax: int, anchor: int = 0) -> list[Row]:
    A1, A2, C2 = antichain(1), antichain(2), chain(2)

    def counts() -> Verdict:
        claim = "product cancellation for hom counts"
        ops = list(OPERANDS.values())
        for Q, R, S in iproduct(ops, repeat=3):
            for P in catalog:
                q = count_homs(P, Q)
                if count_homs(P, product(Q, R)) != q * count_homs(P, R):
                    return Verdict(claim, "refuted", _bound(catalog), {"reason": "product count does not factor"})
            if check_hom_order(product(Q, R), product(Q, S), catalog).holds:
                v = check_hom_order(R, S, catalog)
                if v.refuted:
                    return Verdict(claim, "refuted", _bound(catalog), v.witness)
        return Verdict(claim, "holds", _bound(catalog))

    def positive_tables():
        idq = scheme_from_injection((0, 1), C2, C2, catalog)
        swap = scheme_from_injection((1, 0), A2, A2, catalog)
        return [
            (prod_scheme(idq, scheme_from_injection((1,), A1, C2, catalog)), C2, A1, C2),
            (prod_scheme(swap, scheme_from_injection((0, 1), C2, C2, catalog)), A2, C2, C2),
            (prod_scheme(swap, scheme_from_injection((0,), A1, C2, catalog)), A2, A1, C2),
        ]

    def variant(kind: str) -> Callable[[], Verdict]:
        def run() -> Verdict:
            claim = f"product cancellation yields a strong {'image-controlled' if kind == 'I' else 'G'} table"
            for T, Q, R, S in positive_tables():
                tau = product_cancel_scheme(T, Q, R, S, anchor, kind)
                want = ("strong", "g", "i") if kind == "I" else ("strong", "g")
                if not all(tau.flags[f] for f in want):
                    return Verdict(claim, "refuted", _bound(catalog), {"table": T.name, "flags": tau.flags})
            return Verdict(claim, "holds", _bound(catalog))
        return run

    def conditions() -> Verdict:
        claim = "condition checkers agree with hand-built tables"
        swap_pairs = scheme_from_injection((0, 2, 1, 3), product(C2, C2), product(C2, C2), catalog)
        flip = scheme_from_injection((0, 3, 2, 1), product(A2, A2), product(A2, A2), catalog)
        expected = [
            (positive_tables()[0][0], (C2, A1, C2), ("holds", "holds")),
            (swap_pairs, (C2, C2, C2), ("refuted", "refuted")),
            (flip, (A2, A2, A2), ("holds", "refuted")),
        ]
        for T, (Q, R, S), want in expected:
            got = (check_first_component_injective(T, Q, R, S).status,
                   check_constants_preserved(T, Q, R, S).status)
            if got != want:
                return Verdict(claim, "refuted", _bound(catalog), {"table": T.name, "got": got, "want": want})
        return Verdict(claim, "holds", _bound(catalog))

    return [_timed(counts), _timed(variant("G")), _timed(variant("I")), _timed(conditions)]


_RUNNERS = {
    "calc": suite_calc,
    "cancel-dirsum": suite_cancel_dirsum,
    "cancel-ordsum": suite_cancel_ordsum,
    "cancel-prod": suite_cancel_prod,
}


def run_suite(
    suite: str, max_n: int = 3, kmax: int = 3, catalog: Catalog | None = None, anchor: int = 0
) -> Report:
    """Run one suite; ``anchor`` is the fixed element q of Q for the product orbits (Q has 2 elements)."""
    if suite not in _RUNNERS:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if anchor not in (0, 1):
        raise ValueError("anchor must be 0 or 1 for the two-element posets used by the suites")
    if catalog is None:
        catalog = load_or_generate(max_n)
    return Report(suite, _RUNNERS[suite](catalog, kmax, anchor))

