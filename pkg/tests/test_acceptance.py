"""Acceptance criteria 1-10, each run at its stated bound and time limit.

Every test appends one PASS/FAIL line that the terminal summary prints.
"""

import itertools
import random
import time
from contextlib import contextmanager

import oracles
import test_fibers
from conftest import ACCEPTANCE_LINES
from homscheme.cancel import (
    check_constants_preserved,
    check_first_component_injective,
    dirsum_cancel,
    first_component_orbit,
    iterate_all,
    iterate_injection,
    ordsum_cancel_check,
    ordsum_cancel_g_evidence,
    ordsum_cancel_premise,
    product_cancel_scheme,
    product_cycle,
)
from homscheme.canonical import is_isomorphic
from homscheme.catalog import generate
from homscheme.ev import (
    build_ev,
    ev_height,
    ev_identity_dirsum,
    ev_identity_dual,
    ev_identity_ordsum,
    ev_identity_prod,
    ev_map_from_injection,
    lt_plus,
)
from homscheme.homs import count_homs, count_strict, enumerate_homs
from homscheme.poset import (
    Poset,
    antichain,
    chain,
    direct_sum,
    dual,
    height,
    is_connected,
    ordinal_sum,
    product,
)
from homscheme.schemes import (
    check_g_order,
    check_g_property,
    check_hom_order,
    check_i_order,
    check_i_property,
    check_strong,
    prod_scheme,
    scheme_from_injection,
)
from homscheme.suites import ordsum_hom_decomposition, run_suite, table_pool

A1, A2, C2, C3 = antichain(1), antichain(2), chain(2), chain(3)


@contextmanager
def criterion(number: int, title: str, limit: float):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        if ok and elapsed > limit:
            ok = False
        verdict = "PASS" if ok else "FAIL"
        line = f"criterion {number}: {verdict} {title} ({elapsed:.1f}s, limit {limit:.0f}s)"
        ACCEPTANCE_LINES.append(line)
        print(line)
    assert elapsed <= limit, f"criterion {number} took {elapsed:.1f}s > {limit}s"


def test_criterion_01_counting_identities():
    with criterion(1, "counting identities, |P|<=4, |A|,|B|<=3", 60):
        posets, ops = list(generate(4)), list(generate(3))
        checked = 0
        for P in posets:
            for A, B in itertools.product(ops, repeat=2):
                assert count_homs(P, product(A, B)) == count_homs(P, A) * count_homs(P, B)
                if is_connected(P):
                    assert count_homs(P, direct_sum(A, B)) == count_homs(P, A) + count_homs(P, B)
                    assert count_strict(P, direct_sum(A, B)) == count_strict(P, A) + count_strict(P, B)
                for strict in (False, True):
                    counter = count_strict if strict else count_homs
                    assert counter(P, ordinal_sum(A, B)) == ordsum_hom_decomposition(P, A, B, strict)
                checked += 1
        assert checked == len(posets) * len(ops) ** 2


def _check_edges(E1, E2, phi, reverse=False):
    assert len(set(phi.values())) == len(phi) == len(E2)
    assert set(phi.values()) == set(E2.elements)
    for a, b in itertools.product(E1.elements, repeat=2):
        assert (lt_plus(b, a) if reverse else lt_plus(a, b)) == lt_plus(phi[a], phi[b])


def test_criterion_02_ev_identities():
    with criterion(2, "EV-system identities for operands <=3, heights for n<=5", 120):
        ops = list(generate(3))
        for P in ops:
            r = ev_identity_dual(P)
            assert r.ok
            _check_edges(build_ev(dual(P)), build_ev(P), r.witness["iso"], reverse=True)
        for P, Q in itertools.product(ops, repeat=2):
            r = ev_identity_dirsum(P, Q)
            assert r.ok
            iso = r.witness["iso"]
            ES = build_ev(direct_sum(P, Q))
            assert set(iso.values()) == set(ES.elements) and len(iso) == len(ES)
            keys = list(iso)
            for k1, k2 in itertools.product(keys, repeat=2):
                same_side = k1[0] == k2[0]
                assert (same_side and lt_plus(k1[1], k2[1])) == lt_plus(iso[k1], iso[k2])
            for build, arith in ((ev_identity_ordsum, ordinal_sum), (ev_identity_prod, product)):
                assert build(P, Q).ok
                assert set(build_ev(arith(P, Q)).elements) == oracles.ev_elements(oracles.leq_matrix(arith(P, Q)))
        for P in generate(5):
            assert ev_height(build_ev(P)) == height(P)


def test_criterion_03_fiber_component_laws():
    with criterion(3, "connectivity and fibre-component laws, n<=4, targets <=3", 120):
        test_fibers.test_zigzag_classes_partition()
        test_fibers.test_class_monotone_and_idempotent()
        test_fibers.test_fiber_component_is_its_own_class()
        test_fibers.test_strict_iff_singletons()
        test_fibers.test_corestriction_keeps_components()
        test_fibers.test_restriction_keeps_components()
        targets = list(generate(3))
        for A, B in itertools.product(targets, repeat=2):
            test_fibers.check_product_law(A, B)


def test_criterion_04_scheme_flags():
    with criterion(4, "scheme flag logic on catalog n<=3", 60):
        cat = generate(3)
        n_sigma = 0
        for R, S in itertools.product(cat, repeat=2):
            for sigma in enumerate_homs(R, S):
                if len(set(sigma)) < R.n:
                    continue
                T = scheme_from_injection(sigma, R, S, cat)
                assert check_strong(T).holds and check_g_property(T).holds and check_i_property(T).holds
                n_sigma += 1
        assert n_sigma > 0
        for T in table_pool(cat):
            T.check_all()
            if T.flags["i"]:
                assert T.flags["g"]
        pos = cat.position(C2)
        strict = next(h for h in enumerate_homs(cat[pos], C2) if len(set(h)) == 2)
        broken = scheme_from_injection((0, 1), C2, C2, cat).with_overrides(
            pos, {strict: (0, 0), (0, 0): strict}, "broken")
        v = check_g_property(broken)
        assert v.refuted and v.witness["P"]["n"] == 2 and "x" in v.witness


def test_criterion_05_calculation_rules():
    with criterion(5, "calculation rules for operands <=2 over catalog n<=3", 300):
        report = run_suite("calc", max_n=3)
        assert len(report.rows) == 5
        for row in report.rows:
            assert row.status == "holds", row.claim


def test_criterion_06_direct_sum_pipeline():
    with criterion(6, "injection iteration and direct-sum cancellation", 30):
        t = iterate_injection({"b": 1, 1: 2, 2: "c"}, "b", {1, 2}, {"c"})
        assert t.depth == 3 and t.end == "c"
        rng = random.Random(6)
        for _ in range(1000):
            a = rng.randint(0, 20)
            A = [("a", i) for i in range(a)]
            B = [("b", i) for i in range(rng.randint(1, 6))]
            C = [("c", i) for i in range(len(B) + rng.randint(0, 4))]
            f = dict(zip(A + B, rng.sample(A + C, len(A) + len(B))))
            F, depth = iterate_all(f, B, set(A), set(C))
            assert len(set(F.values())) == len(B)
            assert all(d <= a + 1 for d in depth.values())
        cat = generate(3)
        eps = ev_map_from_injection((1, 0), direct_sum(A1, A1), direct_sum(A1, C2))
        res = dirsum_cancel(eps, A1, A1, C2, cat)
        assert res.verdict.holds and res.ev_map.is_embedding_hom()


def test_criterion_07_ordinal_sum_pipeline():
    with criterion(7, "ordinal-sum cancellation for A1, A1 into C2", 60):
        cat = generate(3)
        eps = ev_map_from_injection((0, 2), ordinal_sum(A1, A1), ordinal_sum(A1, C2))
        assert ordsum_cancel_premise(eps, A1, A1, C2)
        T, v = ordsum_cancel_check(eps, A1, A1, C2, cat)
        assert v.holds and T.is_injective() and T.strictness_violation() is None
        table = scheme_from_injection((0, 2), ordinal_sum(A1, A1), ordinal_sum(A1, C2), cat)
        for P in (A1, C2):
            g = ordsum_cancel_g_evidence(table, A1, A1, C2, P, 3)
            assert g.holds and len(g.witness["rows"]) == 3 * count_homs(P, A1)


def _orbit_periodic(T, Q, R, S, cat):
    for P in cat:
        for xi in enumerate_homs(P, R):
            for q in range(Q.n):
                t = first_component_orbit(T, Q, R, S, q, P, xi)
                n = t.depth
                long = first_component_orbit(T, Q, R, S, q, P, xi, steps=3 * n)
                state = lambda tr, i: tr.start if i == 0 else tr.iterates[i - 1]  # noqa: E731
                for k in (1, 2, 3):
                    assert state(long, k * n - 1) == state(t, n - 1)


def test_criterion_08_product_pipeline():
    with criterion(8, "product cancellation conditions, cycles and tables", 120):
        cat = generate(3)
        idq = scheme_from_injection((0, 1), C2, C2, cat)
        swap = scheme_from_injection((1, 0), A2, A2, cat)
        positive = [
            (prod_scheme(idq, scheme_from_injection((1,), A1, C2, cat)), C2, A1, C2),
            (prod_scheme(swap, scheme_from_injection((0, 1), C2, C2, cat)), A2, C2, C2),
            (prod_scheme(swap, scheme_from_injection((0,), A1, C2, cat)), A2, A1, C2),
        ]
        CC, AA = product(C2, C2), product(A2, A2)
        swap_pairs = scheme_from_injection((0, 2, 1, 3), CC, CC, cat)
        flip = scheme_from_injection((0, 3, 2, 1), AA, AA, cat)
        for T, (Q, R, S), want in ((positive[0][0], (C2, A1, C2), ("holds", "holds")),
                                   (swap_pairs, (C2, C2, C2), ("refuted", "refuted")),
                                   (flip, (A2, A2, A2), ("holds", "refuted"))):
            got = (check_first_component_injective(T, Q, R, S).status,
                   check_constants_preserved(T, Q, R, S).status)
            assert got == want
        rng = random.Random(8)
        for _ in range(1000):
            n = rng.randint(1, 15)
            perm = list(range(n))
            rng.shuffle(perm)
            t = product_cycle(lambda a, b: (a, b), lambda c: perm[c[0]], range(n), 0, "b")
            assert 1 <= t.depth <= n and t.end == 0
        for T, Q, R, S in positive:
            _orbit_periodic(T, Q, R, S, cat)
            for variant in ("G", "I"):
                tau = product_cancel_scheme(T, Q, R, S, 0, variant)
                assert check_strong(tau).holds and check_g_property(tau).holds
                if variant == "I":
                    assert check_i_property(tau).holds


def test_criterion_09_refutations():
    with criterion(9, "known refutations with witnesses", 10):
        cat = generate(3)
        v = check_hom_order(C2, A2, cat)
        assert v.refuted and (v.witness["count_R"], v.witness["count_S"]) == (3, 2)
        assert is_isomorphic(Poset.from_pairs(2, v.witness["P"]["covers"]), C2)
        v = check_g_order(C3, C2, cat)
        assert v.refuted and (v.witness["count_R"], v.witness["count_S"]) == (1, 0)
        assert is_isomorphic(Poset.from_pairs(3, v.witness["P"]["covers"]), C3)
        v, eps = check_i_order(C2, A2, cat)
        assert v.refuted and eps is None
        assert (v.witness["size_E_R"], v.witness["size_E_S"]) == (4, 2)


def test_criterion_10_catalog_counts():
    with criterion(10, "catalog sizes for n=1..5 against the relation filter", 120):
        counts = generate(5).counts()
        assert [counts[n] for n in range(1, 6)] == [1, 2, 5, 16, 63]
        for n in range(1, 6):
            assert oracles.relation_filter_classes(n) == counts[n]
