import random
import warnings

import pytest

from homscheme.errors import CycleDetected, ElementNotInSet, EmptyCarrier, InvalidPoset, UnknownLabel
from homscheme.poset import (
    Poset,
    antichain,
    chain,
    components,
    disjoint_copies,
    down_set,
    down_strict,
    downsets,
    dual,
    direct_sum,
    from_covers,
    height,
    induced,
    is_connected,
    ordinal_sum,
    product,
    up_set,
    upsets,
    zigzag_class,
)

import oracles


def rand_poset(rng, n):
    return Poset.from_pairs(n, oracles.random_relation(n, rng))


@pytest.fixture
def rng():
    return random.Random(1234)


def test_from_pairs_matches_closure_oracle(rng):
    for _ in range(200):
        n = rng.randint(1, 7)
        pairs = oracles.random_relation(n, rng)
        P = Poset.from_pairs(n, pairs)
        assert oracles.leq_matrix(P) == oracles.closure(n, pairs)
        P.validate()


def test_from_pairs_rejects_cycles():
    with pytest.raises(CycleDetected):
        Poset.from_pairs(3, [(0, 1), (1, 2), (2, 0)])


def test_from_leq_validates():
    with pytest.raises(InvalidPoset):
        Poset.from_leq([[True, True], [True, True]])
    with pytest.raises(InvalidPoset):
        Poset.from_leq([[False]])
    with pytest.raises(InvalidPoset):
        Poset.from_leq([[True, True, False], [False, True, True], [False, False, True]])


def test_from_covers_labels_and_errors():
    P = from_covers(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert P == chain(3)
    assert P.label(2) == "c"
    with pytest.raises(UnknownLabel):
        from_covers(["a"], [("a", "z")])
    with pytest.raises(CycleDetected):
        from_covers(["a", "b"], [("a", "b"), ("b", "a")])
    with pytest.raises(InvalidPoset):
        from_covers(["a", "a"], [])


def test_redundant_cover_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        P = from_covers(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    assert P == chain(3)
    assert any("redundant" in str(w.message) for w in caught)


def test_equality_ignores_labels():
    assert chain(2).with_labels(["x", "y"]) == chain(2)
    assert hash(chain(2).with_labels(["x", "y"])) == hash(chain(2))


def test_covers_are_the_hasse_edges(rng):
    for _ in range(50):
        P = rand_poset(rng, rng.randint(1, 6))
        m = oracles.leq_matrix(P)
        want = {(a, b) for a in range(P.n) for b in range(P.n) if a != b and m[a][b]
                and not any(c not in (a, b) and m[a][c] and m[c][b] for c in range(P.n))}
        assert set(P.covers()) == want
        assert Poset.from_pairs(P.n, P.covers()) == P


def test_dual_reverses(rng):
    for _ in range(50):
        P = rand_poset(rng, rng.randint(1, 6))
        m, d = oracles.leq_matrix(P), oracles.leq_matrix(dual(P))
        assert all(d[x][y] == m[y][x] for x in range(P.n) for y in range(P.n))
        assert dual(dual(P)) == P


def test_sums_and_product_by_definition(rng):
    for _ in range(40):
        P, Q = rand_poset(rng, rng.randint(1, 4)), rand_poset(rng, rng.randint(1, 4))
        p, q = oracles.leq_matrix(P), oracles.leq_matrix(Q)
        m = P.n
        ds, os_ = oracles.leq_matrix(direct_sum(P, Q)), oracles.leq_matrix(ordinal_sum(P, Q))
        for a in range(m + Q.n):
            for b in range(m + Q.n):
                if a < m and b < m:
                    want_d = want_o = p[a][b]
                elif a >= m and b >= m:
                    want_d = want_o = q[a - m][b - m]
                else:
                    want_d, want_o = False, a < m
                assert ds[a][b] == want_d
                assert os_[a][b] == want_o
        pr = oracles.leq_matrix(product(P, Q))
        for x1 in range(P.n):
            for y1 in range(Q.n):
                for x2 in range(P.n):
                    for y2 in range(Q.n):
                        assert pr[x1 * Q.n + y1][x2 * Q.n + y2] == (p[x1][x2] and q[y1][y2])


def test_disjoint_copies():
    P = disjoint_copies(chain(2), 3)
    assert P.n == 6 and len(components(P)) == 3
    assert P.leq(2, 3) and not P.leq(1, 2)
    with pytest.raises(ValueError):
        disjoint_copies(chain(2), 0)


def test_induced_renumbers():
    V = Poset.from_pairs(3, [(0, 1), (0, 2)])
    sub = induced(V, 0b110)
    assert sub == antichain(2)
    assert induced(V, 0b011) == chain(2)
    with pytest.raises(EmptyCarrier):
        induced(V, 0)
    assert induced(V, 0, allow_empty=True).n == 0


def test_cones(rng):
    for _ in range(40):
        P = rand_poset(rng, rng.randint(1, 6))
        m = oracles.leq_matrix(P)
        A = rng.randrange(1 << P.n)
        members = [a for a in range(P.n) if A >> a & 1]
        assert down_set(P, A) == oracles.to_mask(y for y in range(P.n) if any(m[y][a] for a in members))
        assert up_set(P, A) == oracles.to_mask(y for y in range(P.n) if any(m[a][y] for a in members))
        assert down_strict(P, A) == down_set(P, A) & ~A


def test_height_matches_longest_chain(rng):
    assert height(chain(5)) == 5 and height(antichain(4)) == 1
    for _ in range(40):
        P = rand_poset(rng, rng.randint(1, 6))
        assert height(P) == oracles.height(oracles.leq_matrix(P))


def test_zigzag_matches_bfs(rng):
    for _ in range(100):
        P = rand_poset(rng, rng.randint(1, 7))
        A = rng.randrange(1, 1 << P.n)
        x = next(a for a in range(P.n) if A >> a & 1)
        got = zigzag_class(P, A, x)
        want = oracles.zigzag(oracles.leq_matrix(P), {a for a in range(P.n) if A >> a & 1}, x)
        assert got == oracles.to_mask(want)
    with pytest.raises(ElementNotInSet):
        zigzag_class(chain(2), 0b01, 1)


def test_zigzag_crosses_through_members_only():
    # 0 < 1 > 2: removing 1 separates 0 from 2
    P = Poset.from_pairs(3, [(0, 1), (2, 1)])
    assert zigzag_class(P, 0b111, 0) == 0b111
    assert zigzag_class(P, 0b101, 0) == 0b001


def test_components_and_connectivity():
    assert is_connected(chain(3)) and not is_connected(antichain(2))
    assert components(direct_sum(chain(2), chain(1))) == [0b011, 0b100]


def test_upsets_match_filter(rng):
    assert [bin(u).count("1") for u in upsets(chain(2))] == [0, 1, 2]
    assert len(upsets(chain(5))) == 6
    assert len(upsets(antichain(3))) == 8
    for _ in range(40):
        P = rand_poset(rng, rng.randint(1, 6))
        m = oracles.leq_matrix(P)
        want = [U for U in range(1 << P.n)
                if all(not (U >> a & 1) or all(U >> b & 1 for b in range(P.n) if m[a][b]) for a in range(P.n))]
        assert upsets(P) == sorted(want)
        assert sorted(P.full & ~u for u in upsets(P)) == downsets(P)
