"""Connectivity-class and fiber-component laws, exhaustive on small posets."""

import itertools

import pytest

from homscheme.catalog import generate
from homscheme.homs import corestrict_hom, enumerate_homs, fiber_component, image_mask, restrict_hom
from homscheme.poset import Poset, bits, chain, induced, is_strict_hom, product, zigzag_class

SMALL = list(generate(4))
TARGETS = list(generate(3))


def class_of_set(P, A, B):
    out = 0
    for b in bits(B):
        out |= zigzag_class(P, A, b)
    return out


def nested_triples(n):
    # every B <= A <= A2 over n points: each point picks one of four layers
    for layers in itertools.product(range(4), repeat=n):
        B = A = A2 = 0
        for x, l in enumerate(layers):
            if l >= 1:
                A2 |= 1 << x
            if l >= 2:
                A |= 1 << x
            if l >= 3:
                B |= 1 << x
        yield B, A, A2


def test_zigzag_classes_partition():
    for P in SMALL:
        for A in range(1, 1 << P.n):
            blocks = {zigzag_class(P, A, x) for x in bits(A)}
            assert sum(bin(b).count("1") for b in blocks) == bin(A).count("1")
            assert all(b & ~A == 0 for b in blocks)


def test_class_monotone_and_idempotent():
    for P in SMALL:
        for B, A, A2 in nested_triples(P.n):
            g = class_of_set(P, A, B)
            assert g & ~class_of_set(P, A2, B) == 0
            assert g == class_of_set(P, g, B)


def all_homs():
    for P in SMALL:
        for Q in TARGETS:
            for xi in enumerate_homs(P, Q):
                yield P, Q, xi


def test_fiber_component_is_its_own_class():
    for P, Q, xi in all_homs():
        for x in range(P.n):
            G = fiber_component(P, xi, x)
            assert G >> x & 1
            assert zigzag_class(P, G, x) == G


def test_strict_iff_singletons():
    for P, Q, xi in all_homs():
        singles = all(fiber_component(P, xi, x) == 1 << x for x in range(P.n))
        assert singles == is_strict_hom(P, Q, xi)


def test_corestriction_keeps_components():
    for P, Q, xi in all_homs():
        img = image_mask(xi)
        rest = Q.full & ~img
        for extra in range(1 << Q.n):
            if extra & ~rest:
                continue
            B = img | extra
            eta = corestrict_hom(xi, B)
            sub = induced(Q, B)
            assert sub.n == bin(B).count("1")
            for x in range(P.n):
                assert fiber_component(P, eta, x) == fiber_component(P, xi, x)


def test_restriction_keeps_components():
    for P, Q, xi in all_homs():
        for x in range(P.n):
            G = fiber_component(P, xi, x)
            for A in range(1 << P.n):
                if G & ~A:
                    continue
                members = list(bits(A))
                sub = induced(P, A)
                local = fiber_component(sub, restrict_hom(xi, A), members.index(x))
                back = sum(1 << members[i] for i in bits(local))
                assert back == G


def test_injective_postcomposition_keeps_components():
    C3 = chain(3)
    for P in SMALL:
        for xi in enumerate_homs(P, chain(2)):
            for sigma in ((0, 1), (0, 2), (1, 2)):
                eta = tuple(sigma[v] for v in xi)
                assert enumerate_homs(P, C3).count(eta) == 1
                assert all(fiber_component(P, eta, x) == fiber_component(P, xi, x) for x in range(P.n))


V = Poset.from_pairs(3, [(0, 1), (0, 2)])
FACTORS = [f for f in TARGETS if f.n <= 2] + [V]


def check_product_law(A, B, posets=SMALL):
    AB = product(A, B)
    for P in posets:
        for xi in enumerate_homs(P, AB):
            x1 = tuple(v // B.n for v in xi)
            x2 = tuple(v % B.n for v in xi)
            for x in range(P.n):
                meet = fiber_component(P, x1, x) & fiber_component(P, x2, x)
                assert fiber_component(P, xi, x) == zigzag_class(P, meet, x)


@pytest.mark.parametrize("A,B", [(a, b) for a in FACTORS for b in FACTORS if a.n * b.n <= 6]
                         + [(V, chain(2))])
def test_product_law(A, B):
    check_product_law(A, B)
