"""Finite posets, homomorphism counting, EV-systems and bounded Hom-scheme checks."""

from .catalog import Catalog, connected_only, generate, random_poset
from .homs import count_homs, count_strict, enumerate_homs, enumerate_strict
from .poset import (
    Poset,
    antichain,
    chain,
    direct_sum,
    dual,
    ordinal_sum,
    product,
)

__all__ = [
    "Catalog",
    "Poset",
    "antichain",
    "chain",
    "connected_only",
    "count_homs",
    "count_strict",
    "direct_sum",
    "dual",
    "enumerate_homs",
    "enumerate_strict",
    "generate",
    "ordinal_sum",
    "product",
    "random_poset",
]
