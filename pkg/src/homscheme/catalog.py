"""Bounded representation systems: one poset per isomorphism class up to size n."""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .canonical import canonical_form, canonical_poset, find_isomorphism
from .errors import BoundTooLarge, ParseError
from .poset import Poset, _closure, downsets, is_connected

MAX_N = 6
CACHE_VERSION = 1
_MAGIC = b"HSCAT"


@dataclass
class Catalog:
    """Pairwise non-isomorphic posets sorted by (size, canonical key)."""

    max_n: int
    posets: tuple[Poset, ...]
    keys: tuple = field(init=False)
    index: dict = field(init=False)

    def __post_init__(self):
        self.keys = tuple(canonical_form(P) for P in self.posets)
        self.index = {k: i for i, k in enumerate(self.keys)}
        self._exact = {P.up: i for i, P in enumerate(self.posets)}

    def __len__(self) -> int:
        return len(self.posets)

    def __iter__(self) -> Iterator[Poset]:
        return iter(self.posets)

    def __getitem__(self, i: int) -> Poset:
        return self.posets[i]

    def position(self, P: Poset) -> int | None:
        """Position of P's isomorphism class, or None if absent."""
        i = self._exact.get(P.up)
        if i is not None:
            return i
        return self.index.get(canonical_form(P))

    def locate(self, P: Poset) -> tuple[int, tuple[int, ...]] | None:
        """``(position, iso)`` where iso maps P onto the catalog member; None if absent."""
        i = self._exact.get(P.up)
        if i is not None:
            return i, tuple(range(P.n))
        i = self.index.get(canonical_form(P))
        if i is None:
            return None
        return i, find_isomorphism(P, self.posets[i])

    def counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for P in self.posets:
            out[P.n] = out.get(P.n, 0) + 1
        return out

    def of_size(self, n: int) -> list[Poset]:
        return [P for P in self.posets if P.n == n]


def _sorted_catalog(max_n: int, posets) -> Catalog:
    posets = sorted(posets, key=lambda P: (P.n, canonical_form(P)))
    return Catalog(max_n, tuple(posets))


def _extend_by_maximal(P: Poset) -> Iterator[Poset]:
    # every poset arises by putting a new maximal element above a down-set
    n = P.n
    for D in downsets(P):
        up = [u | (1 << n) if D >> x & 1 else u for x, u in enumerate(P.up)]
        up.append(1 << n)
        yield Poset(tuple(up))


def generate(n: int, max_allowed: int = MAX_N) -> Catalog:
    """All non-isomorphic posets with 1..n elements."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > max_allowed:
        raise BoundTooLarge(f"catalog bound {n} exceeds the configured maximum {max_allowed}")
    layer = {canonical_form(Poset((1,))): canonical_poset(Poset((1,)))}
    everything = list(layer.values())
    for _ in range(2, n + 1):
        nxt: dict = {}
        for P in layer.values():
            for cand in _extend_by_maximal(P):
                key = canonical_form(cand)
                if key not in nxt:
                    nxt[key] = canonical_poset(cand)
        layer = nxt
        everything.extend(layer.values())
    return _sorted_catalog(n, everything)


def connected_only(C: Catalog) -> Catalog:
    return Catalog(C.max_n, tuple(P for P in C.posets if is_connected(P)))


def random_poset(n: int, seed: int, p: float = 0.4) -> Poset:
    """Random poset: transitive closure of a random DAG, then a random relabelling."""
    rng = random.Random(seed)
    up = [1 << i for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                up[i] |= 1 << j
    up = _closure(up)
    perm = list(range(n))
    rng.shuffle(perm)
    new = [0] * n
    for i in range(n):
        m = 0
        for j in range(n):
            if up[i] >> j & 1:
                m |= 1 << perm[j]
        new[perm[i]] = m
    return Poset(tuple(new))


# -- cache ---------------------------------------------------------------------


def dump_catalog(C: Catalog) -> bytes:
    """Version header, then per poset: n and the row-major leq bitstream."""
    out = bytearray(_MAGIC + bytes([CACHE_VERSION, C.max_n]))
    out += len(C.posets).to_bytes(4, "big")
    for P in C.posets:
        n = P.n
        bitstring = 0
        for i in range(n):
            for j in range(n):
                if P.up[i] >> j & 1:
                    bitstring |= 1 << (i * n + j)
        nbytes = (n * n + 7) // 8
        out.append(n)
        out += bitstring.to_bytes(nbytes, "little")
    return bytes(out)


def load_catalog(data: bytes) -> Catalog:
    if len(data) < 11 or data[:5] != _MAGIC:
        raise ParseError("not a catalog cache file")
    if data[5] != CACHE_VERSION:
        raise ParseError(f"unsupported catalog cache version {data[5]}")
    max_n = data[6]
    count = int.from_bytes(data[7:11], "big")
    pos = 11
    posets = []
    for _ in range(count):
        if pos >= len(data):
            raise ParseError("truncated catalog cache")
        n = data[pos]
        nbytes = (n * n + 7) // 8
        bitstring = int.from_bytes(data[pos + 1 : pos + 1 + nbytes], "little")
        pos += 1 + nbytes
        up = tuple(sum(1 << j for j in range(n) if bitstring >> (i * n + j) & 1) for i in range(n))
        P = Poset(up)
        P.validate()
        posets.append(P)
    if count == 0:
        raise ParseError("catalog cache holds no posets")
    return Catalog(max_n, tuple(posets))


def cache_dir() -> Path | None:
    d = os.environ.get("HOMSCHEME_CACHE")
    return Path(d) if d else None


def load_or_generate(n: int, max_allowed: int = MAX_N) -> Catalog:
    """Generate, consulting the ``HOMSCHEME_CACHE`` directory when set."""
    d = cache_dir()
    if d is None:
        return generate(n, max_allowed)
    path = d / f"catalog-v{CACHE_VERSION}-n{n}.bin"
    if path.is_file():
        try:
            return load_catalog(path.read_bytes())
        except ParseError:
            pass
    C = generate(n, max_allowed)
    d.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dump_catalog(C))
    return C
