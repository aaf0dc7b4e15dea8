"""Reading and writing posets as text blocks, and Graphviz export.

Format (UTF-8, ``#`` starts a comment)::

    poset V
    elements: a b c
    covers: a<b a<c
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import ParseError
from .poset import Poset, antichain, chain, from_covers

_BUILTIN = re.compile(r"^([AC])(\d+)$")


def parse_posets(text: str) -> dict[str, Poset]:
    """Parse every block in ``text`` into an ordered ``name -> Poset`` dict."""
    blocks: list[dict] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("poset"):
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected 'poset <name>'")
            blocks.append({"name": parts[1], "elements": None, "covers": [], "line": lineno})
            continue
        if not blocks:
            raise ParseError(f"line {lineno}: content before the first 'poset' header")
        key, sep, value = line.partition(":")
        if not sep:
            raise ParseError(f"line {lineno}: expected 'key: value'")
        key = key.strip()
        block = blocks[-1]
        if key == "elements":
            block["elements"] = value.split()
        elif key == "covers":
            for tok in value.split():
                names = tok.split("<")
                if len(names) < 2 or not all(names):
                    raise ParseError(f"line {lineno}: bad cover {tok!r}")
                block["covers"].extend(zip(names, names[1:]))
        else:
            raise ParseError(f"line {lineno}: unknown key {key!r}")

    out: dict[str, Poset] = {}
    for block in blocks:
        if not block["elements"]:
            raise ParseError(f"poset {block['name']!r} (line {block['line']}) has no elements")
        if block["name"] in out:
            raise ParseError(f"duplicate poset name {block['name']!r}")
        out[block["name"]] = from_covers(block["elements"], block["covers"])
    return out


def format_poset(P: Poset, name: str = "P") -> str:
    elements = " ".join(P.label(x) for x in range(P.n))
    covers = " ".join(f"{P.label(a)}<{P.label(b)}" for a, b in P.covers())
    return f"poset {name}\nelements: {elements}\ncovers: {covers}\n"


def load_poset(source: str, name: str | None = None) -> Poset:
    """Load a poset from a file path, or build one from a name like ``C3``/``A2``."""
    path = Path(source)
    if path.is_file():
        posets = parse_posets(path.read_text(encoding="utf-8"))
        if not posets:
            raise ParseError(f"{source}: no poset blocks")
        if name is not None:
            if name not in posets:
                raise ParseError(f"{source}: no poset named {name!r}")
            return posets[name]
        return next(iter(posets.values()))
    m = _BUILTIN.match(source)
    if m and int(m.group(2)) > 0:
        n = int(m.group(2))
        P = chain(n) if m.group(1) == "C" else antichain(n)
        return P.with_labels([f"{m.group(1).lower()}{i}" for i in range(n)])
    raise ParseError(f"{source!r} is neither a readable file nor a builtin name (Cn, An)")


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def hasse_dot(P: Poset, name: str = "P") -> str:
    """Hasse diagram (cover edges only), drawn bottom-up."""
    lines = [f"digraph {_dot_id(name)} {{", "  rankdir=BT;", "  node [shape=circle];"]
    for x in range(P.n):
        lines.append(f"  {_dot_id(P.label(x))};")
    for a, b in P.covers():
        lines.append(f"  {_dot_id(P.label(a))} -> {_dot_id(P.label(b))};")
    lines.append("}")
    return "\n".join(lines) + "\n"
