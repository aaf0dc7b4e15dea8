"""Command-line front end.

Exit codes: 0 everything holds, 1 something was refuted, 2 usage or parse
error, 3 a search budget or size cap was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import MAX_N, Catalog, dump_catalog, generate, load_catalog, load_or_generate
from .errors import HomSchemeError, ResourceLimit
from .ev import DEFAULT_EV_CAP, build_ev, ev_dot, ev_height
from .homs import (
    DEFAULT_BUDGET,
    count_homs,
    count_strict,
    enumerate_homs,
    enumerate_strict,
    fingerprint_classes,
    format_hom,
)
from .poset import components, height, is_connected
from .schemes import check_g_order, check_hom_order, check_i_order, ev_data
from .suites import SUITES, run_suite
from .textio import format_poset, hasse_dot, load_poset

EXIT_OK, EXIT_REFUTED, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3

CONFIG_KEYS = {
    "format": str,
    "seed": int,
    "budget": int,
    "ev_cap": int,
    "anchor": int,
    "catalog": str,
    "workers": int,
    "max_n": int,
    "kmax": int,
}


class UsageError(Exception):
    pass


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` comments; unknown keys are a usage error."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().replace("-", "_"), value.strip().strip('"')
        if not sep or key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config entry {line!r}")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}") from exc
    return out


def _common() -> argparse.ArgumentParser:
    # accepted both before and after the subcommand; SUPPRESS keeps later parsers from clobbering
    p = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="key=value file; flags override it")
    p.add_argument("--format", choices=("text", "json"), default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--budget", type=int, default=S, help="search node budget")
    p.add_argument("--ev-cap", dest="ev_cap", type=int, default=S, help="largest EV-system built")
    p.add_argument("--anchor", type=int, default=S, help="fixed element q for product orbits")
    p.add_argument("--catalog", default=S, help="catalog file written by 'catalog gen'")
    p.add_argument("--workers", type=int, default=S, help="accepted for compatibility; runs serially")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="homscheme", parents=[common],
                                     description="Posets, homomorphism counts, EV-systems and Hom-scheme checks.")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def poset_arg(p, *names):
        for n in names:
            p.add_argument(n, help="poset file or builtin name such as C3 or A2")
        p.add_argument("--name", help="pick a named block when a file holds several posets")

    p = sub.add_parser("poset", parents=[common]).add_subparsers(dest="action", required=True)
    poset_arg(p.add_parser("show", parents=[common]), "P")
    poset_arg(p.add_parser("export-dot", parents=[common]), "P")

    for word in ("hom", "strict"):
        p = sub.add_parser(word, parents=[common]).add_subparsers(dest="action", required=True)
        for action in ("count", "list"):
            poset_arg(p.add_parser(action, parents=[common]), "P", "Q")

    poset_arg(sub.add_parser("gamma-classes", parents=[common]), "P", "R")

    p = sub.add_parser("ev", parents=[common]).add_subparsers(dest="action", required=True)
    poset_arg(p.add_parser("build", parents=[common]), "P")
    poset_arg(p.add_parser("export-dot", parents=[common]), "P")

    p = sub.add_parser("order", parents=[common]).add_subparsers(dest="action", required=True)
    c = p.add_parser("check", parents=[common])
    c.add_argument("--rel", choices=("hom", "g", "i"), required=True)
    poset_arg(c, "R", "S")
    c.add_argument("--max-n", dest="max_n", type=int, default=argparse.SUPPRESS)

    p = sub.add_parser("rules", parents=[common]).add_subparsers(dest="action", required=True)
    c = p.add_parser("verify", parents=[common])
    c.add_argument("--suite", choices=SUITES, required=True)
    c.add_argument("--max-n", dest="max_n", type=int, default=argparse.SUPPRESS)
    c.add_argument("--kmax", type=int, default=argparse.SUPPRESS)

    p = sub.add_parser("catalog", parents=[common]).add_subparsers(dest="action", required=True)
    c = p.add_parser("gen", parents=[common])
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--out", required=True)
    return parser


DEFAULTS = {
    "format": "text", "seed": 0, "budget": DEFAULT_BUDGET, "ev_cap": DEFAULT_EV_CAP,
    "anchor": 0, "catalog": None, "workers": 1, "max_n": 3, "kmax": 3,
}


def _settings(ns: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(ns, "config", None):
        cfg.update(read_config(ns.config))
    for key in DEFAULTS:
        if hasattr(ns, key):
            cfg[key] = getattr(ns, key)
    if cfg["format"] not in ("text", "json"):
        raise UsageError("format must be text or json")
    return cfg


def _catalog(cfg: dict) -> Catalog:
    if cfg["catalog"]:
        try:
            data = Path(cfg["catalog"]).read_bytes()
        except OSError as exc:
            raise UsageError(f"cannot read catalog {cfg['catalog']}: {exc}") from exc
        return load_catalog(data)
    return load_or_generate(cfg["max_n"])


def _emit(cfg: dict, text: str, obj) -> None:
    if cfg["format"] == "json":
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load(ns, attr):
    return load_poset(getattr(ns, attr), ns.name)


def run(ns: argparse.Namespace) -> int:
    cfg = _settings(ns)
    budget = cfg["budget"]
    cmd, action = ns.cmd, getattr(ns, "action", None)

    if cmd == "poset":
        P = _load(ns, "P")
        if action == "export-dot":
            sys.stdout.write(hasse_dot(P))
            return EXIT_OK
        info = {"n": P.n, "height": height(P), "connected": is_connected(P),
                "components": len(components(P)),
                "covers": [[P.label(a), P.label(b)] for a, b in P.covers()]}
        text = format_poset(P, ns.name or Path(ns.P).stem) + f"# size {P.n}, height {info['height']}, {info['components']} component(s)\n"
        _emit(cfg, text, info)
        return EXIT_OK

    if cmd in ("hom", "strict"):
        P, Q = _load(ns, "P"), _load(ns, "Q")
        strict = cmd == "strict"
        if action == "count":
            n = (count_strict if strict else count_homs)(P, Q, budget=budget)
            _emit(cfg, str(n), {"count": n})
        else:
            homs = (enumerate_strict if strict else enumerate_homs)(P, Q, budget=budget)
            text = "\n".join(format_hom(P, Q, h) for h in homs)
            _emit(cfg, text, {"homs": [[Q.label(v) for v in h] for h in homs]})
        return EXIT_OK

    if cmd == "gamma-classes":
        P, R = _load(ns, "P"), _load(ns, "R")
        classes = fingerprint_classes(P, R, budget=budget)
        lines = []
        data = []
        for c in classes:
            comps = ["{" + ",".join(P.label(y) for y in range(P.n) if m >> y & 1) + "}" for m in c.fingerprint]
            lines.append(f"class of {len(c.homs)}: " + " ".join(comps))
            for h in c.homs:
                lines.append("  " + format_hom(P, R, h))
            data.append({"fingerprint": comps, "homs": [[R.label(v) for v in h] for h in c.homs]})
        _emit(cfg, "\n".join(lines), {"classes": data})
        return EXIT_OK

    if cmd == "ev":
        P = _load(ns, "P")
        E = build_ev(P, cfg["ev_cap"])
        if action == "export-dot":
            sys.stdout.write(ev_dot(E))
            return EXIT_OK
        pairs = E.lt_pairs()
        info = {"size": len(E), "pairs": len(pairs), "height": ev_height(E),
                "elements": [ev_data(a) for a in E.elements]}
        _emit(cfg, f"|E| = {len(E)}, <+ pairs = {len(pairs)}, height = {info['height']}", info)
        return EXIT_OK

    if cmd == "order":
        R, S = _load(ns, "R"), _load(ns, "S")
        C = _catalog(cfg)
        if ns.rel == "hom":
            v = check_hom_order(R, S, C, budget)
        elif ns.rel == "g":
            v = check_g_order(R, S, C, budget)
        else:
            v, _ = check_i_order(R, S, C, cap=cfg["ev_cap"], budget=budget)
        text = f"{v.status.upper()}: {v.claim} [{v.bound}]"
        if v.detail:
            text += f"\n{v.detail}"
        if v.refuted and v.witness:
            text += "\nwitness: " + json.dumps(v.witness, sort_keys=True)
        _emit(cfg, text, v.to_dict())
        return EXIT_REFUTED if v.refuted else EXIT_OK

    if cmd == "rules":
        C = _catalog(cfg)
        report = run_suite(ns.suite, kmax=cfg["kmax"], catalog=C, anchor=cfg["anchor"])
        if cfg["format"] == "json":
            print(report.to_json())
        else:
            sys.stdout.write(report.to_text())
        return EXIT_REFUTED if report.refuted else EXIT_OK

    if cmd == "catalog":
        C = generate(ns.n, MAX_N)
        Path(ns.out).write_bytes(dump_catalog(C))
        counts = C.counts()
        _emit(cfg, " ".join(f"n={k}:{v}" for k, v in sorted(counts.items())),
              {"counts": {str(k): v for k, v in counts.items()}, "total": len(C)})
        return EXIT_OK

    raise UsageError(f"unknown command {cmd}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors this way
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return run(ns)
    except ResourceLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (UsageError, HomSchemeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
