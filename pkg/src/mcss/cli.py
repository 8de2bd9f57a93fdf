"""Command-line front end: validate, pages, diff, compare, homology, example, random.

Exit codes: 0 success, 1 mathematical failure (validation or comparison),
2 MCX parse error, 3 usage error.  Identical invocations produce
byte-identical output; tables are sorted by (r, p, q).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import builders, filtered, mcxio
from .multicomplex import Multicomplex, rebase
from .pages import SpectralPages
from .rings import GF, QQ, ZZ, Ring
from .total import totalize

EXIT_OK = 0
EXIT_MATH = 1
EXIT_PARSE = 2
EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_ring(tokens) -> Ring:
    toks = []
    for t in tokens:
        toks.extend(t.replace(",", " ").split())
    if toks == ["Q"]:
        return QQ
    if toks == ["Z"]:
        return ZZ
    if len(toks) == 2 and toks[0] == "F":
        return GF(int(toks[1]))
    if len(toks) == 1 and toks[0].startswith("F") and toks[0][1:].isdigit():
        return GF(int(toks[0][1:]))
    raise UsageError(f"cannot parse ring {' '.join(tokens)!r} (expected Q, Z or F <p>)")


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_output(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load(args) -> Multicomplex:
    c = mcxio.parse(_read_input(args.file))
    if getattr(args, "ring", None):
        try:
            c = rebase(c, _parse_ring(args.ring))
        except ValueError as exc:
            raise UsageError(f"cannot rebase: {exc}") from None
    return c


def group_str(ring: Ring, invariants) -> str:
    if not invariants:
        return "0"
    if ring.is_field:
        sym = "Q" if ring.kind == "Q" else f"F{ring.p}"
        return f"{sym}^{len(invariants)}"
    torsion = [d for d in invariants if d]
    parts = [f"Z/{d}" for d in torsion]
    free = len(invariants) - len(torsion)
    if free:
        parts.append(f"Z^{free}")
    return " ⊕ ".join(parts)


def _matrix_strs(ring, rows):
    return [[ring.format_scalar(ring.normalize(v)) for v in row] for row in rows]


def _matrix_text(ring, rows):
    if not rows or not rows[0]:
        return "[]"
    return "[" + "; ".join(" ".join(r) for r in _matrix_strs(ring, rows)) + "]"


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    c = _load(args)
    violations = c.validate()
    if not violations:
        print("OK")
        return EXIT_OK
    for v in violations:
        print(f"violation: {v}")
    return EXIT_MATH


def _require_valid(c: Multicomplex) -> None:
    violations = c.validate()
    if violations:
        for v in violations:
            print(f"violation: {v}", file=sys.stderr)
        raise _InvalidInput()


class _InvalidInput(Exception):
    pass


def _pages_doc(c: Multicomplex, sp: SpectralPages, max_r: int):
    pages = {}
    diffs = {}
    for r in range(0, max_r + 1):
        page = sp.page(r)
        table = {}
        for (p, q), inv in page.invariants_table().items():
            table.setdefault(str(p), {})[str(q)] = {"invariants": list(inv)}
        pages[str(r)] = table
        dl = []
        for (p, q), d in sorted(page.deltas.items()):
            if d.is_zero() or not d.source_invariants:
                continue
            dl.append({
                "p": p,
                "q": q,
                "target_p": d.target[0],
                "target_q": d.target[1],
                "matrix": _matrix_strs(c.ring, d.rows),
            })
        diffs[str(r)] = dl
    return {"ring": str(c.ring), "pages": pages, "differentials": diffs}


def cmd_pages(args) -> int:
    c = _load(args)
    _require_valid(c)
    sp = SpectralPages(c)
    max_r = args.max_r if args.max_r is not None else sp.stabilization_bound()
    doc = _pages_doc(c, sp, max_r)
    if args.json:
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    lines = [f"ring {c.ring}"]
    for r in range(0, max_r + 1):
        lines.append(f"E_{r}:")
        table = doc["pages"][str(r)]
        cells = [
            (int(p), int(q), cell["invariants"])
            for p, block in table.items()
            for q, cell in block.items()
        ]
        if not cells:
            lines.append("  (empty)")
        for p, q, inv in sorted(cells):
            lines.append(f"  ({p},{q}): {group_str(c.ring, inv)}")
        dl = doc["differentials"][str(r)]
        if dl:
            lines.append(f"Delta_{r}:")
            for rec in dl:
                mat = "[" + "; ".join(" ".join(row) for row in rec["matrix"]) + "]"
                lines.append(
                    f"  ({rec['p']},{rec['q']}) -> ({rec['target_p']},{rec['target_q']}): {mat}"
                )
    print("\n".join(lines))
    return EXIT_OK


def cmd_diff(args) -> int:
    c = _load(args)
    _require_valid(c)
    sp = SpectralPages(c)
    r, p, q = args.r, args.p, args.q
    d = sp.delta(r, p, q)
    src = sp.entry(r, p, q)
    tgt = sp.entry(r, *d.target)
    if args.json:
        doc = {
            "ring": str(c.ring),
            "differentials": {str(r): [{
                "p": p, "q": q,
                "target_p": d.target[0], "target_q": d.target[1],
                "matrix": _matrix_strs(c.ring, d.rows),
            }]},
        }
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    print(f"ring {c.ring}")
    print(f"Delta_{r} at ({p},{q}) -> ({d.target[0]},{d.target[1]})")
    print(f"source E_{r}({p},{q}): {group_str(c.ring, src.invariants)}")
    print(f"target E_{r}({d.target[0]},{d.target[1]}): {group_str(c.ring, tgt.invariants)}")
    print(f"matrix: {_matrix_text(c.ring, d.rows)}")
    return EXIT_OK


def cmd_compare(args) -> int:
    c = _load(args)
    _require_valid(c)
    report = filtered.compare(c, max_r=args.max_r)
    doc = {
        "ring": str(c.ring),
        "compare": {
            "max_r": report.max_r,
            "cells": report.cells_checked,
            "failures": [
                {"r": f.r, "p": f.p, "q": f.q, "kind": f.kind, "detail": f.detail}
                for f in report.failures
            ],
        },
    }
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print(f"ring {c.ring}")
        print(f"checked {report.cells_checked} cells for r <= {report.max_r}")
        for f in report.failures:
            print(f"FAIL: {f}")
        print("OK" if report.ok else f"{len(report.failures)} failing cells")
    return EXIT_OK if report.ok else EXIT_MATH


def cmd_homology(args) -> int:
    c = _load(args)
    _require_valid(c)
    t = totalize(c)
    degrees = [n for n in t.degrees() if t.dim(n)]
    groups = {n: filtered.homology(t, n) for n in degrees}
    if args.json:
        doc = {
            "ring": str(c.ring),
            "homology": {str(n): {"invariants": list(groups[n].invariants)} for n in degrees},
        }
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    print(f"ring {c.ring}")
    for n in degrees:
        print(f"H_{n}: {group_str(c.ring, groups[n].invariants)}")
    return EXIT_OK


def cmd_example(args) -> int:
    ring = _parse_ring(args.ring) if args.ring else ZZ
    try:
        if args.name == "staircase":
            if args.len is None:
                raise UsageError("staircase needs --len")
            c = builders.staircase(args.len, ring)
        elif args.name == "hurtubise":
            if args.n is None:
                raise UsageError("hurtubise needs --n {1..4}")
            c = builders.hurtubise(args.n, ring, length=args.len)
        elif args.name == "wall":
            if None in (args.r, args.s, args.t):
                raise UsageError("wall needs --r --s --t (and optional --amax)")
            c = builders.wall(builders.WallParams(args.r, args.s, args.t, args.amax))
            if ring != ZZ:
                c = rebase(c, ring)
        else:
            raise UsageError(f"unknown example {args.name!r}")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write_output(args.output, mcxio.emit(c))
    return EXIT_OK


def cmd_random(args) -> int:
    ring = _parse_ring(args.ring) if args.ring else ZZ
    try:
        spec = builders.RandomSpec(
            seed=args.seed,
            width=args.width,
            height=args.height,
            maxrank=args.maxrank,
            maxd=args.maxd,
            ring=ring,
        )
        c = builders.random_mcx(spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write_output(args.output, mcxio.emit(c))
    return EXIT_OK


# ---------------------------------------------------------------------------
# wiring


def _build_parser() -> _Parser:
    parser = _Parser(prog="mcss", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(sp):
        sp.add_argument("file", help="MCX file, or - for standard input")
        sp.add_argument("--ring", nargs="+", metavar="R",
                        help="rebase entries over Q, Z or F <p>")

    sp = sub.add_parser("validate", help="check the structure-map relations")
    add_input(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("pages", help="print page tables and differentials")
    add_input(sp)
    sp.add_argument("--max-r", type=int, default=None)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_pages)

    sp = sub.add_parser("diff", help="print one page differential")
    add_input(sp)
    sp.add_argument("-r", type=int, required=True)
    sp.add_argument("-p", type=int, required=True)
    sp.add_argument("-q", type=int, required=True)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_diff)

    sp = sub.add_parser("compare", help="cross-check against the filtered-complex route")
    add_input(sp)
    sp.add_argument("--max-r", type=int, default=None)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("homology", help="homology of the total complex")
    add_input(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_homology)

    sp = sub.add_parser("example", help="emit a built-in example as MCX")
    sp.add_argument("name", choices=["staircase", "hurtubise", "wall"])
    sp.add_argument("--len", type=int, default=None, help="staircase length")
    sp.add_argument("--n", type=int, default=None, help="hurtubise example number")
    sp.add_argument("--r", type=int, default=None, help="wall: order of the normal subgroup")
    sp.add_argument("--s", type=int, default=None, help="wall: order of the quotient")
    sp.add_argument("--t", type=int, default=None, help="wall: twist")
    sp.add_argument("--amax", type=int, default=8, help="wall: window bound (even)")
    sp.add_argument("--ring", nargs="+", metavar="R")
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_example)

    sp = sub.add_parser("random", help="emit a seeded random multicomplex as MCX")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--width", type=int, default=4)
    sp.add_argument("--height", type=int, default=4)
    sp.add_argument("--maxrank", type=int, default=2)
    sp.add_argument("--maxd", type=int, default=2)
    sp.add_argument("--ring", nargs="+", metavar="R")
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_random)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except mcxio.MCXParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _InvalidInput:
        return EXIT_MATH
    except FileNotFoundError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
