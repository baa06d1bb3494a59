"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 node budget exceeded, 3 a verification failed.
Machine-readable output goes to stdout (or ``--output``); progress goes to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Callable, Iterable, Optional

from . import bounds, census, constructions, core, spectral
from .errors import BudgetExceededError, ContinuantError, NotApplicableError, SeedNotFoundError

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_VERIFY = 0, 1, 2, 3

SUITES = ("statement1", "lemmas", "theorem1", "theorem2", "theorem3",
          "theorem4", "theorem5", "theorem6", "remarks")


class UsageError(Exception):
    pass


def _progress(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr, flush=True)


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=None, separators=(",", ":")) + "\n"


def _rows_csv(rows: list[dict], fields: Iterable[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _rows_text(rows: list[dict], fields: Iterable[str]) -> str:
    fields = list(fields)
    table = [fields] + [[str(r.get(f, "")) for f in fields] for r in rows]
    widths = [max(len(line[i]) for line in table) for i in range(len(fields))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() + "\n" for line in table)


# -- count -------------------------------------------------------------------

def cmd_count(args) -> int:
    if args.list:
        query = census.CensusQuery(args.a**args.m, args.bound, args.mode)
        seqs = census.enumerate_sequences(query, args.node_budget, args.workers)
        if args.format == "text":
            _emit(args, "".join(" ".join(map(str, u)) + "\n" for u in seqs))
        elif args.format == "csv":
            _emit(args, _rows_csv([{"elements": " ".join(map(str, u)), "continuant": str(query.target)}
                                   for u in seqs], ("elements", "continuant")))
        else:
            _emit(args, census.to_jsonl(seqs))
        return EXIT_OK
    result = census.count_f(args.a, args.m, args.bound, args.mode, args.node_budget, args.workers)
    _progress(args, f"visited {result.nodes_visited} nodes in {result.elapsed:.3f}s")
    row = census.summary_row(args.a, args.m, args.bound, args.mode, result)
    if args.format == "csv":
        _emit(args, census.to_csv([row]))
    elif args.format == "text":
        _emit(args, f"f({args.a}^{args.m}, {args.bound}) = {result.count}  [{args.mode}]\n")
    else:
        # timing is the only nondeterministic field; keep it out of the JSON payload
        payload = {k: (str(v) if k == "count" else v) for k, v in row.items() if k != "millis"}
        _emit(args, _dump_json(payload))
    return EXIT_OK


# -- witnesses ---------------------------------------------------------------

def cmd_witnesses(args) -> int:
    cache = constructions.SeedCache(None if args.seed_cache == "none" else (args.seed_cache or constructions.DEFAULT_SEED_CACHE))
    family = constructions.generate_family(args.a, args.s, args.m, cache)
    family.verify()
    _progress(args, f"{len(family)} witnesses for {args.a}^{args.m} with elements < {args.a}^{args.s}")
    if args.format == "text":
        _emit(args, "".join(" ".join(map(str, u)) + "\n" for u in family))
    elif args.format == "csv":
        rows = [{"elements": " ".join(map(str, u)), "provenance": ";".join(family.provenance[u])} for u in family]
        _emit(args, _rows_csv(rows, ("elements", "provenance")))
    else:
        _emit(args, family.to_jsonl())
    return EXIT_OK


# -- roots -------------------------------------------------------------------

def roots_row(s: int) -> dict:
    poly = spectral.polynomial_Ps(s)
    res = spectral.largest_root(poly)
    row = {
        "s": s, "case": poly.case_id, "polynomial": str(poly), "lambda": res.lam,
        "lambda_lo": str(res.lo), "lambda_hi": str(res.hi), "log2_lambda": spectral.log2(res.lam),
    }
    if s % 2 == 0 and s >= 4:
        cm = spectral.case_matrix(s)
        row.update(matrix=[list(r) for r in cm.entries], matrix_source=cm.source,
                   char_poly_check=spectral.char_poly_check(s), eigen_lambda=spectral.eigen_lambda(s))
    return row


def cmd_roots(args) -> int:
    rows = [roots_row(s) for s in range(args.s, (args.s_max or args.s) + 1)]
    fields = ("s", "case", "polynomial", "lambda", "log2_lambda", "char_poly_check", "eigen_lambda")
    if args.format == "json":
        _emit(args, "".join(_dump_json(r) for r in rows))
    elif args.format == "csv":
        _emit(args, _rows_csv(rows, fields))
    else:
        _emit(args, _rows_text(rows, fields))
    failed = any(r.get("char_poly_check") is False for r in rows)
    return EXIT_VERIFY if failed else EXIT_OK


# -- verify ------------------------------------------------------------------

def _check(name: str, claimed, observed, ok: bool, **notes) -> dict:
    return {"check": name, "claimed": str(claimed), "observed": str(observed),
            "verdict": bounds.HOLDS if ok else bounds.FAILS, "notes": notes}


def _report_row(report: bounds.BoundReport) -> dict:
    d = report.to_dict()
    name = d["theorem"] + "(" + ",".join(f"{k}={v}" for k, v in d["parameters"].items()) + ")"
    return {"check": name, "claimed": d["claimed_bound"], "observed": d["oracle_value"],
            "verdict": d["verdict"], "notes": {"kind": d["kind"], "oracle": d["oracle_source"], **d["notes"]}}


STATEMENT1_IDENTITIES = {
    2: [(6, (2, 1, 3, 1, 1, 2)), (7, (2, 1, 2, 1, 1, 1, 1, 2)), (8, (2, 3, 3, 1, 3, 2)),
        (9, (2, 3, 2, 1, 1, 1, 3, 2)), (10, (2, 3, 2, 3, 1, 1, 3, 2)),
        (11, (2, 1, 1, 2, 3, 3, 1, 1, 2, 2))],
    3: [(4, (2, 2, 1, 1, 1, 1, 2)), (5, (2, 1, 1, 1, 3, 1, 2, 2)), (6, (2, 3, 1, 3, 1, 2, 1, 1, 2)),
        (7, (2, 1, 2, 2, 1, 2, 3, 2, 1, 2))],
}


def suite_statement1(args) -> list[dict]:
    rows = []
    for a, items in STATEMENT1_IDENTITIES.items():
        for m, u in items:
            value = core.continuant(u)
            rows.append(_check(f"<{','.join(map(str, u))}>", a**m, value, value == a**m))
    rows.append(_check("<2,1,2>", 8, core.continuant((2, 1, 2)), core.continuant((2, 1, 2)) == 8))
    for u in [(2, 1, 3, 1, 1, 2), (3, 1, 4, 1, 5, 9, 2, 6), (1, 2, 3)]:
        rows.append(_check(f"reverse<{','.join(map(str, u))}>", core.continuant(u),
                           core.continuant(core.reverse(u)), core.continuant(u) == core.continuant(core.reverse(u))))
        rows.append(_check(f"det<{','.join(map(str, u))}>", core.continuant(u), core.continuant_det(u),
                           core.continuant(u) == core.continuant_det(u)))
    return rows


def suite_lemmas(args) -> list[dict]:
    rows = []
    for u in [(2, 1, 3, 1, 1, 2), (2, 3), (3, 1, 1, 2)]:
        k = core.continuant(u)
        for b in (1, 2, 3, 4):
            for form, w in enumerate(constructions.doubling_forms(u, b), start=1):
                rows.append(_check(f"double({','.join(map(str, u))};b={b};form={form})", b * k * k,
                                   core.continuant(w), core.continuant(w) == b * k * k))
        w, w_prime = constructions.hensley_double(u, 2)
        rows.append(_check(f"hensley({','.join(map(str, u))})", (2 * k * k, k * k),
                           (core.continuant(w), core.continuant(w_prime)),
                           (core.continuant(w), core.continuant(w_prime)) == (2 * k * k, k * k)))
    cache = _seed_cache(args)
    table = bounds.g_table(2, args.m_max, bounds.base_window(2, 2))
    for m in range(6, args.m_max + 1):
        fam = constructions.generate_family(2, 2, m, cache)
        fam.verify()
        rows.append(_check(f"family(a=2,s=2,m={m})", 4 * table[m], len(fam), len(fam) >= 4 * table[m]))
    return rows


def suite_theorem1(args) -> list[dict]:
    rows = []
    for m in range(12, args.m_max + 1):
        rows.append(_report_row(bounds.theorem1_bound(2, 2, m, node_budget=args.node_budget)))
    for s, m in [(3, 30), (4, 40), (6, 70), (6, 200), (8, 100), (10, 120)]:
        rows.append(_report_row(bounds.theorem1_bound(2, s, m, oracle="method")))
    return rows


def suite_theorem2(args) -> list[dict]:
    s0, _ = spectral.find_s0(args.s_max)
    if s0 is None:
        return [_check("find_s0", "s0 exists", "none", False)]
    rows = [_check("find_s0", "s0", s0, True)]
    rows.append(_report_row(bounds.theorem2_bound(2, 2**s0, 6 * s0 + 10, s0=s0, oracle="method")))
    return rows


def suite_theorem3(args) -> list[dict]:
    gap = spectral.gap_check()
    rows = [_check("gap 2mu^(1/5)-lambda", "> 0.0000756", gap.value, gap.exceeds("0.0000756"))]
    rows.append(_report_row(bounds.theorem3_bound(28 * 513 + 5)))
    for t in (1, 2, 3):
        refined, plain = bounds.theorem3_chain(t), bounds.theorem1_same_steps(t)
        rows.append(_check(f"refined chain t={t}", plain, refined, refined >= plain))
    return rows


def suite_theorem4(args) -> list[dict]:
    return [_report_row(bounds.theorem4_bound(m, node_budget=args.node_budget)) for m in (8, 9, 10)]


def suite_theorem5(args) -> list[dict]:
    rows = [_report_row(bounds.theorem5_bound(k, node_budget=args.node_budget)) for k in (2, 3, 4)]
    return rows


def suite_theorem6(args) -> list[dict]:
    return [_report_row(bounds.theorem6_upper(s)) for s in (3, 5, 7, 4, 2)]


def suite_remarks(args) -> list[dict]:
    rows = []
    for s in range(4, 101, 2):
        lam = spectral.largest_root(spectral.polynomial_Ps(s)).lam
        eig = spectral.eigen_lambda(s)
        rows.append(_check(f"eigen vs root s={s}", lam, eig, abs(lam - eig) <= 1e-9))
        rows.append(_check(f"charpoly s={s}", "P_s", "2A", spectral.char_poly_check(s)))
    for s in range(6, args.s_max + 1, 2):
        r = spectral.remark1_expansion(s)
        rows.append(_check(f"remark1 s={s} case={r.case_id}", f"theta in {r.interval}", r.theta, r.within,
                           in_bracket=r.in_bracket))
    return rows


SUITE_FUNCS: dict[str, Callable] = {
    "statement1": suite_statement1, "lemmas": suite_lemmas, "theorem1": suite_theorem1,
    "theorem2": suite_theorem2, "theorem3": suite_theorem3, "theorem4": suite_theorem4,
    "theorem5": suite_theorem5, "theorem6": suite_theorem6, "remarks": suite_remarks,
}


def _seed_cache(args) -> constructions.SeedCache:
    path = getattr(args, "seed_cache", None)
    if path == "none":
        return constructions.SeedCache(None)
    return constructions.SeedCache(path or constructions.DEFAULT_SEED_CACHE)


def cmd_verify(args) -> int:
    suites = SUITES if "all" in args.suite else tuple(dict.fromkeys(args.suite))
    rows = []
    for name in suites:
        _progress(args, f"suite {name} ...")
        for row in SUITE_FUNCS[name](args):
            rows.append({"suite": name, **row})
    fields = ("suite", "check", "claimed", "observed", "verdict")
    if args.format == "json":
        _emit(args, "".join(_dump_json(r) for r in rows))
    elif args.format == "csv":
        _emit(args, _rows_csv(rows, fields))
    else:
        _emit(args, _rows_text(rows, fields))
    failed = [r for r in rows if r["verdict"] == bounds.FAILS]
    _progress(args, f"{len(rows)} checks, {len(failed)} failed")
    return EXIT_VERIFY if failed else EXIT_OK


# -- zaremba -----------------------------------------------------------------

def cmd_zaremba(args) -> int:
    found = census.zaremba_witness(args.d, args.bound)
    if found is None:
        payload = {"d": str(args.d), "N": args.bound, "c": None, "elements": None}
        text = "none\n"
    else:
        c, u = found
        payload = {"d": str(args.d), "N": args.bound, "c": str(c), "elements": list(u)}
        text = f"{c}/{args.d} = [{', '.join(map(str, u))}]\n"
    if args.format == "json":
        _emit(args, _dump_json(payload))
    elif args.format == "csv":
        row = {**payload, "elements": "" if payload["elements"] is None else " ".join(map(str, payload["elements"]))}
        _emit(args, _rows_csv([row], ("d", "N", "c", "elements")))
    else:
        _emit(args, text)
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--output", metavar="PATH", help="write the payload here instead of stdout")
    common.add_argument("--workers", type=_positive, default=1)
    common.add_argument("--node-budget", type=_positive, default=census.DEFAULT_NODE_BUDGET)
    common.add_argument("--quiet", action="store_true", help="suppress progress on stderr")

    parser = _Parser(prog="continuants", description="Continuants with bounded partial quotients.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("count", parents=[common], help="exact census f(a^m, N)")
    p.add_argument("--a", type=_positive, required=True)
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--bound", "--N", dest="bound", type=_positive, required=True,
                   help="elements must be strictly below this")
    p.add_argument("--mode", choices=census.MODES, default="sequences")
    p.add_argument("--list", action="store_true", help="emit the sequences instead of the count")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("witnesses", parents=[common], help="doubling-construction witnesses for a^m")
    p.add_argument("--a", type=_positive, required=True)
    p.add_argument("--s", type=_positive, required=True)
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--seed-cache", metavar="PATH", help="seed cache file, or 'none' for in-memory")
    p.set_defaults(func=cmd_witnesses)

    p = sub.add_parser("roots", parents=[common], help="case polynomial, largest root and matrix check")
    p.add_argument("--s", type=_positive, required=True)
    p.add_argument("--s-max", type=_positive, help="sweep s..s-max")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", action="append", choices=SUITES + ("all",), default=None)
    p.add_argument("--m-max", type=_positive, default=20, help="largest m for census-backed checks")
    p.add_argument("--s-max", type=_positive, default=200, help="largest s for spectral sweeps")
    p.add_argument("--seed-cache", metavar="PATH", help="seed cache file, or 'none' for in-memory")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("zaremba", parents=[common], help="smallest c with c/d having elements < N")
    p.add_argument("--d", type=_positive, required=True)
    p.add_argument("--bound", "--N", dest="bound", type=_positive, required=True)
    p.set_defaults(func=cmd_zaremba)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify" and not args.suite:
            args.suite = ["all"]
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (NotApplicableError, SeedNotFoundError, ContinuantError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
