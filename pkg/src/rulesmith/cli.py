"""Command-line front end.

Exit status is 0 on success, 1 when the answer is negative (no solution, not
consistent, a count mismatch in ``bench``), and 2 on usage or input errors.
Timings are written to stderr so that stdout stays byte-stable.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import corpus
from .export import to_chr
from .formats import FormatError, format_table, read_csp, read_tables
from .generation import GenConfig, GenStats, generate
from .model import ConstraintTable, materialize, solutions
from .oracles import minimal_rules
from .propagation import (
    RuleCache,
    check_arc_consistent,
    check_membership_rule_consistent,
    check_rule_consistent,
    gac_oracle,
    instantiate,
    minimal_rule_instances,
    propagate,
)
from .rules import EQUALITY, MEMBERSHIP, RuleSet, RuleSyntaxError, format_rules, parse_rules
from .search import DECLARATION, SMALLEST_DOMAIN, LabelingStrategy, solve_report

log = logging.getLogger("rulesmith")

KIND = {"eq": EQUALITY, "equality": EQUALITY, "mem": MEMBERSHIP, "membership": MEMBERSHIP}


class UsageError(Exception):
    pass


def _path(p: str) -> Path:
    """A path as given, or relative to the shipped data directory."""
    path = Path(p)
    if path.exists():
        return path
    alt = corpus.data_root() / p
    if alt.exists():
        return alt
    raise UsageError(f"no such file: {p}")


def _table(spec: str) -> ConstraintTable:
    """A ``.ct``/``.json`` path or the name of a corpus table."""
    try:
        path = _path(spec)
    except UsageError:
        try:
            return corpus.load_table(spec)
        except KeyError:
            raise UsageError(f"{spec!r} is neither a table file nor a corpus table") from None
    tables = read_tables(path)
    if len(tables) != 1:
        raise UsageError(f"{spec}: expected one table, found {len(tables)}")
    return tables[0]


def _csp(spec: str):
    return read_csp(_path(spec), corpus.resolve)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _tick(label: str, t0: float) -> None:
    print(f"{label}: {time.perf_counter() - t0:.3f}s", file=sys.stderr)


# -- subcommands -----------------------------------------------------------------

def cmd_gen(args) -> int:
    table = _table(args.table)
    stats = GenStats()
    t0 = time.perf_counter()
    rs = generate(table, GenConfig(KIND[args.kind], args.max_premise, args.workers), stats)
    _tick(f"gen {table.name} {rs.kind}", t0)
    print(f"candidates={stats.candidates} kept={stats.kept} grouped={len(rs.grouped())}", file=sys.stderr)
    _write(format_rules(rs, grouped=not args.ungrouped), args.out)
    return 0


def _rule_instances(args, cf):
    choice = args.rules
    if choice is None:
        if cf.rule_files:
            choice = [str(p) for p in cf.rule_files]
        else:
            choice = ["mem"]
    if len(choice) == 1 and choice[0] in KIND:
        return minimal_rule_instances(cf.csp, KIND[choice[0]], RuleCache(args.max_premise))
    sets = []
    for f in choice:
        if f in KIND:
            raise UsageError("--rules takes either eq/mem or rule files, not both")
        sets.append(corpus.load_rules(_path(f), cf.tables))
    return instantiate(cf.csp, sets)


def _fmt_solution(vars_, point) -> str:
    return " ".join(f"{x}={v}" for x, v in zip(vars_, point))


def cmd_solve(args) -> int:
    cf = _csp(args.csp)
    t0 = time.perf_counter()
    ris = _rule_instances(args, cf)
    _tick("rules", t0)
    limit = None if args.all else (args.limit if args.limit is not None else 1)
    t0 = time.perf_counter()
    if args.trace:
        _, trace = propagate(cf.csp, ris)
        sys.stdout.write(trace.to_text())
    sols, stats = solve_report(cf.csp, ris, LabelingStrategy(args.order), limit)
    _tick("solve", t0)
    for s in sols:
        print(_fmt_solution(cf.csp.vars, s))
    if args.stats:
        print(f"stats: {stats.to_text()}")
        if stats.refuted_by_propagation:
            print("stats: refuted by propagation alone")
        elif stats.solved_by_propagation:
            print("stats: solved by propagation alone")
    if not sols:
        print("no solution")
        return 1
    return 0


def cmd_check(args) -> int:
    cf = _csp(args.csp)
    label, fn = {
        "rule": ("rule-consistent", check_rule_consistent),
        "memrule": ("membership-rule-consistent", check_membership_rule_consistent),
        "arc": ("arc-consistent", check_arc_consistent),
    }[args.consistency]
    ok = fn(cf.csp)
    print(f"{label}: {'yes' if ok else 'no'}")
    return 0 if ok else 1


def cmd_export(args) -> int:
    table = _table(args.table) if args.table else None
    tables = {table.name: table} if table else {}
    try:
        rs = corpus.load_rules(_path(args.input), tables)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "chr":
        text = to_chr(rs, table or rs.table, args.naming)
    else:
        text = format_rules(rs, grouped=not args.ungrouped)
    _write(text, args.out)
    return 0


def cmd_oracle(args) -> int:
    if args.what == "rules":
        if not args.table:
            raise UsageError("oracle rules needs --table")
        table = _table(args.table)
        t0 = time.perf_counter()
        rs = minimal_rules(table, KIND[args.kind])
        _tick(f"oracle rules {table.name}", t0)
        sys.stdout.write(format_rules(rs))
        return 0
    if not args.csp:
        raise UsageError(f"oracle {args.what} needs --csp")
    cf = _csp(args.csp)
    if args.what == "gac":
        out = gac_oracle(cf.csp)
        for x, d in zip(out.vars, out.domains):
            print(f"{x} in {{{','.join(d)}}}")
        return 1 if out.failed else 0
    sols = solutions(cf.csp)
    for s in sols:
        print(_fmt_solution(cf.csp.vars, s))
    return 0 if sols else 1


def cmd_compose(args) -> int:
    cf = _csp(args.csp)
    interface = [v for v in args.interface.split(",") if v]
    table = materialize(cf.csp, interface, args.name)
    _write(format_table(table), args.out)
    return 0


def _cell(n) -> str:
    return "-" if n is None else str(n)


def _secs(x) -> str:
    return "-" if x is None else f"{x:.2f}"


def cmd_bench(args) -> int:
    names = [n for n in corpus.COUNT_TABLE if not args.filter or args.filter in n]
    if args.tier != "all":
        names = [n for n in names if corpus.load(n).tier == args.tier or args.filter]
    header = f"{'name':<12}{'arity':>6}{'|D|':>5}{'|C|':>6}{'eq':>7}{'exp':>7}{'mem':>7}{'exp':>7}"
    print(header)
    print(f"{'name':<12}{'eq-time':>10}{'mem-time':>10}", file=sys.stderr)
    status = 0
    for name in names:
        entry = corpus.load(name)
        t = entry.table
        got, secs = {}, {}
        for kind in (EQUALITY, MEMBERSHIP):
            exp = getattr(entry.expected, kind) if entry.expected else None
            if kind == MEMBERSHIP and exp is None and not args.force:
                continue
            t0 = time.perf_counter()
            got[kind] = len(generate(t, GenConfig(kind, args.max_premise, args.workers)).grouped())
            secs[kind] = time.perf_counter() - t0
        exp = entry.expected or corpus.Expected(None, None)
        if args.max_premise is None:
            for kind, e in ((EQUALITY, exp.equality), (MEMBERSHIP, exp.membership)):
                if kind in got and e is not None and got[kind] != e:
                    status = 1
        size = max(len(d) for d in t.domains)
        print(f"{name:<12}{t.arity:>6}{size:>5}{len(t):>6}"
              f"{_cell(got.get(EQUALITY)):>7}{_cell(exp.equality):>7}"
              f"{_cell(got.get(MEMBERSHIP)):>7}{_cell(exp.membership):>7}")
        print(f"{name:<12}{_secs(secs.get(EQUALITY)):>10}{_secs(secs.get(MEMBERSHIP)):>10}", file=sys.stderr)
    if args.max_premise is not None:
        print(f"premise cap K={args.max_premise}")
    return status


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rulesmith", description="Compile table constraints into propagation rules and solve CSPs with them.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate minimal valid rules for a table")
    g.add_argument("--kind", choices=sorted(KIND), default="eq")
    g.add_argument("--table", required=True, help="table file or corpus table name")
    g.add_argument("--max-premise", type=int)
    g.add_argument("--workers", type=int)
    g.add_argument("--ungrouped", action="store_true", help="one conclusion per line")
    g.add_argument("--out")
    g.set_defaults(fn=cmd_gen)

    s = sub.add_parser("solve", help="propagate and label")
    s.add_argument("--csp", required=True)
    s.add_argument("--rules", nargs="+", help="eq, mem, or rule files (default: the CSP's rule files, else mem)")
    s.add_argument("--max-premise", type=int)
    grp = s.add_mutually_exclusive_group()
    grp.add_argument("--all", action="store_true")
    grp.add_argument("--limit", type=int)
    s.add_argument("--order", choices=(DECLARATION, SMALLEST_DOMAIN), default=DECLARATION)
    s.add_argument("--stats", action="store_true")
    s.add_argument("--trace", action="store_true", help="print the root propagation trace")
    s.set_defaults(fn=cmd_solve)

    c = sub.add_parser("check", help="test a local consistency notion")
    c.add_argument("--csp", required=True)
    c.add_argument("--consistency", choices=("rule", "memrule", "arc"), required=True)
    c.set_defaults(fn=cmd_check)

    e = sub.add_parser("export", help="render a rule file as CHR or canonical rules")
    e.add_argument("--format", choices=("chr", "rules"), default="chr")
    e.add_argument("--in", dest="input", required=True)
    e.add_argument("--table")
    e.add_argument("--naming", choices=("position", "appearance"), default="position")
    e.add_argument("--ungrouped", action="store_true")
    e.add_argument("--out")
    e.set_defaults(fn=cmd_export)

    o = sub.add_parser("oracle", help="brute-force reference answers")
    o.add_argument("what", choices=("gac", "rules", "solutions"))
    o.add_argument("--csp")
    o.add_argument("--table")
    o.add_argument("--kind", choices=sorted(KIND), default="eq")
    o.set_defaults(fn=cmd_oracle)

    b = sub.add_parser("bench", help="rule counts for the corpus tables")
    b.add_argument("--filter")
    b.add_argument("--tier", choices=(corpus.DESK, corpus.BENCH, "all"), default=corpus.DESK)
    b.add_argument("--max-premise", type=int)
    b.add_argument("--workers", type=int)
    b.add_argument("--force", action="store_true", help="also run membership generation where no count is known")
    b.set_defaults(fn=cmd_bench)

    m = sub.add_parser("compose", help="materialize a CSP's solutions on an interface as a table")
    m.add_argument("--csp", required=True)
    m.add_argument("--interface", required=True, help="comma-separated variables")
    m.add_argument("--name", required=True)
    m.add_argument("--out")
    m.set_defaults(fn=cmd_compose)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.fn(args)
    except (UsageError, FormatError, RuleSyntaxError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"rulesmith {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
