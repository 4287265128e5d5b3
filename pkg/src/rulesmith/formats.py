"""Readers and writers for table (``.ct``) and CSP (``.csp``) files.

Both formats are line oriented with ``#`` comments.  A ``.json`` file with
the same content is accepted in place of either.

A table file holds one or more blocks::

    constraint and
    vars x y z
    domain x 0 1
    ...
    tuples
    0 0 0
    ...
    end

A CSP file declares variables with their domains and binds table instances::

    include tables.ct          # optional, relative to the CSP file
    rules puzzle.rules         # optional default rule file
    var x 0 1
    use and(x,y,z)
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

from .model import ConstraintInstance, ConstraintTable, Csp


class FormatError(ValueError):
    def __init__(self, source: str, lineno: int, message: str):
        super().__init__(f"{source}:{lineno}: {message}")
        self.source = source
        self.lineno = lineno


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


# -- tables --------------------------------------------------------------------

def parse_tables(text: str, source: str = "<string>") -> list[ConstraintTable]:
    tables = []
    cur = None
    in_tuples = False
    for lineno, words in _lines(text):
        head = words[0]
        if in_tuples:
            if words == ["end"]:
                tables.append(_finish(cur, source, lineno))
                cur, in_tuples = None, False
            else:
                cur["tuples"].append((lineno, tuple(words)))
            continue
        if head == "constraint":
            if cur is not None:
                raise FormatError(source, lineno, "previous constraint block lacks 'end'")
            if len(words) != 2:
                raise FormatError(source, lineno, "expected 'constraint <name>'")
            cur = {"name": words[1], "vars": None, "domains": {}, "tuples": [], "line": lineno}
        elif cur is None:
            raise FormatError(source, lineno, f"{head!r} outside a constraint block")
        elif head == "vars":
            cur["vars"] = words[1:]
        elif head == "domain":
            if len(words) < 2:
                raise FormatError(source, lineno, "expected 'domain <var> <values>'")
            if words[1] in cur["domains"]:
                raise FormatError(source, lineno, f"domain of {words[1]} given twice")
            cur["domains"][words[1]] = tuple(words[2:])
        elif head == "tuples":
            in_tuples = True
        else:
            raise FormatError(source, lineno, f"unknown keyword {head!r}")
    if cur is not None:
        raise FormatError(source, cur["line"], f"constraint {cur['name']} is not closed by 'end'")
    return tables


def _finish(cur: dict, source: str, lineno: int) -> ConstraintTable:
    if not cur["vars"]:
        raise FormatError(source, cur["line"], f"{cur['name']}: missing 'vars'")
    missing = [x for x in cur["vars"] if x not in cur["domains"]]
    if missing:
        raise FormatError(source, cur["line"], f"{cur['name']}: no domain for {missing}")
    extra = [x for x in cur["domains"] if x not in cur["vars"]]
    if extra:
        raise FormatError(source, cur["line"], f"{cur['name']}: domain for unknown {extra}")
    seen = set()
    for tl, t in cur["tuples"]:
        if t in seen:
            raise FormatError(source, tl, f"duplicate tuple {' '.join(t)}")
        seen.add(t)
    try:
        return ConstraintTable(
            cur["name"], tuple(cur["vars"]), tuple(cur["domains"][x] for x in cur["vars"]),
            tuple(t for _, t in cur["tuples"]),
        )
    except ValueError as exc:
        raise FormatError(source, lineno, str(exc)) from None


def format_table(table: ConstraintTable) -> str:
    out = [f"constraint {table.name}", "vars " + " ".join(table.vars)]
    out += [f"domain {x} " + " ".join(d) for x, d in zip(table.vars, table.domains)]
    out.append("tuples")
    out += [" ".join(t) for t in table.tuples]
    out.append("end")
    return "\n".join(out) + "\n"


def table_to_json(table: ConstraintTable) -> dict:
    return {
        "constraint": table.name,
        "vars": list(table.vars),
        "domains": {x: list(d) for x, d in zip(table.vars, table.domains)},
        "tuples": [list(t) for t in table.tuples],
    }


def table_from_json(obj: dict) -> ConstraintTable:
    vars_ = obj["vars"]
    return ConstraintTable(
        obj["constraint"], vars_, [obj["domains"][x] for x in vars_], [tuple(t) for t in obj["tuples"]]
    )


def read_tables(path: str | Path) -> list[ConstraintTable]:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        obj = json.loads(text)
        items = obj if isinstance(obj, list) else obj.get("tables", [obj])
        return [table_from_json(o) for o in items]
    return parse_tables(text, str(path))


def read_table(path: str | Path) -> ConstraintTable:
    tables = read_tables(path)
    if len(tables) != 1:
        raise FormatError(str(path), 1, f"expected one table, found {len(tables)}")
    return tables[0]


# -- CSPs ----------------------------------------------------------------------

_USE = re.compile(r"^([^\s(),]+)\(([^()]*)\)$")


@dataclass
class CspFile:
    csp: Csp
    tables: dict[str, ConstraintTable] = field(default_factory=dict)
    rule_files: list[Path] = field(default_factory=list)


def parse_csp(text: str, resolve: Callable[[str], ConstraintTable], source: str = "<string>",
              base_dir: Path | None = None) -> CspFile:
    """`resolve` maps a table name to its table; tables from ``include`` lines
    take precedence."""
    base_dir = base_dir or Path(".")
    local: dict[str, ConstraintTable] = {}
    names, doms, uses, rule_files = [], [], [], []
    for lineno, words in _lines(text):
        head = words[0]
        if head == "var":
            if len(words) < 2:
                raise FormatError(source, lineno, "expected 'var <name> <values>'")
            if words[1] in names:
                raise FormatError(source, lineno, f"variable {words[1]} declared twice")
            names.append(words[1])
            doms.append(tuple(words[2:]))
        elif head == "use":
            m = _USE.match("".join(words[1:]))
            if not m:
                raise FormatError(source, lineno, "expected 'use <table>(<var>,...)'")
            uses.append((lineno, m.group(1), tuple(v for v in m.group(2).split(",") if v)))
        elif head == "include":
            for w in words[1:]:
                for t in read_tables(base_dir / w):
                    local[t.name] = t
        elif head == "rules":
            rule_files += [base_dir / w for w in words[1:]]
        else:
            raise FormatError(source, lineno, f"unknown keyword {head!r}")
    return _build_csp(names, doms, uses, local, resolve, rule_files, source)


def _build_csp(names, doms, uses, local, resolve, rule_files, source) -> CspFile:
    used: dict[str, ConstraintTable] = {}
    insts = []
    for lineno, tname, binding in uses:
        try:
            table = local[tname] if tname in local else resolve(tname)
        except KeyError:
            raise FormatError(source, lineno, f"unknown table {tname!r}") from None
        used[tname] = table
        try:
            insts.append(ConstraintInstance(table, binding))
        except ValueError as exc:
            raise FormatError(source, lineno, str(exc)) from None
    try:
        csp = Csp(tuple(names), tuple(doms), tuple(insts))
    except ValueError as exc:
        raise FormatError(source, 0, str(exc)) from None
    return CspFile(csp, used, list(rule_files))


def csp_from_json(obj: dict, resolve: Callable[[str], ConstraintTable], source: str = "<json>",
                  base_dir: Path | None = None) -> CspFile:
    base_dir = base_dir or Path(".")
    local = {}
    for w in obj.get("include", []):
        for t in read_tables(base_dir / w):
            local[t.name] = t
    for o in obj.get("tables", []):
        t = table_from_json(o)
        local[t.name] = t
    vars_ = obj["vars"]
    if isinstance(vars_, Mapping):
        names, doms = list(vars_), [tuple(vars_[x]) for x in vars_]
    else:
        names, doms = [v["name"] for v in vars_], [tuple(v["domain"]) for v in vars_]
    uses = []
    for k, u in enumerate(obj.get("use", []), 1):
        if isinstance(u, str):
            m = _USE.match(u.replace(" ", ""))
            if not m:
                raise FormatError(source, k, f"bad use entry {u!r}")
            uses.append((k, m.group(1), tuple(v for v in m.group(2).split(",") if v)))
        else:
            uses.append((k, u["table"], tuple(u["binding"])))
    return _build_csp(names, doms, uses, local, resolve, [base_dir / w for w in obj.get("rules", [])], source)


def format_csp(csp: Csp, includes: tuple[str, ...] = (), rules: tuple[str, ...] = ()) -> str:
    out = [f"include {w}" for w in includes] + [f"rules {w}" for w in rules]
    out += [f"var {x} " + " ".join(d) for x, d in zip(csp.vars, csp.domains)]
    out += [f"use {inst}" for inst in csp.instances]
    return "\n".join(out) + "\n"


def csp_to_json(csp: Csp) -> dict:
    return {
        "vars": {x: list(d) for x, d in zip(csp.vars, csp.domains)},
        "use": [{"table": i.base.name, "binding": list(i.binding)} for i in csp.instances],
    }


def read_csp(path: str | Path, resolve: Callable[[str], ConstraintTable]) -> CspFile:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return csp_from_json(json.loads(text), resolve, str(path), path.parent)
    return parse_csp(text, resolve, str(path), path.parent)
