"""Propagation rules over a base table and their semantic predicates.

A rule is a premise of membership atoms on distinct variables and one or more
disequality conclusions.  Equality rules use the same structure with
singleton premise sets; the `kind` field keeps the two apart.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .model import AtomicFormula, ConstraintTable

EQUALITY = "equality"
MEMBERSHIP = "membership"
KINDS = (EQUALITY, MEMBERSHIP)


@dataclass(frozen=True)
class Rule:
    premise: tuple[tuple[str, tuple[str, ...]], ...]
    conclusions: tuple[tuple[str, str], ...]
    kind: str = MEMBERSHIP

    def __post_init__(self):
        object.__setattr__(
            self, "premise", tuple((x, tuple(s)) for x, s in self.premise)
        )
        object.__setattr__(self, "conclusions", tuple((y, a) for y, a in self.conclusions))
        if self.kind not in KINDS:
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if not self.conclusions:
            raise ValueError("a rule needs at least one conclusion")
        pvars = [x for x, _ in self.premise]
        if len(set(pvars)) != len(pvars):
            raise ValueError("premise variables must be distinct")
        for x, s in self.premise:
            if not s:
                raise ValueError(f"empty premise set for {x}")
            if self.kind == EQUALITY and len(s) != 1:
                raise ValueError("equality rule premises are single values")
        for y, _ in self.conclusions:
            if y in pvars:
                raise ValueError(f"conclusion variable {y} occurs in the premise")

    @classmethod
    def equality(cls, premise: dict[str, str] | Sequence[tuple[str, str]], *conclusions: tuple[str, str]) -> Rule:
        items = premise.items() if isinstance(premise, dict) else premise
        return cls(tuple((x, (a,)) for x, a in items), conclusions, EQUALITY)

    @classmethod
    def membership(cls, premise: dict[str, Iterable[str]] | Sequence[tuple[str, Iterable[str]]], *conclusions: tuple[str, str]) -> Rule:
        items = premise.items() if isinstance(premise, dict) else premise
        return cls(tuple((x, tuple(s)) for x, s in items), conclusions, MEMBERSHIP)

    @property
    def premise_vars(self) -> tuple[str, ...]:
        return tuple(x for x, _ in self.premise)

    @property
    def conclusion(self) -> tuple[str, str]:
        if len(self.conclusions) != 1:
            raise ValueError("grouped rule has several conclusions")
        return self.conclusions[0]

    def premise_atoms(self) -> list[AtomicFormula]:
        if self.kind == EQUALITY:
            return [AtomicFormula(x, "=", s[0]) for x, s in self.premise]
        return [AtomicFormula(x, "in", s) for x, s in self.premise]

    def conclusion_atoms(self) -> list[AtomicFormula]:
        return [AtomicFormula(y, "!=", a) for y, a in self.conclusions]

    def ungroup(self) -> list[Rule]:
        return [Rule(self.premise, (c,), self.kind) for c in self.conclusions]

    def as_membership(self) -> Rule:
        return Rule(self.premise, self.conclusions, MEMBERSHIP)

    def canonical(self, table: ConstraintTable) -> Rule:
        """Premise sorted by variable position, sets and conclusions by domain order."""
        check_rule(self, table)
        idx = table.value_index
        premise = sorted(self.premise, key=lambda p: table.position(p[0]))
        premise = tuple(
            (x, tuple(sorted(set(s), key=idx[table.position(x)].__getitem__)))
            for x, s in premise
        )
        concl = sorted(
            set(self.conclusions),
            key=lambda c: (table.position(c[0]), idx[table.position(c[0])][c[1]]),
        )
        return Rule(premise, tuple(concl), self.kind)

    def __str__(self):
        return format_rule(self)


def check_rule(rule: Rule, table: ConstraintTable) -> None:
    """Raise if `rule` mentions variables or values foreign to `table`."""
    for x, s in rule.premise:
        dom = table.domain(x)
        bad = [a for a in s if a not in dom]
        if bad:
            raise ValueError(f"values {bad} are outside the domain of {x} in {table.name}")
    for y, a in rule.conclusions:
        if a not in table.domain(y):
            raise ValueError(f"value {a!r} is outside the domain of {y} in {table.name}")


def sort_key(rule: Rule, table: ConstraintTable):
    idx = table.value_index
    prem = []
    for x, s in rule.premise:
        p = table.position(x)
        prem.append((p, tuple(idx[p][a] for a in s)))
    concl = tuple((table.position(y), idx[table.position(y)][a]) for y, a in rule.conclusions)
    return (len(rule.premise), tuple(p for p, _ in prem), tuple(v for _, v in prem), concl)


class RuleSet:
    """Canonically ordered, duplicate-free ungrouped rules of one kind for one table."""

    def __init__(self, table: ConstraintTable, kind: str, rules: Iterable[Rule] = ()):
        if kind not in KINDS:
            raise ValueError(f"unknown rule kind {kind!r}")
        self.table = table
        self.kind = kind
        flat = {}
        for r in rules:
            if r.kind != kind:
                raise ValueError(f"{r.kind} rule in a {kind} rule set")
            for u in r.ungroup():
                u = u.canonical(table)
                flat[u] = None
        self.rules: tuple[Rule, ...] = tuple(sorted(flat, key=lambda r: sort_key(r, table)))

    @property
    def base(self) -> str:
        return self.table.name

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __eq__(self, other):
        if not isinstance(other, RuleSet):
            return NotImplemented
        return self.kind == other.kind and self.rules == other.rules

    def __repr__(self):
        return f"RuleSet({self.table.name!r}, {self.kind}, {len(self.rules)} rules)"

    def grouped(self) -> list[Rule]:
        return group_by_premise(self.rules)


def group_by_premise(rules: Iterable[Rule]) -> list[Rule]:
    """Merge rules with identical premises, keeping first-occurrence order."""
    groups: dict[tuple, list] = {}
    kinds: dict[tuple, str] = {}
    for r in rules:
        key = (r.kind, r.premise)
        concl = groups.setdefault(key, [])
        kinds[key] = r.kind
        for c in r.conclusions:
            if c not in concl:
                concl.append(c)
    return [Rule(prem, tuple(c), kind) for (kind, prem), c in groups.items()]


# -- semantics ---------------------------------------------------------------

def premise_holds(rule: Rule, tuple_: Sequence[str], table: ConstraintTable) -> bool:
    for x, s in rule.premise:
        if tuple_[table.position(x)] not in s:
            return False
    return True


def _conclusions_hold(rule: Rule, tuple_: Sequence[str], table: ConstraintTable) -> bool:
    return all(tuple_[table.position(y)] != a for y, a in rule.conclusions)


def is_valid(rule: Rule, table: ConstraintTable) -> bool:
    return all(
        _conclusions_hold(rule, d, table)
        for d in table.tuples
        if premise_holds(rule, d, table)
    )


def is_feasible(rule: Rule, table: ConstraintTable) -> bool:
    return any(premise_holds(rule, d, table) for d in table.tuples)


def is_closed_under(table: ConstraintTable, rule: Rule) -> bool:
    """No relevant application: when every row meets the premise, each
    conclusion value must already be gone from its (possibly restricted)
    domain."""
    if all(premise_holds(rule, d, table) for d in table.tuples):
        return all(a not in table.domain(y) for y, a in rule.conclusions)
    return True


def extends(r1: Rule, r2: Rule) -> bool:
    """Syntactic extension: `r1`'s premise is at least as strong as `r2`'s."""
    if r1.kind != r2.kind:
        raise ValueError("cannot compare rules of different kinds")
    if r1.conclusion != r2.conclusion:
        raise ValueError("extension is only defined for equal conclusions")
    p1 = dict(r1.premise)
    for x, t in r2.premise:
        s = p1.get(x)
        if s is None or not set(s) <= set(t):
            return False
    return True


def weakenings(rule: Rule, table: ConstraintTable) -> Iterator[Rule]:
    """Every other rule of the same kind that `rule` properly extends.

    Membership sets are drawn from the columns of `table`, equality values
    are kept as they are.
    """
    premise = rule.premise
    n = len(premise)
    for keep in itertools.product((False, True), repeat=n):
        kept = [premise[i] for i in range(n) if keep[i]]
        if rule.kind == EQUALITY:
            if len(kept) < n:
                yield Rule(tuple(kept), rule.conclusions, EQUALITY)
            continue
        options = []
        for x, s in kept:
            col = table.column(x)
            extra = [a for a in col if a not in s]
            supersets = []
            for bits in itertools.product((False, True), repeat=len(extra)):
                supersets.append(tuple(s) + tuple(a for a, b in zip(extra, bits) if b))
            options.append(supersets)
        for choice in itertools.product(*options):
            cand = Rule(tuple(zip([x for x, _ in kept], choice)), rule.conclusions, MEMBERSHIP)
            if len(kept) < n or any(len(c) > len(s) for c, (_, s) in zip(choice, kept)):
                yield cand


def is_minimal(rule: Rule, table: ConstraintTable) -> bool:
    """Feasible and properly extends no valid rule of its kind (checked by
    enumerating every rule it extends)."""
    if not is_feasible(rule, table):
        return False
    for r in rule.ungroup():
        for w in weakenings(r, table):
            if is_valid(w, table):
                return False
    return True


# -- canonical text ----------------------------------------------------------

def _format_premise(rule: Rule) -> str:
    if not rule.premise:
        return "true"
    if rule.kind == EQUALITY:
        return ", ".join(f"{x}={s[0]}" for x, s in rule.premise)
    return ", ".join(f"{x} in {{{','.join(s)}}}" for x, s in rule.premise)


def format_rule(rule: Rule) -> str:
    concl = ", ".join(f"{y} != {a}" for y, a in rule.conclusions)
    return f"{_format_premise(rule)} -> {concl}"


def format_rules(rules: RuleSet, grouped: bool = True) -> str:
    lines = [f"rules {rules.table.name} {rules.kind}"]
    body = rules.grouped() if grouped else list(rules.rules)
    lines += [format_rule(r) for r in body]
    return "\n".join(lines) + "\n"


class RuleSyntaxError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


_EQ_ATOM = re.compile(r"^\s*([^\s=,{}]+)\s*=\s*([^\s=,{}]+)\s*$")
_IN_ATOM = re.compile(r"^\s*([^\s=,{}]+)\s+in\s+\{([^{}]*)\}\s*$")
_NE_ATOM = re.compile(r"^\s*([^\s=,{}!]+)\s*!=\s*([^\s=,{}]+)\s*$")


def _split_top(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def parse_rule(line: str, lineno: int = 1, kind: str | None = None) -> Rule:
    if "->" not in line:
        raise RuleSyntaxError(lineno, "missing '->'")
    lhs, rhs = line.split("->", 1)
    lhs = lhs.strip()
    premise = []
    saw_in = saw_eq = False
    if lhs != "true":
        if not lhs:
            raise RuleSyntaxError(lineno, "empty premise (write 'true')")
        for part in _split_top(lhs):
            m = _EQ_ATOM.match(part)
            if m:
                premise.append((m.group(1), (m.group(2),)))
                saw_eq = True
                continue
            m = _IN_ATOM.match(part)
            if m:
                vals = tuple(v.strip() for v in m.group(2).split(",") if v.strip())
                if not vals:
                    raise RuleSyntaxError(lineno, f"empty set in {part.strip()!r}")
                premise.append((m.group(1), vals))
                saw_in = True
                continue
            raise RuleSyntaxError(lineno, f"bad premise atom {part.strip()!r}")
    concl = []
    for part in rhs.split(","):
        m = _NE_ATOM.match(part)
        if not m:
            raise RuleSyntaxError(lineno, f"bad conclusion {part.strip()!r}")
        concl.append((m.group(1), m.group(2)))
    if kind is None:
        kind = MEMBERSHIP if saw_in else EQUALITY
    elif kind == EQUALITY and saw_in:
        raise RuleSyntaxError(lineno, "membership atom in an equality rule set")
    try:
        return Rule(tuple(premise), tuple(concl), kind)
    except ValueError as exc:
        raise RuleSyntaxError(lineno, str(exc)) from None


def parse_rules(text: str, table: ConstraintTable | None = None, tables: dict | None = None) -> RuleSet:
    """Parse the canonical ``.rules`` text.

    The first non-comment line is the header ``rules <table> <kind>``.  The
    table is taken from `table` or looked up by name in `tables`.
    """
    header = None
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            words = line.split()
            if len(words) != 3 or words[0] != "rules" or words[2] not in KINDS:
                raise RuleSyntaxError(lineno, "expected header 'rules <table> equality|membership'")
            header = (words[1], words[2], lineno)
            continue
        rules.append((lineno, parse_rule(line, lineno, header[1])))
    if header is None:
        raise RuleSyntaxError(1, "missing header")
    name, kind, hline = header
    if table is None:
        if not tables or name not in tables:
            raise RuleSyntaxError(hline, f"unknown table {name!r}")
        table = tables[name]
    elif table.name != name:
        raise RuleSyntaxError(hline, f"rules are for {name!r}, not {table.name!r}")
    for lineno, r in rules:
        try:
            for x in r.premise_vars + tuple(y for y, _ in r.conclusions):
                table.position(x)
            check_rule(r, table)
        except (KeyError, ValueError) as exc:
            raise RuleSyntaxError(lineno, str(exc).strip('"')) from None
    return RuleSet(table, kind, [r for _, r in rules])
