"""CHR text for generated rule sets.

A grouped rule becomes one propagation rule.  Premise singletons are written
as constants in the head, larger premise sets as ``in/2`` guards, and every
conclusion as a ``##`` disequality in the body.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from string import ascii_uppercase

from .model import ConstraintTable
from .rules import Rule, RuleSet, format_rules, parse_rules  # noqa: F401  (re-exported)

IN_PREAMBLE = "in(X,L):- dom(X,D), subset(D,L)."
_PLAIN_ATOM = re.compile(r"^(?:[a-z][A-Za-z0-9_]*|[0-9]+)$")

# letters used for fresh variables in order of appearance
_APPEARANCE = "XYZUVWPQRST"


def chr_value(value: str) -> str:
    """Render a value as a Prolog constant, quoting when it would not lex as one."""
    if _PLAIN_ATOM.match(value):
        return value
    return "'" + value.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _letters(n: int, naming: str) -> list[str]:
    pool = ascii_uppercase if naming == "position" else _APPEARANCE + "".join(
        c for c in ascii_uppercase if c not in _APPEARANCE
    )
    if n <= len(pool):
        return list(pool[:n])
    return [f"V{i + 1}" for i in range(n)]


@dataclass(frozen=True)
class ChrRule:
    head: str
    guards: tuple[str, ...]
    body: tuple[str, ...]

    def __str__(self):
        guard = f"{', '.join(self.guards)} | " if self.guards else ""
        return f"{self.head} ==> {guard}{','.join(self.body)}."


def chr_rule(rule: Rule, table: ConstraintTable, naming: str = "position") -> ChrRule:
    """`naming` is ``position`` (role i gets the i-th letter of A, B, ...) or
    ``appearance`` (fresh variables X, Y, Z, ... left to right in the head)."""
    if naming not in ("position", "appearance"):
        raise ValueError(f"unknown naming {naming!r}")
    sets = dict(rule.premise)
    letters = _letters(table.arity, naming)
    args, names, guards = [], {}, []
    fresh = iter(letters)
    for p, x in enumerate(table.vars):
        s = sets.get(x)
        if s is not None and len(s) == 1:
            args.append(chr_value(s[0]))
            continue
        var = letters[p] if naming == "position" else next(fresh)
        names[x] = var
        args.append(var)
        if s is not None and set(s) != set(table.domain(x)):
            guards.append(f"in({var},[{', '.join(chr_value(a) for a in s)}])")
    body = tuple(f"{names[y]}##{chr_value(a)}" for y, a in rule.conclusions)
    return ChrRule(f"{table.name}({','.join(args)})", tuple(guards), body)


def to_chr(rules: RuleSet, table: ConstraintTable | None = None, naming: str = "position") -> str:
    table = table or rules.table
    lines = [f"% {table.name}: {rules.kind} rules"]
    body = [str(chr_rule(r, table, naming)) for r in rules.grouped()]
    if any(" | " in line for line in body):
        lines.append(IN_PREAMBLE)
    return "\n".join(lines + body) + "\n"
