"""Brute-force reference answers, kept free of any cleverness.

`minimal_rules` enumerates every candidate premise of a kind, reads off the
valid conclusions directly from the matching rows, and keeps a rule when it
is feasible and none of the rules it properly extends is valid.  It shares
no code with the staged generators beyond the rule type.
"""

from __future__ import annotations

import itertools

from .model import ConstraintTable
from .rules import EQUALITY, MEMBERSHIP, Rule, RuleSet, weakenings


def _nonempty_subsets(values) -> list[tuple[str, ...]]:
    values = tuple(values)
    return [
        tuple(v for v, keep in zip(values, bits) if keep)
        for bits in itertools.product((False, True), repeat=len(values))
        if any(bits)
    ]


def candidate_premises(table: ConstraintTable, kind: str):
    """Every premise of the kind: equality values range over the declared
    domains, membership sets over the non-empty subsets of the columns."""
    n = table.arity
    for size in range(n + 1):
        for pos in itertools.combinations(range(n), size):
            if kind == EQUALITY:
                options = [[(a,) for a in table.domains[p]] for p in pos]
            else:
                options = [_nonempty_subsets(table.column(table.vars[p])) for p in pos]
            for sets in itertools.product(*options):
                yield tuple((table.vars[p], s) for p, s in zip(pos, sets))


def valid_rules(table: ConstraintTable, kind: str) -> dict[Rule, bool]:
    """All valid single-conclusion rules mapped to their feasibility."""
    out = {}
    for premise in candidate_premises(table, kind):
        pos = [table.position(x) for x, _ in premise]
        rows = [d for d in table.tuples if all(d[p] in s for p, (_, s) in zip(pos, premise))]
        for y in range(table.arity):
            if y in pos:
                continue
            present = {d[y] for d in rows}
            for a in table.domains[y]:
                if a not in present:
                    out[Rule(premise, ((table.vars[y], a),), kind)] = bool(rows)
    return out


def minimal_rules(table: ConstraintTable, kind: str = EQUALITY) -> RuleSet:
    valid = valid_rules(table, kind)
    keep = [
        r for r, feasible in valid.items()
        if feasible and not any(w.canonical(table) in valid for w in weakenings(r, table))
    ]
    return RuleSet(table, kind, keep)


__all__ = ["candidate_premises", "valid_rules", "minimal_rules", "MEMBERSHIP", "EQUALITY"]
