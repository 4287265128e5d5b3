"""Complete solving: closure under the rules interleaved with domain splitting.

Each split divides one domain into ``{v}`` and the rest, ``v`` being the
first remaining value in universe order; the two halves together are
equivalent to the parent.  Leaves with all-singleton domains are checked
against every constraint, so a weak rule set (even an empty one) never
produces a wrong answer, only a bigger tree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .model import Csp, Tuple, from_mask
from .propagation import Propagator, RuleInstance

log = logging.getLogger(__name__)

DECLARATION = "declaration"
SMALLEST_DOMAIN = "smallest-domain"


@dataclass(frozen=True)
class LabelingStrategy:
    var_order: str = DECLARATION

    def __post_init__(self):
        if self.var_order not in (DECLARATION, SMALLEST_DOMAIN):
            raise ValueError(f"unknown variable order {self.var_order!r}")

    def pick(self, masks: list[int]) -> int:
        open_ = [(m.bit_count(), i) for i, m in enumerate(masks) if m & (m - 1)]
        if self.var_order == DECLARATION:
            return open_[0][1]
        return min(open_)[1]


@dataclass
class SearchStats:
    nodes: int = 0
    splits: int = 0
    prunes: int = 0
    failures: int = 0
    solutions: int = 0
    root_domains: dict = field(default_factory=dict)

    @property
    def solved_by_propagation(self) -> bool:
        return self.splits == 0 and self.solutions > 0

    @property
    def refuted_by_propagation(self) -> bool:
        return self.splits == 0 and self.solutions == 0

    def to_text(self) -> str:
        return (
            f"nodes={self.nodes} splits={self.splits} prunes={self.prunes} "
            f"failures={self.failures} solutions={self.solutions}"
        )


def _check_leaf(csp: Csp, checks, masks: list[int]) -> Tuple | None:
    point = tuple(u[m.bit_length() - 1] for u, m in zip(csp.universe, masks))
    for pos, allowed in checks:
        if tuple(point[i] for i in pos) not in allowed:
            return None
    return point


def iter_solve(csp: Csp, rules: Iterable[RuleInstance] | Propagator = (),
               strat: LabelingStrategy = LabelingStrategy(), stats: SearchStats | None = None) -> Iterator[Tuple]:
    """Depth-first, left branch (``x = v``) first.  Yields verified solutions."""
    prop = rules if isinstance(rules, Propagator) else Propagator(csp, rules)
    stats = stats if stats is not None else SearchStats()
    checks = [([csp.index(v) for v in inst.binding], set(inst.base.tuples)) for inst in csp.instances]
    stack = [list(csp.masks)]
    first = True
    while stack:
        masks = stack.pop()
        stats.nodes += 1
        before = sum(m.bit_count() for m in masks)
        masks = prop.run(masks)
        stats.prunes += before - sum(m.bit_count() for m in masks)
        if first:
            stats.root_domains = {x: from_mask(u, m) for x, u, m in zip(csp.vars, csp.universe, masks)}
            first = False
        if any(m == 0 for m in masks):
            stats.failures += 1
            continue
        if all(m & (m - 1) == 0 for m in masks):
            point = _check_leaf(csp, checks, masks)
            if point is None:
                stats.failures += 1
                continue
            stats.solutions += 1
            yield point
            continue
        i = strat.pick(masks)
        low = masks[i] & -masks[i]
        stats.splits += 1
        right = list(masks)
        right[i] &= ~low
        left = list(masks)
        left[i] = low
        stack.append(right)
        stack.append(left)


def solve(csp: Csp, rules: Iterable[RuleInstance] | Propagator = (),
          strat: LabelingStrategy = LabelingStrategy(), limit: int | None = None) -> list[Tuple]:
    out = []
    for s in iter_solve(csp, rules, strat):
        out.append(s)
        if limit is not None and len(out) >= limit:
            break
    return out


def solve_report(csp: Csp, rules: Iterable[RuleInstance] | Propagator = (),
                 strat: LabelingStrategy = LabelingStrategy(), limit: int | None = None) -> tuple[list[Tuple], SearchStats]:
    stats = SearchStats()
    out = []
    for s in iter_solve(csp, rules, strat, stats):
        out.append(s)
        if limit is not None and len(out) >= limit:
            break
    log.info("search: %s", stats.to_text())
    return out, stats
