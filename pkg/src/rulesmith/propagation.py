"""Rule application on CSPs, closure computation and consistency checks.

Rules are written over the roles of a base table.  Attaching a rule to a
constraint instance maps every role to the CSP variable bound to it, and the
premise sets become bitmasks over that variable's universe, so firing is one
mask comparison per premise atom.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .generation import GenConfig, generate
from .model import ConstraintInstance, ConstraintTable, Csp, to_mask
from .rules import EQUALITY, MEMBERSHIP, Rule, RuleSet


@dataclass(frozen=True)
class RuleInstance:
    """A (possibly grouped) rule attached to a constraint instance."""

    rule: Rule
    instance: ConstraintInstance
    label: str = ""

    def __post_init__(self):
        roles = set(self.instance.base.vars)
        for x in self.rule.premise_vars + tuple(y for y, _ in self.rule.conclusions):
            if x not in roles:
                raise ValueError(f"rule variable {x!r} is not a role of {self.instance.base.name}")

    def bound(self, role: str) -> str:
        return self.instance.binding[self.instance.base.position(role)]

    @property
    def name(self) -> str:
        return self.label or f"{self.instance.base.name}.{self.rule}"


@dataclass(frozen=True)
class _Compiled:
    # premise: (csp index, allowed mask); conclusions: (csp index, bit)
    premise: tuple[tuple[int, int], ...]
    conclusions: tuple[tuple[int, int], ...]
    source: RuleInstance


def _compile(csp: Csp, ri: RuleInstance) -> _Compiled:
    prem = []
    for x, s in ri.rule.premise:
        i = csp.index(ri.bound(x))
        prem.append((i, to_mask(csp.universe[i], [a for a in s if a in csp.universe[i]])))
    concl = []
    for y, a in ri.rule.conclusions:
        i = csp.index(ri.bound(y))
        if a in csp.universe[i]:
            concl.append((i, 1 << csp.universe[i].index(a)))
    return _Compiled(tuple(prem), tuple(concl), ri)


def _fires(c: _Compiled, masks: Sequence[int]) -> bool:
    # x = s is read as x in {s}: on a non-empty domain that is exactly D = {s},
    # and an emptied domain keeps firing, which keeps propagation monotone
    for i, m in c.premise:
        if masks[i] & ~m:
            return False
    return True


def fires(csp: Csp, ri: RuleInstance) -> bool:
    """Every premise domain lies inside its set.  For an equality atom
    ``x = s`` on a non-empty domain this means the domain is ``{s}``."""
    return _fires(_compile(csp, ri), csp.masks)


def is_relevant(csp: Csp, ri: RuleInstance) -> bool:
    c = _compile(csp, ri)
    masks = csp.masks
    return any(masks[i] & bit for i, bit in c.conclusions)


def apply_rule(csp: Csp, ri: RuleInstance) -> Csp:
    c = _compile(csp, ri)
    masks = list(csp.masks)
    if not _fires(c, masks):
        raise ValueError(f"{ri.name} does not fire")
    for i, bit in c.conclusions:
        masks[i] &= ~bit
    return csp.with_masks(masks)


@dataclass(frozen=True)
class Step:
    rule: str
    var: str
    value: str


@dataclass
class Trace:
    steps: list[Step] = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def to_text(self) -> str:
        return "".join(
            f"step {n}: {s.rule} prunes {s.var} != {s.value}\n" for n, s in enumerate(self.steps, 1)
        )


class Propagator:
    """Rule instances compiled once against a CSP's variables and universes.

    The compiled form only depends on variables, universes and bindings, so
    one propagator serves every CSP that shares them (search nodes, random
    restrictions of the same fixture).
    """

    def __init__(self, csp: Csp, rules: Iterable[RuleInstance]):
        self.vars = csp.vars
        self.universe = csp.universe
        self.compiled = [c for c in (_compile(csp, ri) for ri in rules) if c.conclusions]
        self.watch: list[list[int]] = [[] for _ in csp.vars]
        for k, c in enumerate(self.compiled):
            for i, _ in c.premise:
                self.watch[i].append(k)

    def __len__(self):
        return len(self.compiled)

    def run(self, masks: Sequence[int], rng: random.Random | None = None, trace: Trace | None = None) -> list[int]:
        """Closure of `masks` under the compiled rules.

        The default schedule is FIFO over rules whose premise variables
        changed.  With `rng`, the next rule is drawn uniformly from the
        pending ones instead; the closure is the same either way.
        """
        masks = list(masks)
        n = len(self.compiled)
        pending = [True] * n
        if rng is None:
            queue = deque(range(n))
            pop = queue.popleft
            push = queue.append
            size = queue.__len__
        else:
            bag = list(range(n))
            rng.shuffle(bag)

            def pop():
                j = rng.randrange(len(bag))
                bag[j], bag[-1] = bag[-1], bag[j]
                return bag.pop()

            push = bag.append
            size = bag.__len__
        while size():
            k = pop()
            pending[k] = False
            c = self.compiled[k]
            if not _fires(c, masks):
                continue
            for i, bit in c.conclusions:
                if not masks[i] & bit:
                    continue
                masks[i] &= ~bit
                if trace is not None:
                    trace.steps.append(Step(c.source.name, self.vars[i], _value(self.universe[i], bit)))
                for w in self.watch[i]:
                    if not pending[w]:
                        pending[w] = True
                        push(w)
        return masks


def _value(universe: Sequence[str], bit: int) -> str:
    return universe[bit.bit_length() - 1]


def propagate(csp: Csp, rules: Iterable[RuleInstance] | Propagator, rng: random.Random | None = None) -> tuple[Csp, Trace]:
    prop = rules if isinstance(rules, Propagator) else Propagator(csp, rules)
    trace = Trace()
    masks = prop.run(csp.masks, rng, trace)
    return csp.with_masks(masks), trace


def propagate_masks(csp: Csp, prop: Propagator, rng: random.Random | None = None) -> list[int]:
    return prop.run(csp.masks, rng)


# -- rule sources --------------------------------------------------------------

class RuleCache:
    """Minimal rule sets per (base table, kind), generated on first use."""

    def __init__(self, max_premise: int | None = None):
        self.max_premise = max_premise
        self._sets: dict[tuple, RuleSet] = {}

    def get(self, table: ConstraintTable, kind: str) -> RuleSet:
        key = (table.name, table, kind)
        rs = self._sets.get(key)
        if rs is None:
            rs = generate(table, GenConfig(kind, self.max_premise))
            self._sets[key] = rs
        return rs

    def put(self, rules: RuleSet) -> None:
        self._sets[(rules.table.name, rules.table, rules.kind)] = rules


_default_cache = RuleCache()


def instantiate(csp: Csp, rulesets: dict[str, RuleSet] | Iterable[RuleSet], grouped: bool = True) -> list[RuleInstance]:
    """Attach every rule of each base's rule set to every instance of that base."""
    if not isinstance(rulesets, dict):
        rulesets = {rs.table.name: rs for rs in rulesets}
    out = []
    for k, inst in enumerate(csp.instances):
        rs = rulesets.get(inst.base.name)
        if rs is None:
            continue
        body = rs.grouped() if grouped else list(rs.rules)
        for j, r in enumerate(body):
            out.append(RuleInstance(r, inst, f"{inst.base.name}#{k}.r{j + 1}"))
    return out


def minimal_rule_instances(csp: Csp, kind: str, cache: RuleCache | None = None) -> list[RuleInstance]:
    cache = cache or _default_cache
    sets = {}
    for inst in csp.instances:
        sets.setdefault(inst.base.name, cache.get(inst.base, kind))
    return instantiate(csp, sets)


def closure(csp: Csp, kind: str, cache: RuleCache | None = None) -> Csp:
    """Closure under the minimal valid rules of the given kind of every base."""
    return propagate(csp, minimal_rule_instances(csp, kind, cache))[0]


# -- consistency ---------------------------------------------------------------

def _closed(csp: Csp, kind: str, cache: RuleCache | None) -> bool:
    prop = Propagator(csp, minimal_rule_instances(csp, kind, cache))
    masks = csp.masks
    return not any(
        _fires(c, masks) and any(masks[i] & bit for i, bit in c.conclusions) for c in prop.compiled
    )


def check_rule_consistent(csp: Csp, cache: RuleCache | None = None) -> bool:
    """No minimal valid equality rule of any base has a relevant application.

    A failed CSP is reported as not consistent.
    """
    return not csp.failed and _closed(csp, EQUALITY, cache)


def check_membership_rule_consistent(csp: Csp, cache: RuleCache | None = None) -> bool:
    return not csp.failed and _closed(csp, MEMBERSHIP, cache)


class _Support:
    """Base tuples of one instance encoded as bit positions in CSP universes."""

    def __init__(self, csp: Csp, inst: ConstraintInstance):
        self.idx = np.array([csp.index(v) for v in inst.binding], dtype=np.int64)
        cols = []
        keep = np.ones(len(inst.base.tuples), dtype=bool)
        for role, v in enumerate(inst.binding):
            uni = {a: j for j, a in enumerate(csp.universe[csp.index(v)])}
            col = np.array([uni.get(t[role], -1) for t in inst.base.tuples], dtype=np.int64)
            keep &= col >= 0
            cols.append(col)
        self.bits = np.stack(cols, axis=1)[keep] if cols else np.zeros((0, 0), dtype=np.int64)

    def supported(self, masks: np.ndarray) -> np.ndarray:
        """Per role, the mask of values with a supporting tuple."""
        dom = masks[self.idx]
        alive = np.all((dom[None, :] >> self.bits) & 1 == 1, axis=1)
        rows = self.bits[alive]
        if not len(rows):
            return np.zeros(len(self.idx), dtype=np.int64)
        return np.bitwise_or.reduce(np.left_shift(1, rows), axis=0)


def _supports(csp: Csp) -> list[_Support]:
    return [_Support(csp, inst) for inst in csp.instances]


def check_arc_consistent(csp: Csp) -> bool:
    """Every value of every bound variable takes part in a tuple of its
    instance.  A failed CSP is reported as not consistent."""
    if csp.failed:
        return False
    masks = np.array(csp.masks, dtype=np.int64)
    for sup in _supports(csp):
        if np.any(sup.supported(masks) != masks[sup.idx]):
            return False
    return True


def gac_oracle_masks(csp: Csp, supports: list[_Support] | None = None, masks: Sequence[int] | None = None) -> list[int]:
    supports = supports if supports is not None else _supports(csp)
    m = np.array(csp.masks if masks is None else masks, dtype=np.int64)
    changed = True
    while changed:
        changed = False
        for sup in supports:
            new = m[sup.idx] & sup.supported(m)
            if np.any(new != m[sup.idx]):
                m[sup.idx] = new
                changed = True
    return [int(v) for v in m]


def gac_oracle(csp: Csp) -> Csp:
    """Naive generalized arc consistency: delete unsupported values until stable."""
    return csp.with_masks(gac_oracle_masks(csp))


__all__ = [
    "RuleInstance",
    "Trace",
    "Step",
    "Propagator",
    "RuleCache",
    "fires",
    "is_relevant",
    "apply_rule",
    "propagate",
    "instantiate",
    "minimal_rule_instances",
    "closure",
    "check_rule_consistent",
    "check_membership_rule_consistent",
    "check_arc_consistent",
    "gac_oracle",
    "gac_oracle_masks",
]
