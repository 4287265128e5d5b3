"""Generation of all minimal valid equality and membership rules for a table.

Both generators walk premise sizes upwards (0, 1, ..., n-1).  A candidate is
kept when it is valid and does not extend a rule kept earlier, so a rule is
always met after every rule it could extend.  Inside one premise-variable
set, membership premises are visited in decreasing order of their sets.

Blocks for different premise-variable sets of the same size never interact,
which is what allows a worker pool per size stage; results are merged in a
fixed order so the output does not depend on scheduling.
"""

from __future__ import annotations

import itertools
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import ConstraintTable, Domain, from_mask
from .rules import EQUALITY, KINDS, MEMBERSHIP, Rule, RuleSet

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Assignment:
    vars: tuple[str, ...]
    values: tuple[str, ...]


@dataclass(frozen=True)
class WeakAssignment:
    vars: tuple[str, ...]
    sets: tuple[Domain, ...]


@dataclass(frozen=True)
class GenConfig:
    kind: str = EQUALITY
    max_premise: int | None = None
    workers: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if self.max_premise is not None and self.max_premise < 0:
            raise ValueError("max_premise must be non-negative")


@dataclass
class GenStats:
    candidates: int = 0
    kept: int = 0
    stage_seconds: list[float] = field(default_factory=list)


def default_workers() -> int:
    cap = os.environ.get("RULESMITH_THREADS")
    if cap:
        try:
            return max(1, int(cap))
        except ValueError:
            log.warning("ignoring non-integer RULESMITH_THREADS=%r", cap)
    return 1


def _positions(table: ConstraintTable, X) -> tuple[int, ...]:
    return tuple(table.position(x) if isinstance(x, str) else int(x) for x in X)


def enumerate_assignments(table: ConstraintTable, X) -> list[Assignment]:
    """Distinct projections of the rows on `X`, in order of first occurrence."""
    pos = _positions(table, X)
    names = tuple(table.vars[p] for p in pos)
    seen: dict[tuple, None] = {}
    for t in table.tuples:
        seen.setdefault(tuple(t[p] for p in pos), None)
    return [Assignment(names, s) for s in seen]


def _submasks(mask: int) -> list[int]:
    out, sub = [], mask
    while sub:
        out.append(sub)
        sub = (sub - 1) & mask
    return out


def _weak_grid(table: ConstraintTable, pos: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    """All shared weak assignments on `pos` as an ``(W, k)`` mask array in
    decreasing order, plus each row's total cardinality."""
    k = len(pos)
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64), np.zeros(1, dtype=np.int64)
    per_var = [np.array(sorted(_submasks(table.column_masks[p])), dtype=np.int64) for p in pos]
    grids = np.meshgrid(*per_var, indexing="ij")
    masks = np.stack([g.ravel() for g in grids], axis=1)
    enc = table.encoded[:, pos]
    shared = np.zeros(len(masks), dtype=bool)
    for row in enc:
        hit = np.ones(len(masks), dtype=bool)
        for j in range(k):
            hit &= (masks[:, j] >> int(row[j])) & 1 == 1
        shared |= hit
    masks = masks[shared]
    card = np.zeros(len(masks), dtype=np.int64)
    for j in range(k):
        card += _popcount(masks[:, j])
    # lexsort: last key is primary
    keys = [masks[:, j] for j in reversed(range(k))] + [-card]
    order = np.lexsort(keys)
    return masks[order], card[order]


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    c = np.zeros_like(a)
    while a.any():
        c += a & 1
        a >>= 1
    return c


def enumerate_weak_assignments(table: ConstraintTable, X) -> list[WeakAssignment]:
    """Weak assignments on `X`: larger sets first (pointwise supersets precede
    subsets); ties by total size, then by the bitset value of each set."""
    pos = _positions(table, X)
    names = tuple(table.vars[p] for p in pos)
    masks, _ = _weak_grid(table, pos)
    return [
        WeakAssignment(names, tuple(from_mask(table.domains[p], int(m)) for p, m in zip(pos, row)))
        for row in masks
    ]


# -- one block: a fixed premise-variable set ---------------------------------

def _prior_hits(prior: dict, y: int, a: int, pos: tuple[int, ...]):
    """Rules kept in earlier stages whose premise variables lie inside `pos`."""
    by_z = prior.get((y, a))
    if not by_z:
        return
    for r in range(len(pos)):
        for sub in itertools.combinations(range(len(pos)), r):
            z = tuple(pos[j] for j in sub)
            for premise in by_z.get(z, ()):
                yield sub, premise


def _equality_block(table: ConstraintTable, pos: tuple[int, ...], prior: dict):
    enc = table.encoded
    n = table.arity
    kept, candidates = [], 0
    proj = enc[:, pos] if pos else np.zeros((len(enc), 0), dtype=np.int64)
    seen: dict[tuple, None] = {}
    for row in proj:
        seen.setdefault(tuple(int(v) for v in row), None)
    for s in seen:
        match = np.all(proj == np.array(s, dtype=np.int64), axis=1) if pos else np.ones(len(enc), bool)
        rows = enc[match]
        for y in range(n):
            if y in pos:
                continue
            present = set(int(v) for v in rows[:, y])
            for a in range(len(table.domains[y])):
                candidates += 1
                if a in present:
                    continue
                if any(all(s[j] == premise[t] for t, j in enumerate(sub))
                       for sub, premise in _prior_hits(prior, y, a, pos)):
                    continue
                kept.append((pos, s, y, a))
    return kept, candidates


def _membership_block(table: ConstraintTable, pos: tuple[int, ...], prior: dict):
    enc = table.encoded
    n = table.arity
    masks, _ = _weak_grid(table, pos)
    W = len(masks)
    kept, candidates = [], 0
    k = len(pos)
    for y in range(n):
        if y in pos:
            continue
        for a in range(len(table.domains[y])):
            candidates += W
            rows = enc[enc[:, y] == a][:, pos]
            alive = np.ones(W, dtype=bool)
            for row in rows:
                hit = np.ones(W, dtype=bool)
                for j in range(k):
                    hit &= (masks[:, j] >> int(row[j])) & 1 == 1
                alive &= ~hit
            for sub, premise in _prior_hits(prior, y, a, pos):
                inside = np.ones(W, dtype=bool)
                for t, j in enumerate(sub):
                    inside &= (masks[:, j] & ~premise[t]) == 0
                alive &= ~inside
            start = 0
            while True:
                nz = np.flatnonzero(alive[start:])
                if not len(nz):
                    break
                w = start + int(nz[0])
                chosen = masks[w]
                kept.append((pos, tuple(int(m) for m in chosen), y, a))
                inside = np.ones(W, dtype=bool)
                for j in range(k):
                    inside &= (masks[:, j] & ~chosen[j]) == 0
                alive &= ~inside
                start = w + 1
    return kept, candidates


def _run_block(args):
    table, pos, prior, kind = args
    if kind == EQUALITY:
        return _equality_block(table, pos, prior)
    return _membership_block(table, pos, prior)


def _to_rule(table: ConstraintTable, kind: str, item) -> Rule:
    pos, premise, y, a = item
    if kind == EQUALITY:
        prem = tuple((table.vars[p], (table.domains[p][v],)) for p, v in zip(pos, premise))
    else:
        prem = tuple((table.vars[p], from_mask(table.domains[p], m)) for p, m in zip(pos, premise))
    return Rule(prem, ((table.vars[y], table.domains[y][a]),), kind)


def generate(table: ConstraintTable, cfg: GenConfig = GenConfig(), stats: GenStats | None = None) -> RuleSet:
    if not table.tuples:
        raise ValueError(f"{table.name}: cannot generate rules for an empty table")
    stats = stats if stats is not None else GenStats()
    n = table.arity
    top = n - 1 if cfg.max_premise is None else min(cfg.max_premise, n - 1)
    workers = cfg.workers if cfg.workers is not None else default_workers()
    prior: dict = {}
    kept_all = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for i in range(top + 1):
            t0 = time.perf_counter()
            jobs = [(table, pos, prior, cfg.kind) for pos in itertools.combinations(range(n), i)]
            results = pool.map(_run_block, jobs) if pool else map(_run_block, jobs)
            stage = []
            for kept, cand in results:
                stage.extend(kept)
                stats.candidates += cand
            for pos, premise, y, a in stage:
                prior.setdefault((y, a), {}).setdefault(pos, []).append(premise)
            kept_all.extend(stage)
            dt = time.perf_counter() - t0
            stats.stage_seconds.append(dt)
            log.info("%s/%s stage %d: kept %d rules in %.3fs", table.name, cfg.kind, i, len(stage), dt)
    finally:
        if pool:
            pool.shutdown()
    stats.kept = len(kept_all)
    return RuleSet(table, cfg.kind, [_to_rule(table, cfg.kind, item) for item in kept_all])


def generate_equality_rules(table: ConstraintTable, cfg: GenConfig | None = None, stats: GenStats | None = None) -> RuleSet:
    cfg = GenConfig(EQUALITY) if cfg is None else GenConfig(EQUALITY, cfg.max_premise, cfg.workers)
    return generate(table, cfg, stats)


def generate_membership_rules(table: ConstraintTable, cfg: GenConfig | None = None, stats: GenStats | None = None) -> RuleSet:
    cfg = GenConfig(MEMBERSHIP) if cfg is None else GenConfig(MEMBERSHIP, cfg.max_premise, cfg.workers)
    return generate(table, cfg, stats)


def all_different_table(vars_, domain, name: str = "all_different") -> ConstraintTable:
    """Rows: every assignment of pairwise different values."""
    vars_, domain = tuple(vars_), tuple(domain)
    return ConstraintTable(name, vars_, (domain,) * len(vars_), tuple(itertools.permutations(domain, len(vars_))))


def all_different_rules(vars_, domain, table: ConstraintTable | None = None) -> RuleSet:
    """``x_i = a -> x_j != a`` for every ordered pair ``i != j`` and value ``a``.

    The rules are attached to `table`, by default the all-different table on
    `vars_`; they are valid for it but, once three or more variables meet
    fewer values, not all of them are minimal.
    """
    vars_ = tuple(vars_)
    if len(vars_) < 2:
        raise ValueError("all_different needs at least two variables")
    table = table if table is not None else all_different_table(vars_, domain)
    return RuleSet(table, EQUALITY, [
        Rule.equality({xi: a}, (xj, a))
        for xi in vars_
        for a in domain
        for xj in vars_
        if xj != xi
    ])
