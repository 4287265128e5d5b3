"""Random tables and CSPs shared by the property and acceptance tests."""

from __future__ import annotations

import itertools
import random

from hypothesis import strategies as st

from rulesmith import corpus
from rulesmith.model import ConstraintInstance, ConstraintTable, Csp

SMALL_CORPUS = ("and", "or", "xor", "not", "not3", "fork", "t", "line", "l", "arrow",
                "equiv", "and3", "and4", "msign", "nonarc", "full_adder")
BOOLEAN_CORPUS = ("and", "or", "xor", "not", "full_adder")
VALUES = ("a", "b", "c", "d")
# tables whose alphabets overlap, so random instances actually share variables
FAMILIES = (
    ("and", "or", "xor", "not", "full_adder", "nonarc", "and3"),
    ("fork", "t", "line", "l", "arrow"),
    ("equiv",),
    ("msign",),
    ("and4",),
    ("not3", "nonarc"),
)


def random_table(rng: random.Random, max_arity: int = 3, max_dom: int = 4, name: str = "rt") -> ConstraintTable:
    arity = rng.randint(1, max_arity)
    doms = [tuple(VALUES[: rng.randint(1, max_dom)]) for _ in range(arity)]
    space = list(itertools.product(*doms))
    k = rng.randint(1, len(space))
    rows = rng.sample(space, k)
    return ConstraintTable(name, tuple("xyzw"[:arity]), doms, rows)


@st.composite
def tables(draw, max_arity: int = 3, max_dom: int = 4):
    arity = draw(st.integers(1, max_arity))
    doms = [VALUES[: draw(st.integers(1, max_dom))] for _ in range(arity)]
    space = list(itertools.product(*doms))
    rows = draw(st.sets(st.sampled_from(space), min_size=1, max_size=len(space)))
    return ConstraintTable("ht", tuple("xyzw"[:arity]), doms, sorted(rows))


def random_csp(rng: random.Random, names=SMALL_CORPUS, max_instances: int = 3, restrict_p: float = 0.5) -> Csp:
    """One to `max_instances` corpus instances on shared variables, with
    randomly shrunk domains (never empty)."""
    k = rng.randint(1, max_instances)
    if rng.random() < 0.7:
        fams = [f for f in (tuple(n for n in fam if n in names) for fam in FAMILIES) if f]
        names = rng.choice(fams)
    bases = [corpus.load_table(rng.choice(names)) for _ in range(k)]
    pool: list[str] = []
    allowed: dict[str, set] = {}
    insts = []
    for b in bases:
        binding = []
        for role, dom in enumerate(b.domains):
            candidates = [v for v in pool if v not in binding and allowed[v] & set(dom)]
            if candidates and rng.random() < 0.5:
                v = rng.choice(candidates)
                allowed[v] &= set(dom)
            else:
                v = f"v{len(pool)}"
                pool.append(v)
                allowed[v] = set(dom)
            binding.append(v)
        insts.append((b, tuple(binding)))
    order = {}
    for b, binding in insts:
        for v, dom in zip(binding, b.domains):
            order.setdefault(v, dom)
    universe = [tuple(a for a in order[v] if a in allowed[v]) for v in pool]
    domains = []
    for uni in universe:
        if rng.random() < restrict_p and len(uni) > 1:
            size = rng.randint(1, len(uni))
            domains.append(tuple(sorted(rng.sample(uni, size), key=uni.index)))
        else:
            domains.append(uni)
    return Csp(tuple(pool), tuple(universe), tuple(ConstraintInstance(b, bd) for b, bd in insts), tuple(domains))


@st.composite
def csps(draw, names=SMALL_CORPUS, max_instances: int = 3):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_csp(random.Random(seed), names, max_instances)
