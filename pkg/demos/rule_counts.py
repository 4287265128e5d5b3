"""
Rule counts across the corpus
=============================

Grouped rule counts for every desk-tier table next to the expected values,
plus a premise-size cap showing how the count shrinks.
"""

import time

from rulesmith import corpus
from rulesmith.generation import GenConfig, generate
from rulesmith.rules import EQUALITY, MEMBERSHIP

print(f"{'table':<12}{'|C|':>5}{'eq':>6}{'mem':>6}   expected   seconds")
for name in corpus.COUNT_TABLE:
    entry = corpus.load(name)
    if entry.tier != corpus.DESK:
        continue
    t0 = time.perf_counter()
    eq = len(generate(entry.table, GenConfig(EQUALITY)).grouped())
    mem = len(generate(entry.table, GenConfig(MEMBERSHIP)).grouped())
    exp = entry.expected
    print(f"{name:<12}{len(entry.table):>5}{eq:>6}{mem:>6}   {exp.equality}/{exp.membership:<6}"
          f"{time.perf_counter() - t0:8.2f}")

# Capping the premise at one variable keeps only the short rules.
t = corpus.load_table("msign")
for k in (0, 1, 2):
    print("msign, premise <=", k, len(generate(t, GenConfig(MEMBERSHIP, max_premise=k)).grouped()))
