"""
Three children, three rooms, three items
========================================

The puzzle is a single universal constraint plus hand-written clue rules.
Propagation alone fixes every variable, no labeling needed.
"""

from rulesmith import corpus
from rulesmith.propagation import instantiate, propagate
from rulesmith.search import solve_report

cf = corpus.load_fixture("puzzle")
rules = corpus.load_rules(cf.rule_files[0], cf.tables)
print(len(rules), "rules over", len(cf.csp.vars), "variables")

ris = instantiate(cf.csp, [rules])
out, trace = propagate(cf.csp, ris)
print(trace.to_text())

for child in ("B", "D", "F"):
    print(child, out.domain(f"room_{child}"), out.domain(f"item_{child}"))

# The search engine agrees and never splits.
sols, stats = solve_report(cf.csp, ris)
print(stats.to_text())
