"""
An impossible polyhedral scene
==============================

Ten junctions, thirteen edges, one variable per edge end.  Membership rules
(arc consistency) refute the scene outright; equality rules only shrink a
few domains and leave the rest to search.
"""

from rulesmith import corpus
from rulesmith.propagation import RuleCache, closure, minimal_rule_instances
from rulesmith.rules import EQUALITY, MEMBERSHIP
from rulesmith.search import solve_report

csp = corpus.load_fixture("impossible").csp
cache = RuleCache()

# What equality rules alone achieve before any split.
reduced = closure(csp, EQUALITY, cache)
for x in csp.vars:
    if reduced.domain(x) != csp.domain(x):
        print(x, reduced.domain(x))

for kind in (EQUALITY, MEMBERSHIP):
    sols, stats = solve_report(csp, minimal_rule_instances(csp, kind, cache))
    print(kind, "solutions:", len(sols), "|", stats.to_text())
