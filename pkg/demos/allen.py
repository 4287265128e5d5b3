"""
Reasoning about intervals
=========================

Allen's thirteen relations and their composition table, used as one ternary
constraint ``allen(R1, R2, R3)``: R3 is a possible relation between A and C
when A R1 B and B R2 C.
"""

from rulesmith import corpus
from rulesmith.generation import GenConfig, generate
from rulesmith.propagation import minimal_rule_instances
from rulesmith.rules import EQUALITY
from rulesmith.search import solve

table = corpus.load_table("allen")
print(len(table), "rows")
rules = generate(table, GenConfig(EQUALITY))
print(len(rules.grouped()), "grouped equality rules")

# The light was on (R1) around when the switch was touched (R2), John came in.
for name in ("allen_query", "allen_query_osd"):
    csp = corpus.load_fixture(name).csp
    sols = solve(csp, minimal_rule_instances(csp, EQUALITY))
    print(name, len(sols))
    for s in sols:
        print("  ", s)
