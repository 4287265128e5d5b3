"""
Rules for a two-input conjunction
=================================

Generate the minimal equality and membership rules of ``and``, print them in
the plain rule syntax and as CHR, then watch one rule prune a domain.
"""

from rulesmith import corpus
from rulesmith.export import to_chr
from rulesmith.generation import GenConfig, generate
from rulesmith.model import single_instance_csp
from rulesmith.propagation import minimal_rule_instances, propagate
from rulesmith.rules import EQUALITY, MEMBERSHIP, format_rules

table = corpus.load_table("and")
print(table.tuples)

# Equality rules: six premises, seven single conclusions.
eq = generate(table, GenConfig(EQUALITY))
print(format_rules(eq))
print(len(eq), "ungrouped,", len(eq.grouped()), "grouped")

# For a Boolean table membership rules add nothing new.
mem = generate(table, GenConfig(MEMBERSHIP))
print({r.as_membership() for r in eq} == set(mem))

# The CHR rendering names free arguments in order of appearance.
print(to_chr(eq, naming="appearance"))

# Fix the first input to 0 and let the rules run: the output follows.
csp = single_instance_csp(table, [("0",), ("0", "1"), ("0", "1")])
out, trace = propagate(csp, minimal_rule_instances(csp, EQUALITY))
print(trace.to_text(), out.domain_map())
