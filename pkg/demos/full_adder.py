"""
Composing a full adder
======================

Materialize the gate-level adder into one five-place table, then compare
what its rules and the gate rules deduce from the query [1, X, Y, Z, 0].
"""

from rulesmith import corpus
from rulesmith.formats import format_table
from rulesmith.model import materialize
from rulesmith.propagation import RuleCache, closure
from rulesmith.rules import EQUALITY

circuit = corpus.adder_circuit()
fa = materialize(circuit, ("i1", "i2", "i3", "o1", "o2"), "full_adder")
print(format_table(fa))

cache = RuleCache()
whole = closure(corpus.load_fixture("full_adder_query").csp, EQUALITY, cache)
gates = closure(corpus.load_fixture("add_query").csp, EQUALITY, cache)
print("full_adder rules:", whole.domain_map())
print("gate rules:      ", {x: gates.domain(x) for x in ("X", "Y", "Z")})
