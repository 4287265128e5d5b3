import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import BOOLEAN_CORPUS, csps
from rulesmith import corpus
from rulesmith.model import ConstraintInstance, Csp, single_instance_csp, solutions
from rulesmith.propagation import (
    Propagator,
    RuleCache,
    RuleInstance,
    apply_rule,
    check_arc_consistent,
    check_membership_rule_consistent,
    check_rule_consistent,
    closure,
    fires,
    gac_oracle,
    instantiate,
    is_relevant,
    minimal_rule_instances,
    propagate,
)
from rulesmith.rules import EQUALITY, MEMBERSHIP, Rule

AND = corpus.load_table("and")
FORK = corpus.load_table("fork")
NONARC = corpus.load_table("nonarc")
CACHE = RuleCache()

eq = Rule.equality
mem = Rule.membership


def on(csp, rule, k=0):
    return RuleInstance(rule, csp.instances[k])


def and_csp(x=("0", "1"), y=("0", "1"), z=("0", "1")):
    return single_instance_csp(AND, [x, y, z])


def nonarc_csp():
    return corpus.load_fixture("nonarc").csp


# -- fires / relevance / apply ---------------------------------------------------------

def test_fires_on_fixed_input():
    csp = and_csp(x=("0",))
    assert fires(csp, on(csp, eq({"x": "0"}, ("z", "1"))))


def test_equality_atom_needs_singleton():
    csp = and_csp()
    assert not fires(csp, on(csp, eq({"x": "0"}, ("z", "1"))))


def test_fires_membership_subset():
    csp = single_instance_csp(FORK, [("+", "-"), FORK.domains[1], FORK.domains[2]])
    assert fires(csp, on(csp, mem({"x": ("+", "-")}, ("z", "l"))))


def test_empty_premise_fires():
    csp = single_instance_csp(corpus.load_table("t"))
    assert fires(csp, on(csp, eq({}, ("x", "+"))))


def test_relevant_while_value_present():
    csp = and_csp(x=("0",))
    assert is_relevant(csp, on(csp, eq({"x": "0"}, ("z", "1"))))


def test_not_relevant_after_removal():
    csp = and_csp(x=("0",), z=("0",))
    assert not is_relevant(csp, on(csp, eq({"x": "0"}, ("z", "1"))))


def test_relevance_ignores_failure_elsewhere():
    csp = and_csp(x=("0",), y=())
    assert csp.failed
    assert is_relevant(csp, on(csp, eq({"x": "0"}, ("z", "1"))))


def test_apply_prunes_z():
    csp = and_csp(x=("0",))
    out = apply_rule(csp, on(csp, eq({"x": "0"}, ("z", "1"))))
    assert out.domain("z") == ("0",)
    assert out.domain("x") == ("0",) and out.domain("y") == ("0", "1")


def test_apply_irrelevant_rule_is_identity():
    csp = and_csp(x=("0",), z=("0",))
    assert apply_rule(csp, on(csp, eq({"x": "0"}, ("z", "1")))) == csp


def test_apply_membership_on_nonarc():
    csp = nonarc_csp()
    out = apply_rule(csp, on(csp, mem({"x": ("0", "1")}, ("y", "2"))))
    assert out.domain("y") == ("0", "1")


def test_apply_requires_firing():
    csp = and_csp()
    with pytest.raises(ValueError):
        apply_rule(csp, on(csp, eq({"x": "0"}, ("z", "1"))))


def test_rule_instance_checks_roles():
    csp = and_csp()
    with pytest.raises(ValueError):
        on(csp, eq({"q": "0"}, ("z", "1")))


# -- propagate ---------------------------------------------------------------------------

def test_puzzle_solved_in_twelve_steps():
    cf = corpus.load_fixture("puzzle")
    rules = instantiate(cf.csp, [corpus.load_rules(cf.rule_files[0], cf.tables)])
    out, trace = propagate(cf.csp, rules)
    sol = corpus.puzzle_solution()
    assert all(len(d) == 1 for d in out.domains)
    assert {x: d[0] for x, d in zip(out.vars, out.domains)} == sol
    assert (sol["room_B"], sol["item_B"]) == ("dining", "rug")
    assert (sol["room_D"], sol["item_D"]) == ("living", "book")
    assert (sol["room_F"], sol["item_F"]) == ("den", "frame")
    assert len(trace) == 12


def test_propagate_without_rules():
    csp = and_csp(x=("0",))
    out, trace = propagate(csp, [])
    assert out == csp and len(trace) == 0


def test_and3_query():
    csp = corpus.load_fixture("and3_query").csp
    m = closure(csp, MEMBERSHIP, CACHE)
    assert all(d == ("1",) for d in m.domains)
    assert closure(csp, EQUALITY, CACHE).domains == csp.domains


def test_full_adder_query_versus_gates():
    fa = closure(corpus.load_fixture("full_adder_query").csp, EQUALITY, CACHE)
    assert fa.domain("Z") == ("1",)
    gates = corpus.load_fixture("add_query").csp
    assert closure(gates, EQUALITY, CACHE).domain("Z") == ("0", "1")


def test_trace_text():
    csp = and_csp(x=("0",))
    ri = RuleInstance(eq({"x": "0"}, ("z", "1")), csp.instances[0], "and#1")
    _, trace = propagate(csp, [ri])
    assert trace.to_text() == "step 1: and#1 prunes z != 1\n"


def test_instantiate_labels_follow_instances():
    cf = corpus.load_fixture("add_query")
    ris = minimal_rule_instances(cf.csp, EQUALITY, CACHE)
    labels = {ri.name.split(".")[0] for ri in ris}
    assert labels == {f"{inst.base.name}#{k}" for k, inst in enumerate(cf.csp.instances)}


# -- consistency checkers --------------------------------------------------------------------

def test_nonarc_checks():
    csp = nonarc_csp()
    assert check_rule_consistent(csp, CACHE)
    assert not check_membership_rule_consistent(csp, CACHE)
    assert not check_arc_consistent(csp)
    assert gac_oracle(csp).domain("y") == ("0", "1")


def test_and_fixed_input_not_rule_consistent():
    assert not check_rule_consistent(and_csp(x=("0",)), CACHE)


def test_and_fixed_output_not_rule_consistent():
    assert not check_rule_consistent(and_csp(z=("1",)), CACHE)


@pytest.mark.parametrize("name", ["and", "fork", "equiv", "msign", "full_adder", "not3"])
def test_base_csp_is_consistent_every_way(name):
    csp = single_instance_csp(corpus.load_table(name))
    assert check_arc_consistent(csp)
    assert check_membership_rule_consistent(csp, CACHE)
    assert check_rule_consistent(csp, CACHE)


def test_unused_domain_values_break_arc_consistency():
    # the arrow shaft is never labelled l or r
    csp = single_instance_csp(corpus.load_table("arrow"))
    assert not check_arc_consistent(csp)
    assert not check_membership_rule_consistent(csp, CACHE)
    assert gac_oracle(csp).domain("z") == ("+", "-")


def test_failed_csp_is_not_consistent():
    csp = and_csp(y=())
    assert not check_arc_consistent(csp)
    assert not check_rule_consistent(csp, CACHE)


# -- properties ---------------------------------------------------------------------------------

def _valid_instances(csp, kind):
    return minimal_rule_instances(csp, kind, CACHE)


@given(csps(), st.sampled_from([EQUALITY, MEMBERSHIP]), st.data())
def test_apply_preserves_solutions(csp, kind, data):
    ris = [ri for ri in _valid_instances(csp, kind) if fires(csp, ri)]
    if not ris:
        return
    ri = data.draw(st.sampled_from(ris))
    assert set(solutions(apply_rule(csp, ri))) == set(solutions(csp))


@given(csps(), st.sampled_from([EQUALITY, MEMBERSHIP]), st.integers(0, 2**31))
@settings(max_examples=40)
def test_confluence(csp, kind, seed):
    prop = Propagator(csp, _valid_instances(csp, kind))
    rng = random.Random(seed)
    base, _ = propagate(csp, prop)
    for _ in range(5):
        out, _ = propagate(csp, prop, rng)
        assert out.domains == base.domains


@given(csps(), st.sampled_from([EQUALITY, MEMBERSHIP]))
def test_trace_prunes_each_value_once(csp, kind):
    out, trace = propagate(csp, _valid_instances(csp, kind))
    pairs = [(s.var, s.value) for s in trace.steps]
    assert len(pairs) == len(set(pairs))
    assert len(trace) <= sum(len(d) for d in csp.domains)
    for (x, a) in pairs:
        assert a in csp.domain(x) and a not in out.domain(x)


@given(csps())
def test_membership_closure_is_gac(csp):
    m = closure(csp, MEMBERSHIP, CACHE)
    g = gac_oracle(csp)
    assert (m.failed and g.failed) or m.domains == g.domains


@given(csps())
def test_membership_closure_inside_equality_closure(csp):
    m = closure(csp, MEMBERSHIP, CACHE)
    e = closure(csp, EQUALITY, CACHE)
    assert all(set(a) <= set(b) for a, b in zip(m.domains, e.domains))


@given(csps())
def test_arc_consistency_implies_rule_consistency(csp):
    if check_arc_consistent(csp):
        assert check_rule_consistent(csp, CACHE)


@given(csps(names=BOOLEAN_CORPUS))
def test_boolean_rule_consistency_is_arc_consistency(csp):
    assert check_rule_consistent(csp, CACHE) == check_arc_consistent(csp)


@given(csps(), st.data())
def test_closure_is_monotone(csp, data):
    i = data.draw(st.integers(0, len(csp.vars) - 1))
    dom = csp.domains[i]
    keep = data.draw(st.sets(st.sampled_from(dom), min_size=1)) if dom else set()
    doms = list(csp.domains)
    doms[i] = tuple(a for a in dom if a in keep)
    small = closure(csp.with_domains(doms), MEMBERSHIP, CACHE)
    big = closure(csp, MEMBERSHIP, CACHE)
    if not small.failed:
        assert all(set(a) <= set(b) for a, b in zip(small.domains, big.domains))


def test_equality_atom_fires_on_emptied_domain():
    csp = and_csp(x=())
    ri = on(csp, eq({"x": "0"}, ("z", "1")))
    assert fires(csp, ri)
    assert apply_rule(csp, ri).domain("z") == ("0",)


def test_premise_outside_universe():
    # the premise value 1 is not in x's universe, so only an empty x fires it
    csp = Csp(("x", "y", "z"), (("0",), ("0", "1"), ("0", "1")),
              (ConstraintInstance(AND, ("x", "y", "z")),))
    ri = on(csp, eq({"x": "1", "y": "1"}, ("z", "0")))
    assert not fires(csp, ri)
