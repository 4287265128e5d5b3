import itertools

import pytest
from hypothesis import given, strategies as st

from helpers import csps, tables
from rulesmith import corpus
from rulesmith.model import (
    AtomicFormula,
    ConstraintInstance,
    ConstraintTable,
    Csp,
    compose_permutations,
    csp_equivalent,
    is_based_on,
    materialize,
    permute,
    project,
    restrict,
    satisfies,
    single_instance_csp,
    solutions,
)

XYZ = ("x", "y", "z")


@pytest.fixture
def and_t():
    return corpus.load_table("and")


@pytest.fixture
def nonarc():
    return corpus.load_table("nonarc")


# -- table construction ---------------------------------------------------------

def test_table_rejects_duplicate_tuples():
    with pytest.raises(ValueError, match="duplicate tuple"):
        ConstraintTable("c", ("x",), (("0", "1"),), (("0",), ("0",)))


def test_table_rejects_foreign_value():
    with pytest.raises(ValueError, match="not in domain"):
        ConstraintTable("c", ("x",), (("0",),), (("1",),))


def test_table_rejects_wrong_arity():
    with pytest.raises(ValueError, match="arity"):
        ConstraintTable("c", ("x", "y"), (("0",), ("0",)), (("0",),))


def test_column_is_subset_of_domain(nonarc):
    t = restrict(nonarc, [("0", "1"), ("0", "1", "2")])
    assert t.column("y") == ("0", "1")
    assert set(t.column("y")) <= set(t.domain("y"))


def test_encoded_shape(and_t):
    assert and_t.encoded.shape == (4, 3)
    assert and_t.column_masks == (0b11, 0b11, 0b11)


# -- project ----------------------------------------------------------------------

def test_project_positional():
    assert project(("0", "1", "0"), XYZ, ("z", "x")) == ("0", "0")


def test_project_fork_row():
    assert project(("l", "r", "-"), XYZ, ("y",)) == ("r",)


def test_project_identity():
    t = ("a", "b", "c")
    assert project(t, XYZ, XYZ) == t


def test_project_unknown_variable():
    with pytest.raises(KeyError):
        project(("0", "1", "0"), XYZ, ("w",))


# -- permute ------------------------------------------------------------------------

def test_permute_identity(and_t):
    assert permute(and_t, (1, 2, 3)) == and_t


def test_permute_line_swap_keeps_rows():
    line = corpus.load_table("line")
    swapped = permute(line, (2, 1))
    assert set(swapped.tuples) == set(line.tuples)


def test_permute_t_junction_reversal():
    t = corpus.load_table("t")
    assert set(permute(t, (3, 2, 1)).tuples) == {
        ("+", "l", "r"), ("-", "l", "r"), ("r", "l", "r"), ("l", "l", "r")
    }


def test_permute_rejects_non_bijection(and_t):
    with pytest.raises(ValueError):
        permute(and_t, (1, 1, 2))
    with pytest.raises(ValueError):
        permute(and_t, (1, 2))


@given(tables(), st.data())
def test_permute_composition(t, data):
    n = t.arity
    pi = data.draw(st.permutations(range(1, n + 1)))
    rho = data.draw(st.permutations(range(1, n + 1)))
    assert permute(permute(t, pi), rho) == permute(t, compose_permutations(rho, pi))
    assert permute(t, tuple(range(1, n + 1))) == t


# -- restrict / based on -------------------------------------------------------------

def test_restrict_nonarc(nonarc):
    r = restrict(nonarc, [("0", "1"), ("0", "1", "2")])
    assert set(r.tuples) == {("0", "1"), ("1", "0")}


def test_restrict_full_domains(and_t):
    assert restrict(and_t, and_t.domains) == and_t


def test_restrict_and_to_inputs_one(and_t):
    assert restrict(and_t, [("1",), ("1",), ("0", "1")]).tuples == (("1", "1", "1"),)


def test_restrict_rejects_foreign_value(and_t):
    with pytest.raises(ValueError):
        restrict(and_t, [("0", "2"), ("0", "1"), ("0", "1")])


def test_based_on_small_restriction(nonarc):
    c = ConstraintTable("c", ("x", "y"), (("0",), ("1",)), (("0", "1"),))
    assert is_based_on(c, nonarc)


def test_not_based_on_when_row_missing(and_t):
    c = ConstraintTable("c", XYZ, and_t.domains, and_t.tuples[:-1])
    assert not is_based_on(c, and_t)


def test_based_on_arity_mismatch(and_t):
    with pytest.raises(ValueError):
        is_based_on(corpus.load_table("line"), and_t)


@given(tables(), st.data())
def test_restrict_idempotent_and_based_on(t, data):
    doms = [data.draw(st.sets(st.sampled_from(d), min_size=1)) for d in t.domains]
    r = restrict(t, doms)
    assert restrict(r, doms) == r
    assert is_based_on(r, t)


# -- satisfies -------------------------------------------------------------------------

def test_satisfies_equality():
    assert satisfies(("0", "1", "0"), XYZ, AtomicFormula("x", "=", "0"))


def test_satisfies_membership_fork_row():
    assert satisfies(("l", "r", "-"), XYZ, AtomicFormula("z", "in", ("+", "-")))


def test_satisfies_disequality_false():
    assert not satisfies(("1", "1", "1"), XYZ, AtomicFormula("z", "!=", "1"))


def test_satisfies_unknown_variable():
    with pytest.raises(KeyError):
        satisfies(("1",), ("x",), AtomicFormula("q", "=", "1"))


# -- solutions / equivalence ----------------------------------------------------------

def test_solutions_and_restricted(and_t):
    csp = single_instance_csp(and_t, [("1",), ("1",), ("0", "1")])
    assert solutions(csp) == [("1", "1", "1")]


def test_solutions_without_constraints():
    csp = Csp(("x",), (("0", "1"),))
    assert solutions(csp) == [("0",), ("1",)]


def test_solutions_of_failed_csp(and_t):
    csp = single_instance_csp(and_t, [(), ("1",), ("0", "1")])
    assert csp.failed
    assert solutions(csp) == []


def test_equivalent_reflexive(and_t):
    p = single_instance_csp(and_t)
    assert csp_equivalent(p, p)


def test_equivalent_after_pruning_z(and_t):
    p1 = single_instance_csp(and_t, [("1",), ("1",), ("0", "1")])
    p2 = single_instance_csp(and_t, [("1",), ("1",), ("1",)])
    assert csp_equivalent(p1, p2)


def test_equivalent_needs_same_vars(and_t):
    with pytest.raises(ValueError):
        csp_equivalent(single_instance_csp(and_t), Csp(("x",), (("0",),)))


@given(csps(), st.data())
def test_solutions_monotone(csp, data):
    i = data.draw(st.integers(0, len(csp.vars) - 1))
    dom = csp.domains[i]
    sub = data.draw(st.sets(st.sampled_from(dom), max_size=len(dom))) if dom else set()
    doms = list(csp.domains)
    doms[i] = tuple(a for a in dom if a in sub)
    smaller = csp.with_domains(doms)
    assert set(solutions(smaller)) <= set(solutions(csp))


# -- Csp validation ----------------------------------------------------------------------

def test_csp_rejects_value_outside_base(and_t):
    with pytest.raises(ValueError, match="outside the base domain"):
        Csp(XYZ, (("0", "2"), ("0", "1"), ("0", "1")), (ConstraintInstance(and_t, XYZ),))


def test_instance_binding_arity(and_t):
    with pytest.raises(ValueError):
        ConstraintInstance(and_t, ("x", "y"))


def test_instance_relation_is_lazy_restriction(and_t):
    csp = single_instance_csp(and_t, [("0",), ("0", "1"), ("0", "1")])
    assert csp.instance_relation(csp.instances[0]) == [("0", "0", "0"), ("0", "1", "0")]


# -- materialize ------------------------------------------------------------------------

def test_materialize_full_adder():
    fa = materialize(corpus.adder_circuit(), ("i1", "i2", "i3", "o1", "o2"), "full_adder")
    assert len(fa) == 8
    assert ("1", "0", "1", "1", "0") in fa.tuples
    # independent oracle: carry and sum bits of i1 + i2 + i3
    expect = {
        (str(a), str(b), str(c), str((a + b + c) // 2), str((a + b + c) % 2))
        for a, b, c in itertools.product((0, 1), repeat=3)
    }
    assert set(fa.tuples) == expect


def test_materialize_single_instance_identity(and_t):
    assert materialize(single_instance_csp(and_t), and_t.vars, "and") == and_t


def test_materialize_fixed_input_halves_rows():
    circuit = corpus.adder_circuit()
    iface = ("i1", "i2", "i3", "o1", "o2")
    full = materialize(circuit, iface, "fa")
    half = materialize(circuit.restrict(i1=("0",)), iface, "fa0")
    assert len(half) * 2 == len(full)


def test_materialize_empty_interface(and_t):
    with pytest.raises(ValueError):
        materialize(single_instance_csp(and_t), (), "e")


@given(tables())
def test_materialize_identity_property(t):
    assert materialize(single_instance_csp(t), t.vars, t.name) == t
