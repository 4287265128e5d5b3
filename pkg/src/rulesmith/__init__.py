"""Compile table constraints into minimal propagation rules and solve CSPs with them."""

from .export import to_chr
from .formats import read_csp, read_table, read_tables
from .generation import (
    GenConfig,
    GenStats,
    all_different_rules,
    enumerate_assignments,
    enumerate_weak_assignments,
    generate,
    generate_equality_rules,
    generate_membership_rules,
)
from .model import (
    AtomicFormula,
    ConstraintInstance,
    ConstraintTable,
    Csp,
    csp_equivalent,
    is_based_on,
    materialize,
    permute,
    project,
    restrict,
    satisfies,
    solutions,
)
from .propagation import (
    RuleInstance,
    apply_rule,
    check_arc_consistent,
    check_membership_rule_consistent,
    check_rule_consistent,
    fires,
    gac_oracle,
    is_relevant,
    propagate,
)
from .rules import (
    EQUALITY,
    MEMBERSHIP,
    Rule,
    RuleSet,
    extends,
    format_rules,
    group_by_premise,
    is_closed_under,
    is_feasible,
    is_minimal,
    is_valid,
    parse_rules,
    premise_holds,
)
from .search import LabelingStrategy, solve, solve_report

__version__ = "0.1.0"
