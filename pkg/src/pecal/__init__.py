"""Probabilistic event-calculus runtime.

A small, exact (rational-arithmetic) engine for domains described by value
declarations, an initial distribution, causal rules, a conditional plan,
noisy-sensor declarations and a narrative of uncertain timestamped events.
Query answering enumerates weighted worlds; the online engine advances a
belief state one instant at a time, fusing events as they arrive and firing
threshold-conditioned decisions.
"""

from .core import (
    AGENT,
    ENVIRONMENT,
    ActionDecl,
    ActionLiteral,
    AmbiguousRuleError,
    And,
    Atom,
    BeliefCondition,
    CProp,
    DomainDescription,
    DomainError,
    FluentDecl,
    FluentLiteral,
    Formula,
    FormulaError,
    IProp,
    Not,
    OProp,
    Or,
    PProp,
    PecalError,
    ResourceLimitError,
    SProp,
    State,
    ValidationReport,
    World,
    apply_effect,
    enumerate_states,
    evaluate_condition,
    evaluate_iformula,
    instants_of,
    iprop_from_distribution,
    matching_cprop,
    validate_domain,
)
from .rational import format_rational, fraction_pair, parse_rational

__version__ = "0.1.0"
