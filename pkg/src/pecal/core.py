"""Core domain model: fluents, actions, instants, propositions, states,
worlds and formulas, plus the pure evaluation and validation primitives the
engines are built on.

Time is a finite contiguous range of integer instants ``[start, horizon]``.
All probabilities are exact ``fractions.Fraction`` values; nothing in this
module introduces floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Mapping, Optional, Union

DEFAULT_STATE_CAP = 2**20

AGENT = "agent"
ENVIRONMENT = "environment"

BOOL_TRUE = "true"
BOOL_FALSE = "false"
BOOL_VALUES = (BOOL_TRUE, BOOL_FALSE)


class PecalError(Exception):
    """Base class for errors raised by this package."""


class DomainError(PecalError):
    """A domain description is malformed in a way an operation cannot tolerate."""


class ResourceLimitError(PecalError):
    """An enumeration would exceed its configured cap."""


class AmbiguousRuleError(PecalError):
    """More than one causal rule matches a (state, occurrence set) pair."""


class FormulaError(PecalError):
    """A formula is used in a context its atoms do not fit."""


# ---------------------------------------------------------------------------
# Declarations and literals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FluentDecl:
    """A fluent together with its finite, non-empty value set."""

    name: str
    values: tuple[str, ...] = BOOL_VALUES

    @property
    def boolean(self) -> bool:
        return self.values == BOOL_VALUES


@dataclass(frozen=True)
class ActionDecl:
    name: str
    kind: str  # AGENT or ENVIRONMENT


@dataclass(frozen=True)
class FluentLiteral:
    """Assertion that a fluent holds a particular value."""

    fluent: str
    value: str = BOOL_TRUE


@dataclass(frozen=True)
class ActionLiteral:
    """Assertion that an action does (or does not) occur."""

    action: str
    occurs: bool = True


Literal = Union[FluentLiteral, ActionLiteral]


def literals_consistent(literals: Iterable[Literal]) -> bool:
    """True when no fluent is given two values and no action both polarities."""
    fluents: dict[str, str] = {}
    actions: dict[str, bool] = {}
    for lit in literals:
        if isinstance(lit, FluentLiteral):
            if fluents.setdefault(lit.fluent, lit.value) != lit.value:
                return False
        else:
            if actions.setdefault(lit.action, lit.occurs) != lit.occurs:
                return False
    return True


# ---------------------------------------------------------------------------
# States and worlds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class State:
    """A total assignment of one value to every declared fluent.

    Bindings are kept sorted by fluent name so equal assignments are equal
    values regardless of construction order.
    """

    bindings: tuple[tuple[str, str], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str]) -> "State":
        return cls(tuple(sorted(mapping.items())))

    @cached_property
    def _map(self) -> dict[str, str]:
        return dict(self.bindings)

    def value(self, fluent: str) -> str:
        return self._map[fluent]

    def as_dict(self) -> dict[str, str]:
        return dict(self.bindings)

    def satisfies(self, literal: FluentLiteral) -> bool:
        return self._map.get(literal.fluent) == literal.value


def apply_effect(state: State, effect: Iterable[FluentLiteral]) -> State:
    """Overwrite the fluents mentioned by ``effect``; everything else persists."""
    updates = {lit.fluent: lit.value for lit in effect}
    if not updates:
        return state
    merged = state.as_dict()
    merged.update(updates)
    return State.from_mapping(merged)


@dataclass(frozen=True)
class World:
    """One complete evolution: a state and an occurrence set per instant."""

    start: int
    states: tuple[State, ...]
    occurrences: tuple[frozenset[str], ...]

    def __post_init__(self) -> None:
        if len(self.states) != len(self.occurrences):
            raise DomainError("world has mismatched state/occurrence lengths")

    @property
    def horizon(self) -> int:
        return self.start + len(self.states) - 1

    def index(self, instant: int) -> int:
        if not self.start <= instant <= self.horizon:
            raise DomainError(f"instant {instant} outside world timeline")
        return instant - self.start

    def state_at(self, instant: int) -> State:
        return self.states[self.index(instant)]

    def occurred(self, action: str, instant: int) -> bool:
        return action in self.occurrences[self.index(instant)]


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------


class Formula:
    """Base class for boolean combinations of instant-stamped atoms."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    """A fluent-value or action-occurrence test.

    ``value`` is None for action atoms and defaults to boolean truth for
    fluent atoms.  ``instant`` is None only inside plan trigger conditions,
    which are evaluated against a single state.
    """

    name: str
    value: Optional[str] = None
    instant: Optional[int] = None


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class And(Formula):
    children: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    children: tuple[Formula, ...]


TRUE = And(())
FALSE = Or(())


def instants_of(formula: Formula) -> frozenset[int]:
    """The set of instants mentioned anywhere in the formula."""
    out: set[int] = set()

    def walk(f: Formula) -> None:
        if isinstance(f, Atom):
            if f.instant is not None:
                out.add(f.instant)
        elif isinstance(f, Not):
            walk(f.child)
        elif isinstance(f, (And, Or)):
            for child in f.children:
                walk(child)
        else:  # pragma: no cover - sealed hierarchy
            raise FormulaError(f"unknown formula node {f!r}")

    walk(formula)
    return frozenset(out)


def atoms_of(formula: Formula) -> Iterator[Atom]:
    if isinstance(formula, Atom):
        yield formula
    elif isinstance(formula, Not):
        yield from atoms_of(formula.child)
    elif isinstance(formula, (And, Or)):
        for child in formula.children:
            yield from atoms_of(child)


# ---------------------------------------------------------------------------
# Propositions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IProp:
    """The initial distribution: literal sets with probabilities summing to 1.

    Each outcome's literal set must pin every declared fluent (checked by
    ``validate_domain``); ``DomainDescription.initial_distribution`` turns the
    outcomes into complete states.
    """

    outcomes: tuple[tuple[frozenset[FluentLiteral], Fraction], ...]


@dataclass(frozen=True)
class CProp:
    """A causal rule: when the condition matches, one outcome effect applies."""

    condition: frozenset[Literal]
    outcomes: tuple[tuple[frozenset[FluentLiteral], Fraction], ...]


@dataclass(frozen=True)
class OProp:
    """An uncertain occurrence of an environment action at one instant."""

    action: str
    instant: int
    prob: Fraction = Fraction(1)


@dataclass(frozen=True)
class BeliefCondition:
    """Trigger condition of a planned action: fire when the belief in the
    formula lies inside the closed interval [low, high]."""

    formula: Formula
    low: Fraction
    high: Fraction


@dataclass(frozen=True)
class PProp:
    """A planned agent action, scheduled at one instant or at every instant
    (``schedule is None``), optionally gated by a belief condition."""

    action: str
    schedule: Optional[int] = None
    condition: Optional[BeliefCondition] = None


@dataclass(frozen=True)
class SProp:
    """Declares a noisy boolean sensor.

    ``matrix`` is row-stochastic: rows are the actual fluent value (true,
    false), columns the reading (positive, negative), so ``matrix[0][0]`` is
    the true-positive rate and ``matrix[1][0]`` the false-positive rate.
    """

    action: str
    fluent: str
    matrix: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]

    @property
    def true_positive_rate(self) -> Fraction:
        return self.matrix[0][0]

    @property
    def false_positive_rate(self) -> Fraction:
        return self.matrix[1][0]


# ---------------------------------------------------------------------------
# Domain description
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DomainDescription:
    """Everything the engines consume: declarations, initial distribution,
    causal rules, plan, sensors and the narrative of uncertain occurrences."""

    fluents: tuple[FluentDecl, ...]
    actions: tuple[ActionDecl, ...]
    initially: IProp
    cprops: tuple[CProp, ...] = ()
    pprops: tuple[PProp, ...] = ()
    sprops: tuple[SProp, ...] = ()
    narrative: tuple[OProp, ...] = ()
    horizon: int = 0
    start: int = 0

    # -- schema helpers ----------------------------------------------------

    @cached_property
    def fluent_map(self) -> dict[str, FluentDecl]:
        return {f.name: f for f in self.fluents}

    @cached_property
    def fluent_order(self) -> tuple[str, ...]:
        return tuple(sorted(self.fluent_map))

    @cached_property
    def action_map(self) -> dict[str, ActionDecl]:
        return {a.name: a for a in self.actions}

    def action_kind(self, name: str) -> str:
        return self.action_map[name].kind

    @property
    def instants(self) -> range:
        return range(self.start, self.horizon + 1)

    def state(self, mapping: Mapping[str, str]) -> State:
        """Build a total state, checking it against the declarations."""
        for fluent, value in mapping.items():
            decl = self.fluent_map.get(fluent)
            if decl is None:
                raise DomainError(f"undeclared fluent {fluent!r}")
            if value not in decl.values:
                raise DomainError(f"{value!r} is not a value of {fluent!r}")
        missing = set(self.fluent_map) - set(mapping)
        if missing:
            raise DomainError(f"state leaves fluents unassigned: {sorted(missing)}")
        return State.from_mapping(mapping)

    def state_key(self, state: State) -> tuple[int, ...]:
        """Canonical sort key: fluent name order, value declaration order."""
        return tuple(
            self.fluent_map[name].values.index(state.value(name))
            for name in self.fluent_order
        )

    @cached_property
    def oprops_by_instant(self) -> dict[int, tuple[OProp, ...]]:
        out: dict[int, list[OProp]] = {}
        for oprop in self.narrative:
            out.setdefault(oprop.instant, []).append(oprop)
        return {i: tuple(v) for i, v in out.items()}

    def oprops_at(self, instant: int) -> tuple[OProp, ...]:
        return self.oprops_by_instant.get(instant, ())

    def pprops_at(self, instant: int) -> tuple[PProp, ...]:
        return tuple(
            p for p in self.pprops if p.schedule is None or p.schedule == instant
        )

    def initial_distribution(self) -> tuple[tuple[State, Fraction], ...]:
        """The initial distribution as complete states, in canonical order."""
        entries = []
        for literal_set, prob in self.initially.outcomes:
            mapping = {lit.fluent: lit.value for lit in literal_set}
            entries.append((self.state(mapping), prob))
        entries.sort(key=lambda e: self.state_key(e[0]))
        return tuple(entries)

    def sprop_for(self, action: str) -> SProp:
        for sprop in self.sprops:
            if sprop.action == action:
                return sprop
        raise DomainError(f"no sensor declaration for action {action!r}")

    def replace(self, **changes) -> "DomainDescription":
        return replace(self, **changes)


def state_literals(state: State) -> frozenset[FluentLiteral]:
    """The complete literal set describing ``state``."""
    return frozenset(FluentLiteral(f, v) for f, v in state.bindings)


def iprop_from_distribution(
    distribution: Iterable[tuple[State, Fraction]]
) -> IProp:
    """Recompile a state distribution into an initial-distribution proposition."""
    return IProp(tuple((state_literals(s), p) for s, p in distribution))


# ---------------------------------------------------------------------------
# Pure operations
# ---------------------------------------------------------------------------


def enumerate_states(
    domain: DomainDescription, cap: int = DEFAULT_STATE_CAP
) -> list[State]:
    """All complete states, in canonical order (fluent names sorted, values in
    declaration order, last fluent varying fastest)."""
    count = 1
    for name in domain.fluent_order:
        count *= len(domain.fluent_map[name].values)
        if count > cap:
            raise ResourceLimitError(
                f"state space exceeds cap ({count}+ states > {cap})"
            )
    names = domain.fluent_order
    value_sets = [domain.fluent_map[n].values for n in names]
    return [
        State(tuple(zip(names, combo))) for combo in product(*value_sets)
    ]


def condition_matches(
    condition: frozenset[Literal], state: State, occurrences: frozenset[str]
) -> bool:
    """A condition matches when every fluent literal holds in the state and
    every action literal agrees with the occurrence set (absent = not
    occurring)."""
    for lit in condition:
        if isinstance(lit, FluentLiteral):
            if not state.satisfies(lit):
                return False
        else:
            if (lit.action in occurrences) != lit.occurs:
                return False
    return True


def matching_cprop(
    domain: DomainDescription, state: State, occurrences: Iterable[str]
) -> Optional[CProp]:
    """The unique causal rule matching (state, occurrences), or None.

    Raises AmbiguousRuleError when several rules match; a validated domain
    cannot reach that branch.
    """
    occ = frozenset(occurrences)
    found: Optional[CProp] = None
    for cprop in domain.cprops:
        if condition_matches(cprop.condition, state, occ):
            if found is not None:
                raise AmbiguousRuleError(
                    "ambiguous causal match: two rule conditions hold at once"
                )
            found = cprop
    return found


def _evaluate(domain: DomainDescription, formula: Formula, atom_value) -> bool:
    if isinstance(formula, Atom):
        return atom_value(formula)
    if isinstance(formula, Not):
        return not _evaluate(domain, formula.child, atom_value)
    if isinstance(formula, And):
        return all(_evaluate(domain, c, atom_value) for c in formula.children)
    if isinstance(formula, Or):
        return any(_evaluate(domain, c, atom_value) for c in formula.children)
    raise FormulaError(f"unknown formula node {formula!r}")


def _fluent_atom_value(domain: DomainDescription, atom: Atom, state: State) -> bool:
    decl = domain.fluent_map[atom.name]
    value = atom.value
    if value is None:
        if not decl.boolean:
            raise FormulaError(
                f"atom {atom.name!r} needs an explicit value (fluent is not boolean)"
            )
        value = BOOL_TRUE
    elif value not in decl.values:
        raise FormulaError(f"{value!r} is not a value of {atom.name!r}")
    return state.value(atom.name) == value


def evaluate_iformula(
    domain: DomainDescription, formula: Formula, world: World
) -> bool:
    """Standard boolean semantics over one world.

    Fluent atoms test the state at their instant, action atoms test the
    occurrence set at their instant.
    """

    def atom_value(atom: Atom) -> bool:
        if atom.instant is None:
            raise FormulaError(f"atom {atom.name!r} carries no instant")
        if atom.name in domain.fluent_map:
            return _fluent_atom_value(domain, atom, world.state_at(atom.instant))
        if atom.name in domain.action_map:
            if atom.value is not None:
                raise FormulaError(f"action atom {atom.name!r} cannot take a value")
            return world.occurred(atom.name, atom.instant)
        raise FormulaError(f"unknown name {atom.name!r} in formula")

    return _evaluate(domain, formula, atom_value)


def evaluate_condition(
    domain: DomainDescription, formula: Formula, state: State
) -> bool:
    """Evaluate an instant-free trigger formula against a single state."""

    def atom_value(atom: Atom) -> bool:
        if atom.instant is not None:
            raise FormulaError("trigger formulas must not carry instants")
        if atom.name not in domain.fluent_map:
            raise FormulaError(
                f"trigger formulas may only mention fluents, got {atom.name!r}"
            )
        return _fluent_atom_value(domain, atom, state)

    return _evaluate(domain, formula, atom_value)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "error" | "warning"
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.message}"


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def errors(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def error(self, message: str) -> None:
        self.issues.append(ValidationIssue("error", message))

    def warning(self, message: str) -> None:
        self.issues.append(ValidationIssue("warning", message))


def _check_prob_in_unit(report, prob: Fraction, what: str) -> None:
    if not 0 <= prob <= 1:
        report.error(f"{what} has probability {prob} outside [0, 1]")


def _check_outcomes(report, outcomes, what: str) -> None:
    total = Fraction(0)
    for _, prob in outcomes:
        if not 0 < prob <= 1:
            report.error(f"{what} outcome probability {prob} outside (0, 1]")
        total += prob
    if total != 1:
        report.error(f"{what} not normalized: probabilities sum to {total}")


def _check_fluent_literals(report, domain, literals, what: str) -> None:
    for lit in literals:
        decl = domain.fluent_map.get(lit.fluent)
        if decl is None:
            report.error(f"{what} mentions undeclared fluent {lit.fluent!r}")
        elif lit.value not in decl.values:
            report.error(
                f"{what} assigns {lit.fluent!r} the undeclared value {lit.value!r}"
            )


def _check_trigger_formula(report, domain, formula, what: str) -> None:
    for atom in atoms_of(formula):
        if atom.instant is not None:
            report.error(f"{what} trigger mentions an instant; triggers are instant-free")
        if atom.name in domain.action_map:
            report.error(f"{what} trigger mentions action {atom.name!r}; only fluents are allowed")
        elif atom.name not in domain.fluent_map:
            report.error(f"{what} trigger mentions undeclared name {atom.name!r}")
        else:
            decl = domain.fluent_map[atom.name]
            if atom.value is None and not decl.boolean:
                report.error(
                    f"{what} trigger atom {atom.name!r} needs an explicit value"
                )
            elif atom.value is not None and atom.value not in decl.values:
                report.error(
                    f"{what} trigger assigns {atom.name!r} undeclared value {atom.value!r}"
                )


def validate_domain(domain: DomainDescription) -> ValidationReport:
    """Structural validation; returns a report rather than raising.

    Errors flag anything the engines cannot give a meaning to (undeclared
    names, unnormalized distributions, incomplete initial states, duplicate
    occurrences, overlapping rule conditions).  Warnings flag suspicious but
    harmless statements (instants outside the timeline, rules that can never
    fire).
    """
    report = ValidationReport()

    # declarations
    seen_fluents: set[str] = set()
    for decl in domain.fluents:
        if decl.name in seen_fluents:
            report.error(f"fluent {decl.name!r} declared twice")
        seen_fluents.add(decl.name)
        if not decl.values:
            report.error(f"fluent {decl.name!r} has an empty value set")
        if len(set(decl.values)) != len(decl.values):
            report.error(f"fluent {decl.name!r} repeats a value")
    seen_actions: set[str] = set()
    for adecl in domain.actions:
        if adecl.name in seen_actions:
            report.error(f"action {adecl.name!r} declared twice")
        seen_actions.add(adecl.name)
        if adecl.kind not in (AGENT, ENVIRONMENT):
            report.error(f"action {adecl.name!r} has unknown kind {adecl.kind!r}")
        if adecl.name in domain.fluent_map:
            report.error(f"name {adecl.name!r} declared both as fluent and action")

    if domain.horizon < domain.start or domain.start < 0:
        report.error(
            f"timeline [{domain.start}, {domain.horizon}] is not a valid range"
        )

    # initial distribution
    if not domain.initially.outcomes:
        report.error("initial distribution has no outcomes")
    _check_outcomes(report, domain.initially.outcomes, "initial distribution")
    seen_states: set[frozenset[FluentLiteral]] = set()
    for literal_set, _ in domain.initially.outcomes:
        _check_fluent_literals(report, domain, literal_set, "initial distribution")
        if not literals_consistent(literal_set):
            report.error("initial distribution outcome assigns a fluent two values")
            continue
        mentioned = {lit.fluent for lit in literal_set}
        missing = set(domain.fluent_map) - mentioned
        if missing:
            report.error(
                "initial distribution outcome leaves fluents unassigned: "
                + ", ".join(sorted(missing))
            )
        if literal_set in seen_states:
            report.error("initial distribution repeats a state")
        seen_states.add(literal_set)

    # causal rules
    for idx, cprop in enumerate(domain.cprops):
        what = f"causal rule #{idx + 1}"
        if not literals_consistent(cprop.condition):
            report.error(f"{what} has an inconsistent condition")
        for lit in cprop.condition:
            if isinstance(lit, FluentLiteral):
                _check_fluent_literals(report, domain, [lit], what)
            elif lit.action not in domain.action_map:
                report.error(f"{what} mentions undeclared action {lit.action!r}")
        _check_outcomes(report, cprop.outcomes, what)
        for effect, _ in cprop.outcomes:
            _check_fluent_literals(report, domain, effect, f"{what} effect")
            if not literals_consistent(effect):
                report.error(f"{what} effect assigns a fluent two values")
        # a rule whose condition requires an agent action that is never planned
        # can never fire; environment actions may still arrive from a stream
        for lit in cprop.condition:
            if isinstance(lit, ActionLiteral) and lit.occurs:
                decl = domain.action_map.get(lit.action)
                if (
                    decl is not None
                    and decl.kind == AGENT
                    and not any(p.action == lit.action for p in domain.pprops)
                ):
                    report.warning(
                        f"{what} requires agent action {lit.action!r} which is never planned"
                    )

    # pairwise overlap: conditions are literal conjunctions, so two rules can
    # fire together exactly when the union of their conditions is consistent
    consistent_rules = [
        c for c in domain.cprops if literals_consistent(c.condition)
    ]
    for i in range(len(consistent_rules)):
        for j in range(i + 1, len(consistent_rules)):
            ci, cj = consistent_rules[i], consistent_rules[j]
            if literals_consistent(ci.condition | cj.condition):
                report.error(
                    f"causal rules #{domain.cprops.index(ci) + 1} and "
                    f"#{domain.cprops.index(cj) + 1} have overlapping conditions"
                )

    # narrative
    seen_occurrences: set[tuple[str, int]] = set()
    for oprop in domain.narrative:
        decl = domain.action_map.get(oprop.action)
        if decl is None:
            report.error(f"occurrence of undeclared action {oprop.action!r}")
        elif decl.kind != ENVIRONMENT:
            report.error(
                f"occurrence statement on non-environment action {oprop.action!r}"
            )
        _check_prob_in_unit(report, oprop.prob, f"occurrence of {oprop.action!r}")
        key = (oprop.action, oprop.instant)
        if key in seen_occurrences:
            report.error(
                f"duplicate occurrence statement for {oprop.action!r} at {oprop.instant}"
            )
        seen_occurrences.add(key)
        if not domain.start <= oprop.instant <= domain.horizon:
            report.warning(
                f"occurrence of {oprop.action!r} at {oprop.instant} is outside the timeline"
            )

    # plan
    for pprop in domain.pprops:
        decl = domain.action_map.get(pprop.action)
        if decl is None:
            report.error(f"plan mentions undeclared action {pprop.action!r}")
        elif decl.kind != AGENT:
            report.error(f"plan schedules non-agent action {pprop.action!r}")
        if pprop.schedule is not None and not (
            domain.start <= pprop.schedule <= domain.horizon
        ):
            report.warning(
                f"plan for {pprop.action!r} at {pprop.schedule} is outside the timeline"
            )
        if pprop.condition is not None:
            cond = pprop.condition
            if not (0 <= cond.low <= cond.high <= 1):
                report.error(
                    f"plan for {pprop.action!r} has invalid belief interval "
                    f"[{cond.low}, {cond.high}]"
                )
            _check_trigger_formula(report, domain, cond.formula, f"plan for {pprop.action!r}")

    # sensors
    seen_sensors: set[str] = set()
    for sprop in domain.sprops:
        if sprop.action in seen_sensors:
            report.error(f"action {sprop.action!r} has two sensor declarations")
        seen_sensors.add(sprop.action)
        if sprop.action not in domain.action_map:
            report.error(f"sensor declaration for undeclared action {sprop.action!r}")
        decl = domain.fluent_map.get(sprop.fluent)
        if decl is None:
            report.error(f"sensor senses undeclared fluent {sprop.fluent!r}")
        elif not decl.boolean:
            report.error(f"sensor senses non-boolean fluent {sprop.fluent!r}")
        for row in sprop.matrix:
            for entry in row:
                _check_prob_in_unit(report, entry, "sensor accuracy entry")
            if sum(row) != 1:
                report.error(
                    f"sensor for {sprop.action!r} has a non-stochastic accuracy row"
                )

    return report
