"""Classifier-level query layer: decisions, relevance, reasons and bias.

A classifier is a formula over a feature universe whose models are the
positively decided instances; its negation (materialized at load) captures
the negative ones.  Explanation queries reduce to universal quantification:
quantifying an instance's own characteristics plus its unmentioned features
out of the deciding formula yields the complete reason, whose prime
implicants are the sufficient reasons; quantifying the protected features
characterizes biased decisions.

When both the classifier and its negation are CNFs, every query here runs on
the linear drop-literal rule; otherwise the definitional operators are used.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .core import (
    Formula,
    Literal,
    Term,
    Universe,
    Variable,
    World,
    evaluate,
    negate,
)
from .errors import (
    ArityError,
    CapacityError,
    ConfigurationError,
    NoDecisionError,
    UniverseMismatchError,
)
from . import oracle
from .quantify import erase, quantify_set
from .tractable import Cnf, cnf_forall_literal, prime_forms

__all__ = [
    "Decision",
    "Classifier",
    "ReasonSet",
    "RelevanceRow",
    "RelevanceReport",
    "decide",
    "instances_independent_of_features",
    "instances_independent_of_characteristics",
    "complete_reason",
    "sufficient_reasons",
    "biased_instances",
    "is_decision_biased",
    "relevance_report",
]

NEGATION_CHECK_CAP = 12  # exact mutual-negation check; sampled above this
NEGATION_SAMPLES = 10_000
DEFAULT_REASON_CAP = 100_000


class Decision(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNDEFINED = "undefined"

    def __str__(self) -> str:
        return self.value


def _side_of(side) -> Decision:
    if isinstance(side, Decision):
        if side is Decision.UNDEFINED:
            raise ValueError("queries take a positive or negative side")
        return side
    if side in ("positive", "negative"):
        return Decision(side)
    raise ValueError(f"unknown side {side!r}")


class Classifier:
    """A deciding formula, its materialized negation, the feature universe and
    the protected feature set."""

    __slots__ = ("positive", "negative", "features", "protected")

    def __init__(
        self,
        positive: Formula | Cnf,
        negative: Formula | Cnf | None = None,
        protected: Iterable[Variable | str] = (),
        check: bool = True,
    ):
        self.features: Universe = positive.universe
        self.positive = positive
        if negative is None:
            negative = negate(_as_formula(positive))
        elif check:
            self._check_mutual_negation(positive, negative)
        self.negative = negative
        self.protected = frozenset(
            self.features.variable(v) if isinstance(v, str) else v for v in protected
        )
        for var in self.protected:
            self.features.check(var)

    def _check_mutual_negation(self, positive, negative) -> None:
        if negative.universe is not self.features:
            raise UniverseMismatchError("classifier sides use different universes")
        if len(self.features) <= NEGATION_CHECK_CAP:
            if not oracle.equivalent(_as_formula(negative), negate(_as_formula(positive))):
                raise UniverseMismatchError(
                    "negative side is not the negation of the positive side"
                )
            return
        rng = random.Random(0)
        pos_f, neg_f = _as_formula(positive), _as_formula(negative)
        size = len(self.features)
        for _ in range(NEGATION_SAMPLES):
            world = World(self.features, rng.getrandbits(size))
            if evaluate(pos_f, world) == evaluate(neg_f, world):
                raise UniverseMismatchError(
                    "negative side disagrees with the negation of the positive side"
                )
        warnings.warn(
            f"mutual negation only sampled ({NEGATION_SAMPLES} worlds) above "
            f"{NEGATION_CHECK_CAP} features",
            stacklevel=3,
        )

    @property
    def is_cnf_pair(self) -> bool:
        return isinstance(self.positive, Cnf) and isinstance(self.negative, Cnf)

    def side(self, side) -> Formula | Cnf:
        return self.positive if _side_of(side) is Decision.POSITIVE else self.negative

    def instance(self, spec: str | Term) -> Term:
        term = self.features.term(spec) if isinstance(spec, str) else spec
        if not term.is_total():
            raise ArityError("an instance assigns every feature")
        return term

    def population(self, spec: str | Term) -> Term:
        return self.features.term(spec) if isinstance(spec, str) else spec

    def __repr__(self) -> str:
        names = sorted(v.name for v in self.protected)
        return (
            f"Classifier({len(self.features)} features"
            + (f", protected {{{', '.join(names)}}}" if names else "")
            + ")"
        )


def _as_formula(value) -> Formula:
    return value if isinstance(value, Formula) else value.to_formula()


def _term_entails(term: Term, value) -> bool:
    """Every completion of ``term`` satisfies ``value``."""
    if isinstance(value, Cnf):
        codes = set(term.codes)
        return all(any(c in codes for c in clause.codes) for clause in value.elements)
    return oracle.entails(term, _as_formula(value))


def decide(classifier: Classifier, population: Term | str) -> Decision:
    """Positive when the population entails the classifier, negative when it
    entails the negation, undefined otherwise (never for a full instance)."""
    term = classifier.population(population)
    if term.universe is not classifier.features:
        raise UniverseMismatchError("population is over a different universe")
    if _term_entails(term, classifier.positive):
        return Decision.POSITIVE
    if _term_entails(term, classifier.negative):
        return Decision.NEGATIVE
    return Decision.UNDEFINED


def _forall_items(classifier: Classifier, side, items: Sequence) -> Formula | Cnf:
    """Universal quantification of literals/variables over one side, using
    the linear clause rule for CNF classifiers."""
    start = classifier.side(side)
    if isinstance(start, Cnf):
        out = start
        for item in items:
            if isinstance(item, Variable):
                pos = classifier.features.literal_by_code(2 * item.index + 1)
                out = cnf_forall_literal(out, pos)
                out = cnf_forall_literal(out, ~pos)
            else:
                out = cnf_forall_literal(out, item)
        return out
    return quantify_set(start, "forall", items)


def instances_independent_of_features(
    classifier: Classifier, side, variables: Iterable[Variable | str]
) -> Formula | Cnf:
    """Formula selecting the instances decided on the given side regardless
    of the given features."""
    resolved = [
        classifier.features.variable(v) if isinstance(v, str) else v for v in variables
    ]
    for var in resolved:
        classifier.features.check(var)
    return _forall_items(classifier, side, resolved)


def instances_independent_of_characteristics(
    classifier: Classifier, side, characteristics: Iterable[Literal | str]
) -> Formula | Cnf:
    """Formula selecting the instances decided on the given side independently
    of the given characteristics (their complements are quantified)."""
    quantified = [
        ~classifier.features.literal(lit) for lit in characteristics
    ]
    return _forall_items(classifier, side, quantified)


def complete_reason(classifier: Classifier, population: Term | str) -> Formula | Cnf:
    """Quantify the population's own characteristics and every unmentioned
    feature out of the deciding side.

    For CNF classifiers this is the linear drop rule: every clause keeps only
    the characteristics of the population, so the result is a monotone CNF
    over those characteristics.
    """
    term = classifier.population(population)
    decision = decide(classifier, term)
    if decision is Decision.UNDEFINED:
        raise NoDecisionError("population is not decided, no reason exists")
    deciding = classifier.side(decision)
    mentioned = {v.index for v in term.variables()}
    unmentioned = [v for v in classifier.features if v.index not in mentioned]
    if isinstance(deciding, Cnf):
        u = classifier.features
        kept_codes = set(term.codes)
        clauses = []
        for clause in deciding.elements:
            clauses.append(
                u.clause([u.literal_by_code(c) for c in clause.codes if c in kept_codes])
            )
        return Cnf(u, clauses)
    items: list = list(term.literals()) + unmentioned
    return quantify_set(deciding, "forall", items)


@dataclass
class ReasonSet:
    """The complete reason, its prime implicants and the decision they explain."""

    complete: Formula | Cnf
    sufficient: tuple[Term, ...]
    decision: Decision


def _minimal_hitting_sets(
    clauses: Sequence[frozenset[int]], cap: int
) -> list[tuple[int, ...]]:
    """All subset-minimal hitting sets of the clause family, by branch and
    bound with per-node exclusion sets."""
    family = [c for c in clauses]
    results: set[tuple[int, ...]] = set()

    def minimal(chosen: frozenset[int]) -> bool:
        for lit in chosen:
            if not any(clause & chosen == {lit} for clause in family):
                return False
        return True

    def search(chosen: frozenset[int], banned: frozenset[int]) -> None:
        unhit = next((c for c in family if not c & chosen), None)
        if unhit is None:
            if minimal(chosen):
                results.add(tuple(sorted(chosen)))
                if len(results) > cap:
                    raise CapacityError(
                        f"more than {cap} sufficient reasons; raise the cap to enumerate"
                    )
            return
        blocked = banned
        for lit in sorted(unhit):
            if lit in blocked:
                continue
            search(chosen | {lit}, blocked)
            blocked = blocked | {lit}

    search(frozenset(), frozenset())
    return sorted(results)


def sufficient_reasons(
    classifier: Classifier, population: Term | str, cap: int = DEFAULT_REASON_CAP
) -> ReasonSet:
    """Prime implicants of the complete reason, in canonical order.

    Equivalently (and tested as such): the minimal sub-terms of the
    population that receive the same decision.  Monotone CNF reasons are
    enumerated as minimal hitting sets of their clauses; other shapes go
    through the generic prime-implicant construction.
    """
    term = classifier.population(population)
    decision = decide(classifier, term)
    if decision is Decision.UNDEFINED:
        raise NoDecisionError("population is not decided, no reason exists")
    reason = complete_reason(classifier, term)
    u = classifier.features
    if isinstance(reason, Cnf):
        hitting = _minimal_hitting_sets(
            [frozenset(c.codes) for c in reason.elements], cap
        )
        terms = tuple(Term(u, codes) for codes in hitting)
    else:
        implicants = prime_forms(reason, "implicants")
        if len(implicants.terms) > cap:
            raise CapacityError(
                f"more than {cap} sufficient reasons; raise the cap to enumerate"
            )
        terms = tuple(sorted(implicants.terms, key=lambda t: t.codes))
    return ReasonSet(complete=reason, sufficient=terms, decision=decision)


def biased_instances(classifier: Classifier, side) -> Formula:
    """Instances decided on the given side whose decision flips under some
    reassignment of the protected features alone."""
    if not classifier.protected:
        raise ConfigurationError("classifier has no protected features")
    deciding = _as_formula(classifier.side(side))
    invariant = _forall_items(
        classifier, side, sorted(classifier.protected, key=lambda v: v.index)
    )
    return deciding & negate(_as_formula(invariant))


def is_decision_biased(classifier: Classifier, instance: Term | str) -> bool:
    """Whether the instance satisfies the bias formula of its own side."""
    term = classifier.instance(instance)
    side = decide(classifier, term)
    return evaluate(biased_instances(classifier, side), term.to_world())


@dataclass
class RelevanceRow:
    feature: Variable
    characteristic: Literal
    feature_irrelevant: bool
    characteristic_irrelevant: bool

    @property
    def flag(self) -> str:
        if self.feature_irrelevant:
            return "feature-irrelevant"
        if self.characteristic_irrelevant:
            return "characteristic-irrelevant"
        return "essential"


@dataclass
class RelevanceReport:
    decision: Decision
    rows: tuple[RelevanceRow, ...]

    def to_lines(self) -> list[str]:
        return [
            f"{row.feature.name}: {row.characteristic} [{row.flag}]"
            for row in self.rows
        ]


def relevance_report(classifier: Classifier, population: Term | str) -> RelevanceReport:
    """Flag each characteristic of the population.

    A feature is irrelevant when erasing it preserves the decision; a
    characteristic is irrelevant when dropping it preserves the decision.
    Feature irrelevance implies characteristic irrelevance (dropping the only
    literal of a variable and erasing the variable agree on terms), which the
    row construction preserves by checking both.
    """
    term = classifier.population(population)
    decision = decide(classifier, term)
    if decision is Decision.UNDEFINED:
        raise NoDecisionError("population is not decided, nothing to report")
    rows = []
    for lit in term.literals():
        var = lit.variable
        erased = erase(term, [var])
        dropped = term.difference([lit])
        feature_ok = decide(classifier, erased) is decision
        characteristic_ok = decide(classifier, dropped) is decision
        rows.append(
            RelevanceRow(
                feature=var,
                characteristic=lit,
                feature_irrelevant=feature_ok,
                characteristic_irrelevant=characteristic_ok or feature_ok,
            )
        )
    return RelevanceReport(decision=decision, rows=tuple(rows))
