"""Representation-agnostic literal and variable quantification.

Universal quantification of a literal strengthens a formula until it no
longer depends on the literal's negation; existential quantification weakens
it until it no longer depends on the literal itself.  Both are defined by
conditioning and are returned as folded expression trees: results are unique
up to logical equivalence only, so tests compare models, never syntax.
"""

from __future__ import annotations

from typing import Iterable

from .core import (
    Formula,
    Term,
    Variable,
    _fold_and,
    _fold_or,
    condition,
)

__all__ = [
    "forall_literal",
    "exists_literal",
    "forall_variable",
    "exists_variable",
    "quantify_set",
    "erase",
]


def forall_literal(formula: Formula, lit) -> Formula:
    """Strengthen ``formula`` so it no longer depends on the negation of
    ``lit``: ``(lit | (formula | ~lit)) & (formula | lit)``, folded."""
    u = formula.universe
    lit = u.literal(lit)
    return _fold_and(
        u,
        [
            _fold_or(u, [u.lit(lit), condition(formula, ~lit)]),
            condition(formula, lit),
        ],
    )


def exists_literal(formula: Formula, lit) -> Formula:
    """Weaken ``formula`` so it no longer depends on ``lit``:
    ``(formula | lit) | (~lit & (formula | ~lit))``, folded."""
    u = formula.universe
    lit = u.literal(lit)
    return _fold_or(
        u,
        [
            condition(formula, lit),
            _fold_and(u, [u.lit(~lit), condition(formula, ~lit)]),
        ],
    )


def forall_variable(formula: Formula, var: Variable) -> Formula:
    """Conjoin both conditionings; equals quantifying both literals."""
    u = formula.universe
    u.check(var)
    pos = u.literal_by_code(2 * var.index + 1)
    return _fold_and(u, [condition(formula, pos), condition(formula, ~pos)])


def exists_variable(formula: Formula, var: Variable) -> Formula:
    """Disjoin both conditionings; equals quantifying both literals."""
    u = formula.universe
    u.check(var)
    pos = u.literal_by_code(2 * var.index + 1)
    return _fold_or(u, [condition(formula, pos), condition(formula, ~pos)])


def quantify_set(formula: Formula, quantifier: str, items: Iterable) -> Formula:
    """Left fold of the single-item operators over ``items``.

    ``quantifier`` is ``"forall"`` or ``"exists"``.  Items may be literals,
    variables, or their string forms; they may repeat and may contain
    complementary literals.  The outcome is order-independent up to logical
    equivalence, which the test suite checks rather than assumes.
    """
    if quantifier not in ("forall", "exists"):
        raise ValueError(f"unknown quantifier {quantifier!r}")
    u = formula.universe
    out = formula
    for spec in items:
        item = u.item(spec)
        if isinstance(item, Variable):
            out = (
                forall_variable(out, item)
                if quantifier == "forall"
                else exists_variable(out, item)
            )
        else:
            out = (
                forall_literal(out, item)
                if quantifier == "forall"
                else exists_literal(out, item)
            )
    return out


def erase(term: Term, variables: Iterable[Variable]) -> Term:
    """Drop the literals of the given variables from ``term``."""
    for var in variables:
        term.universe.check(var)
    return term.without_variables(variables)
