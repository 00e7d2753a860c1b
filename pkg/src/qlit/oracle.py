"""Brute-force semantic ground truth.

Everything here is defined directly over the full space of worlds: a formula
(or circuit, term, clause, ...) is mapped to a truth table stored as one big
integer whose bit ``w`` says whether the world with index ``w`` is a model.
Model enumeration, boundary models, boundary rules, independent models and
the fixed-point reconstruction of models from rules are all read off these
tables.  Other modules are validated against this one, never the reverse.

Enumeration is exact and capped (default 24 variables, overridable through
the ``QLIT_ENUM_CAP`` environment variable); exceeding the cap is an error,
never silent sampling.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .core import (
    Circuit,
    Clause,
    Formula,
    Literal,
    Term,
    Universe,
    Variable,
    World,
)
from .errors import CapacityError, PreconditionError, UniverseMismatchError

__all__ = [
    "BRule",
    "ModelSet",
    "RuleSet",
    "TransitionReport",
    "enumerate_models",
    "boundary_models",
    "b_rules",
    "is_independent_model",
    "reconstruct_models",
    "literal_independent",
    "variable_independent",
    "brule_transition_report",
    "models_mask",
    "equivalent",
    "entails",
    "consistent",
    "valid",
    "default_cap",
]

_DEFAULT_CAP = 24


def default_cap() -> int:
    """Enumeration cap: ``QLIT_ENUM_CAP`` when set, else 24 variables."""
    return int(os.environ.get("QLIT_ENUM_CAP", _DEFAULT_CAP))


def _check_cap(universe: Universe, cap: int | None) -> None:
    limit = default_cap() if cap is None else cap
    if len(universe) > limit:
        raise CapacityError(
            f"universe has {len(universe)} variables, enumeration cap is {limit}"
        )


# -- truth tables as big integers ---------------------------------------------


def _var_masks(universe: Universe) -> list[int]:
    """Bit ``w`` of mask ``i`` is set iff variable ``i`` is true in world ``w``."""
    if universe._var_masks is None:
        n = len(universe)
        masks = []
        for i in range(n):
            p = 1 << i
            unit = ((1 << p) - 1) << p  # one period: p zeros then p ones
            reps = 1 << (n - i - 1)
            rep_pattern = ((1 << (2 * p * reps)) - 1) // ((1 << (2 * p)) - 1)
            masks.append(unit * rep_pattern)
        universe._var_masks = masks
    return universe._var_masks


def _full_mask(universe: Universe) -> int:
    return (1 << (1 << len(universe))) - 1


def _flip_mask(universe: Universe, mask: int, var_index: int) -> int:
    """Permuted table: bit ``w`` becomes the bit of ``w`` with variable flipped."""
    p = 1 << var_index
    ones = _var_masks(universe)[var_index]
    zeros = _full_mask(universe) & ~ones
    return ((mask & zeros) << p) | ((mask & ones) >> p)


def _condition_mask(universe: Universe, mask: int, lit: Literal) -> int:
    """Table of ``f | lit``: every world looks up its ``lit``-side twin."""
    ones = _var_masks(universe)[lit.variable.index]
    side = ones if lit.positive else _full_mask(universe) & ~ones
    kept = mask & side
    p = 1 << lit.variable.index
    return kept | (kept >> p if lit.positive else kept << p)


def _literal_mask(universe: Universe, code: int) -> int:
    ones = _var_masks(universe)[code >> 1]
    return ones if code & 1 else _full_mask(universe) & ~ones


def models_mask(value, universe: Universe | None = None, cap: int | None = None) -> int:
    """Truth table of any logical value, as an integer over ``2**n`` worlds."""
    u = universe or value.universe
    if value.universe is not u:
        raise UniverseMismatchError("value does not live in the requested universe")
    _check_cap(u, cap)
    if isinstance(value, Formula):
        return _formula_mask(u, value)
    if isinstance(value, Circuit):
        return _circuit_mask(u, value)
    if isinstance(value, World):
        return 1 << value.bits
    if isinstance(value, Term):
        out = _full_mask(u)
        for code in value.codes:
            out &= _literal_mask(u, code)
        return out
    if isinstance(value, Clause):
        out = 0
        for code in value.codes:
            out |= _literal_mask(u, code)
        return out
    to_formula = getattr(value, "to_formula", None)
    if to_formula is not None:
        return _formula_mask(u, to_formula())
    raise TypeError(f"cannot compute a truth table for {value!r}")


_MASK_CACHE_VAR_LIMIT = 16  # above this, per-node tables get too large to keep


def _formula_mask(universe: Universe, formula: Formula) -> int:
    full = _full_mask(universe)
    # formula nodes are interned per universe and immutable, so their truth
    # tables can be remembered across calls (bounded to small universes)
    if len(universe) <= _MASK_CACHE_VAR_LIMIT:
        cache = getattr(universe, "_oracle_mask_cache", None)
        if cache is None:
            cache = {}
            universe._oracle_mask_cache = cache
    else:
        cache = {}

    def walk(node: Formula) -> int:
        got = cache.get(id(node))
        if got is not None:
            return got
        kind = node.kind
        if kind == "true":
            out = full
        elif kind == "false":
            out = 0
        elif kind == "lit":
            out = _literal_mask(universe, node.key[1])
        elif kind == "not":
            out = full & ~walk(node.key[1])
        elif kind == "and":
            out = full
            for child in node.key[1]:
                out &= walk(child)
        else:
            out = 0
            for child in node.key[1]:
                out |= walk(child)
        cache[id(node)] = out
        return out

    return walk(formula)


def _circuit_mask(universe: Universe, circuit: Circuit) -> int:
    full = _full_mask(universe)
    masks: list[int] = []
    for node in circuit.nodes:
        if node.kind == "const":
            masks.append(full if node.value else 0)
        elif node.kind == "lit":
            masks.append(_literal_mask(universe, node.lit))
        elif node.kind == "and":
            out = full
            for child in node.children:
                out &= masks[child]
            masks.append(out)
        else:
            out = 0
            for child in node.children:
                out |= masks[child]
            masks.append(out)
    return masks[circuit.root]


def equivalent(a, b, cap: int | None = None) -> bool:
    """Exact model-set equality, by enumeration."""
    return models_mask(a, cap=cap) == models_mask(b, a.universe, cap=cap)


def entails(a, b, cap: int | None = None) -> bool:
    """``a`` implies ``b``: every model of ``a`` is a model of ``b``."""
    return models_mask(a, cap=cap) & ~models_mask(b, a.universe, cap=cap) == 0


def consistent(a, cap: int | None = None) -> bool:
    return models_mask(a, cap=cap) != 0


def valid(a, cap: int | None = None) -> bool:
    return models_mask(a, cap=cap) == _full_mask(a.universe)


def _iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# -- rule and model containers -------------------------------------------------


@dataclass(frozen=True)
class BRule:
    """A boundary rule: a total antecedent over all-but-one variable plus an
    inferred literal of the remaining variable."""

    antecedent: Term
    consequent: Literal

    def __post_init__(self):
        universe = self.antecedent.universe
        universe.check(self.consequent)
        ante_vars = {c >> 1 for c in self.antecedent.codes}
        expected = set(range(len(universe))) - {self.consequent.variable.index}
        if ante_vars != expected:
            raise UniverseMismatchError(
                "antecedent must cover exactly the non-consequent variables"
            )

    @property
    def universe(self) -> Universe:
        return self.antecedent.universe

    def world(self) -> World:
        """The boundary model this rule describes."""
        return self.antecedent.add(self.consequent).to_world()

    def sort_key(self) -> tuple:
        return (self.antecedent.codes, self.consequent.code)

    def __str__(self) -> str:
        ante = " ".join(str(lit) for lit in self.antecedent) or "true"
        return f"{ante} -> {self.consequent}"

    def __repr__(self) -> str:
        return f"BRule({self})"


class _SortedSet:
    __slots__ = ("universe", "items", "_set")

    def __init__(self, universe: Universe, items: Iterable):
        self.universe = universe
        self.items = tuple(items)
        self._set = frozenset(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __contains__(self, item) -> bool:
        return item in self._set

    def __eq__(self, other) -> bool:
        return type(other) is type(self) and other._set == self._set

    def __hash__(self) -> int:
        return hash(self._set)


class ModelSet(_SortedSet):
    """Worlds in canonical order, plus the generating universe."""

    def __init__(self, universe: Universe, worlds: Iterable[World]):
        super().__init__(universe, sorted(worlds, key=lambda w: w.bits))

    def bits(self) -> frozenset[int]:
        return frozenset(w.bits for w in self.items)

    def __repr__(self) -> str:
        return "ModelSet({" + ", ".join(str(w) for w in self.items) + "})"


class RuleSet(_SortedSet):
    """Boundary rules in canonical order, plus the generating universe."""

    def __init__(self, universe: Universe, rules: Iterable[BRule]):
        super().__init__(universe, sorted(rules, key=BRule.sort_key))

    def pairs(self) -> frozenset[tuple[int, int]]:
        """Rules as (world bits, consequent variable index) pairs."""
        return frozenset(
            (r.world().bits, r.consequent.variable.index) for r in self.items
        )

    def consequents(self) -> set[Literal]:
        return {r.consequent for r in self.items}

    def __repr__(self) -> str:
        return "RuleSet({" + ", ".join(str(r) for r in self.items) + "})"


def _rule_from_pair(universe: Universe, bits: int, var_index: int) -> BRule:
    world = World(universe, bits)
    consequent = world.literals()[var_index]
    antecedent = world.to_term().without_variables([universe.variables[var_index]])
    return BRule(antecedent, consequent)


# -- oracle operations ----------------------------------------------------------


def enumerate_models(value, universe: Universe | None = None, cap: int | None = None) -> ModelSet:
    """Exactly the worlds satisfying ``value``, in canonical order."""
    u = universe or value.universe
    mask = models_mask(value, u, cap)
    return ModelSet(u, (World(u, bits) for bits in _iter_bits(mask)))


def _boundary_pairs(universe: Universe, mask: int) -> list[tuple[int, int]]:
    """(world bits, variable index) pairs where flipping the variable leaves
    the model set."""
    pairs: list[tuple[int, int]] = []
    for i in range(len(universe)):
        crossing = mask & ~_flip_mask(universe, mask, i)
        for bits in _iter_bits(crossing):
            pairs.append((bits, i))
    return pairs


def boundary_models(
    value, universe: Universe | None = None, cap: int | None = None
) -> set[tuple[World, Literal]]:
    """All pairs ``(world, literal)`` where the world is a model containing the
    literal and flipping that literal produces a counter-model."""
    u = universe or value.universe
    mask = models_mask(value, u, cap)
    out = set()
    for bits, i in _boundary_pairs(u, mask):
        world = World(u, bits)
        out.add((world, world.literals()[i]))
    return out


def b_rules(value, universe: Universe | None = None, cap: int | None = None) -> RuleSet:
    """The boundary rules of ``value``: one per boundary (model, literal) pair."""
    u = universe or value.universe
    mask = models_mask(value, u, cap)
    return RuleSet(
        u, (_rule_from_pair(u, bits, i) for bits, i in _boundary_pairs(u, mask))
    )


def is_independent_model(value, world: World, term: Term, cap: int | None = None) -> bool:
    """True iff ``term`` is contained in ``world`` and every way of flipping
    literals of ``term`` keeps the world a model of ``value``."""
    u = world.universe
    mask = models_mask(value, u, cap)
    if any(code not in world.to_term().codes for code in term.codes):
        return False
    rest = world.to_term().difference(term.literals())
    rest_mask = models_mask(rest, u, cap)
    return rest_mask & ~mask == 0


def reconstruct_models(
    rules: RuleSet, bmodels: ModelSet, universe: Universe | None = None
) -> ModelSet:
    """Grow the boundary models to the full model set using only the rules.

    Iterates ``L(W) = W ∪ { flip(w, i) : w in W, (w, i) not a rule }`` to its
    first fixed point, visiting worlds in canonical order.  Boundary models of
    a consistent, non-valid formula are never empty, so empty input means the
    source formula was valid or inconsistent and is refused.
    """
    u = universe or bmodels.universe
    if len(bmodels) == 0:
        raise PreconditionError(
            "valid-or-inconsistent formula: no boundary models to reconstruct from"
        )
    rule_pairs = rules.pairs()
    n = len(u)
    current = set(bmodels.bits())
    while True:
        added: list[int] = []
        for bits in sorted(current):
            for i in range(n):
                if (bits, i) not in rule_pairs:
                    twin = bits ^ (1 << i)
                    if twin not in current:
                        added.append(twin)
        if not added:
            break
        current.update(added)
    return ModelSet(u, (World(u, bits) for bits in current))


def literal_independent(value, lit: Literal, cap: int | None = None) -> bool:
    """True iff no boundary rule of ``value`` infers ``lit``."""
    u = value.universe
    u.check(lit)
    mask = models_mask(value, u, cap)
    i = lit.variable.index
    crossing = mask & ~_flip_mask(u, mask, i)
    side = _literal_mask(u, lit.code)
    return crossing & side == 0


def variable_independent(value, var: Variable, cap: int | None = None) -> bool:
    """Independence of both literals of ``var``."""
    u = value.universe
    u.check(var)
    pos = u.literal_by_code(2 * var.index + 1)
    return literal_independent(value, pos, cap) and literal_independent(
        value, ~pos, cap
    )


# -- boundary-rule dynamics under universal literal quantification ---------------


@dataclass
class TransitionReport:
    """How the rule set changes when one literal is universally quantified.

    ``checks`` holds one flag per clause of the deletion/preservation theorem
    (a-d), the introduction-shape theorem (add1) and the four-condition
    introduction criterion (add2).
    """

    quantified: Literal
    rules_before: RuleSet
    rules_after: RuleSet
    preserved: tuple[BRule, ...]
    deleted: tuple[BRule, ...]
    introduced: tuple[BRule, ...]
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_lines(self) -> list[str]:
        lines = []
        for rule in self.preserved:
            lines.append(f"{rule} [kept]")
        for rule in self.deleted:
            lines.append(f"{rule} [deleted]")
        for rule in self.introduced:
            lines.append(f"{rule} [introduced]")
        return lines


def brule_transition_report(
    value, lit: Literal, universe: Universe | None = None, cap: int | None = None
) -> TransitionReport:
    """Compare rules before and after quantifying ``lit`` universally and check
    every clause of the deletion/preservation/introduction characterization."""
    u = universe or value.universe
    u.check(lit)
    mask = models_mask(value, u, cap)
    i = lit.variable.index

    lit_mask = _literal_mask(u, lit.code)
    mask_given_lit = _condition_mask(u, mask, lit)
    mask_given_neg = _condition_mask(u, mask, ~lit)
    quantified = (lit_mask | mask_given_neg) & mask_given_lit

    before = frozenset(_boundary_pairs(u, mask))
    after = frozenset(_boundary_pairs(u, quantified))

    preserved = before & after
    deleted = before - after
    introduced = after - before

    neg_code = lit.code ^ 1
    n = len(u)

    def infers(pair: tuple[int, int], code: int) -> bool:
        bits, j = pair
        return j == code >> 1 and (bits >> j & 1) == (code & 1)

    def uses(pair: tuple[int, int], code: int) -> bool:
        bits, j = pair
        return j != code >> 1 and (bits >> (code >> 1) & 1) == (code & 1)

    checks: dict[str, bool] = {}
    # (a) rules inferring the quantified literal survive
    checks["a"] = all(p in after for p in before if infers(p, lit.code))
    # (b) no surviving rule infers its negation
    checks["b"] = not any(infers(p, neg_code) for p in after)
    # (c) rules using the quantified literal survive
    checks["c"] = all(p in after for p in before if uses(p, lit.code))
    # (d) a rule using the negated literal survives iff the companion rule on
    #     the same world that infers the negated literal is absent
    ok = True
    for pair in before:
        if not uses(pair, neg_code):
            continue
        bits, _ = pair
        ok &= (pair in after) == ((bits, i) not in before)
    checks["d"] = bool(ok)
    # (add1) introduced rules always use the negated literal
    checks["add1"] = all(uses(p, neg_code) for p in introduced)
    # (add2) exact introduction criterion, over every candidate rule shape:
    # flipping either the quantified variable or the consequent variable of
    # the candidate's world must stay inside the rules, flipping both outside
    ok = True
    for bits in _iter_bits(_literal_mask(u, neg_code)):
        for j in range(n):
            if j == i:
                continue
            candidate = (bits, j)
            lhs = candidate not in before and candidate in after
            flip_i = bits ^ (1 << i)
            flip_j = bits ^ (1 << j)
            rhs = (
                (flip_i, j) in before
                and (flip_j, i) in before
                and (flip_i, i) not in before
                and (flip_j, j) not in before
            )
            ok &= lhs == rhs
    checks["add2"] = bool(ok)

    def make(pairs: Iterable[tuple[int, int]]) -> tuple[BRule, ...]:
        return tuple(
            sorted((_rule_from_pair(u, b, j) for b, j in pairs), key=BRule.sort_key)
        )

    return TransitionReport(
        quantified=lit,
        rules_before=RuleSet(u, (_rule_from_pair(u, b, j) for b, j in before)),
        rules_after=RuleSet(u, (_rule_from_pair(u, b, j) for b, j in after)),
        preserved=make(preserved),
        deleted=make(deleted),
        introduced=make(introduced),
        checks=checks,
    )
