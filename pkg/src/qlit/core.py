"""Canonical Boolean values: variables, literals, worlds, terms, clauses,
formulas and NNF circuits, plus conditioning, evaluation and negation.

Every value is immutable after construction and carries an explicit variable
universe.  Mixing universes in one operation is an error, never an implicit
union: downstream notions (boundary rules in particular) change meaning when
the universe changes.

Literals are encoded internally as dense integer codes ``2*index + polarity``
so that the canonical order (variable index ascending, negative before
positive) is plain integer order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from .errors import (
    ArityError,
    InvalidLiteralSetError,
    UniverseMismatchError,
)

__all__ = [
    "Variable",
    "Literal",
    "Universe",
    "World",
    "Term",
    "Clause",
    "Formula",
    "Circuit",
    "CircuitBuilder",
    "Annotation",
    "flip",
    "condition",
    "evaluate",
    "negate",
]


@dataclass(frozen=True, slots=True)
class Variable:
    """A Boolean variable: a dense index plus a display name."""

    index: int
    name: str

    def __repr__(self) -> str:
        return f"Variable({self.index}, {self.name!r})"


@dataclass(frozen=True, slots=True)
class Literal:
    """A variable together with a polarity."""

    variable: Variable
    positive: bool

    @property
    def code(self) -> int:
        return self.variable.index * 2 + (1 if self.positive else 0)

    def __invert__(self) -> "Literal":
        return Literal(self.variable, not self.positive)

    def __str__(self) -> str:
        return self.variable.name if self.positive else "~" + self.variable.name

    def __repr__(self) -> str:
        return f"Literal({self})"

    def __lt__(self, other: "Literal") -> bool:
        return self.code < other.code


LiteralLike = Union[Literal, str]
ItemLike = Union[Literal, Variable, str]


class Universe:
    """An ordered, fixed set of Boolean variables.

    All worlds, terms, clauses, formulas and circuits reference exactly one
    universe.  The universe also interns formula nodes, so constructing the
    same expression twice yields the identical node object.
    """

    def __init__(self, names: Iterable[str] | int):
        if isinstance(names, int):
            names = [f"x{i + 1}" for i in range(names)]
        variables = []
        by_name: dict[str, Variable] = {}
        for index, name in enumerate(names):
            if name in by_name:
                raise InvalidLiteralSetError(f"duplicate variable name {name!r}")
            var = Variable(index, name)
            variables.append(var)
            by_name[name] = var
        self._variables: tuple[Variable, ...] = tuple(variables)
        self._by_name = by_name
        self._literals = tuple(
            Literal(v, bool(polarity)) for v in variables for polarity in (0, 1)
        )
        self._node_cache: dict[tuple, Formula] = {}
        self._var_masks: list[int] | None = None
        self.true = self._intern(("true",))
        self.false = self._intern(("false",))

    # -- basic access ------------------------------------------------------

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self._variables

    def __len__(self) -> int:
        return len(self._variables)

    def __iter__(self) -> Iterator[Variable]:
        return iter(self._variables)

    def __repr__(self) -> str:
        return f"Universe([{', '.join(v.name for v in self._variables)}])"

    def variable(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise UniverseMismatchError(f"unknown variable {name!r}") from None

    def __contains__(self, item: object) -> bool:
        if isinstance(item, Variable):
            return (
                item.index < len(self._variables)
                and self._variables[item.index] == item
            )
        if isinstance(item, Literal):
            return item.variable in self
        if isinstance(item, str):
            return item in self._by_name
        return False

    def check(self, item: Variable | Literal) -> None:
        if item not in self:
            raise UniverseMismatchError(f"{item} does not belong to {self}")

    # -- literal construction ---------------------------------------------

    def literal(self, spec: LiteralLike) -> Literal:
        """Resolve ``"x"`` / ``"~x"`` / an existing literal to a literal."""
        if isinstance(spec, Literal):
            self.check(spec)
            return spec
        name = spec.strip()
        positive = True
        if name.startswith("~"):
            positive = False
            name = name[1:].strip()
        return self._literals[self.variable(name).index * 2 + positive]

    def literal_by_code(self, code: int) -> Literal:
        return self._literals[code]

    def pos(self, name: str) -> Literal:
        return self.literal(name)

    def neg(self, name: str) -> Literal:
        return self.literal("~" + name)

    def item(self, spec: ItemLike) -> Literal | Variable:
        """Resolve a quantification item: a literal or a whole variable.

        A string that matches a declared name (or ``~name``) is a literal; a
        string that equals a declared name with its first character upper-cased
        denotes the variable itself (both literals), mirroring the convention
        used on the command line.
        """
        if isinstance(spec, (Literal, Variable)):
            self.check(spec)
            return spec
        name = spec.strip()
        if name.startswith("~") or name in self._by_name:
            return self.literal(name)
        lowered = name[:1].lower() + name[1:]
        if name[:1].isupper() and lowered in self._by_name:
            return self._by_name[lowered]
        raise UniverseMismatchError(f"unknown variable or literal {spec!r}")

    # -- worlds ------------------------------------------------------------

    def world(self, literals: Iterable[LiteralLike] | int) -> "World":
        if isinstance(literals, int):
            if not 0 <= literals < (1 << len(self)):
                raise ArityError(f"world index {literals} out of range")
            return World(self, literals)
        bits = 0
        seen = 0
        for spec in literals:
            lit = self.literal(spec)
            mark = 1 << lit.variable.index
            if seen & mark:
                raise ArityError(f"two literals over variable {lit.variable.name}")
            seen |= mark
            if lit.positive:
                bits |= mark
        if seen != (1 << len(self)) - 1:
            missing = [v.name for v in self if not seen & (1 << v.index)]
            raise ArityError(f"world misses variables: {', '.join(missing)}")
        return World(self, bits)

    def worlds(self) -> Iterator["World"]:
        for bits in range(1 << len(self)):
            yield World(self, bits)

    # -- terms and clauses ---------------------------------------------------

    def term(self, literals: Iterable[LiteralLike] | str = ()) -> "Term":
        return Term(self, self._codes(literals, "term"))

    def clause(self, literals: Iterable[LiteralLike] | str = ()) -> "Clause":
        return Clause(self, self._codes(literals, "clause"))

    def _codes(self, literals: Iterable[LiteralLike] | str, what: str) -> tuple[int, ...]:
        if isinstance(literals, str):
            literals = [s for s in literals.split(",") if s.strip()]
        codes: set[int] = set()
        for spec in literals:
            lit = self.literal(spec)
            if lit.code ^ 1 in codes:
                kind = "inconsistent" if what == "term" else "valid"
                raise InvalidLiteralSetError(
                    f"{kind} {what}: complementary pair over {lit.variable.name}"
                )
            codes.add(lit.code)
        return tuple(sorted(codes))

    # -- formula constructors ----------------------------------------------

    def _intern(self, key: tuple) -> "Formula":
        node = self._node_cache.get(key)
        if node is None:
            node = Formula(self, key)
            self._node_cache[key] = node
        return node

    def lit(self, spec: LiteralLike) -> "Formula":
        return self._intern(("lit", self.literal(spec).code))

    def constant(self, value: bool) -> "Formula":
        return self.true if value else self.false

    def all_conj(self, parts: Iterable["Formula"]) -> "Formula":
        parts = tuple(parts)
        if not parts:
            return self.true
        out = parts[0]
        for part in parts[1:]:
            out = out & part
        return out

    def all_disj(self, parts: Iterable["Formula"]) -> "Formula":
        parts = tuple(parts)
        if not parts:
            return self.false
        out = parts[0]
        for part in parts[1:]:
            out = out | part
        return out


class World:
    """A total truth assignment, stored as a bit per variable."""

    __slots__ = ("universe", "bits")

    def __init__(self, universe: Universe, bits: int):
        self.universe = universe
        self.bits = bits

    def literals(self) -> tuple[Literal, ...]:
        return tuple(
            self.universe.literal_by_code(2 * v.index + bool(self.bits >> v.index & 1))
            for v in self.universe
        )

    def value(self, var: Variable) -> bool:
        self.universe.check(var)
        return bool(self.bits >> var.index & 1)

    def __contains__(self, lit: Literal) -> bool:
        if lit.variable not in self.universe:
            return False
        return self.value(lit.variable) == lit.positive

    def flip(self, lit: LiteralLike) -> "World":
        lit = self.universe.literal(lit)
        if lit in self:
            return self
        return World(self.universe, self.bits ^ (1 << lit.variable.index))

    def to_term(self) -> "Term":
        return Term(self.universe, tuple(lit.code for lit in self.literals()))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, World)
            and other.universe is self.universe
            and other.bits == self.bits
        )

    def __hash__(self) -> int:
        return hash((id(self.universe), self.bits))

    def __lt__(self, other: "World") -> bool:
        return self.bits < other.bits

    def __str__(self) -> str:
        return " ".join(str(lit) for lit in self.literals())

    def __repr__(self) -> str:
        return f"World({self})"


class _LiteralSet:
    """Shared behaviour of terms and clauses (sets of literals over distinct
    variables, kept in canonical code order)."""

    __slots__ = ("universe", "codes")

    def __init__(self, universe: Universe, codes: tuple[int, ...]):
        self.universe = universe
        self.codes = codes
        vars_seen = {c >> 1 for c in codes}
        if len(vars_seen) != len(codes):
            raise InvalidLiteralSetError("two literals over one variable")

    def literals(self) -> tuple[Literal, ...]:
        return tuple(self.universe.literal_by_code(c) for c in self.codes)

    def variables(self) -> tuple[Variable, ...]:
        return tuple(self.universe.variables[c >> 1] for c in self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.literals())

    def __contains__(self, lit: Literal) -> bool:
        return lit.variable in self.universe and lit.code in self.codes

    def __eq__(self, other: object) -> bool:
        return (
            type(other) is type(self)
            and other.universe is self.universe  # type: ignore[attr-defined]
            and other.codes == self.codes  # type: ignore[attr-defined]
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, id(self.universe), self.codes))

    def __lt__(self, other: "_LiteralSet") -> bool:
        return self.codes < other.codes


class Term(_LiteralSet):
    """A consistent set of literals; the empty term is ``true``."""

    def is_total(self) -> bool:
        return len(self.codes) == len(self.universe)

    def to_world(self) -> World:
        if not self.is_total():
            raise ArityError("term does not cover the universe")
        bits = 0
        for code in self.codes:
            if code & 1:
                bits |= 1 << (code >> 1)
        return World(self.universe, bits)

    def issubset(self, other: "Term") -> bool:
        return set(self.codes) <= set(other.codes)

    def union(self, other: "Term") -> "Term":
        u = self.universe
        if other.universe is not u:
            raise UniverseMismatchError("terms from different universes")
        merged = set(self.codes) | set(other.codes)
        return Term(u, tuple(sorted(merged)))

    def difference(self, literals: Iterable[Literal]) -> "Term":
        drop = {self.universe.literal(l).code for l in literals}
        return Term(self.universe, tuple(c for c in self.codes if c not in drop))

    def without_variables(self, variables: Iterable[Variable]) -> "Term":
        drop = {v.index for v in variables}
        return Term(self.universe, tuple(c for c in self.codes if c >> 1 not in drop))

    def add(self, lit: Literal) -> "Term":
        return Term(self.universe, tuple(sorted(set(self.codes) | {lit.code})))

    def to_formula(self) -> "Formula":
        u = self.universe
        return u.all_conj(u.lit(lit) for lit in self.literals())

    def __str__(self) -> str:
        return ",".join(str(lit) for lit in self.literals()) if self.codes else "true"

    def __repr__(self) -> str:
        return f"Term({self})"


class Clause(_LiteralSet):
    """A non-valid set of literals; the empty clause is ``false``."""

    def without(self, lit: Literal) -> "Clause":
        return Clause(self.universe, tuple(c for c in self.codes if c != lit.code))

    def to_formula(self) -> "Formula":
        u = self.universe
        return u.all_disj(u.lit(lit) for lit in self.literals())

    def __str__(self) -> str:
        if not self.codes:
            return "false"
        return " | ".join(str(lit) for lit in self.literals())

    def __repr__(self) -> str:
        return f"Clause({self})"


class Formula:
    """A node of an expression tree over ``true/false/lit/not/and/or``.

    Nodes are interned per universe: building the same expression twice gives
    the same object, so identity comparison doubles as structural equality and
    shared subtrees form a DAG for free.
    """

    __slots__ = ("universe", "key")

    def __init__(self, universe: Universe, key: tuple):
        self.universe = universe
        self.key = key

    # -- structure ----------------------------------------------------------

    @property
    def kind(self) -> str:
        return self.key[0]

    @property
    def children(self) -> tuple["Formula", ...]:
        if self.kind in ("and", "or"):
            return self.key[1]
        if self.kind == "not":
            return (self.key[1],)
        return ()

    @property
    def literal(self) -> Literal:
        assert self.kind == "lit"
        return self.universe.literal_by_code(self.key[1])

    def _same(self, other: "Formula") -> None:
        if not isinstance(other, Formula):
            raise TypeError(f"expected a formula, got {other!r}")
        if other.universe is not self.universe:
            raise UniverseMismatchError("operands live in different universes")

    # -- connective builders (folding is applied by condition(), not here) ---

    def __and__(self, other: "Formula") -> "Formula":
        self._same(other)
        return self.universe._intern(("and", (self, other)))

    def __or__(self, other: "Formula") -> "Formula":
        self._same(other)
        return self.universe._intern(("or", (self, other)))

    def __invert__(self) -> "Formula":
        return self.universe._intern(("not", self))

    def implies(self, other: "Formula") -> "Formula":
        return ~self | other

    def iff(self, other: "Formula") -> "Formula":
        return self.implies(other) & other.implies(self)

    # -- queries -------------------------------------------------------------

    def mentioned_variables(self) -> frozenset[Variable]:
        out: set[Variable] = set()
        seen: set[int] = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            if node.kind == "lit":
                out.add(node.literal.variable)
            else:
                stack.extend(node.children)
        return frozenset(out)

    def __str__(self) -> str:
        return _format(self, 0)

    def __repr__(self) -> str:
        return f"Formula({self})"


_PRECEDENCE = {"iff": 1, "implies": 2, "or": 3, "and": 4, "not": 5, "atom": 6}


def _format(node: Formula, parent_level: int) -> str:
    kind = node.kind
    if kind == "true":
        return "true"
    if kind == "false":
        return "false"
    if kind == "lit":
        return str(node.literal)
    if kind == "not":
        return "~" + _format(node.key[1], _PRECEDENCE["not"])
    sep = " & " if kind == "and" else " | "
    level = _PRECEDENCE[kind]
    text = sep.join(_format(child, level) for child in node.key[1])
    return f"({text})" if level < parent_level or parent_level == _PRECEDENCE["not"] else text


# -- core operations ---------------------------------------------------------


def flip(world: World, lit: LiteralLike) -> World:
    """Replace the literal of ``lit``'s variable in ``world`` by ``lit``.

    The world is returned unchanged when the literal already holds.
    """
    return world.flip(lit)


def _fold_and(universe: Universe, parts: Sequence[Formula]) -> Formula:
    kept = []
    for part in parts:
        if part.kind == "false":
            return universe.false
        if part.kind != "true":
            kept.append(part)
    if not kept:
        return universe.true
    if len(kept) == 1:
        return kept[0]
    return universe._intern(("and", tuple(kept)))


def _fold_or(universe: Universe, parts: Sequence[Formula]) -> Formula:
    kept = []
    for part in parts:
        if part.kind == "true":
            return universe.true
        if part.kind != "false":
            kept.append(part)
    if not kept:
        return universe.false
    if len(kept) == 1:
        return kept[0]
    return universe._intern(("or", tuple(kept)))


def _fold_not(universe: Universe, child: Formula) -> Formula:
    if child.kind == "true":
        return universe.false
    if child.kind == "false":
        return universe.true
    return universe._intern(("not", child))


def condition(formula: Formula, lit: LiteralLike) -> Formula:
    """Substitute ``lit``'s variable by the matching constant and fold.

    The result never mentions the variable again; folding is deterministic
    (constant absorption plus single-child collapse) and nothing else is
    simplified — equivalence, not syntax, is the contract.
    """
    u = formula.universe
    lit = u.literal(lit)
    cache: dict[int, Formula] = {}

    def walk(node: Formula) -> Formula:
        got = cache.get(id(node))
        if got is not None:
            return got
        kind = node.kind
        if kind == "lit":
            if node.literal.variable == lit.variable:
                out = u.constant(node.literal.positive == lit.positive)
            else:
                out = node
        elif kind == "not":
            out = _fold_not(u, walk(node.key[1]))
        elif kind == "and":
            out = _fold_and(u, [walk(c) for c in node.key[1]])
        elif kind == "or":
            out = _fold_or(u, [walk(c) for c in node.key[1]])
        else:
            out = node
        cache[id(node)] = out
        return out

    return walk(formula)


def evaluate(formula: Formula, world: World) -> bool:
    """Standard Boolean evaluation of ``formula`` under the total ``world``."""
    if world.universe is not formula.universe:
        raise UniverseMismatchError("world evaluates formulas of its own universe")
    cache: dict[int, bool] = {}

    def walk(node: Formula) -> bool:
        got = cache.get(id(node))
        if got is not None:
            return got
        kind = node.kind
        if kind == "true":
            out = True
        elif kind == "false":
            out = False
        elif kind == "lit":
            out = node.literal in world
        elif kind == "not":
            out = not walk(node.key[1])
        elif kind == "and":
            out = all(walk(c) for c in node.key[1])
        else:
            out = any(walk(c) for c in node.key[1])
        cache[id(node)] = out
        return out

    return walk(formula)


def negate(value):
    """Negation normal form of the complement of a formula or circuit.

    Works bottom-up through the De Morgan dual, so the result is an NNF and,
    for circuits, at most doubles the node count.
    """
    if isinstance(value, Formula):
        return _negate_formula(value)
    if isinstance(value, Circuit):
        return _negate_circuit(value)
    raise TypeError(f"cannot negate {value!r}")


def _negate_formula(formula: Formula) -> Formula:
    u = formula.universe
    pos_cache: dict[int, Formula] = {}
    neg_cache: dict[int, Formula] = {}

    def pos(node: Formula) -> Formula:
        got = pos_cache.get(id(node))
        if got is not None:
            return got
        kind = node.kind
        if kind == "not":
            out = neg(node.key[1])
        elif kind == "and":
            out = _fold_and(u, [pos(c) for c in node.key[1]])
        elif kind == "or":
            out = _fold_or(u, [pos(c) for c in node.key[1]])
        else:
            out = node
        pos_cache[id(node)] = out
        return out

    def neg(node: Formula) -> Formula:
        got = neg_cache.get(id(node))
        if got is not None:
            return got
        kind = node.kind
        if kind == "true":
            out = u.false
        elif kind == "false":
            out = u.true
        elif kind == "lit":
            out = u.lit(~node.literal)
        elif kind == "not":
            out = pos(node.key[1])
        elif kind == "and":
            out = _fold_or(u, [neg(c) for c in node.key[1]])
        else:
            out = _fold_and(u, [neg(c) for c in node.key[1]])
        neg_cache[id(node)] = out
        return out

    return neg(formula)


def to_nnf(formula: Formula) -> Formula:
    """Push all negations down to literals and constants."""
    return _negate_formula(_negate_formula(formula))


# -- circuits -----------------------------------------------------------------


class Annotation:
    """Structural classes a circuit may claim (strongest known annotation)."""

    NNF = "nnf"
    DNNF = "dnnf"
    DECISION_DNNF = "decision-dnnf"
    SDD = "sdd"


@dataclass(slots=True)
class CNode:
    """One circuit node.  ``children`` index earlier nodes only."""

    kind: str  # "const" | "lit" | "and" | "or"
    value: bool = False  # for "const"
    lit: int = -1  # literal code, for "lit"
    children: tuple[int, ...] = ()
    decision: int = -1  # variable index for decision or-nodes, -1 if unknown
    elements: tuple[tuple[int, int], ...] = ()  # (prime, sub) pairs for SDD or-nodes


class Circuit:
    """A shared-subgraph NNF DAG in topological order.

    ``annotation`` records the strongest structural class the circuit is known
    to be in; ``verified`` says whether that class has actually been checked
    (parsers and verifiers set it, transformation passes preserve what they
    can prove).
    """

    __slots__ = ("universe", "nodes", "root", "annotation", "verified")

    def __init__(
        self,
        universe: Universe,
        nodes: list[CNode],
        root: int,
        annotation: str = Annotation.NNF,
        verified: bool = False,
    ):
        self.universe = universe
        self.nodes = nodes
        self.root = root
        self.annotation = annotation
        self.verified = verified

    def __len__(self) -> int:
        return len(self.nodes)

    def size(self) -> int:
        """Node count plus edge count — the usual circuit size measure."""
        return len(self.nodes) + sum(len(n.children) for n in self.nodes)

    def literal_codes(self) -> set[int]:
        """Codes of literal nodes reachable from the root."""
        reach = self.reachable()
        return {
            self.nodes[i].lit for i in reach if self.nodes[i].kind == "lit"
        }

    def reachable(self) -> set[int]:
        seen = {self.root}
        stack = [self.root]
        while stack:
            for child in self.nodes[stack.pop()].children:
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        return seen

    def evaluate(self, world: World) -> bool:
        if world.universe is not self.universe:
            raise UniverseMismatchError("world evaluates circuits of its own universe")
        values: list[bool] = []
        for node in self.nodes:
            if node.kind == "const":
                values.append(node.value)
            elif node.kind == "lit":
                values.append(self.universe.literal_by_code(node.lit) in world)
            elif node.kind == "and":
                values.append(all(values[c] for c in node.children))
            else:
                values.append(any(values[c] for c in node.children))
        return values[self.root]

    def to_formula(self) -> Formula:
        u = self.universe
        built: list[Formula] = []
        for node in self.nodes:
            if node.kind == "const":
                built.append(u.constant(node.value))
            elif node.kind == "lit":
                built.append(u.lit(u.literal_by_code(node.lit)))
            elif node.kind == "and":
                built.append(_fold_and(u, [built[c] for c in node.children]))
            else:
                built.append(_fold_or(u, [built[c] for c in node.children]))
        return built[self.root]

    def __repr__(self) -> str:
        return (
            f"Circuit({len(self.nodes)} nodes, root {self.root}, "
            f"{self.annotation}{' verified' if self.verified else ''})"
        )


class CircuitBuilder:
    """Incremental construction of circuits with node interning.

    ``add_*`` methods are structure-preserving (used by parsers and
    generators); the ``fold_*`` variants absorb constants and collapse
    single-child gates (used by transformation passes).
    """

    def __init__(self, universe: Universe):
        self.universe = universe
        self.nodes: list[CNode] = []
        self._cache: dict[tuple, int] = {}

    def _add(self, key: tuple, node: CNode) -> int:
        got = self._cache.get(key)
        if got is not None:
            return got
        self.nodes.append(node)
        index = len(self.nodes) - 1
        self._cache[key] = index
        return index

    def const(self, value: bool) -> int:
        return self._add(("const", value), CNode("const", value=value))

    def lit(self, lit: Literal | int) -> int:
        code = lit if isinstance(lit, int) else lit.code
        return self._add(("lit", code), CNode("lit", lit=code))

    def add_and(self, children: Sequence[int]) -> int:
        children = tuple(children)
        return self._add(("and", children), CNode("and", children=children))

    def add_or(
        self,
        children: Sequence[int],
        decision: int = -1,
        elements: tuple[tuple[int, int], ...] = (),
    ) -> int:
        children = tuple(children)
        return self._add(
            ("or", children, decision, elements),
            CNode("or", children=children, decision=decision, elements=elements),
        )

    def fold_and(self, children: Sequence[int]) -> int:
        kept = []
        for c in children:
            node = self.nodes[c]
            if node.kind == "const":
                if not node.value:
                    return self.const(False)
            else:
                kept.append(c)
        if not kept:
            return self.const(True)
        if len(kept) == 1:
            return kept[0]
        return self.add_and(kept)

    def fold_or(self, children: Sequence[int]) -> int:
        kept = []
        for c in children:
            node = self.nodes[c]
            if node.kind == "const":
                if node.value:
                    return self.const(True)
            else:
                kept.append(c)
        if not kept:
            return self.const(False)
        if len(kept) == 1:
            return kept[0]
        return self.add_or(kept)

    def finish(
        self,
        root: int,
        annotation: str = Annotation.NNF,
        verified: bool = False,
        prune: bool = False,
    ) -> Circuit:
        """Wrap the nodes into a circuit; ``prune`` drops nodes unreachable
        from the root (transformation passes leave such orphans behind)."""
        if prune:
            keep = {root}
            stack = [root]
            while stack:
                for child in self.nodes[stack.pop()].children:
                    if child not in keep:
                        keep.add(child)
                        stack.append(child)
            remap: dict[int, int] = {}
            compact: list[CNode] = []
            for index in sorted(keep):
                node = self.nodes[index]
                remap[index] = len(compact)
                compact.append(
                    CNode(
                        node.kind,
                        value=node.value,
                        lit=node.lit,
                        children=tuple(remap[c] for c in node.children),
                        decision=node.decision,
                        elements=tuple(
                            (remap[p], remap[s]) for p, s in node.elements
                        ),
                    )
                )
            return Circuit(self.universe, compact, remap[root], annotation, verified)
        return Circuit(self.universe, self.nodes, root, annotation, verified)


def circuit_from_formula(formula: Formula) -> Circuit:
    """Compile an NNF formula into a circuit (negations are pushed first)."""
    nnf = to_nnf(formula)
    builder = CircuitBuilder(nnf.universe)
    cache: dict[int, int] = {}

    def walk(node: Formula) -> int:
        got = cache.get(id(node))
        if got is not None:
            return got
        kind = node.kind
        if kind == "true":
            out = builder.const(True)
        elif kind == "false":
            out = builder.const(False)
        elif kind == "lit":
            out = builder.lit(node.literal)
        elif kind == "and":
            out = builder.fold_and([walk(c) for c in node.children])
        else:
            out = builder.fold_or([walk(c) for c in node.children])
        cache[id(node)] = out
        return out

    return builder.finish(walk(nnf), prune=True)


def _negate_circuit(circuit: Circuit) -> Circuit:
    builder = CircuitBuilder(circuit.universe)
    pos: list[int] = []
    neg: list[int] = []
    for node in circuit.nodes:
        if node.kind == "const":
            pos.append(builder.const(node.value))
            neg.append(builder.const(not node.value))
        elif node.kind == "lit":
            pos.append(builder.lit(node.lit))
            neg.append(builder.lit(node.lit ^ 1))
        elif node.kind == "and":
            pos.append(builder.fold_and([pos[c] for c in node.children]))
            neg.append(builder.fold_or([neg[c] for c in node.children]))
        else:
            pos.append(builder.fold_or([pos[c] for c in node.children]))
            neg.append(builder.fold_and([neg[c] for c in node.children]))
    return builder.finish(neg[circuit.root], prune=True)
