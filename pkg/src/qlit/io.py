"""Parsers and serializers for the package's text formats.

Four formats, all ASCII with LF line endings:

* DIMACS CNF: optional ``c`` comment lines, one ``p cnf <nvars> <nclauses>``
  header, then clauses as nonzero integers terminated by ``0`` (clauses may
  span lines).  Variable ``i`` maps to index ``i-1`` of the universe.

* Compiled NNF circuits, one node per line after a ``nnf <V> <E> <n>``
  header: ``L <lit>`` for literals, ``A <c> <ids...>`` for conjunctions,
  ``O <j> <c> <ids...>`` for disjunctions where ``j`` names the decision
  variable (0 when there is none).  ``A 0`` is true, ``O 0 0`` is false.
  Node ids are line positions (0-based) and must point backwards.  Header
  counts are validated, not trusted.

* SDD circuits: ``T <id>`` / ``F <id>`` constants, ``L <id> <lit>`` literals
  and ``D <id> <k> <p1> <s1> ... <pk> <sk>`` partition nodes.  Ids are
  explicit, defined once, used after definition; the last defined node is the
  root.

* A formula mini-language: identifiers, ``~`` negation, ``&``, ``|``, ``=>``
  and ``<=>`` with precedence ``~ > & > | > => > <=>`` (the arrows associate
  to the right), parentheses and the constants ``true`` / ``false``.

A classifier bundle is a small header (``var <index> <name>`` lines and an
optional ``protected <name>...`` line) followed by one or two DIMACS
sections tagged ``section delta`` and ``section negdelta``.

Parse errors always carry a 1-based line (and column for formulas); no
partial results escape.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .core import (
    Annotation,
    Circuit,
    CircuitBuilder,
    Clause,
    Formula,
    Universe,
)
from .errors import ParseError, StructureError
from .tractable import Cnf, verify_decision_dnnf, verify_dnnf, verify_sdd

__all__ = [
    "parse_dimacs",
    "emit_dimacs",
    "parse_nnf",
    "emit_nnf",
    "parse_sdd",
    "emit_sdd",
    "parse_formula",
    "emit_formula",
    "parse_classifier_bundle",
    "emit_classifier_bundle",
    "ClassifierBundle",
]


# -- DIMACS CNF -------------------------------------------------------------------


def parse_dimacs(
    text: str, universe: Universe | None = None, first_line: int = 1
) -> Cnf:
    """Parse a DIMACS CNF.  ``first_line`` offsets reported line numbers when
    the text is embedded in a larger file.

    Comment lines of the shape ``c var <index> <name>`` assign display names;
    when they cover every variable exactly once the universe uses them.
    """
    lines = text.splitlines()
    header: tuple[int, int] | None = None
    tokens: list[tuple[int, int]] = []  # (value, line number)
    names: dict[int, str] = {}
    for offset, line in enumerate(lines):
        number = first_line + offset
        stripped = line.strip()
        if not stripped or stripped.startswith("c"):
            fields = stripped.split()
            if len(fields) == 4 and fields[:2] == ["c", "var"] and fields[2].isdigit():
                names[int(fields[2])] = fields[3]
            continue
        if stripped.startswith("p"):
            if header is not None:
                raise ParseError("second problem line", number)
            fields = stripped.split()
            if len(fields) != 4 or fields[1] != "cnf":
                raise ParseError("malformed header, expected 'p cnf <vars> <clauses>'", number)
            try:
                header = (int(fields[2]), int(fields[3]))
            except ValueError:
                raise ParseError("non-numeric header counts", number) from None
            if header[0] < 0 or header[1] < 0:
                raise ParseError("negative header counts", number)
            continue
        if header is None:
            raise ParseError("clause before the problem line", number)
        for field in stripped.split():
            try:
                tokens.append((int(field), number))
            except ValueError:
                raise ParseError(f"expected an integer, got {field!r}", number) from None

    if header is None:
        line = first_line + len(lines)
        raise ParseError("missing 'p cnf' header", max(line - 1, first_line))
    nvars, nclauses = header
    if universe is None:
        if sorted(names) == list(range(1, nvars + 1)):
            universe = Universe([names[i] for i in range(1, nvars + 1)])
        else:
            universe = Universe(nvars)
    elif len(universe) != nvars:
        raise ParseError(
            f"header declares {nvars} variables, universe has {len(universe)}",
            first_line,
        )

    clauses: list[Clause] = []
    current: list[int] = []
    current_line = first_line
    for value, number in tokens:
        if value == 0:
            codes = set()
            for item in current:
                code = 2 * (abs(item) - 1) + (1 if item > 0 else 0)
                if code ^ 1 in codes:
                    raise ParseError(
                        f"tautological clause over variable {abs(item)}", number
                    )
                codes.add(code)
            clauses.append(Clause(universe, tuple(sorted(codes))))
            current = []
        else:
            if abs(value) > nvars:
                raise ParseError(f"literal {value} out of range", number)
            current.append(value)
            current_line = number
    if current:
        raise ParseError("unterminated clause", current_line)
    if len(clauses) != nclauses:
        raise ParseError(
            f"header declares {nclauses} clauses, found {len(clauses)}",
            tokens[-1][1] if tokens else first_line,
        )
    return Cnf(universe, clauses)


def emit_dimacs(cnf: Cnf) -> str:
    lines = [f"p cnf {len(cnf.universe)} {len(cnf.elements)}"]
    for clause in cnf.sorted_elements():
        numbers = [
            (code >> 1) + 1 if code & 1 else -((code >> 1) + 1)
            for code in clause.codes
        ]
        lines.append(" ".join(str(n) for n in numbers + [0]))
    return "\n".join(lines) + "\n"


# -- compiled NNF circuits -----------------------------------------------------------


def parse_nnf(text: str, universe: Universe | None = None) -> Circuit:
    """Parse a compiled circuit and infer its strongest annotation."""
    lines = text.splitlines()
    header = None
    builder: CircuitBuilder | None = None
    ids: list[int] = []
    declared_edges = 0
    edges = 0
    decision_flags: list[bool] = []
    names: dict[int, str] = {}

    for offset, raw in enumerate(lines):
        number = offset + 1
        line = raw.strip()
        if not line or line.startswith("c"):
            fields = line.split()
            if len(fields) == 4 and fields[:2] == ["c", "var"] and fields[2].isdigit():
                names[int(fields[2])] = fields[3]
            continue
        fields = line.split()
        if header is None:
            if fields[0] != "nnf" or len(fields) != 4:
                raise ParseError("expected header 'nnf <nodes> <edges> <vars>'", number)
            try:
                header = (int(fields[1]), int(fields[2]), int(fields[3]))
            except ValueError:
                raise ParseError("non-numeric header counts", number) from None
            nvars = header[2]
            if universe is None:
                if sorted(names) == list(range(1, nvars + 1)):
                    universe = Universe([names[i] for i in range(1, nvars + 1)])
                else:
                    universe = Universe(nvars)
            elif len(universe) != nvars:
                raise ParseError(
                    f"header declares {nvars} variables, universe has {len(universe)}",
                    number,
                )
            declared_edges = header[1]
            builder = CircuitBuilder(universe)
            continue

        kind = fields[0]
        try:
            numbers = [int(f) for f in fields[1:]]
        except ValueError:
            raise ParseError("non-numeric node fields", number) from None

        if kind == "L":
            if len(numbers) != 1 or numbers[0] == 0:
                raise ParseError("literal node needs one nonzero integer", number)
            var = abs(numbers[0])
            if var > len(universe):
                raise ParseError(f"literal {numbers[0]} out of range", number)
            code = 2 * (var - 1) + (1 if numbers[0] > 0 else 0)
            ids.append(builder.lit(code))
            decision_flags.append(True)
        elif kind == "A":
            if not numbers or numbers[0] != len(numbers) - 1:
                raise ParseError("and-node child count mismatch", number)
            children = []
            for child in numbers[1:]:
                if not 0 <= child < len(ids):
                    raise ParseError(f"forward or invalid reference {child}", number)
                children.append(ids[child])
            edges += len(children)
            if not children:
                ids.append(builder.const(True))
            else:
                ids.append(builder.add_and(children))
            decision_flags.append(True)
        elif kind == "O":
            if len(numbers) < 2 or numbers[1] != len(numbers) - 2:
                raise ParseError("or-node child count mismatch", number)
            decision_var = numbers[0]
            if decision_var < 0 or decision_var > len(universe):
                raise ParseError(f"decision variable {decision_var} out of range", number)
            children = []
            for child in numbers[2:]:
                if not 0 <= child < len(ids):
                    raise ParseError(f"forward or invalid reference {child}", number)
                children.append(ids[child])
            edges += len(children)
            if not children:
                ids.append(builder.const(False))
            else:
                ids.append(builder.add_or(children, decision=decision_var - 1))
            decision_flags.append(decision_var != 0 or not children)
        else:
            raise ParseError(f"unknown node kind {kind!r}", number)

    if header is None:
        raise ParseError("missing 'nnf' header", max(len(lines), 1))
    if not ids:
        raise ParseError("circuit has no nodes", len(lines))
    if header[0] != len(ids):
        raise ParseError(
            f"header declares {header[0]} nodes, found {len(ids)}", len(lines)
        )
    if declared_edges != edges:
        raise ParseError(
            f"header declares {declared_edges} edges, found {edges}", len(lines)
        )

    circuit = builder.finish(ids[-1], Annotation.NNF)
    if all(decision_flags):
        try:
            return verify_decision_dnnf(circuit)
        except StructureError:
            pass
    try:
        return verify_dnnf(circuit)
    except StructureError:
        circuit.annotation = Annotation.NNF
        circuit.verified = True
        return circuit


def emit_nnf(circuit: Circuit) -> str:
    universe = circuit.universe
    nodes = circuit.nodes
    body: list[str] = []
    edges = 0
    for node in nodes:
        if node.kind == "const":
            body.append("A 0" if node.value else "O 0 0")
        elif node.kind == "lit":
            var = (node.lit >> 1) + 1
            body.append(f"L {var if node.lit & 1 else -var}")
        elif node.kind == "and":
            edges += len(node.children)
            body.append("A " + " ".join(str(c) for c in (len(node.children), *node.children)))
        else:
            edges += len(node.children)
            decision = node.decision + 1 if node.decision >= 0 else 0
            body.append(
                f"O {decision} "
                + " ".join(str(c) for c in (len(node.children), *node.children))
            )
    header = f"nnf {len(nodes)} {edges} {len(universe)}"
    return "\n".join([header, *body]) + "\n"


# -- SDD circuits ----------------------------------------------------------------------


def parse_sdd(text: str, universe: Universe | None = None) -> Circuit:
    """Parse an SDD description and verify its partition invariants."""
    lines = text.splitlines()
    entries: list[tuple[int, str, list[int], int]] = []  # (id, kind, payload, line)
    max_var = 0
    names: dict[int, str] = {}
    for offset, raw in enumerate(lines):
        number = offset + 1
        line = raw.strip()
        if not line or line.startswith("c"):
            fields = line.split()
            if len(fields) == 4 and fields[:2] == ["c", "var"] and fields[2].isdigit():
                names[int(fields[2])] = fields[3]
            continue
        fields = line.split()
        kind = fields[0]
        try:
            numbers = [int(f) for f in fields[1:]]
        except ValueError:
            raise ParseError("non-numeric fields", number) from None
        if kind in ("T", "F"):
            if len(numbers) != 1:
                raise ParseError("constant node needs exactly an id", number)
        elif kind == "L":
            if len(numbers) != 2 or numbers[1] == 0:
                raise ParseError("literal node needs an id and a nonzero literal", number)
            max_var = max(max_var, abs(numbers[1]))
        elif kind == "D":
            if len(numbers) < 2:
                raise ParseError("decomposition node needs an id and a count", number)
            count = numbers[1]
            if count < 1 or len(numbers) != 2 + 2 * count:
                raise ParseError(
                    f"decomposition declares {count} elements, fields disagree", number
                )
        else:
            raise ParseError(f"unknown node kind {kind!r}", number)
        entries.append((numbers[0], kind, numbers[1:], number))

    if not entries:
        raise ParseError("empty SDD description", max(len(lines), 1))
    if universe is None:
        if sorted(names) == list(range(1, max_var + 1)):
            universe = Universe([names[i] for i in range(1, max_var + 1)])
        else:
            universe = Universe(max_var)

    builder = CircuitBuilder(universe)
    by_id: dict[int, int] = {}
    root = -1
    for node_id, kind, payload, number in entries:
        if node_id in by_id:
            raise ParseError(f"node id {node_id} defined twice", number)
        if kind == "T":
            root = builder.const(True)
        elif kind == "F":
            root = builder.const(False)
        elif kind == "L":
            value = payload[0]
            if abs(value) > len(universe):
                raise ParseError(f"literal {value} out of range", number)
            code = 2 * (abs(value) - 1) + (1 if value > 0 else 0)
            root = builder.lit(code)
        else:
            count = payload[0]
            pairs = []
            children = []
            for k in range(count):
                p_id, s_id = payload[1 + 2 * k], payload[2 + 2 * k]
                for ref in (p_id, s_id):
                    if ref not in by_id:
                        raise ParseError(f"reference to undefined node {ref}", number)
                pair = (by_id[p_id], by_id[s_id])
                pairs.append(pair)
                children.append(builder.add_and(pair))
            root = builder.add_or(children, elements=tuple(pairs))
        by_id[node_id] = root

    circuit = builder.finish(root, Annotation.SDD)
    return verify_sdd(circuit)


def emit_sdd(circuit: Circuit) -> str:
    """Serialize an SDD-annotated circuit; prime/sub pair nodes are implicit.

    A prime that is a plain conjunction of literals has no node kind of its
    own in the format, so it is rewritten as nested two-element partitions
    ``(l & rest) | (~l & false)``.
    """
    lines: list[str] = []
    node_ids: dict[int, int] = {}
    literal_ids: dict[int, int] = {}
    const_ids: dict[bool, int] = {}
    counter = [0]

    def fresh() -> int:
        counter[0] += 1
        return counter[0] - 1

    def emit_const(value: bool) -> int:
        if value not in const_ids:
            me = fresh()
            lines.append(f"{'T' if value else 'F'} {me}")
            const_ids[value] = me
        return const_ids[value]

    def emit_literal(code: int) -> int:
        if code not in literal_ids:
            me = fresh()
            var = (code >> 1) + 1
            lines.append(f"L {me} {var if code & 1 else -var}")
            literal_ids[code] = me
        return literal_ids[code]

    def emit_term(codes: list[int]) -> int:
        head, rest = codes[0], codes[1:]
        if not rest:
            return emit_literal(head)
        parts = (emit_literal(head), emit_term(rest), emit_literal(head ^ 1), emit_const(False))
        me = fresh()
        lines.append("D {} 2 {} {} {} {}".format(me, *parts))
        return me

    def emit(i: int) -> int:
        if i in node_ids:
            return node_ids[i]
        node = circuit.nodes[i]
        if node.kind == "const":
            me = emit_const(node.value)
        elif node.kind == "lit":
            me = emit_literal(node.lit)
        elif node.kind == "and":
            codes = []
            for child in node.children:
                child_node = circuit.nodes[child]
                if child_node.kind != "lit":
                    raise StructureError(
                        "only literal-conjunction primes can be serialized", i
                    )
                codes.append(child_node.lit)
            me = emit_term(codes)
        else:
            pairs = node.elements or tuple(
                (circuit.nodes[c].children[0], circuit.nodes[c].children[1])
                for c in node.children
            )
            refs = [(emit(p), emit(s)) for p, s in pairs]
            me = fresh()
            flat = " ".join(f"{p} {s}" for p, s in refs)
            lines.append(f"D {me} {len(refs)} {flat}")
        node_ids[i] = me
        return me

    emit(circuit.root)
    return "\n".join(lines) + "\n"


# -- formula mini-language ---------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | punct | end
    text: str
    line: int
    column: int


_PUNCT = ("<=>", "=>", "~", "&", "|", "(", ")")


def _tokenize(text: str) -> Iterator[_Token]:
    line = 1
    column = 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            column = 1
            i += 1
            continue
        if ch.isspace():
            column += 1
            i += 1
            continue
        matched = None
        for punct in _PUNCT:
            if text.startswith(punct, i):
                matched = punct
                break
        if matched:
            yield _Token("punct", matched, line, column)
            column += len(matched)
            i += len(matched)
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < len(text) and (text[i].isalnum() or text[i] == "_"):
                i += 1
            yield _Token("ident", text[start:i], line, column)
            column += i - start
            continue
        raise ParseError(f"unexpected character {ch!r}", line, column)
    yield _Token("end", "", line, column)


class _FormulaParser:
    def __init__(self, tokens: list[_Token], universe: Universe):
        self.tokens = tokens
        self.pos = 0
        self.universe = universe

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, text: str) -> None:
        token = self.take()
        if token.text != text:
            raise ParseError(
                f"expected {text!r}, got {token.text or 'end of input'!r}",
                token.line,
                token.column,
            )

    def parse(self) -> Formula:
        formula = self.iff()
        token = self.peek()
        if token.kind != "end":
            raise ParseError(
                f"unexpected {token.text!r}", token.line, token.column
            )
        return formula

    def iff(self) -> Formula:
        left = self.implies()
        if self.peek().text == "<=>":
            self.take()
            return left.iff(self.iff())
        return left

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.peek().text == "=>":
            self.take()
            return left.implies(self.implies())
        return left

    def disjunction(self) -> Formula:
        out = self.conjunction()
        while self.peek().text == "|":
            self.take()
            out = out | self.conjunction()
        return out

    def conjunction(self) -> Formula:
        out = self.unary()
        while self.peek().text == "&":
            self.take()
            out = out & self.unary()
        return out

    def unary(self) -> Formula:
        token = self.peek()
        if token.text == "~":
            self.take()
            return ~self.unary()
        return self.atom()

    def atom(self) -> Formula:
        token = self.take()
        if token.text == "(":
            inner = self.iff()
            self.expect(")")
            return inner
        if token.kind == "ident":
            if token.text == "true":
                return self.universe.true
            if token.text == "false":
                return self.universe.false
            if token.text not in self.universe:
                raise ParseError(
                    f"unknown identifier {token.text!r}", token.line, token.column
                )
            return self.universe.lit(token.text)
        raise ParseError(
            f"expected a formula, got {token.text or 'end of input'!r}",
            token.line,
            token.column,
        )


def parse_formula(text: str, universe: Universe | None = None) -> Formula:
    """Parse the formula mini-language.

    Without a declared universe, the universe is the set of mentioned
    identifiers in lexicographic order.
    """
    tokens = list(_tokenize(text))
    if universe is None:
        names = sorted(
            {t.text for t in tokens if t.kind == "ident" and t.text not in ("true", "false")}
        )
        universe = Universe(names)
    return _FormulaParser(tokens, universe).parse()


def emit_formula(formula: Formula) -> str:
    return str(formula)


# -- classifier bundles ---------------------------------------------------------------------


@dataclass
class ClassifierBundle:
    universe: Universe
    protected: tuple[str, ...]
    positive: Cnf
    negative: Cnf | None


def parse_classifier_bundle(text: str) -> ClassifierBundle:
    """Parse a classifier bundle: variable map, protected set, CNF sections."""
    lines = text.splitlines()
    names: dict[int, str] = {}
    protected: list[str] = []
    sections: dict[str, tuple[int, list[str]]] = {}
    current: list[str] | None = None

    for offset, raw in enumerate(lines):
        number = offset + 1
        line = raw.strip()
        if current is not None and not line.startswith("section"):
            current.append(raw)
            continue
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        if fields[0] == "var":
            if len(fields) != 3:
                raise ParseError("expected 'var <index> <name>'", number)
            try:
                index = int(fields[1])
            except ValueError:
                raise ParseError("non-numeric variable index", number) from None
            if index in names:
                raise ParseError(f"variable index {index} declared twice", number)
            names[index] = fields[2]
        elif fields[0] == "protected":
            protected.extend(fields[1:])
        elif fields[0] == "section":
            if len(fields) != 2 or fields[1] not in ("delta", "negdelta"):
                raise ParseError(
                    "expected 'section delta' or 'section negdelta'", number
                )
            if fields[1] in sections:
                raise ParseError(f"section {fields[1]} appears twice", number)
            current = []
            sections[fields[1]] = (number + 1, current)
        else:
            raise ParseError(f"unknown directive {fields[0]!r}", number)

    if not names:
        raise ParseError("bundle declares no variables", 1)
    if sorted(names) != list(range(1, len(names) + 1)):
        raise ParseError("variable indexes must be 1..n contiguous", 1)
    universe = Universe([names[i] for i in range(1, len(names) + 1)])
    for name in protected:
        if name not in universe:
            raise ParseError(f"protected variable {name!r} is not declared", 1)
    if "delta" not in sections:
        raise ParseError("bundle has no 'section delta'", len(lines) or 1)

    start, body = sections["delta"]
    positive = parse_dimacs("\n".join(body), universe, first_line=start)
    negative = None
    if "negdelta" in sections:
        start, body = sections["negdelta"]
        negative = parse_dimacs("\n".join(body), universe, first_line=start)
    return ClassifierBundle(universe, tuple(protected), positive, negative)


def emit_classifier_bundle(bundle: ClassifierBundle) -> str:
    lines = [
        f"var {v.index + 1} {v.name}" for v in bundle.universe.variables
    ]
    if bundle.protected:
        lines.append("protected " + " ".join(bundle.protected))
    lines.append("section delta")
    lines.append(emit_dimacs(bundle.positive).rstrip("\n"))
    if bundle.negative is not None:
        lines.append("section negdelta")
        lines.append(emit_dimacs(bundle.negative).rstrip("\n"))
    return "\n".join(lines) + "\n"
