"""Filter expressions over result-table columns.

Grammar: comparisons (`<=`, `>=`, `==`, plus `<`, `>`, `!=`) between a column
name and a numeric literal, combined with `&&`, `||`, and parentheses.
Literals accept the unit suffixes mW, ns, pJ (canonical column units,
multiplier 1) and MB (1e6, for byte-valued columns). Booleans compare as
0/1; absent values fail every comparison; +inf compares naturally, so an
infinite lifetime passes any lower bound.

Errors carry the character position for caret diagnostics.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

UNIT_MULTIPLIERS = {"mW": 1.0, "ns": 1.0, "pJ": 1.0, "MB": 1e6}

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<unit>[A-Za-z]+)?"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><=|>=|==|!=|&&|\|\||[<>()])"
    r")"
)


class PredicateError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class _Token:
    kind: str  # "number" | "ident" | "op" | "end"
    text: str
    value: float | None
    position: int


def _tokenize(expression: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(expression):
        match = _TOKEN_RE.match(expression, pos)
        if match is None or match.end() == pos:
            stripped = expression[pos:].lstrip()
            if not stripped:
                break
            at = len(expression) - len(stripped)
            raise PredicateError(f"unexpected character {stripped[0]!r}", at)
        if match.group("number") is not None:
            value = float(match.group("number"))
            unit = match.group("unit")
            if unit is not None:
                if unit not in UNIT_MULTIPLIERS:
                    raise PredicateError(f"unknown unit suffix {unit!r}", match.start("unit"))
                value *= UNIT_MULTIPLIERS[unit]
            tokens.append(_Token("number", match.group(0).strip(), value, match.start()))
        elif match.group("ident") is not None:
            tokens.append(_Token("ident", match.group("ident"), None, match.start("ident")))
        else:
            tokens.append(_Token("op", match.group("op"), None, match.start("op")))
        pos = match.end()
    tokens.append(_Token("end", "", None, len(expression)))
    return tokens


_COMPARATORS = {
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
}


class _Comparison:
    __slots__ = ("column", "op", "literal")

    def __init__(self, column: str, op: str, literal: float):
        self.column = column
        self.op = op
        self.literal = literal

    def evaluate(self, getter) -> bool:
        value = getter(self.column)
        if value is None:
            return False
        if isinstance(value, bool):
            value = 1.0 if value else 0.0
        return _COMPARATORS[self.op](value, self.literal)


class _Junction:
    __slots__ = ("is_and", "parts")

    def __init__(self, is_and: bool, parts: list):
        self.is_and = is_and
        self.parts = parts

    def evaluate(self, getter) -> bool:
        if self.is_and:
            return all(p.evaluate(getter) for p in self.parts)
        return any(p.evaluate(getter) for p in self.parts)


class _Parser:
    def __init__(self, tokens: list[_Token], numeric_columns: set[str]):
        self.tokens = tokens
        self.index = 0
        self.columns = numeric_columns

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def parse(self):
        node = self.parse_or()
        tail = self.peek()
        if tail.kind != "end":
            raise PredicateError(f"unexpected trailing {tail.text!r}", tail.position)
        return node

    def parse_or(self):
        parts = [self.parse_and()]
        while self.peek().text == "||":
            self.advance()
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else _Junction(False, parts)

    def parse_and(self):
        parts = [self.parse_atom()]
        while self.peek().text == "&&":
            self.advance()
            parts.append(self.parse_atom())
        return parts[0] if len(parts) == 1 else _Junction(True, parts)

    def parse_atom(self):
        token = self.peek()
        if token.text == "(":
            self.advance()
            node = self.parse_or()
            closing = self.advance()
            if closing.text != ")":
                raise PredicateError("expected ')'", closing.position)
            return node
        return self.parse_comparison()

    def parse_comparison(self):
        left = self.advance()
        if left.kind not in ("ident", "number"):
            raise PredicateError(f"expected a column or number, got {left.text!r}", left.position)
        op = self.advance()
        if op.kind != "op" or op.text not in _COMPARATORS:
            raise PredicateError(f"expected a comparison operator, got {op.text!r}", op.position)
        right = self.advance()
        if right.kind == "end":
            raise PredicateError("expected a value after the operator", right.position)
        if left.kind == "ident" and right.kind == "number":
            column, literal, op_text = left, right.value, op.text
        elif left.kind == "number" and right.kind == "ident":
            # mirror: 5 <= x  ->  x >= 5
            mirrored = {"<=": ">=", ">=": "<=", "<": ">", ">": "<", "==": "==", "!=": "!="}
            column, literal, op_text = right, left.value, mirrored[op.text]
        else:
            raise PredicateError("comparison needs one column and one number", op.position)
        if column.text not in self.columns:
            raise PredicateError(f"unknown or non-numeric column {column.text!r}", column.position)
        return _Comparison(column.text, op_text, literal)


class Predicate:
    """Compiled filter; call with a column-value getter or a mapping."""

    def __init__(self, expression: str, root):
        self.expression = expression
        self._root = root

    def __call__(self, row) -> bool:
        getter = row.get if isinstance(row, dict) else row
        return self._root.evaluate(getter)


def compile_predicate(expression: str, numeric_columns) -> Predicate:
    if not expression.strip():
        raise PredicateError("empty expression", 0)
    tokens = _tokenize(expression)
    parser = _Parser(tokens, set(numeric_columns))
    return Predicate(expression, parser.parse())


def caret_diagnostic(expression: str, error: PredicateError) -> str:
    """Two-line rendering: the expression and a caret under the error."""
    return f"{expression}\n{' ' * error.position}^"
