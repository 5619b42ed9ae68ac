"""Closed expression language for interaction terms.

Grammar (no host-language evaluation):

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | primary
    primary := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

Functions: cos, sin, exp (Hermitian matrix functions when applied to an
operator, ordinary complex functions on scalars) and dag (conjugate
transpose; complex conjugation on scalars).  '*' between operators is the
non-commutative matrix product in written order.  Identifiers are typed at
parse time: operator names come from the interaction bindings, scalar names
from an explicit constants map.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import linalg

FUNCTIONS = ("cos", "sin", "exp", "dag")

SCALAR = "scalar"
OPERATOR = "operator"


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class UnboundIdentifierError(KeyError):
    pass


class ExprTypeError(TypeError):
    pass


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
    r"|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/()]))"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(source):
        match = _TOKEN_RE.match(source, pos)
        if match is None:
            stripped = source[pos:].lstrip()
            at = len(source) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {source[at]!r}", at)
        if match.lastgroup is None:  # trailing whitespace only
            break
        tokens.append(Token(match.lastgroup, match.group(match.lastgroup), match.start(match.lastgroup)))
        pos = match.end()
    return tokens


# --- AST ----------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float
    type: str = SCALAR


@dataclass(frozen=True)
class Name:
    identifier: str
    type: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"
    type: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    type: str


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Node"
    type: str


Node = Union[Num, Name, Neg, BinOp, Call]


class _Parser:
    def __init__(self, source: str, operator_names: set[str], scalar_names: set[str]):
        self.source = source
        self.tokens = tokenize(source)
        self.index = 0
        self.operator_names = operator_names
        self.scalar_names = scalar_names

    def peek(self) -> Token | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError("unexpected end of expression", len(self.source))
        self.index += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok is None or tok.text != text:
            at = tok.position if tok else len(self.source)
            raise ExprSyntaxError(f"expected {text!r}", at)
        return self.advance()

    def parse(self) -> Node:
        node = self.expression()
        tok = self.peek()
        if tok is not None:
            raise ExprSyntaxError(f"unexpected token {tok.text!r}", tok.position)
        return node

    def expression(self) -> Node:
        node = self.term()
        while (tok := self.peek()) is not None and tok.text in "+-":
            self.advance()
            right = self.term()
            node = self._binop(tok, node, right)
        return node

    def term(self) -> Node:
        node = self.unary()
        while (tok := self.peek()) is not None and tok.text in "*/":
            self.advance()
            right = self.unary()
            node = self._binop(tok, node, right)
        return node

    def unary(self) -> Node:
        tok = self.peek()
        if tok is not None and tok.text == "-":
            self.advance()
            arg = self.unary()
            return Neg(arg, arg.type)
        return self.primary()

    def primary(self) -> Node:
        tok = self.advance()
        if tok.kind == "number":
            return Num(float(tok.text))
        if tok.kind == "ident":
            nxt = self.peek()
            if nxt is not None and nxt.text == "(":
                if tok.text not in FUNCTIONS:
                    raise ExprSyntaxError(
                        f"unknown function {tok.text!r}; supported: {', '.join(FUNCTIONS)}",
                        tok.position,
                    )
                self.advance()
                arg = self.expression()
                self.expect(")")
                return Call(tok.text, arg, arg.type)
            return Name(tok.text, self._identifier_type(tok))
        if tok.text == "(":
            node = self.expression()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"unexpected token {tok.text!r}", tok.position)

    def _identifier_type(self, tok: Token) -> str:
        if tok.text in self.operator_names:
            return OPERATOR
        if tok.text in self.scalar_names:
            return SCALAR
        raise UnboundIdentifierError(
            f"identifier {tok.text!r} is neither a bound operator nor a known constant"
        )

    def _binop(self, tok: Token, left: Node, right: Node) -> BinOp:
        op = tok.text
        if op == "/":
            if right.type == OPERATOR:
                raise ExprTypeError("operator in denominator is not defined")
            result = left.type
        elif op == "*":
            result = OPERATOR if OPERATOR in (left.type, right.type) else SCALAR
        else:  # + or -
            if left.type != right.type:
                raise ExprTypeError(
                    f"cannot apply {op!r} between {left.type} and {right.type}"
                )
            result = left.type
        return BinOp(op, left, right, result)


def parse_expression(
    source: str, operator_names: set[str], scalar_names: set[str] = frozenset()
) -> Node:
    """Parse and type-check an interaction expression."""
    if not source.strip():
        raise ExprSyntaxError("empty expression", 0)
    overlap = set(operator_names) & set(scalar_names)
    if overlap:
        raise ExprTypeError(f"names bound as both operator and scalar: {sorted(overlap)}")
    return _Parser(source, set(operator_names), set(scalar_names)).parse()


_SCALAR_FUNCTIONS = {
    "cos": cmath.cos,
    "sin": cmath.sin,
    "exp": cmath.exp,
    "dag": lambda z: complex(z).conjugate(),
}

_MATRIX_FUNCTIONS = {
    "cos": np.cos,
    "sin": np.sin,
    "exp": np.exp,
}


def evaluate(node: Node, operators: dict[str, np.ndarray], scalars: dict[str, complex]):
    """Evaluate a typed AST to a complex scalar or a dense matrix.

    Operator-valued cos/sin/exp require a Hermitian argument (they go
    through the eigendecomposition path); dag is the conjugate transpose.
    """
    if isinstance(node, Num):
        return complex(node.value)
    if isinstance(node, Name):
        if node.type == OPERATOR:
            op = operators[node.identifier]
            return op.toarray() if hasattr(op, "toarray") else np.asarray(op)
        return complex(scalars[node.identifier])
    if isinstance(node, Neg):
        return -evaluate(node.arg, operators, scalars)
    if isinstance(node, Call):
        arg = evaluate(node.arg, operators, scalars)
        if node.type == OPERATOR:
            if node.fn == "dag":
                return np.asarray(arg).conj().T
            return linalg.hermitian_matrix_function(arg, _MATRIX_FUNCTIONS[node.fn])
        return _SCALAR_FUNCTIONS[node.fn](arg)
    if isinstance(node, BinOp):
        left = evaluate(node.left, operators, scalars)
        right = evaluate(node.right, operators, scalars)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "/":
            return left / right
        # '*': matrix product when both sides are operators, in written order
        if isinstance(left, np.ndarray) and isinstance(right, np.ndarray):
            return left @ right
        return left * right
    raise TypeError(f"unknown AST node {node!r}")
