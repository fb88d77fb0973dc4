"""Scalar formulas of the arc-length variable ``s``.

A small recursive-descent parser for conventional infix formulas such as
``"1 + 0.3*sin(2*s)"``.  Parsed expressions are immutable trees that can be
called like functions of ``s``.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ['-'] power
    power  := atom ['^' factor]
    atom   := number | 'pi' | 'e' | 's' | ident '(' expr ')' | '(' expr ')'

``^`` binds tighter than unary minus (``-2^2 == -4``) and is
right-associative.  There is no implicit multiplication.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

from .errors import ExprDomainError, ExprSyntaxError, UnknownIdentifierError

__all__ = [
    "ScalarExpr",
    "Num",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "parse",
    "evaluate",
    "to_text",
    "FUNCTIONS",
    "CONSTANTS",
]


def _check_log(x):
    if not x > 0.0:
        return "argument outside domain (0, inf)"


def _check_sqrt(x):
    if not x >= 0.0:
        return "argument outside domain [0, inf)"


def _check_arccos(x):
    if not -1.0 <= x <= 1.0:
        return "argument outside domain [-1, 1]"


FUNCTIONS: dict[str, tuple[Callable[[float], float], Callable | None]] = {
    "sin": (math.sin, None),
    "cos": (math.cos, None),
    "tan": (math.tan, None),
    "exp": (math.exp, None),
    "log": (math.log, _check_log),
    "sqrt": (math.sqrt, _check_sqrt),
    "abs": (abs, None),
    "arccos": (math.acos, _check_arccos),
    "arctan": (math.atan, None),
}

CONSTANTS = {"pi": math.pi, "e": math.e}


@dataclass(frozen=True)
class Num:
    value: float

    def eval(self, s: float) -> float:
        return self.value


@dataclass(frozen=True)
class Const:
    name: str

    def eval(self, s: float) -> float:
        return CONSTANTS[self.name]


@dataclass(frozen=True)
class Var:
    def eval(self, s: float) -> float:
        return float(s)


@dataclass(frozen=True)
class Neg:
    operand: Node

    def eval(self, s: float) -> float:
        return -self.operand.eval(s)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Node
    right: Node

    def eval(self, s: float) -> float:
        a = self.left.eval(s)
        b = self.right.eval(s)
        op = self.op
        try:
            if op == "+":
                r = a + b
            elif op == "-":
                r = a - b
            elif op == "*":
                r = a * b
            elif op == "/":
                if b == 0.0:
                    raise ExprDomainError(to_text(self), b, "division by zero")
                r = a / b
            else:
                r = math.pow(a, b)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise ExprDomainError(to_text(self), (a, b), str(exc)) from None
        if not math.isfinite(r):
            raise ExprDomainError(to_text(self), (a, b), "non-finite result")
        return r


@dataclass(frozen=True)
class Call:
    func: str
    arg: Node

    def eval(self, s: float) -> float:
        x = self.arg.eval(s)
        fn, check = FUNCTIONS[self.func]
        if check is not None:
            reason = check(x)
            if reason:
                raise ExprDomainError(to_text(self), x, reason)
        try:
            r = fn(x)
        except (ValueError, OverflowError) as exc:
            raise ExprDomainError(to_text(self), x, str(exc)) from None
        if not math.isfinite(r):
            raise ExprDomainError(to_text(self), x, "non-finite result")
        return float(r)


Node = Union[Num, Const, Var, Neg, BinOp, Call]


@dataclass(frozen=True)
class ScalarExpr:
    """A parsed formula; call it with a value of ``s``."""

    root: Node
    source: str = ""

    def __call__(self, s: float) -> float:
        return self.root.eval(s)

    def __str__(self) -> str:
        return to_text(self)


# --------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_END = "end of input"
_ATOM_START = frozenset({"number", "identifier", "'('"})


@dataclass(frozen=True)
class _Token:
    kind: str  # 'number', 'ident', 'op' or 'end'
    text: str
    offset: int  # byte offset


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    byte_pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", byte_pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), byte_pos))
        byte_pos += len(m.group().encode("utf-8"))
        pos = m.end()
    tokens.append(_Token("end", "", byte_pos))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def _is_op(self, *ops) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def _fail(self, expected):
        tok = self.tok
        what = _END if tok.kind == "end" else repr(tok.text)
        raise ExprSyntaxError(f"unexpected {what}", tok.offset, expected)

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self._fail({"'+'", "'-'", "'*'", "'/'", "'^'", _END})
        return node

    def expr(self) -> Node:
        node = self.term()
        while self._is_op("+", "-"):
            op = self.tok.text
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self._is_op("*", "/"):
            op = self.tok.text
            self.pos += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self._is_op("-"):
            self.pos += 1
            return Neg(self.power())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self._is_op("^"):
            self.pos += 1
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "number":
            value = float(tok.text)
            if not math.isfinite(value):
                raise ExprSyntaxError("numeric literal out of range", tok.offset)
            self.pos += 1
            return Num(value)
        if tok.kind == "ident":
            name = tok.text
            self.pos += 1
            if name == "s":
                return Var()
            if name in CONSTANTS:
                return Const(name)
            if name in FUNCTIONS:
                if not self._is_op("("):
                    self._fail({"'('"})
                self.pos += 1
                arg = self.expr()
                if not self._is_op(")"):
                    self._fail({"')'", "'+'", "'-'", "'*'", "'/'", "'^'"})
                self.pos += 1
                return Call(name, arg)
            raise UnknownIdentifierError(name, tok.offset)
        if self._is_op("("):
            self.pos += 1
            node = self.expr()
            if not self._is_op(")"):
                self._fail({"')'", "'+'", "'-'", "'*'", "'/'", "'^'"})
            self.pos += 1
            return node
        self._fail(_ATOM_START)


def parse(text: str) -> ScalarExpr:
    """Parse ``text`` into a :class:`ScalarExpr`.

    Raises
    ------
    ExprSyntaxError
        Malformed input; carries the byte offset and expected-token set.
    UnknownIdentifierError
        A name that is neither ``s``, a constant nor a known function.
    """
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", len(text.encode("utf-8")), _ATOM_START)
    return ScalarExpr(_Parser(text).parse(), text)


def evaluate(expr: ScalarExpr | str, s: float) -> float:
    if isinstance(expr, str):
        expr = parse(expr)
    return expr(s)


def to_text(expr: ScalarExpr | Node) -> str:
    """Fully parenthesized text that parses back to an identical tree."""
    node = expr.root if isinstance(expr, ScalarExpr) else expr
    if isinstance(node, Num):
        text = repr(node.value)
        return f"({text})" if text.startswith("-") else text
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Var):
        return "s"
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
