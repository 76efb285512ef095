"""Tiny expression language over one (or optionally two) real variables.

Grammar, in precedence-honoring form (caret binds tighter than unary minus
and is right associative):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := number | variable | ident '(' expr ')' | '(' expr ')'

so ``-t^2`` parses as ``-(t^2)`` and ``2^-3`` as ``2^(-3)``.  Known unary
functions: sin, cos, exp, log, sqrt, abs.  Numbers are decimal floats.
Errors carry the byte offset of the offending token.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import DomainError, ExprSyntaxError, UnknownIdentifierError

__all__ = [
    "Const",
    "Var",
    "Unary",
    "Binary",
    "parse_text",
    "eval_node",
    "diff_node",
    "node_to_text",
    "pow_real",
    "UNARY_FUNCS",
]

UNARY_FUNCS = ("sin", "cos", "exp", "log", "sqrt", "abs")


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # 'neg' or a name from UNARY_FUNCS
    arg: "Node"


@dataclass(frozen=True)
class Binary:
    op: str  # one of + - * / ^
    lhs: "Node"
    rhs: "Node"


Node = Const | Var | Unary | Binary


def pow_real(base: float, expo: float) -> float:
    """Real power with explicit domain rules.

    Positive base: exp(expo * log(base)).  Zero base: 0 for positive
    exponents, 1 for exponent 0, domain error otherwise.  Negative base:
    only integer exponents are defined.
    """
    if base > 0.0:
        try:
            return math.pow(base, expo)
        except OverflowError:
            raise DomainError(f"overflow in {base}^{expo}") from None
    if base == 0.0:
        if expo > 0.0:
            return 0.0
        if expo == 0.0:
            return 1.0
        raise DomainError("zero raised to a negative power")
    if expo == round(expo) and abs(expo) <= 2**31:
        try:
            return math.pow(base, expo)
        except OverflowError:
            raise DomainError(f"overflow in {base}^{expo}") from None
    raise DomainError(f"negative base {base} with non-integer exponent {expo}")


def eval_node(node: Node, env: dict[str, float]) -> float:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Unary):
        a = eval_node(node.arg, env)
        op = node.op
        if op == "neg":
            return -a
        if op == "sin":
            return math.sin(a)
        if op == "cos":
            return math.cos(a)
        if op == "exp":
            try:
                return math.exp(a)
            except OverflowError:
                raise DomainError(f"overflow in exp({a})") from None
        if op == "log":
            if a <= 0.0:
                raise DomainError(f"log of non-positive value {a}")
            return math.log(a)
        if op == "sqrt":
            if a < 0.0:
                raise DomainError(f"sqrt of negative value {a}")
            return math.sqrt(a)
        if op == "abs":
            return abs(a)
        raise DomainError(f"unknown unary op {op!r}")
    l = eval_node(node.lhs, env)
    r = eval_node(node.rhs, env)
    op = node.op
    if op == "+":
        return l + r
    if op == "-":
        return l - r
    if op == "*":
        return l * r
    if op == "/":
        if r == 0.0:
            raise DomainError("division by zero")
        return l / r
    if op == "^":
        return pow_real(l, r)
    raise DomainError(f"unknown binary op {op!r}")


# Smart constructors with light constant folding.  Folding keeps printed
# derivatives readable and avoids needless power nodes like u^1.

def _const(v: float) -> Const:
    return Const(float(v))


def _is_const(n: Node, v: float | None = None) -> bool:
    return isinstance(n, Const) and (v is None or n.value == v)


def _neg(a: Node) -> Node:
    if _is_const(a):
        return _const(-a.value)
    if isinstance(a, Unary) and a.op == "neg":
        return a.arg
    return Unary("neg", a)


def _add(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if _is_const(a) and _is_const(b):
        return _const(a.value + b.value)
    return Binary("+", a, b)


def _sub(a: Node, b: Node) -> Node:
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _neg(b)
    if _is_const(a) and _is_const(b):
        return _const(a.value - b.value)
    return Binary("-", a, b)


def _mul(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return _const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b):
        return _const(a.value * b.value)
    return Binary("*", a, b)


def _div(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return _const(0.0)
    if _is_const(b, 1.0):
        return a
    return Binary("/", a, b)


def _pow(a: Node, b: Node) -> Node:
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0):
        return _const(1.0)
    return Binary("^", a, b)


def diff_node(node: Node, var: str) -> Node:
    """Symbolic first derivative with respect to ``var``."""
    if isinstance(node, Const):
        return _const(0.0)
    if isinstance(node, Var):
        return _const(1.0 if node.name == var else 0.0)
    if isinstance(node, Unary):
        d = diff_node(node.arg, var)
        u = node.arg
        op = node.op
        if op == "neg":
            return _neg(d)
        if op == "sin":
            return _mul(Unary("cos", u), d)
        if op == "cos":
            return _neg(_mul(Unary("sin", u), d))
        if op == "exp":
            return _mul(Unary("exp", u), d)
        if op == "log":
            return _div(d, u)
        if op == "sqrt":
            return _div(d, _mul(_const(2.0), Unary("sqrt", u)))
        if op == "abs":
            # sign(u) * u', expressed as u/|u|; evaluating at u = 0 is a
            # domain error, which is honest: |u| has no derivative there.
            return _mul(_div(u, Unary("abs", u)), d)
        raise DomainError(f"unknown unary op {op!r}")
    op = node.op
    u, v = node.lhs, node.rhs
    du = diff_node(u, var)
    dv = diff_node(v, var)
    if op == "+":
        return _add(du, dv)
    if op == "-":
        return _sub(du, dv)
    if op == "*":
        return _add(_mul(du, v), _mul(u, dv))
    if op == "/":
        return _div(_sub(_mul(du, v), _mul(u, dv)), _pow(v, _const(2.0)))
    if op == "^":
        if isinstance(v, Const):
            p = v.value
            return _mul(_mul(_const(p), _pow(u, _const(p - 1.0))), du)
        # general u^v: u^v * (v' log u + v u'/u), needs u > 0 at eval time
        inner = _add(_mul(dv, Unary("log", u)), _div(_mul(v, du), u))
        return _mul(_pow(u, v), inner)
    raise DomainError(f"unknown binary op {op!r}")


_NUM_RE = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.text = text
        self.pos = 0
        self.variables = variables

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n":
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _eat(self, ch: str):
        if self._peek() != ch:
            raise ExprSyntaxError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def parse(self) -> Node:
        node = self._expr()
        self._skip_ws()
        if self.pos < len(self.text):
            raise ExprSyntaxError(
                f"unexpected input {self.text[self.pos]!r}", self.pos
            )
        return node

    def _expr(self) -> Node:
        node = self._term()
        while True:
            c = self._peek()
            if c not in ("+", "-"):
                return node
            self.pos += 1
            rhs = self._term()
            node = Binary(c, node, rhs)

    def _term(self) -> Node:
        node = self._factor()
        while True:
            c = self._peek()
            if c not in ("*", "/"):
                return node
            self.pos += 1
            rhs = self._factor()
            node = Binary(c, node, rhs)

    def _factor(self) -> Node:
        if self._peek() == "-":
            self.pos += 1
            return Unary("neg", self._factor())
        node = self._atom()
        if self._peek() == "^":
            self.pos += 1
            return Binary("^", node, self._factor())
        return node

    def _atom(self) -> Node:
        c = self._peek()
        start = self.pos
        if c == "":
            raise ExprSyntaxError("unexpected end of input", self.pos)
        if c == "(":
            self.pos += 1
            node = self._expr()
            self._eat(")")
            return node
        m = _NUM_RE.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return Const(float(m.group()))
        m = _IDENT_RE.match(self.text, self.pos)
        if m:
            name = m.group()
            self.pos = m.end()
            if name in self.variables:
                return Var(name)
            if name in UNARY_FUNCS:
                self._eat("(")
                arg = self._expr()
                self._eat(")")
                return Unary(name, arg)
            known = ", ".join(self.variables + UNARY_FUNCS)
            raise UnknownIdentifierError(
                f"unknown identifier {name!r} (known: {known})", start
            )
        raise ExprSyntaxError(f"unexpected character {c!r}", self.pos)


def parse_text(text: str, variables: tuple[str, ...] = ("t",)) -> Node:
    """Parse expression source into an AST, or raise with a byte offset."""
    return _Parser(text, variables).parse()


# Printing.  Precedence levels: +,- are 1; *,/ are 2; unary minus 3; ^ 4;
# atoms 5.  A child is parenthesized when its level is below what its slot
# needs, so print followed by parse is the identity on ASTs.

def _fmt(node: Node) -> tuple[str, int]:
    if isinstance(node, Const):
        if node.value < 0.0:
            return repr(node.value), 3
        return repr(node.value), 5
    if isinstance(node, Var):
        return node.name, 5
    if isinstance(node, Unary):
        if node.op == "neg":
            txt, prec = _fmt(node.arg)
            if prec < 3:
                txt = f"({txt})"
            return f"-{txt}", 3
        txt, _ = _fmt(node.arg)
        return f"{node.op}({txt})", 5
    op = node.op
    if op in "+-":
        base, need_l, need_r = 1, 1, 2
    elif op in "*/":
        base, need_l, need_r = 2, 2, 3
    else:  # ^ is right associative and its base must be an atom
        base, need_l, need_r = 4, 5, 3
    lt, lp = _fmt(node.lhs)
    rt, rp = _fmt(node.rhs)
    if lp < need_l:
        lt = f"({lt})"
    if rp < need_r:
        rt = f"({rt})"
    if op == "^":
        return f"{lt}^{rt}", base
    return f"{lt} {op} {rt}", base


def node_to_text(node: Node) -> str:
    """Render an AST as source text that re-parses to the same AST."""
    return _fmt(node)[0]
