"""Univariate expressions: parsing, evaluation and symbolic differentiation.

Grammar (precedence ``^`` > unary minus > ``* /`` > ``+ -``; ``^`` is
right-associative and its exponent must not mention the variable)::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ['^' exponent]
    exponent := '-' exponent | atom ['^' exponent]
    atom     := number | ident | func '(' expr ')' | '(' expr ')'
    func     := ln | exp | sin | cos | abs | sqrt

Trees are immutable; a :class:`FunctionExpr` compiles its tree into nested
closures once, so repeated evaluation inside quadrature and sampling loops
does not re-walk the tree.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Union

from .errors import EvalError, ExprSyntaxError, MultipleVariablesError, NotDifferentiableError

FUNCTIONS = ("ln", "exp", "sin", "cos", "abs", "sqrt")
# sgn only arises from differentiating abs; the parser never produces it.
_INTERNAL_FUNCTIONS = ("sgn",)


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Const, Var, Neg, BinOp, Pow, Call]


def variables(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Const):
        return set()
    if isinstance(node, (Neg, Call)):
        return variables(node.arg)
    if isinstance(node, BinOp):
        return variables(node.left) | variables(node.right)
    return variables(node.base) | variables(node.exponent)


def _contains_call(node: Node, func: str) -> bool:
    if isinstance(node, Call):
        return node.func == func or _contains_call(node.arg, func)
    if isinstance(node, Neg):
        return _contains_call(node.arg, func)
    if isinstance(node, BinOp):
        return _contains_call(node.left, func) or _contains_call(node.right, func)
    if isinstance(node, Pow):
        return _contains_call(node.base, func) or _contains_call(node.exponent, func)
    return False


# ---------------------------------------------------------------------------
# Tokenizer and parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()])"
)

_ATOM_START = ("'-'", "'('", "number", "identifier")


@dataclass(frozen=True)
class _Token:
    kind: str  # num, ident, op, end
    text: str
    offset: int  # byte offset into the UTF-8 source


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    byte_pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", byte_pos,
                                  ("'+'", "'-'", "'*'", "'/'", "'^'", "'('", "')'", "number", "identifier"))
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            tokens.append(_Token(kind, text, byte_pos))
        byte_pos += len(text.encode("utf-8"))
        pos = m.end()
    tokens.append(_Token("end", "", byte_pos))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _is_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def _fail(self, expected) -> ExprSyntaxError:
        found = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
        return ExprSyntaxError(f"unexpected {found}", self.tok.offset, tuple(expected))

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise self._fail(("'+'", "'-'", "'*'", "'/'", "'^'", "end of input")
                             + (("')'",) if self._is_op(")") else ()))
        return node

    def expr(self) -> Node:
        node = self.term()
        while self._is_op("+", "-"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self._is_op("*", "/"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self._is_op("-"):
            self.i += 1
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self._is_op("^"):
            self.i += 1
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> Node:
        start = self.tok.offset
        if self._is_op("-"):
            self.i += 1
            node: Node = Neg(self.exponent())
        else:
            node = self.atom()
            if self._is_op("^"):
                self.i += 1
                node = Pow(node, self.exponent())
        if variables(node):
            raise ExprSyntaxError("exponent must be a constant subexpression", start, ("constant",))
        return node

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Const(float(tok.text))
        if tok.kind == "ident":
            self.i += 1
            if tok.text in FUNCTIONS:
                if not self._is_op("("):
                    raise self._fail(("'('",))
                self.i += 1
                arg = self.expr()
                if not self._is_op(")"):
                    raise self._fail(("')'", "'+'", "'-'", "'*'", "'/'", "'^'"))
                self.i += 1
                return Call(tok.text, arg)
            return Var(tok.text)
        if self._is_op("("):
            self.i += 1
            node = self.expr()
            if not self._is_op(")"):
                raise self._fail(("')'", "'+'", "'-'", "'*'", "'/'", "'^'"))
            self.i += 1
            return node
        raise self._fail(_ATOM_START)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _finite(v: float, what: str) -> float:
    if not math.isfinite(v):
        raise EvalError(EvalError.NON_FINITE, f"{what} produced {v!r}")
    return v


def _power(base: float, exponent: float) -> float:
    if base == 0.0 and exponent < 0:
        raise EvalError(EvalError.DOMAIN, f"0 raised to negative power {exponent!r}")
    if base < 0 and not float(exponent).is_integer():
        raise EvalError(EvalError.DOMAIN, f"negative base {base!r} with non-integer exponent {exponent!r}")
    try:
        return _finite(math.pow(base, exponent), "power")
    except OverflowError:
        raise EvalError(EvalError.NON_FINITE, f"{base!r}^{exponent!r} overflows") from None


def _ln(u: float) -> float:
    if u <= 0:
        raise EvalError(EvalError.DOMAIN, f"ln of non-positive value {u!r}")
    return math.log(u)


def _sqrt(u: float) -> float:
    if u < 0:
        raise EvalError(EvalError.DOMAIN, f"sqrt of negative value {u!r}")
    return math.sqrt(u)


def _exp(u: float) -> float:
    try:
        return math.exp(u)
    except OverflowError:
        raise EvalError(EvalError.NON_FINITE, f"exp({u!r}) overflows") from None


def _sgn(u: float) -> float:
    if u == 0:
        raise NotDifferentiableError("derivative of abs requested where its argument is 0")
    return math.copysign(1.0, u)


_CALLS: dict[str, Callable[[float], float]] = {
    "ln": _ln,
    "exp": _exp,
    "sin": math.sin,
    "cos": math.cos,
    "abs": abs,
    "sqrt": _sqrt,
    "sgn": _sgn,
}


def _compile(node: Node) -> Callable[[float], float]:
    if isinstance(node, Const):
        v = node.value
        return lambda x: v
    if isinstance(node, Var):
        return lambda x: x
    if isinstance(node, Neg):
        f = _compile(node.arg)
        return lambda x: -f(x)
    if isinstance(node, Call):
        f = _compile(node.arg)
        g = _CALLS[node.func]
        return lambda x: g(f(x))
    if isinstance(node, Pow):
        f = _compile(node.base)
        e = _compile(node.exponent)
        return lambda x: _power(f(x), e(x))
    f = _compile(node.left)
    g = _compile(node.right)
    op = node.op
    if op == "+":
        return lambda x: _finite(f(x) + g(x), "addition")
    if op == "-":
        return lambda x: _finite(f(x) - g(x), "subtraction")
    if op == "*":
        return lambda x: _finite(f(x) * g(x), "multiplication")

    def divide(x: float) -> float:
        den = g(x)
        if den == 0:
            raise EvalError(EvalError.DOMAIN, "division by zero")
        return _finite(f(x) / den, "division")

    return divide


# ---------------------------------------------------------------------------
# FunctionExpr
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FunctionExpr:
    """A parsed univariate function. Equality is structural."""

    root: Node
    variable: str | None = None
    _fn: Callable[[float], float] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        names = sorted(variables(self.root))
        if len(names) > 1:
            raise MultipleVariablesError(tuple(names))
        if names and self.variable is not None and names[0] != self.variable:
            raise MultipleVariablesError((self.variable, names[0]))
        if self.variable is None and names:
            object.__setattr__(self, "variable", names[0])
        object.__setattr__(self, "_fn", _compile(self.root))

    def __call__(self, x: float) -> float:
        return self._fn(float(x))

    def __str__(self) -> str:
        return to_text(self.root)

    @property
    def is_constant(self) -> bool:
        return not variables(self.root)

    def derivative(self) -> "FunctionExpr":
        return differentiate(self)


def parse(source: str, variable: str | None = None) -> FunctionExpr:
    """Parse ``source`` into a :class:`FunctionExpr`.

    ``variable`` pins the expected variable name; a different name raises
    :class:`MultipleVariablesError`.
    """
    return FunctionExpr(_Parser(source).parse(), variable)


def evaluate(expr: FunctionExpr, x: float) -> float:
    return expr(x)


# ---------------------------------------------------------------------------
# Construction helpers with constant folding
# ---------------------------------------------------------------------------

def _const_value(node: Node) -> float | None:
    if isinstance(node, Const):
        return node.value
    if variables(node) or _contains_call(node, "sgn"):
        return None
    try:
        return _compile(node)(0.0)
    except EvalError:
        return None


def _is(node: Node, value: float) -> bool:
    return isinstance(node, Const) and node.value == value


def add(a: Node, b: Node) -> Node:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    if isinstance(b, Neg):
        return BinOp("-", a, b.arg)
    return BinOp("+", a, b)


def sub(a: Node, b: Node) -> Node:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a: Node, b: Node) -> Node:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is(a, 0.0) or _is(b, 0.0):
        return Const(0.0)
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    if _is(a, -1.0):
        return neg(b)
    if _is(b, -1.0):
        return neg(a)
    return BinOp("*", a, b)


def div(a: Node, b: Node) -> Node:
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        return Const(a.value / b.value)
    if _is(b, 1.0):
        return a
    return BinOp("/", a, b)


def neg(a: Node) -> Node:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(base: Node, exponent: Node) -> Node:
    if _is(exponent, 1.0):
        return base
    if _is(exponent, 0.0):
        return Const(1.0)
    return Pow(base, exponent)


def call(func: str, arg: Node) -> Node:
    return Call(func, arg)


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------

def _d(node: Node, var: str | None) -> Node:
    if isinstance(node, Const):
        return Const(0.0)
    if isinstance(node, Var):
        return Const(1.0)
    if isinstance(node, Neg):
        return neg(_d(node.arg, var))
    if isinstance(node, BinOp):
        u, v = node.left, node.right
        du, dv = _d(u, var), _d(v, var)
        if node.op == "+":
            return add(du, dv)
        if node.op == "-":
            return sub(du, dv)
        if node.op == "*":
            return add(mul(du, v), mul(u, dv))
        return div(sub(mul(du, v), mul(u, dv)), power(v, Const(2.0)))
    if isinstance(node, Pow):
        c = node.exponent
        cv = _const_value(c)
        c_minus_1 = Const(cv - 1.0) if cv is not None else BinOp("-", c, Const(1.0))
        c_node = Const(cv) if cv is not None else c
        return mul(mul(c_node, power(node.base, c_minus_1)), _d(node.base, var))
    u = node.arg
    du = _d(u, var)
    f = node.func
    if f == "ln":
        return div(du, u)
    if f == "exp":
        return mul(node, du)
    if f == "sin":
        return mul(Call("cos", u), du)
    if f == "cos":
        return mul(neg(Call("sin", u)), du)
    if f == "sqrt":
        return div(du, mul(Const(2.0), node))
    if f == "abs":
        return mul(Call("sgn", u), du)
    # sgn is locally constant; keep the node so evaluation at 0 still raises.
    return BinOp("*", Const(0.0), node)


def differentiate(expr: FunctionExpr) -> FunctionExpr:
    """Exact derivative with respect to the expression's variable."""
    return FunctionExpr(_d(expr.root, expr.variable), expr.variable)


# ---------------------------------------------------------------------------
# Composition and printing
# ---------------------------------------------------------------------------

def substitute(node: Node, replacement: Node) -> Node:
    if isinstance(node, Var):
        return replacement
    if isinstance(node, Const):
        return node
    if isinstance(node, Neg):
        return Neg(substitute(node.arg, replacement))
    if isinstance(node, Call):
        return Call(node.func, substitute(node.arg, replacement))
    if isinstance(node, BinOp):
        return BinOp(node.op, substitute(node.left, replacement), substitute(node.right, replacement))
    return Pow(substitute(node.base, replacement), node.exponent)


def compose(outer: FunctionExpr, inner: FunctionExpr) -> FunctionExpr:
    """Return ``outer(inner(x))`` in ``inner``'s variable."""
    return FunctionExpr(substitute(outer.root, inner.root), inner.variable or outer.variable)


def scale(expr: FunctionExpr, c: float) -> FunctionExpr:
    return FunctionExpr(BinOp("*", Const(float(c)), expr.root), expr.variable)


def abs_of(expr: FunctionExpr) -> FunctionExpr:
    return FunctionExpr(Call("abs", expr.root), expr.variable)


def pow_of(expr: FunctionExpr, exponent: float) -> FunctionExpr:
    return FunctionExpr(Pow(expr.root, Const(float(exponent))), expr.variable)


_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _fmt_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC_ADD if node.op in "+-" else _PREC_MUL
    if isinstance(node, Neg):
        return _PREC_NEG
    if isinstance(node, Const) and (node.value < 0 or math.copysign(1.0, node.value) < 0):
        return _PREC_NEG
    if isinstance(node, Pow):
        return _PREC_POW
    return _PREC_ATOM


def _wrap(node: Node, needed: int) -> str:
    text = to_text(node)
    return f"({text})" if _prec(node) < needed else text


def to_text(node: Node) -> str:
    """Print a tree in the grammar above; the output re-parses to the same values."""
    if isinstance(node, Const):
        v = node.value
        if math.copysign(1.0, v) < 0:
            return "-" + _fmt_number(-v)
        return _fmt_number(v)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return "-" + _wrap(node.arg, _PREC_NEG)
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Pow):
        # exponent grammar admits '-' and nested '^' without parentheses
        return f"{_wrap(node.base, _PREC_ATOM)}^{_wrap(node.exponent, _PREC_NEG)}"
    p = _prec(node)
    left = _wrap(node.left, p)
    right = _wrap(node.right, p + 1)
    sep = f" {node.op} " if node.op in "+-" else node.op
    return f"{left}{sep}{right}"
