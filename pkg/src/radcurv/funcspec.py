"""Closed-form expressions in one variable ``t``.

Grammar (whitespace ignored)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := ("-" | "+") factor | power
    power  := atom ("^" factor)?          # right-associative, binds above unary minus
    atom   := number | "t" | "pi" | "e" | name "(" expr ("," expr)? ")" | "(" expr ")"

Expressions evaluate vectorised over numpy arrays. Out-of-domain inputs raise
:class:`DomainError` instead of producing NaN.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DomainError, ExpressionSyntaxError, UnknownIdentifier


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call2:
    fn: str
    a: "Expr"
    b: "Expr"


Expr = Union[Num, Var, Const, Unary, Binary, Call2]

UNARY_FUNCS = ("sin", "cos", "sinh", "cosh", "tanh", "exp", "log", "sqrt", "abs", "sign")
BINARY_FUNCS = ("min", "max")
CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(src: str):
    tokens = []
    pos = 0
    raw = src.encode("utf-8")
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            off = len(src[:pos].encode("utf-8"))
            while off < len(raw) and raw[off:off + 1].isspace():
                off += 1
            raise ExpressionSyntaxError(f"unexpected character {src[pos:].lstrip()[:1]!r}", off)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), len(src[:start].encode("utf-8"))))
        pos = m.end()
    tokens.append(("end", "", len(raw)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        kind, val, off = self.take()
        if kind != "op" or val != op:
            found = "end of input" if kind == "end" else repr(val)
            raise ExpressionSyntaxError(f"expected {op!r}, found {found}", off)

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = Binary(op, node, self.factor())
        return node

    def factor(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Unary("neg", self.factor())
        if kind == "op" and val == "+":
            self.take()
            return self.factor()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Binary("^", base, self.factor())
        return base

    def atom(self):
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val == "t":
                return Var()
            if val in CONSTANTS:
                return Const(val)
            if val in UNARY_FUNCS or val in BINARY_FUNCS:
                self.expect("(")
                a = self.expr()
                if val in BINARY_FUNCS:
                    self.expect(",")
                    b = self.expr()
                    self.expect(")")
                    return Call2(val, a, b)
                self.expect(")")
                return Unary(val, a)
            raise UnknownIdentifier(val, off)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ExpressionSyntaxError(f"expected an operand, found {found}", off)


def parse(src: str) -> Expr:
    if not src or not src.strip():
        raise ExpressionSyntaxError("empty expression", 0)
    p = _Parser(src)
    node = p.expr()
    kind, val, off = p.peek()
    if kind != "end":
        raise ExpressionSyntaxError(f"unexpected token {val!r}", off)
    return node


# -- printing ---------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}
_ATOM = 5


def _prec(node: Expr) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary) and node.op == "neg":
        return _PREC["neg"]
    if isinstance(node, Num) and (node.value < 0 or math.copysign(1.0, node.value) < 0):
        return 0  # never produced by the parser; always parenthesise
    return _ATOM


def _wrap(node: Expr, min_prec: int) -> str:
    s = to_string(node)
    return f"({s})" if _prec(node) < min_prec else s


def to_string(node: Expr) -> str:
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Call2):
        return f"{node.fn}({to_string(node.a)}, {to_string(node.b)})"
    if isinstance(node, Unary):
        if node.op == "neg":
            return "-" + _wrap(node.arg, _PREC["neg"])
        return f"{node.op}({to_string(node.arg)})"
    op = node.op
    if op in "+-":
        return f"{_wrap(node.left, 1)} {op} {_wrap(node.right, 2)}"
    if op in "*/":
        return f"{_wrap(node.left, 2)} {op} {_wrap(node.right, 3)}"
    return f"{_wrap(node.left, _ATOM)}^{_wrap(node.right, 3)}"


# -- evaluation -------------------------------------------------------------

def _fail(name):
    raise DomainError(f"{name}: argument outside the domain")


def _ev(node: Expr, t):
    if isinstance(node, Num):
        return np.full_like(t, node.value)
    if isinstance(node, Var):
        return t
    if isinstance(node, Const):
        return np.full_like(t, CONSTANTS[node.name])
    if isinstance(node, Unary):
        x = _ev(node.arg, t)
        op = node.op
        if op == "neg":
            return -x
        if op == "log":
            if np.any(x <= 0):
                _fail("log")
            return np.log(x)
        if op == "sqrt":
            if np.any(x < 0):
                _fail("sqrt")
            return np.sqrt(x)
        if op == "sign":
            if np.any(x == 0):
                _fail("sign (kink)")
            return np.sign(x)
        if op == "abs":
            return np.abs(x)
        return getattr(np, op)(x)
    if isinstance(node, Call2):
        a, b = _ev(node.a, t), _ev(node.b, t)
        return np.minimum(a, b) if node.fn == "min" else np.maximum(a, b)
    a, b = _ev(node.left, t), _ev(node.right, t)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if np.any(b == 0):
            _fail("division by zero")
        return a / b
    # power
    neg = a < 0
    if np.any(neg & (b != np.round(b))):
        _fail("non-integer power of a negative base")
    if np.any((a == 0) & (b < 0)):
        _fail("negative power of zero")
    return np.power(a, b)


def evaluate(node: Expr, t):
    """Evaluate ``node`` at scalar or array ``t``; scalars in, float out."""
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    x = np.atleast_1d(arr)
    with np.errstate(all="ignore"):
        out = _ev(node, x)
    if np.any(np.isnan(out)):
        raise DomainError("expression evaluated to NaN")
    return float(out[0]) if scalar else out


# -- differentiation --------------------------------------------------------

ZERO, ONE = Num(0.0), Num(1.0)


def _is_num(node, v=None):
    return isinstance(node, Num) and (v is None or node.value == v)


def num(v: float) -> Expr:
    return Unary("neg", Num(-v)) if v < 0 else Num(float(v))


def _const_value(node):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Unary) and node.op == "neg" and isinstance(node.arg, Num):
        return -node.arg.value
    return None


def add(a, b):
    if _const_value(a) == 0:
        return b
    if _const_value(b) == 0:
        return a
    ca, cb = _const_value(a), _const_value(b)
    if ca is not None and cb is not None:
        return num(ca + cb)
    return Binary("+", a, b)


def sub(a, b):
    if _const_value(b) == 0:
        return a
    if _const_value(a) == 0:
        return neg(b)
    return Binary("-", a, b)


def neg(a):
    c = _const_value(a)
    if c is not None:
        return num(-c)
    if isinstance(a, Unary) and a.op == "neg":
        return a.arg
    return Unary("neg", a)


def mul(a, b):
    ca, cb = _const_value(a), _const_value(b)
    if ca == 0 or cb == 0:
        return ZERO
    if ca == 1:
        return b
    if cb == 1:
        return a
    if ca is not None and cb is not None:
        return num(ca * cb)
    return Binary("*", a, b)


def div(a, b):
    if _const_value(a) == 0:
        return ZERO
    if _const_value(b) == 1:
        return a
    return Binary("/", a, b)


def _depends_on_t(node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, (Num, Const)):
        return False
    if isinstance(node, Unary):
        return _depends_on_t(node.arg)
    if isinstance(node, Call2):
        return _depends_on_t(node.a) or _depends_on_t(node.b)
    return _depends_on_t(node.left) or _depends_on_t(node.right)


def differentiate(node: Expr) -> Expr:
    """Exact symbolic d/dt with light constant folding."""
    if isinstance(node, (Num, Const)):
        return ZERO
    if isinstance(node, Var):
        return ONE
    if isinstance(node, Call2):
        # min(a,b) = (a+b)/2 - |a-b|/2, max with a plus sign; kink where a == b
        a, b = node.a, node.b
        da, db = differentiate(a), differentiate(b)
        half_sum = div(add(da, db), Num(2.0))
        half_diff = div(mul(Unary("sign", sub(a, b)), sub(da, db)), Num(2.0))
        return sub(half_sum, half_diff) if node.fn == "min" else add(half_sum, half_diff)
    if isinstance(node, Unary):
        u = node.arg
        du = differentiate(u)
        if _const_value(du) == 0:
            return ZERO
        op = node.op
        if op == "neg":
            return neg(du)
        if op == "sin":
            inner = Unary("cos", u)
        elif op == "cos":
            inner = neg(Unary("sin", u))
        elif op == "sinh":
            inner = Unary("cosh", u)
        elif op == "cosh":
            inner = Unary("sinh", u)
        elif op == "tanh":
            inner = sub(ONE, Binary("^", Unary("tanh", u), Num(2.0)))
        elif op == "exp":
            inner = node
        elif op == "log":
            return div(du, u)
        elif op == "sqrt":
            return div(du, mul(Num(2.0), node))
        elif op == "abs":
            inner = Unary("sign", u)
        elif op == "sign":
            return ZERO
        else:  # pragma: no cover
            raise ValueError(op)
        return mul(inner, du)
    a, b = node.left, node.right
    op = node.op
    if op == "+":
        return add(differentiate(a), differentiate(b))
    if op == "-":
        return sub(differentiate(a), differentiate(b))
    if op == "*":
        return add(mul(differentiate(a), b), mul(a, differentiate(b)))
    if op == "/":
        da, db = differentiate(a), differentiate(b)
        if _const_value(db) == 0:
            return div(da, b)
        return div(sub(mul(da, b), mul(a, db)), Binary("^", b, Num(2.0)))
    # power
    if not _depends_on_t(b):
        cb = _const_value(b)
        if cb == 0:
            return ZERO
        exponent = num(cb - 1.0) if cb is not None else sub(b, ONE)
        powered = a if cb == 2.0 else Binary("^", a, exponent)
        return mul(mul(b, powered), differentiate(a))
    if not _depends_on_t(a):
        return mul(mul(node, Unary("log", a)), differentiate(b))
    return mul(node, add(mul(differentiate(b), Unary("log", a)),
                         div(mul(b, differentiate(a)), a)))


# -- radial functions -------------------------------------------------------

@dataclass(frozen=True)
class RadialFunction:
    """Scalar function of arc length with value and first two derivatives.

    ``d3`` is optional; it is used only for the pole limit of curvature.
    """

    source: object
    value: Callable
    d1: Callable
    d2: Callable
    L: float = math.inf
    d3: Callable | None = None

    def __call__(self, t):
        return self.value(t)

    def describe(self) -> str:
        if isinstance(self.source, (Num, Var, Const, Unary, Binary, Call2)):
            return to_string(self.source)
        return str(self.source)


def make_radial(ast: Expr | str, L: float = math.inf, source=None) -> RadialFunction:
    if isinstance(ast, str):
        ast = parse(ast)
    d1 = differentiate(ast)
    d2 = differentiate(d1)
    d3 = differentiate(d2)
    return RadialFunction(
        source=source if source is not None else ast,
        value=lambda t, e=ast: evaluate(e, t),
        d1=lambda t, e=d1: evaluate(e, t),
        d2=lambda t, e=d2: evaluate(e, t),
        d3=lambda t, e=d3: evaluate(e, t),
        L=L,
    )


def constant(c: float) -> RadialFunction:
    return make_radial(num(c))


_BUILTIN = re.compile(r"^\s*(euclidean|sphere|hyperbolic)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def builtin_warp(tag: str) -> RadialFunction:
    """Builtin warpings: ``euclidean``, ``sphere``, ``hyperbolic(a)``."""
    m = _BUILTIN.match(tag)
    if not m:
        raise UnknownIdentifier(tag.strip(), 0)
    name, arg = m.group(1), m.group(2)
    if name == "euclidean":
        return make_radial("t", source="euclidean")
    if name == "sphere":
        return make_radial("sin(t)", L=math.pi, source="sphere")
    a = float(arg) if arg else 1.0
    if a <= 0:
        raise DomainError("hyperbolic(a) needs a > 0")
    return make_radial(f"sinh({a!r}*t)/{a!r}", source=f"hyperbolic({a!r})")


def radial_from_text(text: str, L: float = math.inf) -> RadialFunction:
    """Accept either a builtin tag or an expression string."""
    if _BUILTIN.match(text):
        return builtin_warp(text)
    return make_radial(parse(text), L=L)
