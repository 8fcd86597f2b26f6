"""Univariate integrand expressions: parser, printer and second-order jets.

Grammar (whitespace insensitive)::

    expr    := term   (("+" | "-") term)*
    term    := unary  (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?            # right-associative
    atom    := NUMBER | "t" | "pi" | "e"
             | FUNC "(" expr ("," expr)* ")"
             | "(" expr ")"
    FUNC    := sin | cos | tan | exp | log | sqrt | cbrt | abs | pow

Unary minus binds looser than ``^`` so ``-t^2`` is ``-(t^2)``.  ``pow(x, y)``
is the same node as ``x ^ y``.

Jets carry (value, first derivative, second derivative) with respect to ``t``.
Evaluation on arrays never raises: domain violations turn into NaN and
derivative singularities into +-inf, leaving it to callers to decide what a
non-finite component means.  :func:`eval_jet` on a scalar is strict and raises
:class:`~optiquad.errors.DomainError` instead.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import DomainError, NondifferentiableError, ParseError, UnknownIdentifierError

FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "tan": 1,
    "exp": 1,
    "log": 1,
    "sqrt": 1,
    "cbrt": 1,
    "abs": 1,
    "pow": 2,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
ABS_KINK = 1e-300


# -- AST --------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float
    name: str | None = None


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "ExprNode"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["ExprNode", ...]


ExprNode = Union[Const, Var, Neg, BinOp, Call]


def to_source(node: ExprNode) -> str:
    """Print a fully parenthesized expression that re-parses to the same tree."""
    if isinstance(node, Const):
        return node.name if node.name else repr(float(node.value))
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    return f"{node.name}({', '.join(to_source(a) for a in node.args)})"


def depends_on_t(node: ExprNode) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, Const):
        return False
    if isinstance(node, Neg):
        return depends_on_t(node.operand)
    if isinstance(node, BinOp):
        return depends_on_t(node.left) or depends_on_t(node.right)
    return any(depends_on_t(a) for a in node.args)


# -- parser -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<id>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)
_ATOM_START = frozenset({"number", "identifier", "(", "-"})


def _tokenize(src: str):
    toks = []
    pos = 0
    while pos < len(src):
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {src[pos]!r}", pos, _ATOM_START)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        text = m.group(kind)
        toks.append((kind, text, start))
        pos = m.end()
    toks.append(("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def advance(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, got, pos = self.peek()
        if got != text or kind != "op":
            raise ParseError(f"expected {text!r}, found {got or 'end of input'!r}", pos, {text})
        return self.advance()

    def parse(self) -> ExprNode:
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", pos, {"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, text, pos = self.advance()
        if kind == "num":
            return Const(float(text))
        if kind == "id":
            if text == "t":
                return Var()
            if text in CONSTANTS:
                return Const(CONSTANTS[text], text)
            if text in FUNCTIONS:
                self.expect("(")
                args = [self.expr()]
                while self.peek()[:2] == ("op", ","):
                    self.advance()
                    args.append(self.expr())
                self.expect(")")
                if len(args) != FUNCTIONS[text]:
                    raise ParseError(
                        f"{text} takes {FUNCTIONS[text]} argument(s), got {len(args)}", pos, {")"}
                    )
                return Call(text, tuple(args))
            raise UnknownIdentifierError(f"unknown identifier {text!r}", pos, {"t", "pi", "e", *FUNCTIONS})
        if (kind, text) == ("op", "("):
            node = self.expr()
            self.expect(")")
            return node
        found = text or "end of input"
        raise ParseError(f"unexpected {found!r}", pos, _ATOM_START)


def parse(src: str) -> ExprNode:
    """Parse integrand text into an AST.

    Raises
    ------
    ParseError
        With ``position`` and ``expected`` set, for malformed input.
    UnknownIdentifierError
        For names other than ``t``, ``pi``, ``e`` and the supported functions.
    """
    if not src or not src.strip():
        raise ParseError("empty expression", 0, _ATOM_START)
    return _Parser(src).parse()


def as_expr(obj) -> ExprNode:
    return parse(obj) if isinstance(obj, str) else obj


# -- jets -------------------------------------------------------------------


@dataclass(frozen=True)
class Jet2:
    """Value with first and second derivative; fields may be floats or arrays."""

    v: object
    d1: object
    d2: object

    @classmethod
    def const(cls, c, like=0.0):
        z = np.zeros_like(np.asarray(like, dtype=float))
        return cls(z + c, z, z)

    @classmethod
    def var(cls, t):
        t = np.asarray(t, dtype=float)
        return cls(t, np.ones_like(t), np.zeros_like(t))

    def __add__(self, o):
        o = _lift(o)
        return Jet2(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.v, -self.d1, -self.d2)

    def __sub__(self, o):
        return self + (-_lift(o))

    def __rsub__(self, o):
        return _lift(o) - self

    def __mul__(self, o):
        o = _lift(o)
        return Jet2(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _lift(o)
        q = self.v / o.v
        q1 = (self.d1 - q * o.d1) / o.v
        q2 = (self.d2 - 2.0 * q1 * o.d1 - q * o.d2) / o.v
        return Jet2(q, q1, q2)

    def __rtruediv__(self, o):
        return _lift(o) / self

    def chain(self, f0, f1, f2):
        """Compose an outer function with value f0, slope f1, curvature f2 at ``self.v``."""
        d1 = f1 * self.d1
        d2 = f2 * self.d1 * self.d1 + f1 * self.d2
        return Jet2(f0, d1, d2)

    def scalar(self) -> "Jet2":
        return Jet2(float(self.v), float(self.d1), float(self.d2))


def _lift(o) -> Jet2:
    return o if isinstance(o, Jet2) else Jet2(o, 0.0, 0.0)


def _chain(u: Jet2, name: str) -> Jet2:
    x = u.v
    if name == "sin":
        s, c = np.sin(x), np.cos(x)
        return u.chain(s, c, -s)
    if name == "cos":
        s, c = np.sin(x), np.cos(x)
        return u.chain(c, -s, -c)
    if name == "tan":
        tn = np.tan(x)
        sec2 = 1.0 + tn * tn
        return u.chain(tn, sec2, 2.0 * tn * sec2)
    if name == "exp":
        ex = np.exp(x)
        return u.chain(ex, ex, ex)
    if name == "log":
        return u.chain(np.log(x), 1.0 / x, -1.0 / (x * x))
    if name == "sqrt":
        s = np.sqrt(x)
        return u.chain(s, 0.5 / s, -0.25 / (s * x))
    if name == "cbrt":
        c = np.cbrt(x)
        return u.chain(c, 1.0 / (3.0 * c * c), -2.0 / (9.0 * c**5))
    if name == "abs":
        sgn = np.where(np.abs(x) <= ABS_KINK, np.nan, np.sign(x))
        return u.chain(np.abs(x), sgn, np.zeros_like(sgn))
    raise DomainError(f"unsupported function {name!r}")


def _const_power(u: Jet2, c: float) -> Jet2:
    x = u.v
    if c == 0.0:
        one = np.ones_like(np.asarray(x, dtype=float))
        return Jet2(one, 0.0 * one, 0.0 * one)
    if c == 1.0:
        return u
    if c == 2.0:
        return u.chain(x * x, 2.0 * x, 2.0 + 0.0 * x)
    if c == int(c):
        # exact integer exponent; negative bases allowed
        return u.chain(np.power(x, c), c * np.power(x, c - 1.0), c * (c - 1.0) * np.power(x, c - 2.0))
    x = np.where(x < 0.0, np.nan, x)
    return u.chain(np.power(x, c), c * np.power(x, c - 1.0), c * (c - 1.0) * np.power(x, c - 2.0))


def _power(base: Jet2, expo_node: ExprNode, expo: Jet2) -> Jet2:
    if not depends_on_t(expo_node):
        c = float(np.ravel(expo.v)[0])
        return _const_power(base, c)
    return _chain(_chain(base, "log") * expo, "exp")


class _Strict:
    def __init__(self, t):
        self.t = t

    def check(self, bad, message):
        if np.any(bad):
            raise DomainError(f"{message} at t={self.t!r}")


def _jet(node: ExprNode, t, strict: _Strict | None) -> Jet2:
    if isinstance(node, Const):
        return Jet2.const(node.value, t)
    if isinstance(node, Var):
        return Jet2.var(t)
    if isinstance(node, Neg):
        return -_jet(node.operand, t, strict)
    if isinstance(node, BinOp):
        a = _jet(node.left, t, strict)
        b = _jet(node.right, t, strict)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if strict:
                strict.check(b.v == 0.0, "division by zero")
            return a / b
        return _pow_checked(a, node.right, b, strict)
    args = [_jet(arg, t, strict) for arg in node.args]
    if node.name == "pow":
        return _pow_checked(args[0], node.args[1], args[1], strict)
    u = args[0]
    if strict:
        if node.name == "log":
            strict.check(u.v <= 0.0, "log of non-positive argument")
        elif node.name == "sqrt":
            strict.check(u.v < 0.0, "sqrt of negative argument")
        elif node.name == "abs" and np.any(np.abs(u.v) <= ABS_KINK):
            raise NondifferentiableError(f"abs is not differentiable at t={strict.t!r}")
    return _chain(u, node.name)


def _pow_checked(base, expo_node, expo, strict):
    if strict:
        if depends_on_t(expo_node):
            strict.check(base.v <= 0.0, "power with variable exponent needs a positive base")
        else:
            c = float(np.ravel(expo.v)[0])
            if c != int(c):
                strict.check(base.v < 0.0, "non-integer power of negative base")
            elif c < 0:
                strict.check(base.v == 0.0, "negative integer power of zero")
    return _power(base, expo_node, expo)


def eval_jet(ast: ExprNode, t: float) -> Jet2:
    """Value, first and second derivative of ``ast`` at a scalar ``t``.

    Raises :class:`DomainError` for log/sqrt of negative arguments, division by
    zero and fractional powers of negative bases, and
    :class:`NondifferentiableError` when ``abs`` is evaluated at its kink.
    Derivative singularities (``sqrt`` at 0, say) come back as ``inf``.
    """
    ast = as_expr(ast)
    with np.errstate(all="ignore"):
        return _jet(ast, np.float64(t), _Strict(t)).scalar()


def jets(ast: ExprNode, t) -> Jet2:
    """Vectorized, non-raising jet evaluation over an array of points."""
    ast = as_expr(ast)
    t = np.asarray(t, dtype=float)
    with np.errstate(all="ignore"):
        j = _jet(ast, t, None)
    shape = t.shape
    return Jet2(*(np.broadcast_to(np.asarray(c, dtype=float), shape).copy() for c in (j.v, j.d1, j.d2)))


def component(ast: ExprNode, order: int) -> Callable:
    """Vectorized callable returning the ``order``-th derivative (0, 1 or 2)."""
    if order not in (0, 1, 2):
        raise DomainError("derivative order must be 0, 1 or 2")
    ast = as_expr(ast)
    field = ("v", "d1", "d2")[order]

    def g(t):
        out = getattr(jets(ast, t), field)
        return float(out) if np.ndim(out) == 0 else out

    return g
