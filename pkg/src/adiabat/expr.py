"""Small expression language for equations of state, adiabats and calibrations.

Expressions are immutable trees over the variables ``x``, ``y`` and ``t``.
They evaluate through a compiled Python closure and differentiate exactly
into new trees.  Grammar::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := ('-'|'+') unary | power
    power  := base ('^' unary)?
    base   := number | 'x' | 'y' | 't' | ident '(' expr ')' | '(' expr ')'

Built-in identifiers are ``ln``, ``exp`` and ``sqrt``; one-variable functions
registered by name (for instance a calibration ``phi``) may be called too,
and ``phi'`` refers to the derivative of ``phi``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping

__all__ = [
    "DifferentiationError",
    "EvaluationError",
    "Expression",
    "ExpressionError",
    "ParseError",
    "ScalarFunction1D",
    "UnknownIdentifierError",
    "differentiate",
    "evaluate",
    "parse",
]

VARIABLES = ("x", "y", "t")
BUILTINS = ("ln", "exp", "sqrt")


class ExpressionError(Exception):
    """Base class for errors raised by the expression language."""


class ParseError(ExpressionError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    pass


class EvaluationError(ExpressionError, ArithmeticError):
    """Domain violation, division by zero or a non-finite result."""


class DifferentiationError(ExpressionError):
    pass


# --------------------------------------------------------------------------
# nodes

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


class Node:
    prec = _PREC_ATOM

    def diff(self, var: str) -> "Node":
        raise NotImplementedError

    def source(self) -> str:
        raise NotImplementedError

    def pysource(self, env: dict) -> str:
        raise NotImplementedError

    def variables(self) -> frozenset:
        raise NotImplementedError

    def wrap(self, prec: int) -> str:
        text = self.source()
        return f"({text})" if self.prec < prec else text


@dataclass(frozen=True)
class Num(Node):
    value: float

    @property
    def prec(self):
        return _PREC_UNARY if self.value < 0 else _PREC_ATOM

    def diff(self, var):
        return ZERO

    def source(self):
        return repr(float(self.value))

    def pysource(self, env):
        return f"({float(self.value)!r})"

    def variables(self):
        return frozenset()


ZERO = Num(0.0)
ONE = Num(1.0)


@dataclass(frozen=True)
class Var(Node):
    name: str

    def diff(self, var):
        return ONE if var == self.name else ZERO

    def source(self):
        return self.name

    def pysource(self, env):
        return self.name

    def variables(self):
        return frozenset((self.name,))


@dataclass(frozen=True)
class Neg(Node):
    arg: Node
    prec = _PREC_UNARY

    def diff(self, var):
        return neg(self.arg.diff(var))

    def source(self):
        return "-" + self.arg.wrap(_PREC_UNARY)

    def pysource(self, env):
        return f"(-{self.arg.pysource(env)})"

    def variables(self):
        return self.arg.variables()


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    @property
    def prec(self):
        return {"+": _PREC_ADD, "-": _PREC_ADD, "*": _PREC_MUL, "/": _PREC_MUL}[self.op]

    def diff(self, var):
        a, b = self.left, self.right
        da, db = a.diff(var), b.diff(var)
        if self.op == "+":
            return add(da, db)
        if self.op == "-":
            return sub(da, db)
        if self.op == "*":
            return add(mul(da, b), mul(a, db))
        # quotient rule
        return div(sub(mul(da, b), mul(a, db)), power(b, Num(2.0)))

    def source(self):
        p = self.prec
        # right operand one level tighter so the tree shape survives printing
        return f"{self.left.wrap(p)}{self.op}{self.right.wrap(p + 1)}"

    def pysource(self, env):
        return f"({self.left.pysource(env)} {self.op} {self.right.pysource(env)})"

    def variables(self):
        return self.left.variables() | self.right.variables()


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: Node
    prec = _PREC_POW

    def diff(self, var):
        a, b = self.base, self.exponent
        da, db = a.diff(var), b.diff(var)
        if db == ZERO:
            if da == ZERO:
                return ZERO
            return mul(mul(b, power(a, sub(b, ONE))), da)
        # a^b * (b' ln a + b a'/a)
        return mul(self, add(mul(db, Call("ln", a)), div(mul(b, da), a)))

    def source(self):
        return f"{self.base.wrap(_PREC_ATOM)}^{self.exponent.wrap(_PREC_UNARY)}"

    def pysource(self, env):
        return f"_pow({self.base.pysource(env)}, {self.exponent.pysource(env)})"

    def variables(self):
        return self.base.variables() | self.exponent.variables()


@dataclass(frozen=True)
class Call(Node):
    name: str
    arg: Node

    def diff(self, var):
        da = self.arg.diff(var)
        if da == ZERO:
            return ZERO
        if self.name == "ln":
            return div(da, self.arg)
        if self.name == "exp":
            return mul(self, da)
        if self.name == "sqrt":
            return div(da, mul(Num(2.0), self))
        raise DifferentiationError(f"no derivative rule for {self.name!r}")

    def source(self):
        return f"{self.name}({self.arg.source()})"

    def pysource(self, env):
        return f"_{self.name}({self.arg.pysource(env)})"

    def variables(self):
        return self.arg.variables()


@dataclass(frozen=True)
class FuncCall(Node):
    func: "ScalarFunction1D"
    arg: Node

    def diff(self, var):
        da = self.arg.diff(var)
        if da == ZERO:
            return ZERO
        return mul(FuncCall(self.func.derivative(), self.arg), da)

    def source(self):
        return f"{self.func.name}({self.arg.source()})"

    def pysource(self, env):
        key = f"_fn{len(env)}"
        env[key] = self.func.compiled
        return f"{key}({self.arg.pysource(env)})"

    def variables(self):
        return self.arg.variables()


# smart constructors: constant folding only


def _fold(fn, *vals):
    try:
        out = fn(*vals)
    except (ArithmeticError, ValueError):
        return None
    return Num(out) if math.isfinite(out) else None


def add(a: Node, b: Node) -> Node:
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return _fold(lambda u, v: u + v, a.value, b.value) or BinOp("+", a, b)
    return BinOp("+", a, b)


def sub(a: Node, b: Node) -> Node:
    if b == ZERO:
        return a
    if a == ZERO:
        return neg(b)
    if isinstance(a, Num) and isinstance(b, Num):
        return _fold(lambda u, v: u - v, a.value, b.value) or BinOp("-", a, b)
    return BinOp("-", a, b)


def mul(a: Node, b: Node) -> Node:
    if a == ZERO or b == ZERO:
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return _fold(lambda u, v: u * v, a.value, b.value) or BinOp("*", a, b)
    return BinOp("*", a, b)


def div(a: Node, b: Node) -> Node:
    if b == ONE:
        return a
    if a == ZERO and b != ZERO:
        return ZERO
    if isinstance(a, Num) and isinstance(b, Num) and b.value != 0:
        return _fold(lambda u, v: u / v, a.value, b.value) or BinOp("/", a, b)
    return BinOp("/", a, b)


def neg(a: Node) -> Node:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a: Node, b: Node) -> Node:
    if b == ONE:
        return a
    if b == ZERO:
        return ONE
    if isinstance(a, Num) and isinstance(b, Num):
        return _fold(_pow, a.value, b.value) or Pow(a, b)
    return Pow(a, b)


# --------------------------------------------------------------------------
# runtime helpers used by compiled closures


def _pow(a, b):
    if b == int(b):
        return a ** int(b) if abs(b) < 2**31 else a**b
    if a <= 0.0:
        raise EvaluationError(f"non-integer power {b!r} of non-positive base {a!r}")
    return a**b


def _ln(a):
    if a <= 0.0:
        raise EvaluationError(f"ln of non-positive argument {a!r}")
    return math.log(a)


def _sqrt(a):
    if a < 0.0:
        raise EvaluationError(f"sqrt of negative argument {a!r}")
    return math.sqrt(a)


_RUNTIME = {"_pow": _pow, "_ln": _ln, "_exp": math.exp, "_sqrt": _sqrt}


def _compile(node: Node) -> Callable[[float, float, float], float]:
    env = dict(_RUNTIME)
    body = node.pysource(env)
    code = f"def _compiled(x, y, t):\n    return {body}\n"
    exec(compile(code, "<expression>", "exec"), env)
    return env["_compiled"]


# --------------------------------------------------------------------------
# public types


@dataclass(frozen=True, eq=False)
class Expression:
    """An immutable expression tree over ``x``, ``y`` and ``t``."""

    root: Node

    @cached_property
    def _fn(self):
        return _compile(self.root)

    def __call__(self, x: float = 0.0, y: float = 0.0, t: float = 0.0) -> float:
        try:
            value = self._fn(x, y, t)
        except EvaluationError:
            raise
        except (ZeroDivisionError, OverflowError, ValueError) as exc:
            raise EvaluationError(f"{exc} evaluating {self}") from None
        if isinstance(value, complex) or not math.isfinite(value):
            raise EvaluationError(f"non-finite value evaluating {self} at x={x}, y={y}, t={t}")
        return float(value)

    def diff(self, var: str) -> "Expression":
        if var not in VARIABLES:
            raise DifferentiationError(f"unknown variable {var!r}")
        return Expression(self.root.diff(var))

    @property
    def variables(self) -> frozenset:
        return self.root.variables()

    @property
    def is_constant(self) -> bool:
        return not self.variables

    def __str__(self) -> str:
        return self.root.source()

    def __repr__(self) -> str:
        return f"Expression({self.root.source()!r})"


@dataclass(frozen=True, eq=False)
class ScalarFunction1D:
    """A named function of one variable ``t``, callable from expressions.

    The derivative is obtained by differentiating ``expr`` unless supplied.
    Inverses are numerical (``inverse``), never symbolic.
    """

    name: str
    expr: Expression
    monotone: bool = False
    domain: tuple[float, float] | None = None
    inverse_tol: float = 1e-14
    derivative_expr: Expression | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        extra = self.expr.variables - {"t"}
        if extra:
            raise ExpressionError(f"function {self.name!r} may only use t, got {sorted(extra)}")

    def __call__(self, t: float) -> float:
        return self.expr(t=t)

    @property
    def compiled(self) -> Callable[[float], float]:
        fn = self.expr._fn
        return lambda u: fn(0.0, 0.0, u)

    def derivative(self) -> "ScalarFunction1D":
        d = self._cache.get("derivative")
        if d is None:
            dexpr = self.derivative_expr or self.expr.diff("t")
            d = ScalarFunction1D(self.name + "'", dexpr, domain=self.domain)
            self._cache["derivative"] = d
        return d

    def inverse(self, value: float, bracket: tuple[float, float] | None = None) -> float:
        """Solve ``self(t) = value`` for ``t`` inside ``bracket`` (default: domain)."""
        from scipy.optimize import brentq

        lo, hi = bracket or self.domain or (None, None)
        if lo is None:
            raise ExpressionError(f"inverse of {self.name!r} needs a bracket or a domain")
        g = lambda u: self(u) - value  # noqa: E731
        glo, ghi = g(lo), g(hi)
        if glo == 0.0:
            return lo
        if ghi == 0.0:
            return hi
        if glo * ghi > 0:
            raise ExpressionError(f"{value!r} is outside the range of {self.name!r} on [{lo}, {hi}]")
        return brentq(g, lo, hi, xtol=self.inverse_tol, rtol=4 * 2.2e-16, maxiter=200)

    def check_monotone(self, n: int = 257) -> bool:
        if self.domain is None:
            raise ExpressionError(f"function {self.name!r} has no declared domain")
        lo, hi = self.domain
        vals = [self(lo + (hi - lo) * i / (n - 1)) for i in range(n)]
        steps = [b - a for a, b in zip(vals, vals[1:])]
        return all(s > 0 for s in steps) or all(s < 0 for s in steps)


# --------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)"
    r"|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, text: str, functions: Mapping[str, ScalarFunction1D]):
        self.text = text
        self.functions = functions
        self.tokens = self._tokenize(text)
        self.i = 0

    def _tokenize(self, text):
        tokens, pos = [], 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                if text[pos:].strip() == "":
                    break
                bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise ParseError(f"unexpected character {text[bad]!r}", _byte_offset(text, bad))
            kind = m.lastgroup
            tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        tokens.append(("end", "", len(text)))
        return tokens

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, _byte_offset(self.text, tok[2]))

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            raise self.error(f"expected {value!r}, got {tok[1] or 'end of input'!r}", tok)

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("-", "+"):
            self.take()
            arg = self.unary()
            return Neg(arg) if tok[1] == "-" else arg
        return self.power()

    def power(self):
        node = self.base()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            return Pow(node, self.unary())
        return node

    def base(self):
        tok = self.take()
        kind, text, _ = tok
        if kind == "num":
            value = float(text)
            if not math.isfinite(value):
                raise self.error(f"number {text!r} is out of range", tok)
            return Num(value)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "ident":
            if text in VARIABLES:
                return Var(text)
            if self.peek()[1] != "(":
                raise UnknownIdentifierError(f"unknown identifier {text!r}", _byte_offset(self.text, tok[2]))
            func = self._resolve(text, tok)
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Call(text, arg) if func is None else FuncCall(func, arg)
        raise self.error(f"unexpected {text or 'end of input'!r}", tok)

    def _resolve(self, name, tok):
        if name in BUILTINS:
            return None
        base = name.rstrip("'")
        func = self.functions.get(name) or self.functions.get(base)
        if func is None:
            raise UnknownIdentifierError(f"unknown identifier {name!r}", _byte_offset(self.text, tok[2]))
        if name not in self.functions:
            for _ in range(len(name) - len(base)):
                func = func.derivative()
        return func


def _byte_offset(text: str, char_offset: int) -> int:
    return len(text[:char_offset].encode("utf-8"))


def parse(text: str, functions: Mapping[str, ScalarFunction1D] | None = None) -> Expression:
    """Parse ``text`` into an :class:`Expression`.

    ``functions`` maps names to registered one-variable functions.
    Raises :class:`ParseError` (with a byte offset) or
    :class:`UnknownIdentifierError`.
    """
    return Expression(_Parser(text, functions or {}).parse())


def evaluate(e: Expression, x: float, y: float) -> float:
    return e(x, y)


def differentiate(e: Expression, var: str) -> Expression:
    return e.diff(var)


def function_from_text(
    name: str,
    text: str,
    derivative: str | None = None,
    domain: tuple[float, float] | None = None,
    monotone: bool = False,
    functions: Mapping[str, ScalarFunction1D] | None = None,
) -> ScalarFunction1D:
    """Build a registered one-variable function from expression strings in ``t``."""
    expr = parse(text, functions)
    dexpr = parse(derivative, functions) if derivative else None
    return ScalarFunction1D(name, expr, monotone=monotone, domain=domain, derivative_expr=dexpr)
