"""Arithmetic expressions over the phase-space variables x1, y1, x2, y2.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | 'pi' | VAR | FUNC '(' expr ')' | '(' expr ')'

so ``-x1^2`` is ``-(x1^2)`` and ``2^3^2`` is ``2^(3^2)``. Whitespace is
ignored; there is no unary plus. Numbers may use scientific notation.

Expressions are immutable trees. ``diff`` returns a new tree (lightly
simplified), ``to_source`` pretty-prints with minimal parentheses and
``compile_function`` turns a tree into a fast scalar Python callable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Union

from .errors import EvaluationError, ParseError

VARIABLES = ("x1", "y1", "x2", "y2")
FUNCTIONS = ("sin", "cos", "exp", "sqrt", "log")
CONSTANTS = {"pi": math.pi}

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]


# --------------------------------------------------------------------------
# tokenizer / parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num, ident, op, end
    text: str
    column: int


def _tokenize(text: str, line: int, col0: int) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), col0 + pos))
        pos = m.end()
    tokens.append(_Token("end", "", col0 + len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, line: int, col0: int):
        self.tokens = _tokenize(text, line, col0)
        self.i = 0
        self.line = line

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        return ParseError(message, self.line, tok.column)

    def unexpected(self):
        if self.tok.kind == "end":
            return self.error("unexpected end of expression")
        return self.error(f"unexpected {self.tok.text!r}")

    def accept(self, *ops: str) -> _Token | None:
        if self.tok.kind == "op" and self.tok.text in ops:
            tok = self.tok
            self.i += 1
            return tok
        return None

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            raise self.unexpected()
        return node

    def expr(self) -> Expr:
        node = self.term()
        while (tok := self.accept("+", "-")) is not None:
            node = BinOp(tok.text, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while (tok := self.accept("*", "/")) is not None:
            node = BinOp(tok.text, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.i += 1
            name = tok.text
            if name in FUNCTIONS:
                if not self.accept("("):
                    raise self.error(f"function {name!r} must be called with one argument")
                if self.tok.kind == "op" and self.tok.text == ")":
                    raise self.error(f"{name} takes 1 argument, got 0")
                arg = self.expr()
                nargs = 1
                while self.accept(","):
                    self.expr()
                    nargs += 1
                if nargs != 1:
                    raise self.error(f"{name} takes 1 argument, got {nargs}", tok)
                if not self.accept(")"):
                    raise self.unexpected()
                return Call(name, arg)
            if name in VARIABLES:
                return Var(name)
            if name in CONSTANTS:
                return Num(CONSTANTS[name])
            raise self.error(f"unknown identifier {name!r}", tok)
        if self.accept("("):
            node = self.expr()
            if not self.accept(")"):
                raise self.unexpected()
            return node
        raise self.unexpected()


def parse(text: str, line: int = 1, column: int = 1) -> Expr:
    """Parse ``text``; error positions are reported relative to (line, column)."""
    return _Parser(text, line, column).parse()


# --------------------------------------------------------------------------
# simplifying constructors


def _num(node: Expr) -> float | None:
    return node.value if isinstance(node, Num) else None


def _finite_num(value: float) -> Num | None:
    return Num(value) if math.isfinite(value) else None


def add(a: Expr, b: Expr) -> Expr:
    va, vb = _num(a), _num(b)
    if va == 0.0:
        return b
    if vb == 0.0:
        return a
    if va is not None and vb is not None:
        return _finite_num(va + vb) or BinOp("+", a, b)
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    va, vb = _num(a), _num(b)
    if vb == 0.0:
        return a
    if va == 0.0:
        return neg(b)
    if va is not None and vb is not None:
        return _finite_num(va - vb) or BinOp("-", a, b)
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    va, vb = _num(a), _num(b)
    if va == 0.0 or vb == 0.0:
        return Num(0.0)
    if va == 1.0:
        return b
    if vb == 1.0:
        return a
    if va is not None and vb is not None:
        return _finite_num(va * vb) or BinOp("*", a, b)
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    va, vb = _num(a), _num(b)
    if va == 0.0:
        return Num(0.0)
    if vb == 1.0:
        return a
    return BinOp("/", a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a: Expr, b: Expr) -> Expr:
    vb = _num(b)
    if vb == 1.0:
        return a
    if vb == 0.0:
        return Num(1.0)
    return BinOp("^", a, b)


# --------------------------------------------------------------------------
# analysis


def variables(node: Expr) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, (Neg, Call)):
        return variables(node.arg)
    return variables(node.left) | variables(node.right)


def diff(node: Expr, var: str) -> Expr:
    """Symbolic partial derivative with respect to ``var``."""
    if isinstance(node, Num):
        return Num(0.0)
    if isinstance(node, Var):
        return Num(1.0 if node.name == var else 0.0)
    if isinstance(node, Neg):
        return neg(diff(node.arg, var))
    if isinstance(node, Call):
        u = node.arg
        du = diff(u, var)
        if _num(du) == 0.0:
            return Num(0.0)
        if node.func == "sin":
            return mul(Call("cos", u), du)
        if node.func == "cos":
            return neg(mul(Call("sin", u), du))
        if node.func == "exp":
            return mul(node, du)
        if node.func == "sqrt":
            return div(du, mul(Num(2.0), node))
        if node.func == "log":
            return div(du, u)
        raise ValueError(node.func)
    a, b = node.left, node.right
    da, db = diff(a, var), diff(b, var)
    if node.op == "+":
        return add(da, db)
    if node.op == "-":
        return sub(da, db)
    if node.op == "*":
        return add(mul(da, b), mul(a, db))
    if node.op == "/":
        return div(sub(mul(da, b), mul(a, db)), power(b, Num(2.0)))
    # a^b
    if var not in variables(b):
        vb = _num(b)
        exponent = Num(vb - 1.0) if vb is not None else sub(b, Num(1.0))
        return mul(mul(b, power(a, exponent)), da)
    return mul(node, add(mul(db, Call("log", a)), div(mul(b, da), a)))


def gradient(node: Expr, names: Iterable[str] = VARIABLES) -> tuple[Expr, ...]:
    return tuple(diff(node, v) for v in names)


# --------------------------------------------------------------------------
# printing


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return {"+": _PREC_ADD, "-": _PREC_ADD, "*": _PREC_MUL, "/": _PREC_MUL, "^": _PREC_POW}[node.op]
    if isinstance(node, Neg):
        return _PREC_NEG
    if isinstance(node, Num) and (node.value < 0 or math.copysign(1.0, node.value) < 0):
        return _PREC_NEG
    return _PREC_ATOM


def _wrap(node: Expr, parens: bool) -> str:
    s = to_source(node)
    return f"({s})" if parens else s


def to_source(node: Expr) -> str:
    """Render in the input grammar; ``parse(to_source(e))`` reproduces ``e``'s values."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return "-" + _wrap(node.arg, _prec(node.arg) < _PREC_NEG)
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    p = _prec(node)
    if node.op == "^":
        left = _wrap(node.left, _prec(node.left) <= _PREC_POW)
        right = _wrap(node.right, _prec(node.right) < _PREC_NEG)
        return f"{left}^{right}"
    left = _wrap(node.left, _prec(node.left) < p)
    right = _wrap(node.right, _prec(node.right) <= p)
    return f"{left} {node.op} {right}"


# --------------------------------------------------------------------------
# evaluation


def _to_python(node: Expr) -> str:
    if isinstance(node, Num):
        return f"({node.value!r})"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_to_python(node.arg)})"
    if isinstance(node, Call):
        return f"_{node.func}({_to_python(node.arg)})"
    a, b = _to_python(node.left), _to_python(node.right)
    if node.op == "^":
        if isinstance(node.right, Num) and node.right.value == 2.0:
            return f"({a}*{a})"
        return f"_pow({a}, {b})"
    return f"({a} {node.op} {b})"


_NAMESPACE = {
    "_sin": math.sin,
    "_cos": math.cos,
    "_exp": math.exp,
    "_sqrt": math.sqrt,
    "_log": math.log,
    "_pow": math.pow,
}


def compile_function(node: Expr, names: tuple[str, ...] = VARIABLES) -> Callable[..., float]:
    """Compile to ``f(x1, y1, x2, y2) -> float``.

    Domain errors (negative sqrt, division by zero, overflow) surface as
    :class:`EvaluationError`.
    """
    code = f"lambda {', '.join(names)}: {_to_python(node)}"
    raw = eval(code, dict(_NAMESPACE))  # noqa: S307  generated from a validated AST

    def f(*args):
        try:
            value = raw(*args)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise EvaluationError(f"cannot evaluate {to_source(node)}: {exc}", args) from None
        if not math.isfinite(value):
            raise EvaluationError(f"non-finite value of {to_source(node)}", args)
        return value

    f.source = code
    return f


def evaluate(node: Expr, env: dict[str, float]) -> float:
    """Tree-walking evaluation; slow, used as a cross-check of ``compile_function``."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -evaluate(node.arg, env)
    if isinstance(node, Call):
        return _NAMESPACE["_" + node.func](evaluate(node.arg, env))
    a, b = evaluate(node.left, env), evaluate(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return a / b
    return math.pow(a, b)
