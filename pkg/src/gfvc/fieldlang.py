r"""A small expression language for closed-form fields.

Grammar (EBNF)::

    expr    = term , { ("+" | "-") , term } ;
    term    = unary , { ("*" | "/") , unary } ;
    unary   = "-" , unary | power ;
    power   = primary , [ "^" , unary ] ;          (* right associative *)
    primary = number | name | func , "(" , expr , ")" | "(" , expr , ")" ;
    func    = "exp" | "sin" | "cos" | "sqrt" ;
    name    = one of the three declared variables | "pi" ;
    number  = digit , { digit } , [ "." , { digit } ] , [ ("e" | "E") , [ "+" | "-" ] , digit , { digit } ]
            | "." , digit , { digit } , [ exponent ] ;

The exponent of ``^`` must be a constant expression (it may not mention a
variable), so every power node is a real-exponent power.  Whitespace is
ignored everywhere.

Nodes are immutable dataclasses.  Source spans are kept for error messages
but excluded from equality, so ``parse(to_text(e)) == e`` holds
structurally.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, EvaluationError, FieldSyntaxError

FUNCTIONS = ("exp", "sin", "cos", "sqrt")
CONSTANTS = {"pi": math.pi}
CARTESIAN = ("x", "y", "z")


class InferenceWarning(UserWarning):
    """Endpoint-exponent inference fell back to 0."""


# {{{ AST


@dataclass(frozen=True)
class Node:
    span: tuple[int, int] | None = field(default=None, compare=False, repr=False, kw_only=True)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Num(Node):
    value: float


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True)
class Add(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Sub(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Mul(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Div(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: Node


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node


# }}}

# {{{ parser

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_PRIMARY_START = frozenset({"number", "name", "'('", "'-'"})


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    start: int


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FieldSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos), _PRIMARY_START)
        kind = m.lastgroup
        assert kind is not None
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]) -> None:
        self.text = text
        self.variables = tuple(variables)
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, expected: frozenset[str], tok: _Token | None = None) -> FieldSyntaxError:
        tok = tok or self.tok
        return FieldSyntaxError(message, _byte_offset(self.text, tok.start), expected)

    def take_op(self, ops: str) -> _Token | None:
        if self.tok.kind == "op" and self.tok.text in ops:
            t = self.tok
            self.i += 1
            return t
        return None

    def expect_op(self, op: str, expected_extra: frozenset[str] = frozenset()) -> _Token:
        t = self.take_op(op)
        if t is None:
            found = self.tok.text or "end of input"
            raise self.error(f"expected '{op}', found {found!r}", frozenset({f"'{op}'"}) | expected_extra)
        return t

    def parse(self) -> Node:
        if self.tok.kind == "eof":
            raise self.error("empty expression", _PRIMARY_START)
        node = self.expr()
        if self.tok.kind != "eof":
            raise self.error(
                f"unexpected {self.tok.text!r}",
                frozenset({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"}),
            )
        return node

    def expr(self) -> Node:
        node = self.term()
        while (op := self.take_op("+-")) is not None:
            right = self.term()
            cls = Add if op.text == "+" else Sub
            node = cls(node, right, span=(node.span[0], right.span[1]))
        return node

    def term(self) -> Node:
        node = self.unary()
        while (op := self.take_op("*/")) is not None:
            right = self.unary()
            cls = Mul if op.text == "*" else Div
            node = cls(node, right, span=(node.span[0], right.span[1]))
        return node

    def unary(self) -> Node:
        op = self.take_op("-")
        if op is not None:
            arg = self.unary()
            return Neg(arg, span=(op.start, arg.span[1]))
        return self.power()

    def power(self) -> Node:
        base = self.primary()
        caret = self.take_op("^")
        if caret is None:
            return base
        exp_start = self.tok
        exponent = self.unary()
        if free_variables(exponent):
            raise self.error("exponent of '^' must be a constant expression", frozenset({"number", "'('", "'-'"}), exp_start)
        return Pow(base, exponent, span=(base.span[0], exponent.span[1]))

    def primary(self) -> Node:
        tok = self.tok
        if tok.kind == "number":
            self.i += 1
            return Num(float(tok.text), span=(tok.start, tok.start + len(tok.text)))
        if tok.kind == "name":
            self.i += 1
            end = tok.start + len(tok.text)
            if tok.text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                close = self.expect_op(")", frozenset({"'+'", "'-'", "'*'", "'/'", "'^'"}))
                return Call(tok.text, arg, span=(tok.start, close.start + 1))
            if tok.text in self.variables:
                return Var(tok.text, span=(tok.start, end))
            if tok.text in CONSTANTS:
                return Num(CONSTANTS[tok.text], span=(tok.start, end))
            allowed = frozenset(self.variables) | frozenset(FUNCTIONS) | frozenset(CONSTANTS)
            raise self.error(f"unknown identifier {tok.text!r}", allowed, tok)
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            node = self.expr()
            close = self.expect_op(")", frozenset({"'+'", "'-'", "'*'", "'/'", "'^'"}))
            return _with_span(node, (tok.start, close.start + 1))
        found = tok.text or "end of input"
        raise self.error(f"expected an operand, found {found!r}", _PRIMARY_START)


def _with_span(node: Node, span: tuple[int, int]) -> Node:
    # parenthesized groups report the span including the parentheses
    return type(node)(**{k: getattr(node, k) for k in node.__dataclass_fields__ if k != "span"}, span=span)


def parse(text: str, variables: Sequence[str] = CARTESIAN) -> Node:
    """Parse ``text`` into an expression tree over the three ``variables``."""
    if len(variables) != 3 or len(set(variables)) != 3:
        raise DomainError("exactly three distinct variable names are required")
    for v in variables:
        if v in FUNCTIONS or v in CONSTANTS:
            raise ValueError(f"variable name {v!r} collides with a reserved name")
    return _Parser(text, variables).parse()


# }}}

# {{{ printing


def _prec(node: Node) -> int:
    if isinstance(node, (Add, Sub)):
        return 1
    if isinstance(node, (Mul, Div)):
        return 2
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    if isinstance(node, Num) and node.value < 0:
        return 3
    return 5


def _num_text(v: float) -> str:
    if not math.isfinite(v):
        raise ValueError("non-finite literal cannot be printed")
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s


def to_text(node: Node) -> str:
    """Print with the minimal parentheses that preserve the tree."""

    def wrap(n: Node, ok: bool) -> str:
        s = to_text(n)
        return s if ok else f"({s})"

    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return "-" + wrap(node.arg, _prec(node.arg) >= 3)
    if isinstance(node, (Add, Sub)):
        op = "+" if isinstance(node, Add) else "-"
        return f"{wrap(node.left, _prec(node.left) >= 1)} {op} {wrap(node.right, _prec(node.right) > 1)}"
    if isinstance(node, (Mul, Div)):
        op = "*" if isinstance(node, Mul) else "/"
        return f"{wrap(node.left, _prec(node.left) >= 2)}{op}{wrap(node.right, _prec(node.right) > 2)}"
    if isinstance(node, Pow):
        return f"{wrap(node.base, _prec(node.base) >= 5)}^{wrap(node.exponent, _prec(node.exponent) >= 3)}"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


# }}}

# {{{ structure helpers


def free_variables(node: Node) -> frozenset[str]:
    if isinstance(node, Var):
        return frozenset({node.name})
    if isinstance(node, Num):
        return frozenset()
    out: frozenset[str] = frozenset()
    for child in _children(node):
        out |= free_variables(child)
    return out


def _children(node: Node) -> tuple[Node, ...]:
    if isinstance(node, (Neg, Call)):
        return (node.arg,)
    if isinstance(node, (Add, Sub, Mul, Div)):
        return (node.left, node.right)
    if isinstance(node, Pow):
        return (node.base, node.exponent)
    return ()


def const_value(node: Node) -> float | None:
    """Numeric value of a variable-free expression, else ``None``."""
    if free_variables(node):
        return None
    try:
        return float(evaluate(node, {}))
    except EvaluationError:
        return None


def num(value: float) -> Node:
    """A literal; negative values become ``Neg(Num)`` so that printing round-trips."""
    value = float(value)
    if value < 0 or (value == 0 and math.copysign(1.0, value) < 0):
        return Neg(Num(-value))
    return Num(value)


def _is_const(node: Node, value: float) -> bool:
    c = const_value(node) if not isinstance(node, Var) else None
    return c is not None and c == value


def _fold(node: Node) -> Node:
    if not free_variables(node) and not isinstance(node, Num):
        c = const_value(node)
        if c is not None and math.isfinite(c):
            return num(c)
    return node


def add(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return _fold(Add(a, b))


def sub(a: Node, b: Node) -> Node:
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    return _fold(Sub(a, b))


def mul(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Num(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return _fold(Mul(a, b))


def div(a: Node, b: Node) -> Node:
    if _is_const(a, 0.0):
        return Num(0.0)
    if _is_const(b, 1.0):
        return a
    return _fold(Div(a, b))


def neg(a: Node) -> Node:
    if _is_const(a, 0.0):
        return Num(0.0)
    return _fold(Neg(a))


def power(a: Node, c: float) -> Node:
    return Pow(a, num(c))


def substitute(node: Node, mapping: Mapping[str, Node]) -> Node:
    """Replace variables by expressions (no folding)."""
    if isinstance(node, Var):
        return mapping.get(node.name, node)
    if isinstance(node, Num):
        return node
    if isinstance(node, (Neg, Call)):
        if isinstance(node, Neg):
            return Neg(substitute(node.arg, mapping))
        return Call(node.func, substitute(node.arg, mapping))
    if isinstance(node, Pow):
        return Pow(substitute(node.base, mapping), node.exponent)
    return type(node)(substitute(node.left, mapping), substitute(node.right, mapping))


# }}}

# {{{ evaluation


def _fail(node: Node, what: str, source: str | None) -> EvaluationError:
    where = f" at offset {node.span[0]}..{node.span[1]}" if node.span else ""
    return EvaluationError(f"{what} in '{to_text(node)}'{where}", node.span, source)


def evaluate(node: Node, env: Mapping[str, object], *, source: str | None = None):
    """Evaluate over numpy arrays (broadcasting); ``env`` maps names to values."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        try:
            return env[node.name]
        except KeyError:
            raise _fail(node, f"unbound variable {node.name!r}", source) from None
    if isinstance(node, Neg):
        return -evaluate(node.arg, env, source=source)
    if isinstance(node, (Add, Sub, Mul)):
        a = evaluate(node.left, env, source=source)
        b = evaluate(node.right, env, source=source)
        if isinstance(node, Add):
            return a + b
        if isinstance(node, Sub):
            return a - b
        return a * b
    if isinstance(node, Div):
        a = evaluate(node.left, env, source=source)
        b = evaluate(node.right, env, source=source)
        if np.any(np.asarray(b) == 0):
            raise _fail(node, "division by zero", source)
        return np.divide(a, b)
    if isinstance(node, Pow):
        base = np.asarray(evaluate(node.base, env, source=source), dtype=float)
        e = float(evaluate(node.exponent, env, source=source))
        if e != round(e) and np.any(base < 0):
            raise _fail(node, "negative base with non-integer exponent", source)
        if e < 0 and np.any(base == 0):
            raise _fail(node, "zero raised to a negative power", source)
        out = np.power(base, e)
        return float(out) if out.ndim == 0 else out
    if isinstance(node, Call):
        a = evaluate(node.arg, env, source=source)
        if node.func == "sqrt":
            if np.any(np.asarray(a) < 0):
                raise _fail(node, "square root of a negative number", source)
            return np.sqrt(a)
        return {"exp": np.exp, "sin": np.sin, "cos": np.cos}[node.func](a)
    raise TypeError(f"not an expression node: {node!r}")


def eval_at(node: Node, point: Sequence[float], variables: Sequence[str] = CARTESIAN) -> float:
    """Evaluate at a single point given as three coordinates."""
    return float(evaluate(node, dict(zip(variables, (float(p) for p in point)))))


# }}}

# {{{ differentiation


def diff(node: Node, var: str) -> Node:
    """Symbolic partial derivative with constant folding only."""
    if isinstance(node, Num):
        return Num(0.0)
    if isinstance(node, Var):
        return Num(1.0 if node.name == var else 0.0)
    if var not in free_variables(node):
        return Num(0.0)
    if isinstance(node, Neg):
        return neg(diff(node.arg, var))
    if isinstance(node, Add):
        return add(diff(node.left, var), diff(node.right, var))
    if isinstance(node, Sub):
        return sub(diff(node.left, var), diff(node.right, var))
    if isinstance(node, Mul):
        return add(mul(diff(node.left, var), node.right), mul(node.left, diff(node.right, var)))
    if isinstance(node, Div):
        u, v = node.left, node.right
        top = sub(mul(diff(u, var), v), mul(u, diff(v, var)))
        return div(top, power(v, 2.0))
    if isinstance(node, Pow):
        c = const_value(node.exponent)
        assert c is not None
        return mul(mul(num(c), power(node.base, c - 1.0)), diff(node.base, var))
    if isinstance(node, Call):
        inner = diff(node.arg, var)
        if node.func == "exp":
            outer: Node = node
        elif node.func == "sin":
            outer = Call("cos", node.arg)
        elif node.func == "cos":
            outer = neg(Call("sin", node.arg))
        else:
            return div(inner, mul(Num(2.0), node))
        return mul(outer, inner)
    raise TypeError(f"not an expression node: {node!r}")


# }}}

# {{{ endpoint exponents

_INF = math.inf


def leading_exponent(node: Node, var: str) -> float | None:
    """Exponent ``p`` with ``e ~ var^p`` as ``var -> 0+``, other variables generic.

    Returns ``inf`` for the zero function and ``None`` when the syntactic
    rules cannot decide (for example ``exp(1/x)``).  Sums take the minimum,
    which is exact unless leading terms cancel.
    """
    if isinstance(node, Num):
        return 0.0 if node.value != 0 else _INF
    if isinstance(node, Var):
        return 1.0 if node.name == var else 0.0
    if var not in free_variables(node):
        c = const_value(node)
        return _INF if c == 0 else 0.0
    if isinstance(node, Neg):
        return leading_exponent(node.arg, var)
    if isinstance(node, (Add, Sub)):
        a, b = leading_exponent(node.left, var), leading_exponent(node.right, var)
        if a is None or b is None:
            return None
        if a == b != _INF and _leading_terms_cancel(node, var, a):
            return None
        return min(a, b)
    if isinstance(node, (Mul, Div)):
        a, b = leading_exponent(node.left, var), leading_exponent(node.right, var)
        if a is None or b is None:
            return None
        if isinstance(node, Mul):
            return a + b
        if b == _INF:
            return None
        return a - b
    if isinstance(node, Pow):
        a = leading_exponent(node.base, var)
        c = const_value(node.exponent)
        if a is None or c is None:
            return None
        if a == _INF:
            return _INF if c > 0 else None
        return a * c
    if isinstance(node, Call):
        a = leading_exponent(node.arg, var)
        if a is None:
            return None
        if node.func == "sqrt":
            return 0.5 * a
        if node.func == "sin":
            if a > 0:
                return a
            return 0.0 if a == 0 else None
        # exp and cos of an argument that stays bounded tend to a nonzero constant
        return 0.0 if a >= 0 else None
    return None


#: generic values for the variables that are not being probed
_PROBE_OTHERS = (0.7316983, 1.2913447, 0.5471021)
_PROBE_POINTS = (1e-3, 1e-2)


def _leading_terms_cancel(node: Node, var: str, p: float) -> bool:
    """Numeric probe: does ``node`` vanish faster than ``var^p`` near 0?"""
    env: dict[str, object] = {
        v: np.asarray(_PROBE_OTHERS[i % len(_PROBE_OTHERS)]) for i, v in enumerate(sorted(free_variables(node)))
    }
    values = []
    for t in _PROBE_POINTS:
        env[var] = np.asarray(t)
        try:
            with np.errstate(all="ignore"):
                values.append(abs(float(evaluate(node, env))))
        except EvaluationError:
            return True
    if values[0] == 0.0 or values[1] == 0.0 or not all(map(math.isfinite, values)):
        return True
    slope = math.log(values[1] / values[0]) / math.log(_PROBE_POINTS[1] / _PROBE_POINTS[0])
    return slope > p + 0.5


def endpoint_exponent(node: Node, var: str) -> float:
    """Leading exponent at ``var = 0`` clamped to ``(-1, 0]``.

    Inference failures fall back to 0 with an :class:`InferenceWarning`;
    exponents ``<= -1`` (not integrable) raise :class:`DomainError`.
    """
    p = leading_exponent(node, var)
    if p is None:
        warnings.warn(f"could not infer the endpoint exponent of '{to_text(node)}' in {var}; using 0", InferenceWarning, stacklevel=2)
        return 0.0
    if p <= -1.0:
        raise DomainError(f"'{to_text(node)}' behaves like {var}^{p:g} at 0, which is not integrable")
    return min(p, 0.0)


# }}}

# vim: foldmethod=marker
