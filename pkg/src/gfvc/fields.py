r"""Lazily evaluated scalar fields on ``ℝ³₊`` and the operator images built from them.

A :class:`Field` can be evaluated on broadcastable coordinate arrays, knows
its own first partial derivatives (as new fields) and reports the algebraic
exponent it has at coordinate 0 along each axis, which the quadrature uses
to place Gauss-Jacobi weights.

The key node is :class:`ConvImage`, the convolution of a field with a kernel
along one coordinate, ``∫_0^s k(s - t) f(..., t, ...) dt``.  Its derivative
with respect to the upper limit is never taken numerically; instead

.. math::

    \frac{d}{ds} (k * φ)(s) = \frac{1}{s}\Big[((k + u k') * φ)(s) + (k * (t φ'))(s)\Big],

which follows from writing the convolution over ``[0, 1]`` after ``t = s τ``.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Mapping, Protocol, Sequence

import numpy as np

from . import fieldlang as fl
from .errors import DomainError
from .kernels import UNIT_KERNEL, Kernel, KernelPair
from .quad import DEFAULT_SPEC, QuadSpec, convolve_batch

Coords = tuple[np.ndarray, np.ndarray, np.ndarray]
AXES = ("x", "y", "z")


def _coords(x, y, z) -> Coords:
    a, b, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    return a, b, c


def _replace(c: Coords, axis: int, value: np.ndarray) -> Coords:
    out = list(np.broadcast_arrays(*c, value))[:3]
    out[axis] = np.broadcast_to(value, out[0].shape)
    return out[0], out[1], out[2]


class Field(ABC):
    """A scalar function of three coordinates."""

    def __call__(self, x, y, z) -> np.ndarray:
        c = _coords(x, y, z)
        out = np.asarray(self._eval(c), dtype=float)
        return np.broadcast_to(out, c[0].shape).copy() if out.shape != c[0].shape else out

    def at(self, point: Sequence[float]) -> float:
        return float(self(*point))

    @abstractmethod
    def _eval(self, c: Coords) -> np.ndarray: ...

    @abstractmethod
    def partial(self, axis: int) -> Field: ...

    def exponent(self, axis: int) -> float | None:
        """Leading exponent at coordinate 0 along ``axis``; ``None`` if unknown."""
        return None

    @abstractmethod
    def describe(self) -> str: ...

    def __str__(self) -> str:
        return self.describe()

    @property
    def uses_finite_differences(self) -> bool:
        return False

    def __add__(self, other: Field) -> Field:
        return Sum((self, other))

    def __sub__(self, other: Field) -> Field:
        return Sum((self, Scaled(-1.0, other)))

    def __mul__(self, other: Field) -> Field:
        return Product(self, other)

    def __neg__(self) -> Field:
        return Scaled(-1.0, self)


# {{{ closed-form fields


class ScalarField(Field):
    """A field given by an expression of the field language."""

    def __init__(self, expr: fl.Node | str, variables: Sequence[str] = fl.CARTESIAN) -> None:
        self.variables = tuple(variables)
        self.expr = fl.parse(expr, self.variables) if isinstance(expr, str) else expr

    @classmethod
    def parse(cls, text: str, variables: Sequence[str] = fl.CARTESIAN) -> ScalarField:
        return cls(fl.parse(text, variables), variables)

    @classmethod
    def constant(cls, value: float, variables: Sequence[str] = fl.CARTESIAN) -> ScalarField:
        return cls(fl.num(value), variables)

    def _eval(self, c: Coords) -> np.ndarray:
        return np.asarray(fl.evaluate(self.expr, dict(zip(self.variables, c))), dtype=float)

    def partial(self, axis: int) -> ScalarField:
        return ScalarField(fl.diff(self.expr, self.variables[axis]), self.variables)

    def exponent(self, axis: int) -> float | None:
        return fl.leading_exponent(self.expr, self.variables[axis])

    def substitute(self, mapping: Mapping[str, fl.Node]) -> ScalarField:
        return ScalarField(fl.substitute(self.expr, mapping), self.variables)

    def times(self, other: ScalarField) -> ScalarField:
        """Symbolic product (no Leibniz splitting anywhere downstream)."""
        return ScalarField(fl.mul(self.expr, other.expr), self.variables)

    def describe(self) -> str:
        return fl.to_text(self.expr)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ScalarField) and other.expr == self.expr and other.variables == self.variables

    def __hash__(self) -> int:
        return hash((self.expr, self.variables))

    def __repr__(self) -> str:
        return f"ScalarField({self.describe()!r})"


def as_field(value: Field | str | float, variables: Sequence[str] = fl.CARTESIAN) -> Field:
    if isinstance(value, Field):
        return value
    if isinstance(value, str):
        return ScalarField.parse(value, variables)
    return ScalarField.constant(float(value), variables)


class CallableField(Field):
    """A field backed by an opaque vectorized callable.

    Derivatives that are not supplied are computed by central differences
    with one Richardson step; such fields report
    ``uses_finite_differences``.
    """

    def __init__(
        self,
        func: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
        partials: Sequence[Callable | None] = (None, None, None),
        exponents: Sequence[float | None] = (0.0, 0.0, 0.0),
        label: str = "<callable>",
    ) -> None:
        self.func = func
        self.partials = tuple(partials)
        self.exponents = tuple(exponents)
        self.label = label

    def _eval(self, c: Coords) -> np.ndarray:
        return np.asarray(self.func(*c), dtype=float)

    def partial(self, axis: int) -> Field:
        d = self.partials[axis]
        if d is None:
            return FiniteDifference(self, axis)
        e = self.exponents[axis]
        exps = list(self.exponents)
        exps[axis] = None if e is None else (e - 1.0 if e != 0 else 0.0)
        return CallableField(d, (None, None, None), exps, f"d{AXES[axis]}[{self.label}]")

    def exponent(self, axis: int) -> float | None:
        return self.exponents[axis]

    def describe(self) -> str:
        return self.label


class FiniteDifference(Field):
    """Central difference with one Richardson extrapolation, ``h = 1e-5``."""

    step = 1e-5

    def __init__(self, base: Field, axis: int) -> None:
        self.base = base
        self.axis = axis

    def _central(self, c: Coords, h: float) -> np.ndarray:
        up = _replace(c, self.axis, c[self.axis] + h)
        down = _replace(c, self.axis, c[self.axis] - h)
        return (self.base._eval(up) - self.base._eval(down)) / (2.0 * h)

    def _eval(self, c: Coords) -> np.ndarray:
        h = self.step
        return (4.0 * self._central(c, h / 2) - self._central(c, h)) / 3.0

    def partial(self, axis: int) -> Field:
        return FiniteDifference(self, axis)

    def describe(self) -> str:
        return f"fd_{AXES[self.axis]}[{self.base.describe()}]"

    @property
    def uses_finite_differences(self) -> bool:
        return True


# }}}

# {{{ algebra


def _min_exponent(values: Sequence[float | None]) -> float | None:
    if any(v is None for v in values):
        return None
    return min(values)  # type: ignore[type-var]


class Sum(Field):
    def __init__(self, terms: Sequence[Field]) -> None:
        self.terms = tuple(terms)

    def _eval(self, c: Coords) -> np.ndarray:
        out = np.zeros(c[0].shape)
        for t in self.terms:
            out = out + t._eval(c)
        return out

    def partial(self, axis: int) -> Field:
        return Sum([t.partial(axis) for t in self.terms])

    def exponent(self, axis: int) -> float | None:
        return _min_exponent([t.exponent(axis) for t in self.terms])

    def describe(self) -> str:
        return " + ".join(f"({t.describe()})" for t in self.terms)

    @property
    def uses_finite_differences(self) -> bool:
        return any(t.uses_finite_differences for t in self.terms)


class Scaled(Field):
    def __init__(self, factor: float, base: Field) -> None:
        self.factor = float(factor)
        self.base = base

    def _eval(self, c: Coords) -> np.ndarray:
        return self.factor * self.base._eval(c)

    def partial(self, axis: int) -> Field:
        return Scaled(self.factor, self.base.partial(axis))

    def exponent(self, axis: int) -> float | None:
        return self.base.exponent(axis) if self.factor != 0 else math.inf

    def describe(self) -> str:
        return f"{self.factor:g}*({self.base.describe()})"

    @property
    def uses_finite_differences(self) -> bool:
        return self.base.uses_finite_differences


class Product(Field):
    def __init__(self, left: Field, right: Field) -> None:
        self.left = left
        self.right = right

    def _eval(self, c: Coords) -> np.ndarray:
        return self.left._eval(c) * self.right._eval(c)

    def partial(self, axis: int) -> Field:
        # classical first derivative of a product of ordinary functions
        return Sum((Product(self.left.partial(axis), self.right), Product(self.left, self.right.partial(axis))))

    def exponent(self, axis: int) -> float | None:
        a, b = self.left.exponent(axis), self.right.exponent(axis)
        return None if a is None or b is None else a + b

    def describe(self) -> str:
        return f"({self.left.describe()})*({self.right.describe()})"

    @property
    def uses_finite_differences(self) -> bool:
        return self.left.uses_finite_differences or self.right.uses_finite_differences


class CoordinatePower(Field):
    """``base * s^power`` with ``s`` the coordinate along ``axis``."""

    def __init__(self, base: Field, axis: int, power: float, exponent_hint: float | None = None) -> None:
        self.base = base
        self.axis = axis
        self.power = float(power)
        self.exponent_hint = exponent_hint

    def _eval(self, c: Coords) -> np.ndarray:
        s = c[self.axis]
        if self.power < 0 and np.any(s == 0):
            raise DomainError(f"evaluation at {AXES[self.axis]} = 0 of a quotient by the coordinate")
        return self.base._eval(c) * np.power(s, self.power)

    def partial(self, axis: int) -> Field:
        d_base = CoordinatePower(self.base.partial(axis), self.axis, self.power)
        if axis != self.axis:
            return d_base
        return Sum((d_base, Scaled(self.power, CoordinatePower(self.base, self.axis, self.power - 1.0))))

    def exponent(self, axis: int) -> float | None:
        if axis != self.axis:
            return self.base.exponent(axis)
        if self.exponent_hint is not None:
            return self.exponent_hint
        e = self.base.exponent(axis)
        if e is None:
            return None
        out = e + self.power
        return out if out > -1.0 else None

    def describe(self) -> str:
        return f"{AXES[self.axis]}^{self.power:g}*({self.base.describe()})"

    @property
    def uses_finite_differences(self) -> bool:
        return self.base.uses_finite_differences


# }}}

# {{{ convolution images


class ConvImage(Field):
    r"""``(k * f)`` along ``axis``: ``∫_0^{s} k(s - t) f(..., t, ...) dt`` with ``s`` the coordinate."""

    def __init__(self, kernel: Kernel, inner: Field, axis: int, spec: QuadSpec = DEFAULT_SPEC) -> None:
        self.kernel = kernel
        self.inner = inner
        self.axis = axis
        self.spec = spec

    def evaluate_with_error(self, c: Coords) -> tuple[np.ndarray, np.ndarray]:
        shape = c[0].shape
        flat = [np.ravel(v) for v in np.broadcast_arrays(*c)]
        s = flat[self.axis]
        if np.any(s < 0):
            raise DomainError(f"convolution along {AXES[self.axis]} needs nonnegative coordinates")
        inner = self.inner
        axis = self.axis

        def integrand(idx: np.ndarray, t: np.ndarray) -> np.ndarray:
            cols = [v[idx][:, None] for v in flat]
            cols[axis] = t
            cc = np.broadcast_arrays(*cols)
            return np.broadcast_to(inner._eval((cc[0], cc[1], cc[2])), t.shape)

        values, errors = convolve_batch(self.kernel, integrand, s, self.spec, self.inner.exponent(axis))
        return values.reshape(shape), errors.reshape(shape)

    def _eval(self, c: Coords) -> np.ndarray:
        return self.evaluate_with_error(c)[0]

    def partial(self, axis: int) -> Field:
        if axis != self.axis:
            return ConvImage(self.kernel, self.inner.partial(axis), self.axis, self.spec)
        if self.kernel is UNIT_KERNEL:
            return self.inner
        q = self.inner.exponent(axis)
        p = self.kernel.exponent
        hint = None if q is None else (p + q if p + q > -1.0 else None)
        first = ConvImage(self.kernel.plus_euler(), self.inner, axis, self.spec)
        second = ConvImage(self.kernel, CoordinatePower(self.inner.partial(axis), axis, 1.0), axis, self.spec)
        return CoordinatePower(Sum((first, second)), axis, -1.0, exponent_hint=hint)

    def exponent(self, axis: int) -> float | None:
        q = self.inner.exponent(axis)
        if axis != self.axis:
            return q
        if q is None:
            q = 0.0
        return 1.0 + self.kernel.exponent + q

    def describe(self) -> str:
        return f"({self.kernel.label} *_{AXES[self.axis]} {self.inner.describe()})"

    @property
    def uses_finite_differences(self) -> bool:
        return self.inner.uses_finite_differences


class IntervalImage(Field):
    r"""``C(upper) - C(lower)`` where ``C(s) = (k * f)(s)`` along ``axis``.

    With ``C(0) = 0`` this is the sign-extended interval integral
    ``sgn(b-a) (C(max) - C(min))``.  The result no longer depends on the
    ``axis`` coordinate of the evaluation point; the bounds may depend on
    the other coordinates.
    """

    def __init__(
        self,
        kernel: Kernel,
        inner: Field,
        axis: int,
        lower: Field | float,
        upper: Field | float,
        spec: QuadSpec = DEFAULT_SPEC,
    ) -> None:
        self.conv = ConvImage(kernel, inner, axis, spec)
        self.axis = axis
        self.lower = as_field(lower)
        self.upper = as_field(upper)

    def evaluate_with_error(self, c: Coords) -> tuple[np.ndarray, np.ndarray]:
        lo = np.broadcast_to(self.lower._eval(c), c[0].shape)
        hi = np.broadcast_to(self.upper._eval(c), c[0].shape)
        both = [np.concatenate([np.ravel(v), np.ravel(v)]) for v in c]
        both[self.axis] = np.concatenate([np.ravel(hi), np.ravel(lo)])
        values, errors = self.conv.evaluate_with_error((both[0], both[1], both[2]))
        n = lo.size
        return (values[:n] - values[n:]).reshape(c[0].shape), (errors[:n] + errors[n:]).reshape(c[0].shape)

    def _eval(self, c: Coords) -> np.ndarray:
        return self.evaluate_with_error(c)[0]

    def partial(self, axis: int) -> Field:
        raise DomainError("derivatives of interval integrals are not provided")

    def exponent(self, axis: int) -> float | None:
        if axis == self.axis:
            return 0.0
        if isinstance(self.lower, ScalarField) and isinstance(self.upper, ScalarField):
            if not (fl.free_variables(self.lower.expr) or fl.free_variables(self.upper.expr)):
                return self.conv.inner.exponent(axis)
        return None

    def describe(self) -> str:
        return f"[{self.conv.describe()}]_{{{self.lower.describe()}}}^{{{self.upper.describe()}}}"


def gfi_image(pair: KernelPair, inner: Field, axis: int, spec: QuadSpec = DEFAULT_SPEC) -> Field:
    """``I f = M * f`` along ``axis`` (an antiderivative for the classical pair)."""
    return ConvImage(pair.m, inner, axis, spec)


def caputo_image(pair: KernelPair, inner: Field, axis: int, spec: QuadSpec = DEFAULT_SPEC) -> Field:
    """``D* f = K * ∂f`` along ``axis`` (the plain partial derivative for the classical pair)."""
    if pair.k is None:
        return inner.partial(axis)
    return ConvImage(pair.k, inner.partial(axis), axis, spec)


# }}}

# {{{ restrictions to lines and surfaces


class LineLike(Protocol):
    def coords_along(self, axis: int, s: np.ndarray) -> Coords: ...

    def symbolic_map(self, axis: int) -> dict[str, fl.Node] | None: ...


class LineRestricted(Field):
    """``f`` on a line, as a function of the line's ``axis`` coordinate only."""

    def __init__(self, base: Field, line: LineLike, axis: int) -> None:
        self.base = base
        self.line = line
        self.axis = axis

    def _eval(self, c: Coords) -> np.ndarray:
        x, y, z = self.line.coords_along(self.axis, c[self.axis])
        return self.base._eval(_coords(x, y, z))

    def partial(self, axis: int) -> Field:
        raise DomainError("restricted fields are integrated, not differentiated")

    def exponent(self, axis: int) -> float | None:
        return None if axis == self.axis else 0.0

    def describe(self) -> str:
        return f"{self.base.describe()}|line({AXES[self.axis]})"

    @property
    def uses_finite_differences(self) -> bool:
        return self.base.uses_finite_differences


def restrict_to_line(base: Field, line: LineLike, axis: int) -> Field:
    """Restriction of ``base`` to ``line`` parameterized by coordinate ``axis``.

    Closed-form fields on lines with closed-form parameterizations are
    substituted symbolically so that endpoint exponents stay visible.
    """
    if isinstance(base, ScalarField):
        mapping = line.symbolic_map(axis)
        if mapping is not None:
            renamed = {base.variables[i]: _rename(mapping[AXES[i]], base.variables) for i in range(3) if i != axis}
            return base.substitute(renamed)
    return LineRestricted(base, line, axis)


def _rename(node: fl.Node, variables: Sequence[str]) -> fl.Node:
    if tuple(variables) == AXES:
        return node
    return fl.substitute(node, {a: fl.Var(v) for a, v in zip(AXES, variables)})


class SurfaceRestricted(Field):
    """``f`` on the graph ``coordinate[graph_axis] = graph(other coordinates)``."""

    def __init__(self, base: Field, graph_axis: int, graph: Field) -> None:
        self.base = base
        self.graph_axis = graph_axis
        self.graph = graph

    def _eval(self, c: Coords) -> np.ndarray:
        g = np.broadcast_to(self.graph._eval(c), c[0].shape)
        return self.base._eval(_replace(c, self.graph_axis, g))

    def partial(self, axis: int) -> Field:
        if axis == self.graph_axis:
            return ScalarField.constant(0.0)
        return Sum(
            (
                SurfaceRestricted(self.base.partial(axis), self.graph_axis, self.graph),
                Product(SurfaceRestricted(self.base.partial(self.graph_axis), self.graph_axis, self.graph), self.graph.partial(axis)),
            )
        )

    def exponent(self, axis: int) -> float | None:
        return 0.0 if axis == self.graph_axis else None

    def describe(self) -> str:
        return f"{self.base.describe()}|{AXES[self.graph_axis]}={self.graph.describe()}"

    @property
    def uses_finite_differences(self) -> bool:
        return self.base.uses_finite_differences


def restrict_to_graph(base: Field, graph_axis: int, graph: Field) -> Field:
    """``f`` with coordinate ``graph_axis`` replaced by ``graph`` (symbolic when possible)."""
    if isinstance(base, ScalarField) and isinstance(graph, ScalarField) and base.variables == graph.variables:
        var = base.variables[graph_axis]
        if var in fl.free_variables(graph.expr):
            raise DomainError("a graph may not depend on its own coordinate")
        return base.substitute({var: graph.expr})
    return SurfaceRestricted(base, graph_axis, graph)


# }}}


@dataclass(frozen=True)
class VectorField:
    """Three component fields (Cartesian or curvilinear)."""

    components: tuple[Field, Field, Field]

    def __post_init__(self) -> None:
        if len(self.components) != 3:
            raise DomainError("a vector field has exactly three components")

    @classmethod
    def parse(cls, texts: Sequence[str | float], variables: Sequence[str] = fl.CARTESIAN) -> VectorField:
        if len(texts) == 2:
            texts = (*texts, 0.0)
        comps = tuple(as_field(t, variables) for t in texts)
        return cls((comps[0], comps[1], comps[2]))

    def __getitem__(self, i: int) -> Field:
        return self.components[i]

    def describe(self) -> str:
        return "(" + ", ".join(c.describe() for c in self.components) + ")"

    def __str__(self) -> str:
        return self.describe()


# vim: foldmethod=marker
