"""General fractional integrals and derivatives of functions of one variable.

Every operator here reduces to one or two kernel convolutions evaluated by
:mod:`gfvc.quad`.  Derivatives of profiles come from the field language (or
are supplied); the Riemann-Liouville-type derivative is obtained from the
Caputo one plus the boundary term ``K(x) f(0)`` instead of differentiating a
quadrature result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fieldlang as fl
from .errors import DomainError
from .fields import (
    CallableField,
    ConvImage,
    Field,
    ScalarField,
    caputo_image,
    gfi_image,
)
from .kernels import KernelPair
from .quad import DEFAULT_SPEC, QuadSpec

X = 0


@dataclass(frozen=True)
class Profile1D:
    """A function on ``(0, ∞)`` together with its first derivative."""

    #: the function, evaluated along the first coordinate
    f: Field
    #: its derivative
    df: Field
    #: endpoint exponent of ``f`` at 0, in (-1, 0]
    q_f: float = 0.0
    #: endpoint exponent of ``df`` at 0, in (-1, 0]; NaN when ``df`` is not integrable at 0
    q_df: float = 0.0
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        for name, q in (("q_f", self.q_f), ("q_df", self.q_df)):
            if name == "q_df" and math.isnan(q):
                continue
            if not -1.0 < q <= 0.0:
                raise DomainError(f"{name} must lie in (-1, 0], got {q}")

    @classmethod
    def from_expr(cls, text: str, variable: str = "x") -> Profile1D:
        """Parse ``text`` in ``variable`` and differentiate it symbolically."""
        variables = (variable, "_y", "_z")
        f = ScalarField.parse(text, variables)
        df = f.partial(X)
        try:
            q_df = _endpoint(df)
        except DomainError:
            q_df = math.nan
        return cls(f, df, _endpoint(f), q_df, text)

    @classmethod
    def from_callables(
        cls,
        f: Callable[[np.ndarray], np.ndarray],
        df: Callable[[np.ndarray], np.ndarray] | None = None,
        q_f: float = 0.0,
        q_df: float = 0.0,
        label: str = "<callable>",
    ) -> Profile1D:
        """Wrap user functions; a missing ``df`` falls back to finite differences."""
        ff = CallableField(lambda x, y, z: f(x), exponents=(q_f, 0.0, 0.0), label=label)
        if df is None:
            dff = ff.partial(X)
        else:
            dff = CallableField(lambda x, y, z: df(x), exponents=(q_df, 0.0, 0.0), label=f"d[{label}]")
        return cls(ff, dff, q_f, q_df, label)

    @property
    def differentiable(self) -> bool:
        """Whether the derivative is integrable at 0, so that GF derivatives exist."""
        return not math.isnan(self.q_df)

    def require_derivative(self) -> None:
        if not self.differentiable:
            raise DomainError(f"the derivative of {self.label or 'the profile'} is not integrable at 0")

    @property
    def uses_finite_differences(self) -> bool:
        return self.df.uses_finite_differences

    def value(self, x: float) -> float:
        return float(self.f(x, 0.0, 0.0))

    def derivative(self, x: float) -> float:
        return float(self.df(x, 0.0, 0.0))

    def check_derivative(self, rng: np.random.Generator | None = None, points: int = 5, rtol: float = 1e-6) -> float:
        """Largest relative mismatch of ``df`` against central differences on random points in (0.1, 2).

        Raises :class:`DomainError` when it exceeds ``rtol``.
        """
        rng = rng or np.random.default_rng(0)
        xs = rng.uniform(0.1, 2.0, points)
        h = 1e-5
        fd = (self.f(xs + h, 0.0, 0.0) - self.f(xs - h, 0.0, 0.0)) / (2 * h)
        exact = self.df(xs, 0.0, 0.0)
        worst = float(np.max(np.abs(fd - exact) / np.maximum(1.0, np.abs(exact))))
        if worst > rtol:
            raise DomainError(f"df is not the derivative of f (relative mismatch {worst:.3g})")
        return worst


def _endpoint(f: ScalarField) -> float:
    return fl.endpoint_exponent(f.expr, f.variables[X])


def _as_profile(prof: Profile1D | str) -> Profile1D:
    return Profile1D.from_expr(prof) if isinstance(prof, str) else prof


def _at(field_: Field, x: float) -> float:
    return float(field_(x, 0.0, 0.0))


def _positive(x: float) -> None:
    if not x > 0:
        raise DomainError(f"evaluation point must be > 0, got {x}")


# {{{ operators at a point


def gfi(pair: KernelPair, prof: Profile1D | str, x: float, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """``(M * f)(x)``."""
    _positive(x)
    prof = _as_profile(prof)
    return _at(gfi_image(pair, prof.f, X, spec), x)


def gfd_caputo(pair: KernelPair, prof: Profile1D | str, x: float, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """``(K * f')(x)``; the plain derivative for the classical pair."""
    _positive(x)
    prof = _as_profile(prof)
    prof.require_derivative()
    if pair.k is None:
        return prof.derivative(x)
    return _at(ConvImage(pair.k, prof.df, X, spec), x)


def gfd_rl(pair: KernelPair, prof: Profile1D | str, x: float, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """Riemann-Liouville-type derivative ``d/dx (K * f)(x) = (K * f')(x) + K(x) f(0)``."""
    prof = _as_profile(prof)
    if prof.q_f < 0:
        raise DomainError("the RL-type derivative needs a finite value f(0)")
    caputo = gfd_caputo(pair, prof, x, spec)
    if pair.k is None:
        return caputo
    f0 = prof.value(0.0)
    return caputo + float(pair.k.value(x)) * f0


def _interval(conv: Callable[[float], float], a: float, b: float) -> float:
    if a < 0 or b < 0:
        raise DomainError("interval endpoints must be >= 0")
    if a == b:
        return 0.0
    lo, hi = min(a, b), max(a, b)
    value = conv(hi) - (conv(lo) if lo > 0 else 0.0)
    return math.copysign(1.0, b - a) * value


def gfi_interval(pair: KernelPair, prof: Profile1D | str, a: float, b: float, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """``sgn(b-a) (I(max) - I(min))`` with ``I(0) = 0``."""
    prof = _as_profile(prof)
    return _interval(lambda s: gfi(pair, prof, s, spec), a, b)


def gfd_interval(pair: KernelPair, prof: Profile1D | str, a: float, b: float, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """``sgn(b-a) (D*(max) - D*(min))`` with ``D*(0) = 0``."""
    prof = _as_profile(prof)
    return _interval(lambda s: gfd_caputo(pair, prof, s, spec), a, b)


# }}}

# {{{ checks


@dataclass(frozen=True)
class AdditivityResidual:
    integral: float
    derivative: float | None


def additivity_residual(
    pair: KernelPair, prof: Profile1D | str, a: float, b: float, c: float, spec: QuadSpec = DEFAULT_SPEC
) -> AdditivityResidual:
    """``|I[a,b] + I[b,c] - I[a,c]|`` and the same for the interval derivative."""
    if not 0 <= a < b < c:
        raise DomainError("additivity needs 0 <= a < b < c")
    prof = _as_profile(prof)
    ri = abs(gfi_interval(pair, prof, a, b, spec) + gfi_interval(pair, prof, b, c, spec) - gfi_interval(pair, prof, a, c, spec))
    rd = abs(gfd_interval(pair, prof, a, b, spec) + gfd_interval(pair, prof, b, c, spec) - gfd_interval(pair, prof, a, c, spec))
    return AdditivityResidual(ri, rd)


def integral_of_derivative(pair: KernelPair, prof: Profile1D | str, a: float, x: float, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """``I[a,x] D* f``, which should equal ``f(x) - f(a)``."""
    prof = _as_profile(prof)
    prof.require_derivative()
    inner = caputo_image(pair, prof.f, X, spec.tightened())
    outer = gfi_image(pair, inner, X, spec)
    return _interval(lambda s: _at(outer, s), a, x)


def derivative_of_integral(pair: KernelPair, g: Profile1D | str, x: float, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """``D* I g`` at ``x``, which should equal ``g(x)``."""
    _positive(x)
    g = _as_profile(g)
    inner = gfi_image(pair, g.f, X, spec.tightened())
    return _at(caputo_image(pair, inner, X, spec), x)


def interval_derivative_of_integral(
    pair: KernelPair, g: Profile1D | str, a: float, x: float, spec: QuadSpec = DEFAULT_SPEC
) -> float:
    """``D[a,x] I g``: the difference of ``D* I g`` between ``x`` and ``a``."""
    g = _as_profile(g)
    inner = gfi_image(pair, g.f, X, spec.tightened())
    outer = caputo_image(pair, inner, X, spec)
    return _interval(lambda s: _at(outer, s), a, x)


@dataclass(frozen=True)
class FTResiduals:
    #: ``|I[a,x] D* f - (f(x) - f(a))|``
    ft2: float
    #: ``|D* I g (x) - g(x)|``
    ft1: float


def ft_residuals(
    pair: KernelPair,
    prof: Profile1D | str,
    a: float,
    x: float,
    spec: QuadSpec = DEFAULT_SPEC,
    g: Profile1D | str | None = None,
) -> FTResiduals:
    """Residuals of both fundamental theorems; ``g`` defaults to the profile itself."""
    if not 0 <= a < x:
        raise DomainError("need 0 <= a < x")
    prof = _as_profile(prof)
    g = prof if g is None else _as_profile(g)
    ft2 = abs(integral_of_derivative(pair, prof, a, x, spec) - (prof.value(x) - prof.value(a)))
    ft1 = abs(derivative_of_integral(pair, g, x, spec) - g.value(x))
    return FTResiduals(ft2, ft1)


def leibniz_defect(pair: KernelPair, f: Profile1D | str, g: Profile1D | str, x: float, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """``D*(fg)(x) - D*f(x) g(x) - f(x) D*g(x)``; zero only for the classical pair."""
    f, g = _as_profile(f), _as_profile(g)
    fg = f.f * g.f
    dfg = f.df * g.f + f.f * g.df
    qf = min(f.q_f + g.q_f, 0.0)
    prod = Profile1D(fg, dfg, max(qf, -0.999999), 0.0, f"({f.label})*({g.label})")
    return gfd_caputo(pair, prod, x, spec) - gfd_caputo(pair, f, x, spec) * g.value(x) - f.value(x) * gfd_caputo(pair, g, x, spec)


def semigroup_defect(pair: KernelPair, prof: Profile1D | str, x: float, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """``D*(D* f)(x) - f'(x)``: the twice-applied derivative against the first-order one.

    For the classical pair the comparison is with ``f''``.
    """
    _positive(x)
    prof = _as_profile(prof)
    twice = caputo_image(pair, caputo_image(pair, prof.f, X, spec.tightened()), X, spec)
    target = prof.df.partial(X) if pair.classical else prof.df
    return _at(twice, x) - _at(target, x)


# }}}

# vim: foldmethod=marker
