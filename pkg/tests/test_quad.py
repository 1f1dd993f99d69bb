from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gfvc.errors import AccuracyError, DomainError
from gfvc.quad import DEFAULT_SPEC, QuadSpec, UnitKernel, convolve, integrate_regular

from . import oracles


@dataclass(frozen=True)
class RefPower:
    """Power kernel built from ``math.gamma``, independent of the package kernels."""

    order: float

    @property
    def exponent(self) -> float:
        return self.order - 1.0

    def value(self, t):
        return np.power(t, self.order - 1.0) / math.gamma(self.order)


def power_fn(order: float):
    return lambda t: np.power(t, order - 1.0) / math.gamma(order)


def test_convolve_examples():
    assert convolve(RefPower(0.5), lambda t: np.ones_like(t), 1.0) == pytest.approx(oracles.H15, rel=1e-12)
    assert convolve(RefPower(0.5), power_fn(0.5), 1.0, q=-0.5) == pytest.approx(1.0, rel=1e-12)
    assert convolve(UnitKernel(), lambda t: t, 2.0) == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("a", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("b", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("x", [0.5, 1.0, 3.0])
def test_power_law_oracle_family(a, b, x):
    value = convolve(RefPower(a), power_fn(b), x, q=b - 1.0)
    assert value == pytest.approx(oracles.h(a + b, x), rel=1e-8)


def test_convolve_error_estimate_is_honest():
    spec = DEFAULT_SPEC
    for a, b, x in [(0.25, 0.75, 3.0), (0.5, 0.25, 0.5)]:
        value, err = convolve(RefPower(a), power_fn(b), x, spec, q=b - 1.0, return_error=True)
        truth = oracles.h(a + b, x)
        assert err <= max(spec.abs_tol, spec.rel_tol * abs(value)) * 10
        assert abs(value - truth) <= max(10 * err, 1e-13)


@given(
    st.floats(min_value=-3.0, max_value=3.0),
    st.floats(min_value=-3.0, max_value=3.0),
    st.floats(min_value=0.1, max_value=5.0),
)
def test_convolution_is_linear(a, b, x):
    k = RefPower(0.5)
    f = lambda t: np.exp(-t)  # noqa: E731
    g = lambda t: t * t  # noqa: E731
    combo = convolve(k, lambda t: a * f(t) + b * g(t), x)
    parts = a * convolve(k, f, x) + b * convolve(k, g, x)
    scale = max(1.0, abs(combo))
    assert abs(combo - parts) <= 2 * (DEFAULT_SPEC.abs_tol + DEFAULT_SPEC.rel_tol * scale) * 10


def test_halving_tolerance_never_hurts():
    cases = [(a, b, x) for a in (0.25, 0.5, 0.75) for b in (0.25, 0.75) for x in (0.5, 3.0)]
    for a, b, x in cases:
        truth = oracles.h(a + b, x)
        errs = []
        for tol in (1e-6, 5e-7, 2.5e-7, 1.25e-7):
            spec = QuadSpec(abs_tol=tol, rel_tol=tol)
            errs.append(abs(convolve(RefPower(a), power_fn(b), x, spec, q=b - 1.0) - truth))
        for coarse, fine in zip(errs, errs[1:]):
            assert fine <= coarse + 1e-15


def test_convolve_vectorized_shape():
    xs = np.array([[0.5, 1.0], [2.0, 3.0]])
    out = convolve(RefPower(0.5), lambda t: np.ones_like(t), xs)
    assert out.shape == xs.shape
    assert out[0, 1] == pytest.approx(oracles.H15, rel=1e-12)


def test_convolve_domain():
    with pytest.raises(DomainError):
        convolve(UnitKernel(), lambda t: t, 0.0)


def test_convolve_reports_non_convergence():
    spec = QuadSpec(max_panels=2, nodes_per_panel=2, abs_tol=1e-15, rel_tol=1e-15)
    with pytest.raises(AccuracyError) as info:
        convolve(UnitKernel(), lambda t: np.sin(40 * t), 3.0, spec)
    assert math.isfinite(info.value.best)


def test_integrate_regular_examples():
    assert integrate_regular(lambda x: x * x, 0, 1) == pytest.approx(1 / 3, rel=1e-14)
    assert integrate_regular(np.sin, 0, math.pi) == pytest.approx(2.0, rel=1e-14)
    value = integrate_regular(lambda x: (1 - x) ** -0.5 / math.sqrt(math.pi), 0, 1, right_exponent=-0.5)
    assert value == pytest.approx(1.1283791670955126, rel=1e-12)


def test_integrate_regular_bounds():
    assert integrate_regular(np.cos, 1.0, 1.0) == 0.0
    with pytest.raises(DomainError):
        integrate_regular(np.cos, 2.0, 1.0)


@given(st.floats(min_value=0.0, max_value=3.0), st.floats(min_value=0.01, max_value=3.0), st.integers(min_value=0, max_value=6))
def test_integrate_regular_polynomials(a, width, n):
    b = a + width
    exact = (b ** (n + 1) - a ** (n + 1)) / (n + 1)
    assert integrate_regular(lambda x: x**n, a, b) == pytest.approx(exact, rel=1e-12, abs=1e-14)


def test_quadspec_validation():
    with pytest.raises(DomainError):
        QuadSpec(nodes_per_panel=1)
    with pytest.raises(DomainError):
        QuadSpec(abs_tol=0.0)
    assert DEFAULT_SPEC.tightened().rel_tol == pytest.approx(DEFAULT_SPEC.rel_tol / 10)


def test_results_are_deterministic():
    f = lambda t: np.exp(-t) * np.sqrt(t)  # noqa: E731
    assert convolve(RefPower(0.3), f, 2.5, q=0.5) == convolve(RefPower(0.3), f, 2.5, q=0.5)
