from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gfvc import gfc1d
from gfvc.errors import DomainError
from gfvc.gfc1d import Profile1D
from gfvc.kernels import CLASSICAL, enabled_pairs, eval_kernel, make_pair

from . import oracles

HALF = make_pair("PowerRL", alpha=0.5)
BESSEL = make_pair("BesselPair", alpha=0.5)


def test_gfi_examples():
    assert gfc1d.gfi(HALF, "1", 1.0) == pytest.approx(oracles.H15, rel=1e-12)
    assert gfc1d.gfi(CLASSICAL, "x", 2.0) == pytest.approx(2.0, rel=1e-14)
    h05 = f"x^(-0.5)/{math.sqrt(math.pi)!r}"
    assert gfc1d.gfi(HALF, h05, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_gfd_caputo_examples():
    assert gfc1d.gfd_caputo(HALF, "x", 1.0) == pytest.approx(oracles.H15, rel=1e-12)
    assert gfc1d.gfd_caputo(HALF, "x^2", 1.0) == pytest.approx(oracles.D05_X2, rel=1e-12)


@pytest.mark.parametrize("pair", enabled_pairs(), ids=lambda p: p.label)
def test_gfd_of_constant_vanishes(pair):
    assert gfc1d.gfd_caputo(pair, "3.5", 1.7) == 0.0


def test_gfd_rl_examples():
    assert gfc1d.gfd_rl(HALF, "1", 1.0) == pytest.approx(0.5641895835477563, rel=1e-14)
    assert gfc1d.gfd_rl(HALF, "x", 1.0) == pytest.approx(oracles.H15, rel=1e-12)
    assert gfc1d.gfd_rl(CLASSICAL, "x^2", 3.0) == pytest.approx(6.0, rel=1e-14)


def test_gfd_rl_refuses_unbounded_profiles():
    with pytest.raises(DomainError):
        gfc1d.gfd_rl(HALF, "x^(-0.5)", 1.0)


@pytest.mark.parametrize("pair", [HALF, BESSEL, make_pair("ErfcPair", **{"lambda": 1.0})], ids=lambda p: p.label)
@pytest.mark.parametrize("text", ["1 + x", "exp(-x)", "cos(x) + x^2"])
def test_rl_minus_caputo_is_kernel_times_initial_value(pair, text):
    x = 1.3
    prof = Profile1D.from_expr(text)
    gap = gfc1d.gfd_rl(pair, prof, x) - gfc1d.gfd_caputo(pair, prof, x)
    assert gap == pytest.approx(eval_kernel(pair, "K", x) * prof.value(0.0), abs=1e-9)


def test_gfi_interval_examples():
    assert gfc1d.gfi_interval(HALF, "1", 0, 1) == pytest.approx(oracles.H15, rel=1e-12)
    assert gfc1d.gfi_interval(BESSEL, "x^2", 0.7, 0.7) == 0.0
    assert gfc1d.gfi_interval(HALF, "1", 1, 0) == pytest.approx(-oracles.H15, rel=1e-12)


def test_gfd_interval_examples():
    assert gfc1d.gfd_interval(HALF, "x", 0, 1) == pytest.approx(oracles.H15, rel=1e-12)
    assert gfc1d.gfd_interval(BESSEL, "2", 0.3, 1.9) == 0.0
    assert gfc1d.gfd_interval(HALF, "x^2", 1.2, 1.2) == 0.0


def test_additivity_examples():
    assert gfc1d.additivity_residual(HALF, "x", 0, 0.5, 1).integral < 1e-9
    assert gfc1d.additivity_residual(CLASSICAL, "x^2", 1, 2, 3).integral < 1e-10
    r = gfc1d.additivity_residual(BESSEL, "1", 0.2, 0.7, 1.5)
    assert r.integral < 1e-7 and r.derivative < 1e-7


@given(st.one_of(st.just(0.0), st.floats(min_value=1e-3, max_value=1.0)), st.floats(min_value=0.05, max_value=1.0), st.floats(min_value=0.05, max_value=1.0))
def test_additivity_property(a, d1, d2):
    r = gfc1d.additivity_residual(HALF, "x^1.5 + 1", a, a + d1, a + d1 + d2)
    assert r.integral < 1e-9 and r.derivative < 1e-9


def test_ft_residual_examples():
    assert gfc1d.ft_residuals(HALF, "x^2", 0, 1).ft2 < 1e-6
    assert gfc1d.ft_residuals(CLASSICAL, "x^3", 0.5, 2).ft2 < 1e-8
    assert gfc1d.ft_residuals(HALF, "x", 0, 1, g="1").ft1 < 1e-6


@pytest.mark.parametrize("pair", [HALF, BESSEL, make_pair("DampedPower", alpha=0.5, **{"lambda": 1.0})], ids=lambda p: p.label)
@pytest.mark.parametrize("text", ["x", "x^2", "x^1.5"])
def test_second_fundamental_theorem(pair, text):
    for a, x in ((0.0, 1.0), (0.5, 2.0)):
        assert gfc1d.ft_residuals(pair, text, a, x, g="x").ft2 < 1e-6


def test_remark_negative_control():
    # the unshifted first theorem does not transfer to [a, x] with a > 0
    value = gfc1d.interval_derivative_of_integral(HALF, "1", 0.5, 1.0)
    assert abs(value - 1.0) > 0.1


def test_leibniz_defect_examples():
    assert gfc1d.leibniz_defect(HALF, "x", "x", 1.0) == pytest.approx(oracles.LEIBNIZ_X_X, abs=1e-10)
    assert gfc1d.leibniz_defect(CLASSICAL, "sin(x)", "exp(x)", 1.3) == pytest.approx(0.0, abs=1e-10)
    assert gfc1d.leibniz_defect(HALF, "x", "1", 1.0) == pytest.approx(0.0, abs=1e-8)


def test_semigroup_defect_examples():
    assert gfc1d.semigroup_defect(HALF, "x^0.5", 1.0) == pytest.approx(-0.5, abs=1e-8)
    assert gfc1d.semigroup_defect(HALF, "x", 1.0) == pytest.approx(0.0, abs=1e-6)
    assert gfc1d.semigroup_defect(CLASSICAL, "x^3", 1.0) == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0, 2.5])
def test_power_rule(alpha, mu):
    pair = make_pair("PowerRL", alpha=alpha)
    x = 1.7
    assert gfc1d.gfi(pair, f"x^{mu}", x) == pytest.approx(oracles.riemann_liouville_power(alpha, mu, x), rel=1e-9)
    assert gfc1d.gfd_caputo(pair, f"x^{mu}", x) == pytest.approx(oracles.caputo_power(alpha, mu, x), rel=1e-9)


def test_alpha_to_one_limit_is_monotone():
    errors_i, errors_d = [], []
    for alpha in (0.9, 0.99, 0.999):
        pair = make_pair("PowerRL", alpha=alpha)
        errors_i.append(abs(gfc1d.gfi(pair, "x^2", 1.0) - 1 / 3))
        errors_d.append(abs(gfc1d.gfd_caputo(pair, "x^2", 1.0) - 2.0))
    assert errors_i[0] > errors_i[1] > errors_i[2]
    assert errors_d[0] > errors_d[1] > errors_d[2]


def test_profile_derivative_check():
    prof = Profile1D.from_expr("sin(x)*x^2")
    assert prof.check_derivative(np.random.default_rng(1)) < 1e-6
    bad = Profile1D.from_callables(np.sin, np.sin)
    with pytest.raises(DomainError):
        bad.check_derivative()


def test_finite_difference_fallback_is_flagged():
    prof = Profile1D.from_callables(lambda x: x * x)
    assert prof.uses_finite_differences
    assert gfc1d.gfd_caputo(HALF, prof, 1.0) == pytest.approx(oracles.D05_X2, rel=1e-6)
    assert not Profile1D.from_expr("x^2").uses_finite_differences


def test_point_must_be_positive():
    with pytest.raises(DomainError):
        gfc1d.gfi(HALF, "x", 0.0)
