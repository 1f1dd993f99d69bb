from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gfvc.errors import DomainError
from gfvc.kernels import (
    CLASSICAL,
    SONIN_XS,
    Family,
    catalog,
    enabled_pairs,
    eval_kernel,
    family_tolerance,
    make_pair,
    sonin_residual,
)

from . import oracles

ENABLED_LABELS = {
    "PowerRL(alpha=0.25)",
    "PowerRL(alpha=0.5)",
    "PowerRL(alpha=0.75)",
    "DampedPower(alpha=0.5,lambda=1)",
    "BesselPair(alpha=0.5)",
    "KummerPair(alpha=0.5,beta=0.5,lambda=1)",
    "ErfcPair(lambda=1)",
    "HanygaPair(alpha=0.3,beta=0.7)",
    "Classical()",
}


def test_power_rl_decomposition():
    p = make_pair("PowerRL", alpha=0.5)
    assert p.m_exponent == -0.5
    assert p.m_regular(1.0) == pytest.approx(0.5641895835477563, rel=1e-15)
    assert p.k_exponent == -0.5


def test_bessel_pair_m_closed_form():
    p = make_pair("BesselPair", alpha=0.5)
    for t in (0.01, 0.3, 1.0, 4.0, 9.0):
        expected = math.cos(2 * math.sqrt(t)) / math.sqrt(math.pi * t)
        assert eval_kernel(p, "M", t) == pytest.approx(expected, rel=1e-12, abs=1e-14)


def test_damped_power_with_zero_rate_is_power_rl():
    d = make_pair("DampedPower", alpha=0.5, **{"lambda": 0.0})
    p = make_pair("PowerRL", alpha=0.5)
    t = np.linspace(0.01, 10.0, 200)
    assert np.array_equal(eval_kernel(d, "M", t), eval_kernel(p, "M", t))


def test_damped_power_converges_to_power_rl():
    p = make_pair("PowerRL", alpha=0.5)
    t = np.linspace(0.01, 10.0, 200)
    devs = []
    for lam in (1e-2, 1e-4):
        d = make_pair("DampedPower", alpha=0.5, **{"lambda": lam})
        devs.append(float(np.max(np.abs(eval_kernel(d, "K", t) - eval_kernel(p, "K", t)))))
    assert devs[1] < devs[0] < 0.1


def test_eval_kernel_examples():
    p = make_pair("PowerRL", alpha=0.5)
    assert eval_kernel(p, "M", 1.0) == pytest.approx(0.5641895835477563, rel=1e-15)
    assert eval_kernel(p, "K", 4.0) == pytest.approx(0.2820947917738781, rel=1e-15)


@pytest.mark.parametrize("t", [0.05, 0.5, 1.0, 3.0])
def test_erfc_pair_k_formula(t):
    lam = 1.0
    p = make_pair("ErfcPair", **{"lambda": lam})
    expected = 1 / math.sqrt(math.pi * t) - lam * math.exp(lam * lam * t) * oracles.erfc(lam * math.sqrt(t))
    assert eval_kernel(p, "K", t) == pytest.approx(expected, rel=1e-12)


def test_eval_kernel_domain():
    p = make_pair("PowerRL", alpha=0.5)
    with pytest.raises(DomainError):
        eval_kernel(p, "M", 0.0)
    with pytest.raises(DomainError):
        eval_kernel(CLASSICAL, "K", 1.0)


def test_sonin_examples():
    assert sonin_residual(make_pair("PowerRL", alpha=0.5), [0.5, 1, 5]).max_abs_residual < 1e-10
    assert sonin_residual(make_pair("BesselPair", alpha=0.5), [0.5, 1, 2]).max_abs_residual < 1e-7
    assert sonin_residual(make_pair("HanygaPair", alpha=0.3, beta=0.7), [1.0]).max_abs_residual < 1e-7


def test_catalog_admission():
    entries = catalog()
    enabled = {e.pair.label for e in entries if e.enabled}
    assert enabled == ENABLED_LABELS
    for e in entries:
        if e.enabled:
            assert e.report is not None
            assert e.report.xs == SONIN_XS
            assert e.report.max_abs_residual < family_tolerance(e.pair)
            assert -1.0 < e.pair.m_exponent <= 0.0


def test_mittag_leffler_pair_is_disabled_with_report():
    (entry,) = [e for e in catalog() if e.pair.family is Family.MITTAG_LEFFLER]
    assert not entry.enabled
    assert entry.report is not None and entry.report.max_abs_residual > 1e-3
    assert "exceeds" in entry.note


@pytest.mark.parametrize("pair", [p for p in enabled_pairs() if not p.classical], ids=lambda p: p.label)
def test_exchanged_pair_also_passes(pair):
    swapped = pair.exchanged()
    assert swapped.m is pair.k and swapped.k is pair.m
    report = sonin_residual(swapped, SONIN_XS)
    assert report.max_abs_residual < family_tolerance(pair)


def test_classical_cannot_be_exchanged():
    with pytest.raises(DomainError):
        CLASSICAL.exchanged()
    assert sonin_residual(CLASSICAL, [1.0, 2.0]).max_abs_residual == 0.0


@given(st.floats(min_value=0.05, max_value=0.95), st.floats(min_value=0.01, max_value=20.0))
def test_power_pairs_satisfy_sonin(alpha, x):
    assert sonin_residual(make_pair("PowerRL", alpha=alpha), [x]).max_abs_residual < 1e-10


def test_make_pair_validation():
    with pytest.raises(DomainError, match="unknown kernel family"):
        make_pair("Foo", alpha=0.5)
    with pytest.raises(DomainError, match="missing"):
        make_pair("PowerRL")
    with pytest.raises(DomainError):
        make_pair("PowerRL", alpha=1.5)
    with pytest.raises(DomainError, match="unexpected"):
        make_pair("PowerRL", alpha=0.5, beta=0.1)
