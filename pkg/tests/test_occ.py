from __future__ import annotations

import math

import pytest

from gfvc import occ
from gfvc.errors import DomainError
from gfvc.geometry import Box3D, PolygonalChain, SimpleLine3D
from gfvc.gfc1d import gfi
from gfvc.kernels import CLASSICAL, make_pair
from gfvc.occ import CoordSystem
from gfvc.theorems import check_gauss, check_gradient_line, check_stokes
from gfvc.vectorops import KernelTriple, curl_regional, divergence, grad_regional

from . import oracles

HALF = make_pair("PowerRL", alpha=0.5)
KT_HALF = KernelTriple.uniform(HALF)
KT_CLASSICAL = KernelTriple.uniform(CLASSICAL)
#: fractional along the first coordinate only
KT_HALF_FIRST = KernelTriple.of(HALF, CLASSICAL, CLASSICAL)
CART = CoordSystem.cartesian()
CYL = CoordSystem.cylindrical()
SPH = CoordSystem.spherical()
P = (0.7, 1.3, 0.9)


def test_lame_coefficients():
    assert CYL.lame_at((2.0, 1.0, 3.0)) == (1.0, 2.0, 1.0)
    h = SPH.lame_at((2.0, 0.5, 1.0))
    assert h[:2] == (1.0, 2.0) and h[2] == pytest.approx(2 * math.sin(0.5), rel=1e-15)
    assert CoordSystem.by_name("Spherical") == SPH
    with pytest.raises(DomainError):
        CoordSystem.by_name("toroidal")
    with pytest.raises(DomainError):
        CoordSystem.custom(("u", "v", "w"), ("1", "u - 1", "1"))
    elliptic = CoordSystem.custom(("u", "v", "w"), ("1 + u", "1", "2"))
    assert elliptic.lame_at((1.0, 0.0, 0.0)) == (2.0, 1.0, 2.0)


# {{{ operators


def test_gfi_hat_examples():
    assert occ.gfi_hat(CYL, CLASSICAL, 1, 1.0, (2.0, math.pi / 2, 0.5)) == pytest.approx(math.pi, rel=1e-12)
    assert occ.gfi_hat(SPH, CLASSICAL, 1, 1.0, (1.0, math.pi, 0.5)) == pytest.approx(math.pi, rel=1e-12)
    assert occ.gfi_hat(CART, HALF, 0, "x^2", P) == gfi(HALF, "x^2", P[0])
    # ∫_1^2 r dφ-weight along r is ∫ 1 dr for cylindrical H_r = 1
    assert occ.gfi_hat_interval(CYL, CLASSICAL, 0, 1.0, (0.0, 0.3, 0.5), 1.0, 2.0) == pytest.approx(1.0, rel=1e-12)


def test_grad_occ_examples():
    g = occ.grad_occ(SPH, KT_CLASSICAL, "r", (1.7, 0.8, 0.4))
    assert g[0] == pytest.approx(1.0, rel=1e-12) and g[1] == 0.0 and g[2] == 0.0
    g = occ.grad_occ(SPH, KT_HALF_FIRST, "r", (1.0, 0.8, 0.4))
    assert g[0] == pytest.approx(oracles.H15, rel=1e-10)
    g = occ.grad_occ(CYL, KT_CLASSICAL, "phi", (2.0, 0.6, 0.4))
    assert g[1] == pytest.approx(0.5, rel=1e-12)


def test_div_occ_examples():
    assert occ.div_occ(SPH, KT_CLASSICAL, ["r", "0", "0"], (1.0, 0.8, 0.4)) == pytest.approx(3.0, abs=1e-8)
    assert occ.div_occ(CYL, KT_CLASSICAL, ["r", "0", "0"], (2.0, 0.8, 0.4)) == pytest.approx(2.0, abs=1e-8)
    # the derivative acts on r^2 sin(theta), so sin(theta) cancels against the prefactor
    value = occ.div_occ(SPH, KT_HALF_FIRST, ["1", "0", "0"], (1.0, 0.8, 0.4))
    assert value == pytest.approx(oracles.D05_X2, rel=1e-10)


def test_leibniz_rule_fails_in_curvilinear_divergence():
    product = occ.div_occ(SPH, KT_HALF_FIRST, ["1", "0", "0"], (1.0, 0.8, 0.4))
    split = 0.0 + 2.0 / 1.0  # D^{0.5} of a constant plus (2/r) F_r
    assert abs(product - split) > 0.1


def test_curl_occ_examples():
    c = occ.curl_occ(CYL, KT_CLASSICAL, ["0", "r", "0"], (1.0, 0.5, 0.5))
    assert c[2] == pytest.approx(2.0, abs=1e-8)
    assert abs(c[0]) < 1e-12 and abs(c[1]) < 1e-12
    q = (1.3, 0.8, 0.4)
    # grad U for U = r: only the radial component r^0.5 / Gamma(1.5) survives
    grad_field = [f"{1 / math.gamma(1.5)!r}*r^0.5", "0", "0"]
    assert occ.grad_occ(SPH, KT_HALF, "r", q)[0] == pytest.approx(q[0] ** 0.5 / math.gamma(1.5), rel=1e-10)
    assert occ.curl_occ(SPH, KT_HALF, grad_field, q).max_abs() < 1e-10


def test_printed_curl_variant_differs_only_in_first_component():
    F = ["r*theta", "theta*phi", "r*phi"]
    q = (1.2, 0.9, 0.7)
    general = occ.curl_occ(SPH, KT_CLASSICAL, F, q)
    printed = occ.curl_occ_as_printed(SPH, KT_CLASSICAL, F, q)
    assert printed[1] == general[1] and printed[2] == general[2]
    assert abs(printed[0] - general[0]) > 1e-3
    with pytest.raises(DomainError):
        occ.curl_occ_as_printed(CART, KT_CLASSICAL, F, q)


@pytest.mark.parametrize(
    "q", [(0.0, 0.5, 0.5), (1.0, 0.0, 0.5), (1.0, math.pi, 0.5)], ids=["origin", "north pole", "south pole"]
)
def test_singular_points_are_refused(q):
    with pytest.raises(DomainError):
        occ.div_occ(SPH, KT_CLASSICAL, ["r", "0", "0"], q)
    with pytest.raises(DomainError):
        occ.grad_occ(SPH, KT_CLASSICAL, "r", q)
    with pytest.raises(DomainError):
        occ.curl_occ(SPH, KT_CLASSICAL, ["0", "r", "0"], q)


# }}}

# {{{ Cartesian reduction


def test_cartesian_reduction_operators():
    a = occ.grad_occ(CART, KT_HALF, "x*y + z^2", P)
    b = grad_regional(KT_HALF, "x*y + z^2", P)
    assert max(abs(u - v) for u, v in zip(a, b)) < 1e-12
    F = ["x^2", "x*y", "y*z"]
    assert abs(occ.div_occ(CART, KT_HALF, F, P) - divergence(KT_HALF, F, P)) < 1e-12
    for G in (["y*z", "x^2", "x*y*z"], ["y^2 + z", "x*z", "x^1.5"], ["z^3", "x + y^2", "y*x^2"]):
        a = occ.curl_occ(CART, KT_HALF, G, P)
        b = curl_regional(KT_HALF, G, P)
        assert max(abs(u - v) for u, v in zip(a, b)) < 1e-12


def test_cartesian_reduction_theorems():
    cube = Box3D(0, 1, 0, 1, 0, 1)
    a, b = occ.check_gauss_occ(CART, KT_HALF, ["x", "0", "0"], cube), check_gauss(KT_HALF, ["x", "0", "0"], cube)
    assert abs(a.lhs - b.lhs) < 1e-12 and abs(a.rhs - b.rhs) < 1e-12
    square = occ.flat_sector((0, 1), (0, 1), 0.0)
    a = occ.check_stokes_occ(CART, KT_HALF, ["-y", "x", "0"], square)
    b = check_stokes(KT_HALF, ["-y", "x", "0"], square)
    assert abs(a.lhs - b.lhs) < 1e-12 and abs(a.rhs - b.rhs) < 1e-12
    line = SimpleLine3D.graph(0, 1, y="x")
    a = occ.check_gradient_occ(CART, KT_HALF, "x*y", line)
    b = check_gradient_line(KT_HALF, "x*y", line)
    assert abs(a.lhs - b.lhs) < 1e-12 and a.rhs == b.rhs


# }}}

# {{{ theorems


def test_gradient_theorem_cylindrical():
    radial = PolygonalChain(((0, 0.4, 0.5), (1, 0.4, 0.5)))
    r = occ.check_gradient_occ(CYL, KT_HALF, "r^2", radial)
    assert r.rhs == 1.0 and r.abs_residual < 1e-5
    r = occ.check_gradient_occ(CYL, KT_HALF, "3", radial)
    assert r.lhs == 0.0 and r.rhs == 0.0
    assert r.theorem == "gradient-line-occ" and "Cylindrical" in r.geometry


def test_stokes_theorem_flat_sector():
    S = occ.flat_sector((0.5, 1.0), (0.0, math.pi / 2), 0.3)
    r = occ.check_stokes_occ(CYL, KT_CLASSICAL, ["0", "r", "0"], S)
    area = 0.5 * (math.pi / 2) * (1.0 - 0.25)
    assert r.lhs == pytest.approx(2 * area, rel=1e-9) and r.rhs == pytest.approx(2 * area, rel=1e-9)
    r = occ.check_stokes_occ(CYL, KT_HALF, ["0", "0", "4"], S)
    assert r.lhs == 0.0 and r.rhs == 0.0
    r = occ.check_stokes_occ(CYL, KT_HALF, ["phi", "r*z", "0"], S)
    assert r.rel_residual < 1e-4


def test_gauss_theorem_classical_sector():
    W = occ.sector_box((0, 1), (0, math.pi / 2), (0, 1))
    r = occ.check_gauss_occ(CYL, KT_CLASSICAL, ["r", "0", "0"], W)
    assert r.lhs == pytest.approx(math.pi / 2, rel=1e-9) and r.rhs == pytest.approx(math.pi / 2, rel=1e-9)


def test_gauss_theorem_classical_spherical_shell():
    W = Box3D(0.5, 1, 0.3, 2.5, 0, 1)
    r = occ.check_gauss_occ(SPH, KT_CLASSICAL, ["r", "0", "0"], W)
    # div = 3 over the shell piece: 3 * (r^3/3) * (-cos theta) * phi
    volume = (1 - 0.125) / 3 * (math.cos(0.3) - math.cos(2.5)) * 1
    assert r.lhs == pytest.approx(3 * volume, rel=1e-8) and r.rhs == pytest.approx(3 * volume, rel=1e-8)


def test_gauss_theorem_fractional_sector():
    W = occ.sector_box((0.5, 1), (0, math.pi / 2), (0, 1))
    r = occ.check_gauss_occ(CYL, KT_HALF, ["0", "0", "z"], W)
    assert r.abs_residual < 1e-4
    assert r.theorem == "gauss-occ"


# }}}
