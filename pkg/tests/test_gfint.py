from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gfvc import fieldlang as fl
from gfvc import gfc1d
from gfvc.errors import DomainError
from gfvc.fields import ScalarField, caputo_image
from gfvc.geometry import (
    Box3D,
    PiecewiseSimpleLine,
    PiecewiseSimpleSurface,
    PolygonalChain,
    Segment,
    SimpleLine3D,
    SimpleRegion2D,
    SurfacePatch,
    ZSimpleRegion3D,
)
from gfvc.gfint import circulation, double_gfi, flux, line_gfi, surface_gfi, triple_gfi
from gfvc.kernels import CLASSICAL, make_pair
from gfvc.vectorops import KernelTriple, grad_regional_field

from . import oracles

HALF = make_pair("PowerRL", alpha=0.5)
KT_HALF = KernelTriple.uniform(HALF)
KT_CLASSICAL = KernelTriple.uniform(CLASSICAL)
UNIT_SQUARE = SimpleRegion2D.rectangle(0, 1, 0, 1)
UNIT_CUBE = Box3D(0, 1, 0, 1, 0, 1)


def flat(region: SimpleRegion2D, axis: int = 2, level: float = 0.0, orientation: int = 1) -> PiecewiseSimpleSurface:
    return PiecewiseSimpleSurface((SurfacePatch(axis, fl.num(level), region, orientation),))


# {{{ line integrals


def test_line_gfi_examples():
    seg = Segment((0, 0, 0), (2, 0, 0))
    assert line_gfi(KT_CLASSICAL, ["1", "0", "0"], seg).value == pytest.approx(2.0)
    seg = Segment((0, 0, 0), (1, 0, 0))
    assert line_gfi(KT_HALF, ["1", "0", "0"], seg).value == pytest.approx(oracles.H15, rel=1e-12)
    assert line_gfi(KT_HALF, ["1", "0", "0"], seg.reversed()).value == pytest.approx(-oracles.H15, rel=1e-12)


def test_circulation_examples():
    boundary = UNIT_SQUARE.boundary()
    assert circulation(KT_CLASSICAL, ["-y", "x", "0"], boundary) == pytest.approx(2.0)
    assert circulation(KT_HALF, ["-y", "x", "0"], boundary) == pytest.approx(oracles.FOUR_OVER_SQRT_PI, rel=1e-10)
    other = SimpleRegion2D.rectangle(0.5, 2, 0.25, 1.5).boundary()
    assert circulation(KT_HALF, ["3", "-1", "2"], other) == pytest.approx(0.0, abs=1e-12)


def test_circulation_needs_closed_line():
    with pytest.raises(DomainError):
        circulation(KT_HALF, ["1", "0", "0"], Segment((0, 0, 0), (1, 0, 0)))


def test_classical_line_integrals():
    chain = PolygonalChain(((0, 0, 0), (1, 0, 0), (1, 2, 0), (1, 2, 3)))
    assert line_gfi(KT_CLASSICAL, ["x^2", "x*y", "z"], chain).value == pytest.approx(1 / 3 + 2 + 4.5, rel=1e-12)
    curve = SimpleLine3D.graph(0, 1, y="x^2")
    assert line_gfi(KT_CLASSICAL, ["y", "x", "0"], curve).value == pytest.approx(1.0, rel=1e-10)
    diag = SimpleLine3D.graph(0, 2, y="x", z="x")
    # F = grad(x y z), endpoint value 8
    assert line_gfi(KT_CLASSICAL, ["y*z", "x*z", "x*y"], diag).value == pytest.approx(8.0, rel=1e-10)


def test_closed_loop_of_regional_gradient_vanishes():
    F = grad_regional_field(KT_HALF, ScalarField.parse("x*y^2 + x^1.5"))
    loop = SimpleRegion2D.rectangle(0.25, 1, 0.5, 1.5).boundary()
    assert abs(line_gfi(KT_HALF, F, loop).value) < 1e-5


@settings(max_examples=10)
@given(st.lists(st.tuples(st.sampled_from([0, 1, 2]), st.floats(min_value=0.1, max_value=1.0)), min_size=2, max_size=5))
def test_line_gfi_is_additive_over_concatenation(steps):
    verts = [(0.0, 0.0, 0.0)]
    for axis, d in steps:
        p = list(verts[-1])
        p[axis] += d
        verts.append(tuple(p))
    F = ["x*y + 1", "z + x", "y^2"]
    whole = line_gfi(KT_HALF, F, PolygonalChain(tuple(verts))).value
    cut = len(verts) // 2
    first = line_gfi(KT_HALF, F, PolygonalChain(tuple(verts[: cut + 1]))).value
    second = line_gfi(KT_HALF, F, PolygonalChain(tuple(verts[cut:]))).value
    assert whole == pytest.approx(first + second, rel=1e-12, abs=1e-14)


def test_piecewise_line_contributions():
    L = PiecewiseSimpleLine((Segment((0, 0, 0), (1, 0, 0)), SimpleLine3D.graph(1, 2, y="x - 1")))
    r = line_gfi(KT_CLASSICAL, ["1", "1", "0"], L)
    assert r.contributions == pytest.approx((1.0, 2.0))
    assert r.value == pytest.approx(3.0)


# }}}

# {{{ double and surface integrals


def test_double_gfi_examples():
    assert double_gfi(CLASSICAL, CLASSICAL, "1", UNIT_SQUARE) == pytest.approx(1.0)
    assert double_gfi(HALF, HALF, "1", UNIT_SQUARE) == pytest.approx(oracles.FOUR_OVER_PI, rel=1e-10)
    assert double_gfi(CLASSICAL, CLASSICAL, "1", SimpleRegion2D.between(0, 1, 0, "x")) == pytest.approx(0.5)


def test_double_gfi_both_orders_on_region():
    region = SimpleRegion2D.between(0, 1, 0, "x", c=0, d=1, left="y", right=1)
    f = "x*y + 1"
    a = double_gfi(CLASSICAL, CLASSICAL, f, region, outer=0)
    b = double_gfi(CLASSICAL, CLASSICAL, f, region, outer=1)
    assert a == pytest.approx(b, rel=1e-10)
    assert a == pytest.approx(1 / 8 + 0.5, rel=1e-10)


def test_surface_gfi_examples():
    assert surface_gfi(KT_CLASSICAL, ["0", "0", "1"], flat(UNIT_SQUARE)).value == pytest.approx(1.0)
    assert surface_gfi(KT_HALF, ["0", "0", "1"], flat(UNIT_SQUARE)).value == pytest.approx(oracles.FOUR_OVER_PI, rel=1e-10)
    side = SimpleRegion2D.rectangle(0.5, 1, 0, 2, axes=(1, 2))
    value = surface_gfi(KT_CLASSICAL, ["1 + y*z", "0", "0"], flat(side, axis=0)).value
    assert value == pytest.approx(1.75, rel=1e-12)


def test_surface_orientation_flips_sign():
    up = surface_gfi(KT_HALF, ["0", "0", "x + y"], flat(UNIT_SQUARE)).value
    down = surface_gfi(KT_HALF, ["0", "0", "x + y"], flat(UNIT_SQUARE, orientation=-1)).value
    assert down == -up != 0.0


def test_flux_examples():
    assert flux(KT_HALF, ["x", "0", "0"], UNIT_CUBE) == pytest.approx(oracles.FOUR_OVER_PI, rel=1e-10)
    assert flux(KT_CLASSICAL, ["x", "y", "z"], UNIT_CUBE) == pytest.approx(3.0)
    assert flux(KT_HALF, ["x*y", "y + 1", "0"], flat(UNIT_SQUARE)) == 0.0


def test_classical_flux_through_graph():
    region = UNIT_SQUARE
    patch = SurfacePatch(2, fl.parse("x + y"), region, 1)
    S = PiecewiseSimpleSurface((patch,))
    assert flux(KT_CLASSICAL, ["0", "0", "z"], S) == pytest.approx(1.0, rel=1e-12)


# }}}

# {{{ volume integrals


def test_triple_gfi_examples():
    assert triple_gfi(KT_CLASSICAL, "1", UNIT_CUBE) == pytest.approx(1.0)
    assert triple_gfi(KT_HALF, "1", UNIT_CUBE) == pytest.approx(oracles.H15_CUBED, rel=1e-10)
    inner = caputo_image(HALF, ScalarField.parse("z"), 2)
    assert triple_gfi(KT_HALF, inner, UNIT_CUBE) == pytest.approx(oracles.FOUR_OVER_PI, rel=1e-8)


def test_classical_volume_integrals():
    assert triple_gfi(KT_CLASSICAL, "x*y*z", Box3D(0, 1, 0, 2, 0, 3)) == pytest.approx(4.5, rel=1e-12)
    W = ZSimpleRegion3D(UNIT_SQUARE, fl.num(0.0), fl.parse("x + y"))
    assert triple_gfi(KT_CLASSICAL, "1", W) == pytest.approx(1.0, rel=1e-10)
    prism = ZSimpleRegion3D(SimpleRegion2D.between(0, 1, 0, "x"), fl.num(0.0), fl.num(1.0))
    assert triple_gfi(KT_CLASSICAL, "1", prism) == pytest.approx(0.5, rel=1e-10)


@pytest.mark.parametrize("order", [(0, 1, 2), (2, 1, 0), (1, 2, 0)])
def test_product_integrand_factorizes(order):
    kt = KernelTriple.of(HALF, make_pair("BesselPair", alpha=0.5), make_pair("PowerRL", alpha=0.25))
    box = Box3D(0.2, 1.0, 0.5, 1.5, 0.0, 1.0)
    u, v, w = "1 + x^2", "x^0.5", "exp(-x)"
    f = ScalarField.parse("(1 + x^2)*y^0.5*exp(-z)")
    expected = 1.0
    for k, text in enumerate((u, v, w)):
        lo, hi = box.bounds[k]
        expected *= gfc1d.gfi_interval(kt[k], text, lo, hi)
    assert triple_gfi(kt, f, box, order=order) == pytest.approx(expected, rel=1e-8)


def test_triple_gfi_rejects_bad_order():
    with pytest.raises(DomainError):
        triple_gfi(KT_HALF, "1", UNIT_CUBE, order=(0, 0, 1))


# }}}
