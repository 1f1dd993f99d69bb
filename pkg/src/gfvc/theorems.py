"""Residual checkers for the gradient, Green, Stokes and Gauss theorems.

Both sides of every theorem are computed by separate code paths: boundary
sides integrate the field over lines or faces, interior sides integrate the
fractional derivatives of the field over the enclosed region.

Conventions: closed boundaries are counterclockwise (seen from the side the
normal points to) and closed surfaces carry outward normals.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import fieldlang as fl
from .errors import DomainError
from .fields import (
    Field,
    ScalarField,
    VectorField,
    as_field,
    caputo_image,
    restrict_to_graph,
)
from .geometry import (
    Box3D,
    LinePiece,
    PiecewiseSimpleLine,
    PiecewiseSimpleSurface,
    PolygonalChain,
    SimpleRegion2D,
    SurfacePatch,
    ZSimpleRegion3D,
    require_valid,
)
from .gfint import circulation, double_gfi, line_gfi, surface_gfi, triple_gfi
from .kernels import CLASSICAL, KernelPair
from .quad import DEFAULT_SPEC, QuadSpec
from .vectorops import (
    KernelTriple,
    LineGradient,
    SurfaceCurl,
    curl_regional_field,
    grad_regional_field,
)


@dataclass(frozen=True)
class TheoremReport:
    theorem: str
    kernels: str
    geometry: str
    field: str
    lhs: float
    rhs: float
    #: crude bound: both sides are computed to the requested quadrature tolerance
    est_numerical_error: float = 0.0
    convention: str = ""
    seconds: float = field(default=0.0, compare=False)

    @property
    def abs_residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def rel_residual(self) -> float:
        return self.abs_residual / max(1.0, abs(self.lhs), abs(self.rhs))

    def passes(self, tol: float) -> bool:
        return self.rel_residual < tol

    def as_record(self) -> dict[str, object]:
        return {
            "theorem": self.theorem,
            "kernels": self.kernels,
            "geometry": self.geometry,
            "field": self.field,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_residual": self.abs_residual,
            "rel_residual": self.rel_residual,
            "est_numerical_error": self.est_numerical_error,
            "convention": self.convention,
        }


def _estimate(spec: QuadSpec, *values: float) -> float:
    return spec.rel_tol * sum(abs(v) for v in values) + spec.abs_tol


def _describe(obj: object) -> str:
    label = getattr(obj, "label", "")
    return label or type(obj).__name__


def _vec(F) -> VectorField:
    return F if isinstance(F, VectorField) else VectorField.parse(F)


# {{{ gradient theorems


def _endpoint_difference(U: Field, L) -> float:
    return float(U(*L.end)) - float(U(*L.start))


def check_gradient_regional(
    kt: KernelTriple,
    U: Field | str,
    L: PolygonalChain | PiecewiseSimpleLine | LinePiece,
    spec: QuadSpec = DEFAULT_SPEC,
    *,
    require_axis_parallel: bool = True,
) -> TheoremReport:
    """Line GFI of the regional gradient against ``U(end) - U(start)``.

    The theorem only covers axis-parallel chains; ``require_axis_parallel =
    False`` evaluates both sides anyway (negative controls).
    """
    t0 = time.perf_counter()
    require_valid(L)
    if require_axis_parallel:
        for piece in L.pieces():
            if sum(piece.varies(k) for k in range(3)) != 1:
                raise DomainError("the regional gradient theorem needs a chain of axis-parallel segments")
    u = as_field(U)
    lhs = line_gfi(kt, grad_regional_field(kt, u, spec.tightened()), L, spec).value
    rhs = _endpoint_difference(u, L)
    return TheoremReport(
        "gradient-regional", kt.label, _describe(L), u.describe(), lhs, rhs, _estimate(spec, lhs),
        "rhs = U(end) - U(start)", time.perf_counter() - t0,
    )


def check_gradient_line(
    kt: KernelTriple,
    U: Field | str,
    L: LinePiece | PiecewiseSimpleLine,
    spec: QuadSpec = DEFAULT_SPEC,
) -> TheoremReport:
    """Line GFI of the line gradient against ``U(B) - U(A)``, ``A`` the start of ``L``."""
    t0 = time.perf_counter()
    require_valid(L)
    u = as_field(U)
    lhs = line_gfi(kt, LineGradient(kt, u, spec.tightened()), L, spec).value
    rhs = _endpoint_difference(u, L)
    return TheoremReport(
        "gradient-line", kt.label, _describe(L), u.describe(), lhs, rhs, _estimate(spec, lhs),
        "rhs = U(end) - U(start)", time.perf_counter() - t0,
    )


# }}}

# {{{ Green


def check_green(
    kp1: KernelPair,
    kp2: KernelPair,
    F,
    S: SimpleRegion2D,
    spec: QuadSpec = DEFAULT_SPEC,
) -> TheoremReport:
    """Counterclockwise circulation against the double GFI of ``D^x F_y - D^y F_x``.

    Each term of the right side is integrated with its own derivative axis
    innermost, which is how the boundary collapse works for regions with
    curved sides.  On rectangles the order does not matter.
    """
    t0 = time.perf_counter()
    if tuple(S.axes) != (0, 1):
        raise DomainError("Green's theorem is checked in the XY plane")
    require_valid(S)
    F = _vec(F)
    kt = KernelTriple.of(kp1, kp2, CLASSICAL)
    lhs = circulation(kt, F, S.boundary(), spec)
    inner = spec.tightened()
    dxfy = caputo_image(kp1, F[1], 0, inner)
    dyfx = caputo_image(kp2, F[0], 1, inner)
    if S.is_rectangle:
        rhs = double_gfi(kp1, kp2, dxfy - dyfx, S, spec)
    else:
        # D^x F_y with x innermost (y outer), D^y F_x with y innermost (x outer)
        rhs = double_gfi(kp1, kp2, dxfy, S, spec, outer=1) - double_gfi(kp1, kp2, dyfx, S, spec, outer=0)
    return TheoremReport(
        "green", kt.label, "rectangle" if S.is_rectangle else "simple region", F.describe(), lhs, rhs,
        _estimate(spec, lhs, rhs), "counterclockwise boundary; rhs integrand D^x F_y - D^y F_x",
        time.perf_counter() - t0,
    )


# }}}

# {{{ Stokes


@dataclass(frozen=True)
class _RegionalCurlOnPatch:
    curl: VectorField

    def on_patch(self, patch: SurfacePatch) -> Field:
        g = patch.graph_axis
        return restrict_to_graph(self.curl[g], g, ScalarField(patch.graph))


def check_stokes(
    kt: KernelTriple,
    F,
    S: PiecewiseSimpleSurface | Box3D,
    spec: QuadSpec = DEFAULT_SPEC,
    *,
    curl: str = "surface",
) -> TheoremReport:
    """Circulation over the boundary of ``S`` against the surface GFI of the curl.

    A :class:`Box3D` stands for the box without its bottom face, bounded by
    the rim at the bottom.  ``curl`` selects the surface curl (default) or
    the regional curl (which coincides with it on flat faces).
    """
    t0 = time.perf_counter()
    if isinstance(S, Box3D):
        S = S.without_bottom()
    require_valid(S)
    if S.boundary is None:
        raise DomainError("the surface needs an oriented boundary")
    F = _vec(F)
    lhs = circulation(kt, F, S.boundary, spec)
    inner = spec.tightened()
    if curl == "surface":
        integrand = SurfaceCurl(kt, F, inner)
    elif curl == "regional":
        integrand = _RegionalCurlOnPatch(curl_regional_field(kt, F, inner))
    else:
        raise DomainError(f"unknown curl variant {curl!r}")
    rhs = surface_gfi(kt, integrand, S, spec).value
    return TheoremReport(
        "stokes", kt.label, _describe(S), F.describe(), lhs, rhs, _estimate(spec, lhs, rhs),
        f"outward normals, boundary counterclockwise seen from the normal side; {curl} curl",
        time.perf_counter() - t0,
    )


# }}}

# {{{ Gauss


def check_gauss(
    kt: KernelTriple,
    F,
    W: Box3D | ZSimpleRegion3D,
    spec: QuadSpec = DEFAULT_SPEC,
) -> TheoremReport:
    """Outward flux through the boundary of ``W`` against the triple GFI of the divergence.

    Each divergence term is integrated with its own axis innermost.  On a
    Z-simple region that is not a box only ``F_z`` may be nonzero.
    """
    t0 = time.perf_counter()
    require_valid(W)
    F = _vec(F)
    inner = spec.tightened()
    if isinstance(W, Box3D):
        lhs = surface_gfi(kt, F, W.faces(), spec).value
        terms = []
        for k in range(3):
            order = tuple(j for j in range(3) if j != k) + (k,)
            terms.append(triple_gfi(kt, caputo_image(kt[k], F[k], k, inner), W, spec, order))  # type: ignore[arg-type]
        rhs = terms[0] + terms[1] + terms[2]
        geometry = "box"
    else:
        for k in (0, 1):
            if not (isinstance(F[k], ScalarField) and _is_zero(F[k])):
                raise DomainError("on a Z-simple region only the z component of F may be nonzero")
        base = W.base
        top = SurfacePatch(2, W.z2, base, 1)
        bottom = SurfacePatch(2, W.z1, base, -1)
        lhs = surface_gfi(kt, F, PiecewiseSimpleSurface((top, bottom)), spec).value
        rhs = triple_gfi(kt, caputo_image(kt[2], F[2], 2, inner), W, spec)
        geometry = "z-simple region"
    return TheoremReport(
        "gauss", kt.label, geometry, F.describe(), lhs, rhs, _estimate(spec, lhs, rhs), "outward normals",
        time.perf_counter() - t0,
    )


def _is_zero(f: ScalarField) -> bool:
    return fl.const_value(f.expr) == 0.0


# }}}

# vim: foldmethod=marker
