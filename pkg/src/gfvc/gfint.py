"""General fractional line, surface and volume integrals.

All of them are iterated interval integrals ``C(hi) - C(lo)`` where
``C(s) = (M * f)(s)`` is a convolution along one coordinate.  Integrands are
given either as a :class:`~gfvc.fields.VectorField` (restricted to the
geometry here) or as a provider that already returns the restricted
component for each piece or patch (used for line gradients and surface
curls).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from . import fieldlang as fl
from .errors import DomainError
from .fields import (
    ConvImage,
    Field,
    IntervalImage,
    ScalarField,
    VectorField,
    as_field,
    restrict_to_graph,
    restrict_to_line,
)
from .geometry import (
    Box3D,
    LinePiece,
    PiecewiseSimpleSurface,
    SimpleRegion2D,
    SurfacePatch,
    ZSimpleRegion3D,
    require_valid,
)
from .kernels import KernelPair
from .quad import DEFAULT_SPEC, QuadSpec
from .vectorops import KernelTriple

# {{{ integrand providers


class LineIntegrand(Protocol):
    def along(self, piece: LinePiece, axis: int) -> Field: ...


class SurfaceIntegrand(Protocol):
    def on_patch(self, patch: SurfacePatch) -> Field: ...


@dataclass(frozen=True)
class RestrictedComponents:
    """Component ``k`` of ``F`` on a line piece, or the graph component on a patch."""

    F: VectorField

    def along(self, piece: LinePiece, axis: int) -> Field:
        return restrict_to_line(self.F[axis], piece, axis)

    def on_patch(self, patch: SurfacePatch) -> Field:
        return restrict_to_graph(self.F[patch.graph_axis], patch.graph_axis, ScalarField(patch.graph))


def _line_integrand(F) -> LineIntegrand:
    if hasattr(F, "along"):
        return F
    return RestrictedComponents(F if isinstance(F, VectorField) else VectorField.parse(F))


def _surface_integrand(F) -> SurfaceIntegrand:
    if hasattr(F, "on_patch"):
        return F
    return RestrictedComponents(F if isinstance(F, VectorField) else VectorField.parse(F))


# }}}

# {{{ results


@dataclass(frozen=True)
class LineGFIResult:
    value: float
    #: contribution of each piece, in path order
    contributions: tuple[float, ...]
    #: contribution of each (piece, axis) term
    terms: tuple[tuple[int, int, float], ...]
    kernels: str


@dataclass(frozen=True)
class SurfaceGFIResult:
    value: float
    #: signed contribution of each patch
    contributions: tuple[float, ...]
    kernels: str


@dataclass(frozen=True)
class VolumeGFIResult:
    value: float
    #: one term per integrand summand
    contributions: tuple[float, ...]
    kernels: str


def _fsum(values: Sequence[float]) -> float:
    total = 0.0
    for v in values:
        total += v
    return total


# }}}

# {{{ line integrals


def _conv_difference(kernel_pair: KernelPair, f: Field, axis: int, lo: float, hi: float, at: Sequence[float], spec: QuadSpec) -> float:
    """``C(hi) - C(lo)`` for ``C = M * f`` along ``axis`` (``C(0) = 0``)."""
    if lo == hi:
        return 0.0
    image = ConvImage(kernel_pair.m, f, axis, spec)
    pts = []
    for s in (hi, lo):
        p = list(at)
        p[axis] = s
        pts.append(p)
    arr = np.array(pts, dtype=float)
    values = image(arr[:, 0], arr[:, 1], arr[:, 2])
    return float(values[0] - values[1])


def line_gfi(kt: KernelTriple, F, L, spec: QuadSpec = DEFAULT_SPEC) -> LineGFIResult:
    """Line GFI of ``F`` over a simple line, polygonal chain or piecewise simple line.

    Each piece contributes ``Σ_k sgn · (C_k(max) - C_k(min))`` over the axes
    along which it moves, ``C_k`` being the ``M_k``-convolution of the
    restricted component ``F_k`` in the coordinate ``k``.
    """
    require_valid(L)
    integrand = _line_integrand(F)
    contributions = []
    terms = []
    for i, piece in enumerate(L.pieces()):
        part = []
        for k in range(3):
            if not piece.varies(k):
                continue
            lo, hi = piece.span(k)
            value = _conv_difference(kt[k], integrand.along(piece, k), k, lo, hi, piece.start, spec)
            terms.append((i, k, value))
            part.append(value)
        contributions.append(_fsum(part))
    return LineGFIResult(_fsum(contributions), tuple(contributions), tuple(terms), kt.label)


def circulation(kt: KernelTriple, F, L, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """Line GFI over a closed line."""
    if not getattr(L, "closed", False):
        raise DomainError("circulation needs a closed line")
    return line_gfi(kt, F, L, spec).value


# }}}

# {{{ double and surface integrals


def _bound(node: fl.Node) -> Field:
    return ScalarField(node)


def double_gfi_field(
    pair_u: KernelPair,
    pair_v: KernelPair,
    f: Field,
    region: SimpleRegion2D,
    spec: QuadSpec = DEFAULT_SPEC,
    outer: int = 0,
) -> tuple[Field, int, float, float]:
    """Inner interval image of the iterated integral, its axis, and the outer limits."""
    u, v = region.axes
    pairs = {u: pair_u, v: pair_v}
    lo, hi, inner_lo, inner_hi = region.bounds(outer)
    out_axis, in_axis = (u, v) if outer == 0 else (v, u)
    inner = IntervalImage(pairs[in_axis].m, f, in_axis, _bound(inner_lo), _bound(inner_hi), spec.tightened())
    return inner, out_axis, lo, hi


def double_gfi(
    pair_u: KernelPair,
    pair_v: KernelPair,
    f: Field | str | float,
    region: SimpleRegion2D,
    spec: QuadSpec = DEFAULT_SPEC,
    outer: int = 0,
) -> float:
    """Iterated GFI of ``f`` over ``region``.

    ``pair_u`` acts along ``region.axes[0]``, ``pair_v`` along ``region.axes[1]``.
    ``outer = 0`` integrates the first axis last (inner limits ``lower(u)``,
    ``upper(u)``); ``outer = 1`` uses the transposed description.
    """
    require_valid(region)
    f = as_field(f)
    u, v = region.axes
    pairs = {u: pair_u, v: pair_v}
    inner, out_axis, lo, hi = double_gfi_field(pair_u, pair_v, f, region, spec, outer)
    at = [0.0, 0.0, 0.0]
    at[3 - u - v] = region.level
    return _conv_difference(pairs[out_axis], inner, out_axis, lo, hi, at, spec)


def _patch_pairs(kt: KernelTriple, patch: SurfacePatch) -> tuple[KernelPair, KernelPair]:
    u, v = patch.region.axes
    return kt[u], kt[v]


def surface_gfi(kt: KernelTriple, F, S, spec: QuadSpec = DEFAULT_SPEC, outer: int = 0) -> SurfaceGFIResult:
    """Surface GFI: per patch, orientation times the double GFI of the normal-axis component over the projection."""
    if isinstance(S, Box3D):
        S = S.faces()
    if isinstance(S, SurfacePatch):
        S = PiecewiseSimpleSurface((S,))
    require_valid(S)
    integrand = _surface_integrand(F)
    contributions = []
    for patch in S.patches:
        pu, pv = _patch_pairs(kt, patch)
        value = double_gfi(pu, pv, integrand.on_patch(patch), patch.region, spec, outer)
        contributions.append(patch.orientation * value)
    return SurfaceGFIResult(_fsum(contributions), tuple(contributions), kt.label)


def flux(kt: KernelTriple, F, S, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """Scalar surface GFI; a :class:`Box3D` means its six outward faces."""
    return surface_gfi(kt, F, S, spec).value


# }}}

# {{{ volume integrals


def triple_gfi(
    kt: KernelTriple,
    f: Field | str | float,
    W: Box3D | ZSimpleRegion3D,
    spec: QuadSpec = DEFAULT_SPEC,
    order: tuple[int, int, int] = (0, 1, 2),
) -> float:
    """Iterated GFI over a box or a Z-simple region.

    ``order`` lists the axes from outermost to innermost; Z-simple regions
    always integrate ``z`` innermost, then ``y``, then ``x``.
    """
    require_valid(W)
    f = as_field(f)
    if isinstance(W, ZSimpleRegion3D):
        base = W.base
        zi = IntervalImage(kt[2].m, f, 2, _bound(W.z1), _bound(W.z2), spec.tightened().tightened())
        yi = IntervalImage(kt[1].m, zi, 1, _bound(base.lower), _bound(base.upper), spec.tightened())
        return _conv_difference(kt[0], yi, 0, base.a, base.b, (0.0, 0.0, 0.0), spec)
    if sorted(order) != [0, 1, 2]:
        raise DomainError(f"order must be a permutation of (0, 1, 2), got {order}")
    outer, middle, inner = order
    bounds = W.bounds
    s_in = spec.tightened().tightened()
    image: Field = IntervalImage(kt[inner].m, f, inner, bounds[inner][0], bounds[inner][1], s_in)
    image = IntervalImage(kt[middle].m, image, middle, bounds[middle][0], bounds[middle][1], spec.tightened())
    return _conv_difference(kt[outer], image, outer, bounds[outer][0], bounds[outer][1], (0.0, 0.0, 0.0), spec)


def volume_gfi(kt: KernelTriple, f, W, spec: QuadSpec = DEFAULT_SPEC) -> VolumeGFIResult:
    value = triple_gfi(kt, f, W, spec)
    return VolumeGFIResult(value, (value,), kt.label)


# }}}

# vim: foldmethod=marker
