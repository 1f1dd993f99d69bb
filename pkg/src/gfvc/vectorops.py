"""General fractional differential vector operators in Cartesian coordinates.

Each operator is available in two forms: ``*_field`` builders return lazy
:class:`~gfvc.fields.Field` objects (used by the integral theorems), and
the point functions evaluate them into a :class:`VecResult`.  Along axis
``k`` the derivative is the Caputo-type convolution with kernel ``K_k`` and
the other coordinates frozen.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import fieldlang as fl
from .errors import DomainError
from .fields import (
    AXES,
    ConvImage,
    Field,
    ScalarField,
    Sum,
    VectorField,
    as_field,
    caputo_image,
    restrict_to_graph,
    restrict_to_line,
)
from .geometry import LinePiece, SurfacePatch, require_valid
from .kernels import CLASSICAL, SONIN_XS, KernelPair, family_tolerance, sonin_residual
from .quad import DEFAULT_SPEC, QuadSpec


@lru_cache(maxsize=128)
def _sonin_ok(pair: KernelPair) -> bool:
    return sonin_residual(pair, SONIN_XS).passes(family_tolerance(pair))


@dataclass(frozen=True)
class KernelTriple:
    """One Sonin pair per coordinate axis."""

    pairs: tuple[KernelPair, KernelPair, KernelPair]

    def __post_init__(self) -> None:
        if len(self.pairs) != 3:
            raise DomainError("a kernel triple has exactly three pairs")

    @classmethod
    def uniform(cls, pair: KernelPair, *, verify: bool = True) -> KernelTriple:
        return cls.of(pair, pair, pair, verify=verify)

    @classmethod
    def of(cls, p1: KernelPair, p2: KernelPair, p3: KernelPair = CLASSICAL, *, verify: bool = True) -> KernelTriple:
        kt = cls((p1, p2, p3))
        if verify:
            kt.verify()
        return kt

    def verify(self) -> None:
        for k, pair in enumerate(self.pairs):
            if not _sonin_ok(pair):
                raise DomainError(f"kernel pair {pair.label} on axis {AXES[k]} fails the Sonin check")

    def __getitem__(self, k: int) -> KernelPair:
        return self.pairs[k]

    @property
    def label(self) -> str:
        if self.pairs[0] == self.pairs[1] == self.pairs[2]:
            return f"{self.pairs[0].label}^3"
        return "(" + ", ".join(p.label for p in self.pairs) + ")"

    @property
    def classical(self) -> bool:
        return all(p.classical for p in self.pairs)


@dataclass(frozen=True)
class VecResult:
    components: tuple[float, float, float]
    point: tuple[float, float, float]

    def __getitem__(self, k: int) -> float:
        return self.components[k]

    def __iter__(self):
        return iter(self.components)

    def max_abs(self) -> float:
        return max(abs(c) for c in self.components)


def _pt(p: Sequence[float]) -> tuple[float, float, float]:
    if len(p) == 2:
        p = (*p, 0.0)
    return (float(p[0]), float(p[1]), float(p[2]))


def evaluate_vector(vf: VectorField, p: Sequence[float]) -> VecResult:
    pt = _pt(p)
    return VecResult(tuple(float(c(*pt)) for c in vf.components), pt)  # type: ignore[arg-type]


def _vec(F: VectorField | Sequence[str | float | Field]) -> VectorField:
    return F if isinstance(F, VectorField) else VectorField.parse(F)  # type: ignore[arg-type]


def _scalar(U: Field | str | float) -> Field:
    return as_field(U)


def _diff(kt: KernelTriple, f: Field, axis: int, spec: QuadSpec) -> Field:
    return caputo_image(kt[axis], f, axis, spec)


# {{{ gradient


def grad_regional_field(kt: KernelTriple, U: Field | str, spec: QuadSpec = DEFAULT_SPEC) -> VectorField:
    u = _scalar(U)
    return VectorField(tuple(_diff(kt, u, k, spec) for k in range(3)))  # type: ignore[arg-type]


def grad_regional(kt: KernelTriple, U: Field | str, p: Sequence[float], spec: QuadSpec = DEFAULT_SPEC) -> VecResult:
    """``(D^x U, D^y U, D^z U)`` at ``p``."""
    return evaluate_vector(grad_regional_field(kt, U, spec), p)


@dataclass(frozen=True)
class LineGradient:
    """The line gradient of ``U`` on a curve, component by component.

    Component ``k`` on a piece is ``K_k`` convolved with the restriction of
    ``∂_k U`` to the piece, parameterized by coordinate ``k``.
    """

    kt: KernelTriple
    U: Field
    spec: QuadSpec = DEFAULT_SPEC

    def along(self, piece: LinePiece, axis: int) -> Field:
        restricted = restrict_to_line(self.U.partial(axis), piece, axis)
        pair = self.kt[axis]
        if pair.k is None:
            return restricted
        return ConvImage(pair.k, restricted, axis, self.spec)

    def describe(self) -> str:
        return f"GradL[{self.U.describe()}]"


def grad_line(
    kt: KernelTriple, U: Field | str, line: LinePiece, p: Sequence[float], spec: QuadSpec = DEFAULT_SPEC
) -> VecResult:
    """Line gradient of ``U`` along ``line`` at the point ``p`` of the line.

    Axes along which the line does not move fall back to the coordinate ray
    through ``p`` (the regional component).
    """
    require_valid(line)
    pt = _pt(p)
    lg = LineGradient(kt, _scalar(U), spec)
    comps = []
    for k in range(3):
        if line.varies(k):
            comps.append(float(lg.along(line, k)(*pt)))
        else:
            comps.append(float(_diff(kt, lg.U, k, spec)(*pt)))
    return VecResult(tuple(comps), pt)  # type: ignore[arg-type]


# }}}

# {{{ divergence, curl, Laplacian


def divergence_field(kt: KernelTriple, F: VectorField | Sequence[str], spec: QuadSpec = DEFAULT_SPEC) -> Field:
    F = _vec(F)
    return Sum([_diff(kt, F[k], k, spec) for k in range(3)])


def divergence(kt: KernelTriple, F: VectorField | Sequence[str], p: Sequence[float], spec: QuadSpec = DEFAULT_SPEC) -> float:
    """``Σ_k D^{x_k} F_k`` at ``p``."""
    return float(divergence_field(kt, F, spec)(*_pt(p)))


def _cyclic(k: int) -> tuple[int, int]:
    return (k + 1) % 3, (k + 2) % 3


def curl_regional_field(kt: KernelTriple, F: VectorField | Sequence[str], spec: QuadSpec = DEFAULT_SPEC) -> VectorField:
    F = _vec(F)
    comps = []
    for k in range(3):
        m, n = _cyclic(k)
        comps.append(_diff(kt, F[n], m, spec) - _diff(kt, F[m], n, spec))
    return VectorField(tuple(comps))  # type: ignore[arg-type]


def curl_regional(
    kt: KernelTriple,
    F: VectorField | Sequence[str],
    p: Sequence[float],
    spec: QuadSpec = DEFAULT_SPEC,
    lower: Sequence[float] | None = None,
) -> VecResult:
    """Regional curl at ``p``; with ``lower = (a, c, e)`` every derivative is the interval one from the offset."""
    if lower is None:
        return evaluate_vector(curl_regional_field(kt, F, spec), p)
    F = _vec(F)
    pt = _pt(p)
    low = _pt(lower)

    def d(field_: Field, axis: int) -> float:
        g = _diff(kt, field_, axis, spec)
        shifted = list(pt)
        shifted[axis] = low[axis]
        base = float(g(*shifted)) if low[axis] > 0 else 0.0
        return float(g(*pt)) - base

    comps = []
    for k in range(3):
        m, n = _cyclic(k)
        comps.append(d(F[n], m) - d(F[m], n))
    return VecResult(tuple(comps), pt)  # type: ignore[arg-type]


@dataclass(frozen=True)
class SurfaceCurl:
    """Surface curl of ``F``; on a patch with graph axis ``g`` only component ``g`` is defined.

    With ``(g, m, n)`` cyclic it is ``K_m * (∂_m F_n)|_S - K_n * (∂_n F_m)|_S``,
    the partial derivatives being taken before restriction to the surface.
    """

    kt: KernelTriple
    F: VectorField
    spec: QuadSpec = DEFAULT_SPEC

    def on_patch(self, patch: SurfacePatch) -> Field:
        g = patch.graph_axis
        m, n = _cyclic(g)
        graph = ScalarField(patch.graph)
        return self._term(self.F[n], m, g, graph) - self._term(self.F[m], n, g, graph)

    def _term(self, comp: Field, axis: int, g: int, graph: Field) -> Field:
        restricted = restrict_to_graph(comp.partial(axis), g, graph)
        pair = self.kt[axis]
        if pair.k is None:
            return restricted
        return ConvImage(pair.k, restricted, axis, self.spec)

    def describe(self) -> str:
        return f"CurlS[{self.F.describe()}]"


def curl_surface(
    kt: KernelTriple,
    F: VectorField | Sequence[str],
    S,
    p: Sequence[float],
    spec: QuadSpec = DEFAULT_SPEC,
) -> VecResult:
    """Surface curl at ``p``, summed over the patches whose projection contains ``p``."""
    sc = SurfaceCurl(kt, _vec(F), spec)
    pt = _pt(p)
    comps = [0.0, 0.0, 0.0]
    for patch in S.patches:
        if _projection_contains(patch, pt):
            comps[patch.graph_axis] += float(sc.on_patch(patch)(*pt))
    return VecResult(tuple(comps), pt)  # type: ignore[arg-type]


def _projection_contains(patch: SurfacePatch, p: tuple[float, float, float]) -> bool:
    r = patch.region
    u, v = r.axes
    if not r.a - 1e-12 <= p[u] <= r.b + 1e-12:
        return False
    env = {name: np.asarray(p[k]) for k, name in enumerate(AXES)}
    lo = float(fl.evaluate(r.lower, env))
    hi = float(fl.evaluate(r.upper, env))
    return lo - 1e-12 <= p[v] <= hi + 1e-12


def laplacian_field(kt: KernelTriple, U: Field | str, spec: QuadSpec = DEFAULT_SPEC) -> Field:
    u = _scalar(U)
    inner = spec.tightened()
    return Sum([_diff(kt, _diff(kt, u, k, inner), k, spec) for k in range(3)])


def laplacian_scalar(kt: KernelTriple, U: Field | str, p: Sequence[float], spec: QuadSpec = DEFAULT_SPEC) -> float:
    """Divergence of the regional gradient (two nested derivatives per axis)."""
    return float(laplacian_field(kt, U, spec)(*_pt(p)))


# }}}

# {{{ identities


@dataclass(frozen=True)
class IdentityDefects:
    #: curl of the gradient of U (vanishes)
    curl_grad: VecResult
    #: divergence of the curl of F (vanishes)
    div_curl: float
    #: curl curl F - (grad div F - vector Laplacian F)
    double_curl_gap: VecResult


def identity_defects(
    kt: KernelTriple,
    U: Field | str,
    F: VectorField | Sequence[str],
    p: Sequence[float],
    spec: QuadSpec = DEFAULT_SPEC,
) -> IdentityDefects:
    F = _vec(F)
    inner = spec.tightened()
    cg = curl_regional_field(kt, grad_regional_field(kt, U, inner), spec)
    dc = divergence_field(kt, curl_regional_field(kt, F, inner), spec)
    cc = curl_regional_field(kt, curl_regional_field(kt, F, inner), spec)
    gd = grad_regional_field(kt, divergence_field(kt, F, inner), spec)
    gap = []
    for k in range(3):
        vl = laplacian_field(kt, F[k], spec)
        gap.append(cc[k] - (gd[k] - vl))
    pt = _pt(p)
    return IdentityDefects(
        evaluate_vector(cg, pt),
        float(dc(*pt)),
        evaluate_vector(VectorField(tuple(gap)), pt),  # type: ignore[arg-type]
    )


# }}}

# vim: foldmethod=marker
