"""General fractional vector calculus in orthogonal curvilinear coordinates.

Fields are written in the coordinate names of a :class:`CoordSystem`
(``r, phi, z`` for cylindrical, ``r, theta, phi`` for spherical) and
geometry lives in coordinate space: a :class:`~gfvc.geometry.Box3D` is a
coordinate box, axis ``k`` of any geometry object is ``q_k``.

Derivatives always act on Lamé-weighted products, formed symbolically
before differentiation.  The integral theorems weight the boundary and
interior integrands so that the prefactors of the differential operators
cancel exactly; the checkers therefore hand the weighted fields to the
Cartesian machinery of :mod:`gfvc.theorems`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import fieldlang as fl
from .errors import DomainError
from .fields import Field, ScalarField, VectorField, caputo_image, gfi_image
from .geometry import (
    Box3D,
    PiecewiseSimpleSurface,
    SimpleRegion2D,
    SurfacePatch,
    ZSimpleRegion3D,
)
from .gfint import line_gfi, surface_gfi, triple_gfi
from .kernels import KernelPair
from .quad import DEFAULT_SPEC, QuadSpec
from .theorems import TheoremReport, check_gauss, check_gradient_line, check_stokes
from .vectorops import KernelTriple, VecResult

#: Lamé coefficients below this count as a coordinate singularity
SINGULAR_TOL = 1e-14


class CoordKind(str, enum.Enum):
    CARTESIAN = "Cartesian"
    CYLINDRICAL = "Cylindrical"
    SPHERICAL = "Spherical"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class CoordSystem:
    """Coordinate names, Lamé coefficients and coordinate ranges."""

    kind: CoordKind
    variables: tuple[str, str, str]
    #: H_1, H_2, H_3 as expressions in ``variables``
    lame: tuple[fl.Node, fl.Node, fl.Node]
    #: closed range of each coordinate
    domain: tuple[tuple[float, float], tuple[float, float], tuple[float, float]] = (
        (0.0, math.inf),
        (0.0, math.inf),
        (0.0, math.inf),
    )

    @classmethod
    def cartesian(cls) -> CoordSystem:
        one = fl.num(1.0)
        return cls(CoordKind.CARTESIAN, fl.CARTESIAN, (one, one, one))

    @classmethod
    def cylindrical(cls) -> CoordSystem:
        v = ("r", "phi", "z")
        return cls(
            CoordKind.CYLINDRICAL,
            v,
            (fl.num(1.0), fl.Var("r"), fl.num(1.0)),
            ((0.0, math.inf), (0.0, 2 * math.pi), (0.0, math.inf)),
        )

    @classmethod
    def spherical(cls) -> CoordSystem:
        v = ("r", "theta", "phi")
        return cls(
            CoordKind.SPHERICAL,
            v,
            (fl.num(1.0), fl.Var("r"), fl.parse("r*sin(theta)", v)),
            ((0.0, math.inf), (0.0, math.pi), (0.0, 2 * math.pi)),
        )

    @classmethod
    def custom(cls, variables: Sequence[str], lame: Sequence[str], domain=None) -> CoordSystem:
        v = tuple(variables)
        if len(v) != 3 or len(lame) != 3:
            raise DomainError("a coordinate system has three variables and three Lamé coefficients")
        nodes = tuple(fl.parse(h, v) for h in lame)
        cs = cls(CoordKind.CUSTOM, v, nodes, tuple(domain) if domain else cls.cartesian().domain)  # type: ignore[arg-type]
        cs.check_positive()
        return cs

    @classmethod
    def by_name(cls, name: str) -> CoordSystem:
        table = {"cartesian": cls.cartesian, "cylindrical": cls.cylindrical, "spherical": cls.spherical}
        try:
            return table[name.lower()]()
        except KeyError:
            raise DomainError(f"unknown coordinate system {name!r}") from None

    def H(self, k: int) -> ScalarField:
        return ScalarField(self.lame[k], self.variables)

    def lame_at(self, q: Sequence[float]) -> tuple[float, float, float]:
        return tuple(fl.eval_at(h, q, self.variables) for h in self.lame)  # type: ignore[return-value]

    def check_positive(self, samples: int = 7) -> None:
        """Lamé coefficients must be positive on an interior grid."""
        grids = []
        for lo, hi in self.domain:
            hi = lo + 2.0 if math.isinf(hi) else hi
            grids.append(np.linspace(lo, hi, samples + 2)[1:-1])
        mesh = np.meshgrid(*grids, indexing="ij")
        env = dict(zip(self.variables, mesh))
        for k, h in enumerate(self.lame):
            values = np.broadcast_to(np.asarray(fl.evaluate(h, env), dtype=float), mesh[0].shape)
            if not np.all(values > 0):
                raise DomainError(f"Lamé coefficient H_{k + 1} is not positive inside the domain")

    def require_regular(self, q: Sequence[float]) -> tuple[float, float, float]:
        h = self.lame_at(q)
        if min(abs(v) for v in h) < SINGULAR_TOL:
            raise DomainError(f"coordinate singularity at {tuple(q)}: Lamé coefficients {h}")
        return h

    # {{{ field helpers

    def scalar(self, U: Field | str | float) -> Field:
        if isinstance(U, Field):
            return U
        if isinstance(U, str):
            return ScalarField.parse(U, self.variables)
        return ScalarField.constant(float(U), self.variables)

    def vector(self, F: VectorField | Sequence[str | float]) -> VectorField:
        return F if isinstance(F, VectorField) else VectorField.parse(F, self.variables)

    def weighted(self, f: Field, weight: fl.Node) -> Field:
        """``weight * f``; symbolic for closed-form fields."""
        w = ScalarField(weight, self.variables)
        if fl.const_value(weight) == 1.0:
            return f
        if isinstance(f, ScalarField) and f.variables == self.variables:
            return w.times(f)
        return w * f

    def hatted(self, F: VectorField) -> VectorField:
        """``(H_k F_k)``: line-integral and curl weights."""
        return VectorField(tuple(self.weighted(F[k], self.lame[k]) for k in range(3)))  # type: ignore[arg-type]

    def tilded(self, F: VectorField) -> VectorField:
        """``(H_1 H_2 H_3 F_k / H_k)``: flux and divergence weights."""
        comps = []
        for k in range(3):
            m, n = (k + 1) % 3, (k + 2) % 3
            comps.append(self.weighted(F[k], fl.mul(self.lame[m], self.lame[n])))
        return VectorField(tuple(comps))  # type: ignore[arg-type]

    def jacobian(self) -> fl.Node:
        return fl.mul(fl.mul(self.lame[0], self.lame[1]), self.lame[2])

    def canonical(self, f: Field) -> Field:
        """Rename a closed-form field to the canonical coordinate names used by geometry."""
        if isinstance(f, ScalarField) and f.variables != fl.CARTESIAN:
            mapping = {v: fl.Var(c) for v, c in zip(f.variables, fl.CARTESIAN)}
            return ScalarField(fl.substitute(f.expr, mapping), fl.CARTESIAN)
        return f

    def canonical_vector(self, F: VectorField) -> VectorField:
        return VectorField(tuple(self.canonical(c) for c in F.components))  # type: ignore[arg-type]

    # }}}


def _q(q: Sequence[float]) -> tuple[float, float, float]:
    if len(q) != 3:
        raise DomainError("a point in OCC has three coordinates")
    return (float(q[0]), float(q[1]), float(q[2]))


# {{{ operators at a point


def gfi_hat(cs: CoordSystem, kp: KernelPair, axis: int, f: Field | str | float, q: Sequence[float], spec: QuadSpec = DEFAULT_SPEC) -> float:
    """``I^{q_k}(H_k f)`` along axis ``k`` with the other coordinates frozen."""
    pt = _q(q)
    g = cs.weighted(cs.scalar(f), cs.lame[axis])
    return float(gfi_image(kp, g, axis, spec)(*pt))


def gfi_hat_interval(
    cs: CoordSystem, kp: KernelPair, axis: int, f: Field | str | float, q: Sequence[float], a: float, b: float,
    spec: QuadSpec = DEFAULT_SPEC,
) -> float:
    """``Î^{b} - Î^{a}`` along axis ``k`` (``Î^0 = 0``)."""
    pt = list(_q(q))
    g = gfi_image(kp, cs.weighted(cs.scalar(f), cs.lame[axis]), axis, spec)
    values = []
    for s in (b, a):
        pt[axis] = s
        values.append(float(g(*pt)) if s > 0 else 0.0)
    return values[0] - values[1]


def grad_occ(cs: CoordSystem, kt: KernelTriple, U: Field | str, q: Sequence[float], spec: QuadSpec = DEFAULT_SPEC) -> VecResult:
    """``(1/H_k) D^{q_k} U``."""
    pt = _q(q)
    h = cs.require_regular(pt)
    u = cs.scalar(U)
    comps = tuple(float(caputo_image(kt[k], u, k, spec)(*pt)) / h[k] for k in range(3))
    return VecResult(comps, pt)  # type: ignore[arg-type]


def div_occ(cs: CoordSystem, kt: KernelTriple, F, q: Sequence[float], spec: QuadSpec = DEFAULT_SPEC) -> float:
    """``(1/(H_1 H_2 H_3)) Σ_k D^{q_k}(H_1 H_2 H_3 F_k / H_k)``; derivatives act on the whole product."""
    pt = _q(q)
    h = cs.require_regular(pt)
    Ft = cs.tilded(cs.vector(F))
    total = sum(float(caputo_image(kt[k], Ft[k], k, spec)(*pt)) for k in range(3))
    return total / (h[0] * h[1] * h[2])


def curl_occ(cs: CoordSystem, kt: KernelTriple, F, q: Sequence[float], spec: QuadSpec = DEFAULT_SPEC) -> VecResult:
    """``(1/(H_m H_n)) (D^{q_m}(H_n F_n) - D^{q_n}(H_m F_m))`` for cyclic ``(k, m, n)``."""
    pt = _q(q)
    h = cs.require_regular(pt)
    Fh = cs.hatted(cs.vector(F))
    comps = []
    for k in range(3):
        m, n = (k + 1) % 3, (k + 2) % 3
        dm = float(caputo_image(kt[m], Fh[n], m, spec)(*pt))
        dn = float(caputo_image(kt[n], Fh[m], n, spec)(*pt))
        comps.append((dm - dn) / (h[m] * h[n]))
    return VecResult(tuple(comps), pt)  # type: ignore[arg-type]


def curl_occ_as_printed(cs: CoordSystem, kt: KernelTriple, F, q: Sequence[float], spec: QuadSpec = DEFAULT_SPEC) -> VecResult:
    """Curl with the first component exactly as displayed for the spherical and cylindrical systems.

    The displayed first components differentiate the wrong field in their
    second term (``F_φ`` instead of ``F_θ`` for spherical, ``F_z``
    instead of ``F_φ`` for cylindrical).  The other components agree with
    :func:`curl_occ`.
    """
    if cs.kind not in (CoordKind.SPHERICAL, CoordKind.CYLINDRICAL):
        raise DomainError("the displayed variants exist only for spherical and cylindrical coordinates")
    general = curl_occ(cs, kt, F, q, spec)
    pt = general.point
    h = cs.lame_at(pt)
    Fv = cs.vector(F)
    if cs.kind is CoordKind.SPHERICAL:
        # 1/(r sinθ) D^θ(F_φ sinθ) - 1/(r sinθ) D^φ F_φ
        r, theta = pt[0], pt[1]
        sin_t = ScalarField.parse("sin(theta)", cs.variables)
        first = float(caputo_image(kt[1], sin_t.times(Fv[2]) if isinstance(Fv[2], ScalarField) else sin_t * Fv[2], 1, spec)(*pt))
        second = float(caputo_image(kt[2], Fv[2], 2, spec)(*pt))
        c0 = (first - second) / (r * math.sin(theta))
    else:
        # (1/r) D^φ F_z - D^z F_z
        c0 = float(caputo_image(kt[1], Fv[2], 1, spec)(*pt)) / h[1] - float(caputo_image(kt[2], Fv[2], 2, spec)(*pt))
    return VecResult((c0, general[1], general[2]), pt)


# }}}

# {{{ integrals


def line_gfi_occ(cs: CoordSystem, kt: KernelTriple, F, L, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """Line GFI with integrands ``H_k F_k`` restricted to the line."""
    return line_gfi(kt, cs.canonical_vector(cs.hatted(cs.vector(F))), L, spec).value


def flux_occ(cs: CoordSystem, kt: KernelTriple, F, S, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """Surface GFI with integrands ``H_1 H_2 H_3 F_k / H_k`` on the patches."""
    return surface_gfi(kt, cs.canonical_vector(cs.tilded(cs.vector(F))), S, spec).value


def volume_gfi_occ(cs: CoordSystem, kt: KernelTriple, f, W: Box3D | ZSimpleRegion3D, spec: QuadSpec = DEFAULT_SPEC) -> float:
    """Triple GFI of ``H_1 H_2 H_3 f``."""
    return triple_gfi(kt, cs.canonical(cs.weighted(cs.scalar(f), cs.jacobian())), W, spec)


# }}}

# {{{ theorems


def _relabel(report: TheoremReport, cs: CoordSystem, name: str, field_text: str) -> TheoremReport:
    return TheoremReport(
        f"{name}-occ",
        report.kernels,
        f"{cs.kind.value} {report.geometry}",
        field_text,
        report.lhs,
        report.rhs,
        report.est_numerical_error,
        report.convention + "; Lamé weights cancel the operator prefactors",
        report.seconds,
    )


def check_gradient_occ(cs: CoordSystem, kt: KernelTriple, U, L, spec: QuadSpec = DEFAULT_SPEC) -> TheoremReport:
    """Hatted line GFI of the OCC line gradient against ``U(B) - U(A)``.

    The weight ``H_k`` of the line integral cancels the prefactor ``1/H_k``
    of the gradient component, leaving the Cartesian form in ``q``.
    """
    u = cs.scalar(U)
    return _relabel(check_gradient_line(kt, cs.canonical(u), L, spec), cs, "gradient-line", u.describe())


def check_stokes_occ(cs: CoordSystem, kt: KernelTriple, F, S, spec: QuadSpec = DEFAULT_SPEC) -> TheoremReport:
    """Hatted circulation against the hatted surface GFI of the OCC surface curl.

    Both sides act on ``F̂_k = H_k F_k``: the flux weight ``H_m H_n`` cancels
    the curl prefactor ``1/(H_m H_n)``.
    """
    Fv = cs.vector(F)
    return _relabel(check_stokes(kt, cs.canonical_vector(cs.hatted(Fv)), S, spec), cs, "stokes", Fv.describe())


def check_gauss_occ(cs: CoordSystem, kt: KernelTriple, F, W: Box3D | ZSimpleRegion3D, spec: QuadSpec = DEFAULT_SPEC) -> TheoremReport:
    """Hatted flux through the coordinate faces against the hatted triple GFI of the OCC divergence.

    Both sides act on ``F̃_k = H_1 H_2 H_3 F_k / H_k``; the volume weight
    ``H_1 H_2 H_3`` cancels the divergence prefactor.
    """
    Fv = cs.vector(F)
    return _relabel(check_gauss(kt, cs.canonical_vector(cs.tilded(Fv)), W, spec), cs, "gauss", Fv.describe())


def sector_box(r: tuple[float, float], phi: tuple[float, float], z: tuple[float, float]) -> Box3D:
    """The cylindrical coordinate box ``r × φ × z``."""
    return Box3D(r[0], r[1], phi[0], phi[1], z[0], z[1])


def flat_sector(r: tuple[float, float], phi: tuple[float, float], z: float):
    """Annular sector at height ``z`` with upward normal and its counterclockwise boundary."""
    region = SimpleRegion2D.rectangle(r[0], r[1], phi[0], phi[1], (0, 1), z)
    patch = SurfacePatch(2, fl.num(z), region, 1)
    return PiecewiseSimpleSurface((patch,), region.boundary(), "annular sector")


# }}}

# vim: foldmethod=marker
