r"""Catalog of Sonin kernel pairs ``(M, K)`` with ``M * K = 1``.

Each kernel is stored in factored form ``t^p g(t)`` with ``p ∈ (-1, 0]`` and
``g`` continuous on ``[0, ∞)``, together with ``t g'(t)``, which the
quadrature needs for the Euler derivative ``u K'(u)`` of a kernel (used when
a convolution is differentiated with respect to its upper limit).

The ``Classical`` pair is a flag for the integer-order limit: the integral
kernel is ``M ≡ 1`` and the derivative kernel is the Dirac delta, so the
derivative operator becomes the plain first derivative.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from . import specfun
from .errors import AccuracyError, DomainError
from .quad import DEFAULT_SPEC, QuadSpec, convolve_batch

ArrayFn = Callable[[np.ndarray], np.ndarray]

#: Mittag-Leffler evaluations inside kernels use this truncation tolerance.
KERNEL_SERIES_TOL = 1e-13


class Family(str, enum.Enum):
    POWER_RL = "PowerRL"
    DAMPED_POWER = "DampedPower"
    BESSEL = "BesselPair"
    KUMMER = "KummerPair"
    ERFC = "ErfcPair"
    MITTAG_LEFFLER = "MittagLefflerPair"
    HANYGA = "HanygaPair"
    CLASSICAL = "Classical"


class Side(str, enum.Enum):
    M = "M"
    K = "K"


@dataclass(frozen=True)
class Kernel:
    r"""A kernel ``t^exponent · regular(t)``."""

    #: endpoint exponent ``p`` of the kernel at ``t = 0``
    exponent: float
    #: the continuous factor ``g``
    regular: ArrayFn = field(compare=False)
    #: ``t g'(t)``; ``None`` when not available
    regular_euler: ArrayFn | None = field(default=None, compare=False)
    label: str = ""

    def value(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.power(t, self.exponent) * self.regular(t)

    def plus_euler(self) -> Kernel:
        r"""The kernel ``K(u) + u K'(u) = u^p ((1+p) g(u) + u g'(u))``."""
        if self.regular_euler is None:
            raise DomainError(f"kernel {self.label} has no Euler derivative")
        p, g, tg = self.exponent, self.regular, self.regular_euler
        return Kernel(p, lambda t: (1.0 + p) * g(t) + tg(t), None, f"(1+u*d/du)[{self.label}]")

    def euler(self) -> Kernel:
        r"""The kernel ``u K'(u) = u^p (p g(u) + u g'(u))``."""
        if self.regular_euler is None:
            raise DomainError(f"kernel {self.label} has no Euler derivative")
        p, g, tg = self.exponent, self.regular, self.regular_euler
        return Kernel(p, lambda t: p * g(t) + tg(t), None, f"u*d/du[{self.label}]")


def _const(c: float) -> ArrayFn:
    return lambda t: np.full(np.shape(t), c)


def _zero(t: np.ndarray) -> np.ndarray:
    return np.zeros(np.shape(t))


def power_kernel(order: float) -> Kernel:
    """``h_order(t) = t^{order-1}/Γ(order)``."""
    return Kernel(order - 1.0, _const(specfun.rgamma(order)), _zero, f"h_{order:g}")


UNIT_KERNEL = Kernel(0.0, _const(1.0), _zero, "1")


@dataclass(frozen=True)
class KernelPair:
    """A Sonin pair; ``k`` is ``None`` only for the classical flag."""

    family: Family
    params: tuple[tuple[str, float], ...]
    m: Kernel
    k: Kernel | None
    #: True when the roles of M and K were exchanged
    swapped: bool = False

    @property
    def classical(self) -> bool:
        return self.family is Family.CLASSICAL

    @property
    def param_dict(self) -> dict[str, float]:
        return dict(self.params)

    @property
    def alpha(self) -> float:
        return self.param_dict.get("alpha", 1.0)

    @property
    def m_exponent(self) -> float:
        return self.m.exponent

    @property
    def k_exponent(self) -> float:
        if self.k is None:
            raise DomainError("the classical pair has no derivative kernel function")
        return self.k.exponent

    def m_regular(self, t) -> np.ndarray:
        return self.m.regular(np.asarray(t, dtype=float))

    def k_regular(self, t) -> np.ndarray:
        if self.k is None:
            raise DomainError("the classical pair has no derivative kernel function")
        return self.k.regular(np.asarray(t, dtype=float))

    def exchanged(self) -> KernelPair:
        """The associated pair ``(K, M)``."""
        if self.k is None:
            raise DomainError("the classical pair cannot be exchanged (K is a delta)")
        return KernelPair(self.family, self.params, self.k, self.m, not self.swapped)

    @property
    def label(self) -> str:
        body = ",".join(f"{k}={v:g}" for k, v in self.params)
        name = f"{self.family.value}({body})"
        return f"swap[{name}]" if self.swapped else name

    def __str__(self) -> str:
        return self.label


# {{{ family constructors


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")


def _power_rl(alpha: float) -> tuple[Kernel, Kernel]:
    _check_alpha(alpha)
    return power_kernel(alpha), power_kernel(1.0 - alpha)


def _damped_power(alpha: float, lam: float) -> tuple[Kernel, Kernel]:
    _check_alpha(alpha)
    if not lam >= 0:
        raise DomainError("DampedPower requires lambda >= 0")
    ra, rb = specfun.rgamma(alpha), specfun.rgamma(1.0 - alpha)

    def gm(t):
        return ra * np.exp(-lam * t)

    def tgm(t):
        return -lam * t * ra * np.exp(-lam * t)

    def incomplete(t):
        if lam == 0:
            return np.zeros(np.shape(t))
        return lam**alpha * np.power(t, alpha) * specfun.lower_incomplete_gamma(1.0 - alpha, lam * np.asarray(t))

    def gk(t):
        return rb * np.exp(-lam * t) + rb * incomplete(t)

    def tgk(t):
        # the exponential parts cancel; only the incomplete-gamma term survives
        return alpha * rb * incomplete(t)

    return (
        Kernel(alpha - 1.0, gm, tgm, f"h_{alpha:g},{lam:g}"),
        Kernel(-alpha, gk, tgk, f"damped-assoc({alpha:g},{lam:g})"),
    )


def _bessel(alpha: float) -> tuple[Kernel, Kernel]:
    _check_alpha(alpha)
    nm, nk = alpha - 1.0, -alpha

    def gm(t):
        return specfun.bessel_j_regular(nm, 2.0 * np.sqrt(t))

    def tgm(t):
        # d/dt of Σ(-t)^k/(k!Γ(k+ν+1)) is minus the same series of order ν+1
        return -t * specfun.bessel_j_regular(nm + 1.0, 2.0 * np.sqrt(t))

    def gk(t):
        return specfun.bessel_i_regular(nk, 2.0 * np.sqrt(t))

    def tgk(t):
        return t * specfun.bessel_i_regular(nk + 1.0, 2.0 * np.sqrt(t))

    return Kernel(nm, gm, tgm, f"besselJ({alpha:g})"), Kernel(nk, gk, tgk, f"besselI({alpha:g})")


def _kummer(alpha: float, beta: float, lam: float) -> tuple[Kernel, Kernel]:
    _check_alpha(alpha)
    if not lam >= 0:
        raise DomainError("KummerPair requires lambda >= 0")
    c = math.sin(math.pi * alpha) / math.pi

    def gm(t):
        return specfun.kummer(beta, alpha, -lam * np.asarray(t))

    def tgm(t):
        t = np.asarray(t)
        return -lam * t * (beta / alpha) * specfun.kummer(beta + 1.0, alpha + 1.0, -lam * t)

    def gk(t):
        return c * specfun.kummer(-beta, 1.0 - alpha, -lam * np.asarray(t))

    def tgk(t):
        t = np.asarray(t)
        return c * lam * t * (beta / (1.0 - alpha)) * specfun.kummer(1.0 - beta, 2.0 - alpha, -lam * t)

    return Kernel(alpha - 1.0, gm, tgm, "kummerM"), Kernel(-alpha, gk, tgk, "kummerK")


def _erfc(lam: float) -> tuple[Kernel, Kernel]:
    if not lam > 0:
        raise DomainError("ErfcPair requires lambda > 0")
    inv_sqrt_pi = 1.0 / specfun.SQRT_PI

    def gm(t):
        return np.sqrt(t) + lam * inv_sqrt_pi

    def tgm(t):
        return 0.5 * np.sqrt(t)

    def gk(t):
        w = lam * np.sqrt(t)
        return inv_sqrt_pi - w * specfun.erfcx(w)

    def tgk(t):
        w = lam * np.sqrt(t)
        # d/dw erfcx(w) = 2 w erfcx(w) - 2/sqrt(pi)
        return -0.5 * w * (specfun.erfcx(w) * (1.0 + 2.0 * w * w) - 2.0 * w * inv_sqrt_pi)

    return Kernel(-0.5, gm, tgm, f"erfcM({lam:g})"), Kernel(-0.5, gk, tgk, f"erfcK({lam:g})")


def _mittag_leffler(alpha: float, lam: float) -> tuple[Kernel, Kernel]:
    _check_alpha(alpha)
    if not lam > 0:
        raise DomainError("MittagLefflerPair requires lambda > 0")
    a = 1.0 - alpha
    ra = specfun.rgamma(alpha)

    def gm(t):
        return np.power(t, a) - lam * ra

    def tgm(t):
        return a * np.power(t, a)

    def ml(b, t):
        return specfun.mittag_leffler(a, b, lam * np.power(t, a), tol=KERNEL_SERIES_TOL)

    def gk(t):
        return lam * ml(a, t)

    def tgk(t):
        # z E'(z) = (E_{a,b-1}(z) - (b-1) E_{a,b}(z)) / a with b = a, times a from dz/dt
        return lam * (ml(a - 1.0, t) - (a - 1.0) * ml(a, t))

    return Kernel(alpha - 1.0, gm, tgm, "mlM"), Kernel(-alpha, gk, tgk, "mlK")


def _hanyga(alpha: float, beta: float) -> tuple[Kernel, Kernel]:
    if not 0.0 < alpha < beta < 1.0:
        raise DomainError("HanygaPair requires 0 < alpha < beta < 1")
    r1, r2 = specfun.rgamma(1.0 - beta + alpha), specfun.rgamma(1.0 - beta)

    def gm(t):
        return np.power(t, alpha) * r1 + r2

    def tgm(t):
        return alpha * np.power(t, alpha) * r1

    def ml(b, t):
        return specfun.mittag_leffler(alpha, b, -np.power(t, alpha), tol=KERNEL_SERIES_TOL)

    def gk(t):
        return ml(beta, t)

    def tgk(t):
        return ml(beta - 1.0, t) - (beta - 1.0) * ml(beta, t)

    return Kernel(-beta, gm, tgm, "hanygaM"), Kernel(beta - 1.0, gk, tgk, "hanygaK")


_FAMILY_PARAMS: dict[Family, tuple[str, ...]] = {
    Family.POWER_RL: ("alpha",),
    Family.DAMPED_POWER: ("alpha", "lambda"),
    Family.BESSEL: ("alpha",),
    Family.KUMMER: ("alpha", "beta", "lambda"),
    Family.ERFC: ("lambda",),
    Family.MITTAG_LEFFLER: ("alpha", "lambda"),
    Family.HANYGA: ("alpha", "beta"),
    Family.CLASSICAL: (),
}


def family_parameters(family: Family | str) -> tuple[str, ...]:
    return _FAMILY_PARAMS[Family(family)]


def make_pair(family: Family | str, params: Mapping[str, float] | None = None, **kwargs: float) -> KernelPair:
    """Build a catalog pair, e.g. ``make_pair("PowerRL", alpha=0.5)``."""
    try:
        fam = Family(family)
    except ValueError:
        raise DomainError(f"unknown kernel family {family!r}") from None
    given = {**(params or {}), **kwargs}
    names = _FAMILY_PARAMS[fam]
    unknown = set(given) - set(names)
    missing = set(names) - set(given)
    if unknown or missing:
        raise DomainError(
            f"{fam.value} takes parameters {list(names)}; "
            f"missing {sorted(missing)}, unexpected {sorted(unknown)}"
        )
    values = {k: float(given[k]) for k in names}
    if any(not math.isfinite(v) for v in values.values()):
        raise DomainError("kernel parameters must be finite")
    if fam is Family.CLASSICAL:
        return KernelPair(fam, (), UNIT_KERNEL, None)
    builders = {
        Family.POWER_RL: lambda: _power_rl(values["alpha"]),
        Family.DAMPED_POWER: lambda: _damped_power(values["alpha"], values["lambda"]),
        Family.BESSEL: lambda: _bessel(values["alpha"]),
        Family.KUMMER: lambda: _kummer(values["alpha"], values["beta"], values["lambda"]),
        Family.ERFC: lambda: _erfc(values["lambda"]),
        Family.MITTAG_LEFFLER: lambda: _mittag_leffler(values["alpha"], values["lambda"]),
        Family.HANYGA: lambda: _hanyga(values["alpha"], values["beta"]),
    }
    m, k = builders[fam]()
    return KernelPair(fam, tuple(values.items()), m, k)


CLASSICAL = make_pair(Family.CLASSICAL)


def eval_kernel(pair: KernelPair, side: Side | str, t):
    """Value of ``M(t)`` or ``K(t)`` for ``t > 0``."""
    ta = np.asarray(t, dtype=float)
    if np.any(~(ta > 0)):
        raise DomainError("kernels are evaluated only at t > 0")
    side = Side(side)
    if side is Side.M:
        out = pair.m.value(ta)
    else:
        if pair.k is None:
            raise DomainError("the classical derivative kernel is a delta, not a function")
        out = pair.k.value(ta)
    return float(out) if ta.ndim == 0 else out


# }}}

# {{{ Sonin verification


@dataclass(frozen=True)
class SoninReport:
    """Residuals ``(M*K)(x) - 1`` of a pair on sample points."""

    pair: str
    family: str
    params: tuple[tuple[str, float], ...]
    xs: tuple[float, ...]
    residuals: tuple[float, ...]
    errors: tuple[float, ...]
    max_abs_residual: float

    def passes(self, tol: float) -> bool:
        return self.max_abs_residual < tol


def sonin_residual(pair: KernelPair, xs: Iterable[float], quad: QuadSpec = DEFAULT_SPEC) -> SoninReport:
    """Compute ``(M*K)(x) - 1`` by doubly singular convolution quadrature.

    For the classical flag ``M * δ = M ≡ 1`` and the residuals are exactly 0.
    """
    x = np.asarray(list(xs), dtype=float)
    if x.size == 0 or np.any(~(x > 0)):
        raise DomainError("Sonin verification needs nonempty sample points > 0")
    if pair.k is None:
        res = pair.m.value(x) - 1.0
        err = np.zeros_like(x)
    else:
        k = pair.k
        try:
            vals, err = convolve_batch(pair.m, lambda idx, t: k.value(t), x, quad, k.exponent)
        except AccuracyError as exc:
            raise AccuracyError(f"Sonin check of {pair.label}: {exc}", exc.best, exc.bound) from exc
        res = vals - 1.0
    return SoninReport(
        pair.label,
        pair.family.value,
        pair.params,
        tuple(float(v) for v in x),
        tuple(float(r) for r in res),
        tuple(float(e) for e in err),
        float(np.max(np.abs(res))),
    )


#: sample points of the catalog admission check
SONIN_XS = (0.1, 0.5, 1.0, 2.0, 10.0)


def family_tolerance(pair: KernelPair) -> float:
    """Admission tolerance: exact Beta identity for power kernels, else quadrature-limited."""
    if pair.family in (Family.POWER_RL, Family.CLASSICAL):
        return 1e-10
    return 1e-7


@dataclass(frozen=True)
class CatalogEntry:
    pair: KernelPair
    enabled: bool
    report: SoninReport | None
    note: str = ""


#: the shipped catalog, before verification
CATALOG_DECLARATIONS: tuple[tuple[str, dict[str, float]], ...] = (
    ("PowerRL", {"alpha": 0.25}),
    ("PowerRL", {"alpha": 0.5}),
    ("PowerRL", {"alpha": 0.75}),
    ("DampedPower", {"alpha": 0.5, "lambda": 1.0}),
    ("BesselPair", {"alpha": 0.5}),
    ("KummerPair", {"alpha": 0.5, "beta": 0.5, "lambda": 1.0}),
    ("ErfcPair", {"lambda": 1.0}),
    ("MittagLefflerPair", {"alpha": 0.5, "lambda": 1.0}),
    ("HanygaPair", {"alpha": 0.3, "beta": 0.7}),
    ("Classical", {}),
)


def verify_entry(pair: KernelPair, spec: QuadSpec = DEFAULT_SPEC, xs: Iterable[float] = SONIN_XS) -> CatalogEntry:
    """Admit a pair only if its Sonin residual passes the family tolerance."""
    try:
        report = sonin_residual(pair, xs, spec)
    except AccuracyError as exc:
        return CatalogEntry(pair, False, None, f"verification failed: {exc}")
    ok = report.passes(family_tolerance(pair))
    note = "" if ok else f"Sonin residual {report.max_abs_residual:.3e} exceeds {family_tolerance(pair):g}"
    return CatalogEntry(pair, ok, report, note)


_catalog_cache: dict[QuadSpec, tuple[CatalogEntry, ...]] = {}


def catalog(spec: QuadSpec = DEFAULT_SPEC) -> tuple[CatalogEntry, ...]:
    """All shipped pairs with their verification status (cached per spec)."""
    if spec not in _catalog_cache:
        _catalog_cache[spec] = tuple(verify_entry(make_pair(f, p), spec) for f, p in CATALOG_DECLARATIONS)
    return _catalog_cache[spec]


def enabled_pairs(spec: QuadSpec = DEFAULT_SPEC) -> list[KernelPair]:
    return [e.pair for e in catalog(spec) if e.enabled]


# }}}

# vim: foldmethod=marker
