r"""Special functions used by the kernel catalog.

Every public function accepts scalars or numpy arrays and broadcasts.  A
scalar input returns a Python ``float``; passing ``with_error=True`` on a
scalar call returns a :class:`SpecFunResult` carrying an error estimate.

Series evaluations use compensated (Neumaier) summation and report an
estimate built from the truncation tail plus a rounding term proportional to
the sum of absolute term values, which is what limits accuracy under
cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AccuracyError, DomainError

EPS = float(np.finfo(float).eps)
SQRT_PI = math.sqrt(math.pi)

#: Series evaluations stop after this many terms and raise instead.
MAX_SERIES_TERMS = 2000

#: A series whose rounding estimate exceeds this fraction of max(1, |value|)
#: is considered to have lost all useful accuracy.
MAX_ROUNDING_LOSS = 1e-6


@dataclass(frozen=True)
class SpecFunResult:
    """A function value with an estimated absolute error."""

    #: the computed value
    value: float
    #: claimed upper bound on the absolute error of ``value``
    est_abs_error: float


def _prepare(*args: object) -> tuple[list[np.ndarray], bool]:
    arrays = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in args])
    scalar = all(np.ndim(a) == 0 for a in args)
    return [np.array(a, dtype=float) for a in arrays], scalar


def _finish(value: np.ndarray, err: np.ndarray, scalar: bool, with_error: bool):
    if scalar:
        v = float(value)
        if with_error:
            return SpecFunResult(v, float(err))
        return v
    if with_error:
        raise ValueError("with_error is only supported for scalar arguments")
    return value


# {{{ gamma

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _lanczos_parts(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (t, series) for arguments ``x >= 0.5``."""
    xm = x - 1.0
    series = np.full_like(xm, _LANCZOS[0])
    for i, c in enumerate(_LANCZOS[1:], start=1):
        series = series + c / (xm + i)
    return xm + _LANCZOS_G + 0.5, series


#: Γ(n) = (n-1)! for n = 1..171, exact where representable
_FACTORIALS = np.array([float(math.factorial(n)) for n in range(171)])


def _gamma_positive(x: np.ndarray) -> np.ndarray:
    small = x < 0.5
    shifted = np.where(small, x + 1.0, x)
    t, series = _lanczos_parts(shifted)
    # split the power so that arguments up to ~171 do not overflow early
    half = np.power(t, 0.5 * (shifted - 0.5))
    value = math.sqrt(2.0 * math.pi) * half * (half * np.exp(-t)) * series
    value = np.where(small, value / np.where(small, x, 1.0), value)
    integer = (x == np.floor(x)) & (x >= 1.0) & (x <= 171.0)
    idx = np.where(integer, x - 1.0, 0.0).astype(int)
    return np.where(integer, _FACTORIALS[idx], value)


def gamma(x, *, with_error: bool = False):
    r"""Gamma function for positive arguments (Lanczos, g=7)."""
    (xa,), scalar = _prepare(x)
    if np.any(~(xa > 0)):
        raise DomainError("gamma is defined here only for x > 0")
    value = _gamma_positive(xa)
    return _finish(value, 1e-14 * np.abs(value), scalar, with_error)


def _log_gamma_positive(x: np.ndarray) -> np.ndarray:
    small = x < 0.5
    shifted = np.where(small, x + 1.0, x)
    t, series = _lanczos_parts(shifted)
    value = 0.5 * math.log(2.0 * math.pi) + (shifted - 0.5) * np.log(t) - t + np.log(series)
    return np.where(small, value - np.log(np.where(small, x, 1.0)), value)


def log_gamma(x):
    """``log Γ(x)`` for positive arguments."""
    (xa,), scalar = _prepare(x)
    if np.any(~(xa > 0)):
        raise DomainError("log_gamma is defined here only for x > 0")
    value = _log_gamma_positive(xa)
    return float(value) if scalar else value


def _sinpi(x: np.ndarray) -> np.ndarray:
    # reduce to [-1, 1) first so that sin(pi x) is exact at integers
    r = x - 2.0 * np.floor(0.5 * (x + 1.0))
    return np.sin(np.pi * r)


def _is_pole(x: np.ndarray) -> np.ndarray:
    return (x <= 0) & (x == np.round(x))


def log_abs_gamma_signed(x) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(log|Γ(x)|, sign Γ(x))`` for any real non-pole ``x``.

    Poles produce ``(+inf, 0)`` so that ``sign * exp(-log)`` is the
    reciprocal gamma value 0.
    """
    xa = np.array(x, dtype=float)
    out = np.empty_like(xa)
    sign = np.ones_like(xa)
    pos = xa >= 0.5
    out[pos] = _log_gamma_positive(xa[pos])
    neg = ~pos
    if np.any(neg):
        xn = xa[neg]
        s = _sinpi(xn)
        with np.errstate(divide="ignore"):
            out[neg] = math.log(math.pi) - np.log(np.abs(s)) - _log_gamma_positive(1.0 - xn)
        sign[neg] = np.sign(s)
    poles = _is_pole(xa)
    out[poles] = np.inf
    sign[poles] = 0.0
    return out, sign


def rgamma(x):
    """Reciprocal gamma ``1/Γ(x)``, an entire function (zero at the poles)."""
    (xa,), scalar = _prepare(x)
    out = _rgamma_array(xa)
    return float(out) if scalar else out


def _rgamma_array(xa: np.ndarray) -> np.ndarray:
    xa = np.array(xa, dtype=float)
    out = np.zeros_like(xa)
    pos = xa >= 0.5
    big = xa > 150.0
    mid = pos & ~big
    out[mid] = 1.0 / _gamma_positive(xa[mid])
    out[big] = np.exp(-_log_gamma_positive(xa[big]))
    neg = ~pos
    if np.any(neg):
        xn = xa[neg]
        # 1/Γ(x) = Γ(1-x) sin(πx)/π
        vals = _gamma_positive(1.0 - xn) * _sinpi(xn) / math.pi
        vals[_is_pole(xn)] = 0.0
        out[neg] = vals
    return out


# }}}

# {{{ incomplete gamma


def _gamma_series(a: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lower incomplete gamma by its power series; returns (value, error)."""
    term = 1.0 / a
    total = term.copy()
    active = np.ones(a.shape, dtype=bool)
    for n in range(1, MAX_SERIES_TERMS):
        term = np.where(active, term * x / (a + n), 0.0)
        total = total + term
        active &= np.abs(term) > EPS * np.abs(total)
        if not np.any(active):
            break
    else:
        raise AccuracyError("incomplete gamma series did not converge", float(np.max(total)))
    with np.errstate(divide="ignore"):
        prefactor = np.exp(-x + a * np.log(x))
    prefactor = np.where(x == 0, 0.0, prefactor)
    value = prefactor * total
    return value, 4 * EPS * np.abs(value)


def _upper_gamma_cf(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Continued fraction part ``h`` with Γ(a,x) = exp(-x) x^a h (modified Lentz)."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, MAX_SERIES_TERMS):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = b + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > EPS
        if not np.any(active):
            return h
    raise AccuracyError("incomplete gamma continued fraction did not converge")


def _check_incomplete_args(a: np.ndarray, x: np.ndarray) -> None:
    if np.any(~(a > 0)) or np.any(~(x >= 0)):
        raise DomainError("incomplete gamma requires beta > 0 and t >= 0")


def lower_incomplete_gamma(beta, t, *, with_error: bool = False):
    r"""Lower incomplete gamma ``γ(β, t) = ∫_0^t s^{β-1} e^{-s} ds``."""
    (a, x), scalar = _prepare(beta, t)
    _check_incomplete_args(a, x)
    value = np.empty_like(x)
    err = np.empty_like(x)
    use_series = x < a + 1.0
    if np.any(use_series):
        v, e = _gamma_series(a[use_series], x[use_series])
        value[use_series] = v
        err[use_series] = e
    cf = ~use_series
    if np.any(cf):
        ac, xc = a[cf], x[cf]
        h = _upper_gamma_cf(ac, xc)
        full = _gamma_positive(ac)
        upper = np.exp(-xc + ac * np.log(xc)) * h
        value[cf] = full - upper
        err[cf] = 1e-14 * full + 4 * EPS * upper
    return _finish(value, err, scalar, with_error)


def upper_incomplete_gamma(beta, t):
    r"""Upper incomplete gamma ``Γ(β, t) = ∫_t^∞ s^{β-1} e^{-s} ds``."""
    (a, x), scalar = _prepare(beta, t)
    _check_incomplete_args(a, x)
    value = np.empty_like(x)
    use_series = x < a + 1.0
    if np.any(use_series):
        v, _ = _gamma_series(a[use_series], x[use_series])
        value[use_series] = _gamma_positive(a[use_series]) - v
    cf = ~use_series
    if np.any(cf):
        ac, xc = a[cf], x[cf]
        value[cf] = np.exp(-xc + ac * np.log(xc)) * _upper_gamma_cf(ac, xc)
    return float(value) if scalar else value


# }}}

# {{{ error function


def _erfcx_nonneg(z: np.ndarray) -> np.ndarray:
    """Scaled complement ``exp(z²) erfc(z)`` for ``z >= 0``."""
    out = np.empty_like(z)
    x = z * z
    near = x < 1.5
    if np.any(near):
        zn = z[near]
        lower, _ = _gamma_series(np.full_like(zn, 0.5), x[near])
        out[near] = np.exp(x[near]) * (1.0 - lower / SQRT_PI)
    far = ~near
    if np.any(far):
        zf = z[far]
        # Γ(1/2, z²) = exp(-z²) z h, so the exponential cancels exactly
        out[far] = zf * _upper_gamma_cf(np.full_like(zf, 0.5), x[far]) / SQRT_PI
    return out


def erfc(z, *, with_error: bool = False):
    """Complementary error function."""
    (za,), scalar = _prepare(z)
    if np.any(~np.isfinite(za)):
        raise DomainError("erfc requires a finite argument")
    az = np.abs(za)
    with np.errstate(over="ignore"):
        pos = _erfcx_nonneg(az) * np.exp(-az * az)
    value = np.where(za >= 0, pos, 2.0 - pos)
    return _finish(value, 8 * EPS * np.abs(value), scalar, with_error)


def erfcx(z):
    """Scaled complementary error function ``exp(z²) erfc(z)``."""
    (za,), scalar = _prepare(z)
    if np.any(~np.isfinite(za)):
        raise DomainError("erfcx requires a finite argument")
    az = np.abs(za)
    pos = _erfcx_nonneg(az)
    with np.errstate(over="ignore"):
        value = np.where(za >= 0, pos, 2.0 * np.exp(az * az) - pos)
    return float(value) if scalar else value


# }}}

# {{{ Bessel functions

#: ascending series is used up to this argument, the Hankel expansion above
BESSEL_SERIES_LIMIT = 15.0


def _bessel_regular_series(nu: np.ndarray, x: np.ndarray, sign: float) -> tuple[np.ndarray, np.ndarray]:
    r"""``Σ (sign x²/4)^k / (k! Γ(k+ν+1))`` for ``ν > -1``."""
    q = sign * 0.25 * x * x
    term = _rgamma_array(nu + 1.0)
    total = term.copy()
    comp = np.zeros_like(total)
    abs_total = np.abs(term)
    active = np.ones(x.shape, dtype=bool)
    for k in range(MAX_SERIES_TERMS):
        term = np.where(active, term * q / ((k + 1.0) * (k + nu + 1.0)), 0.0)
        # Neumaier compensation
        s = total + term
        comp += np.where(np.abs(total) >= np.abs(term), (total - s) + term, (term - s) + total)
        total = s
        abs_total += np.abs(term)
        active &= (np.abs(term) > EPS * np.abs(total)) | (k < 2.0 * np.abs(q) ** 0.5)
        if not np.any(active):
            break
    else:
        raise AccuracyError("Bessel series did not converge")
    value = total + comp
    return value, 4 * EPS * abs_total


def _hankel_j(nu: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hankel asymptotic expansion of J_ν(x) for large x."""
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    last = np.ones_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 200):
        nxt = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        growing = np.abs(nxt) > np.abs(term)
        active &= ~growing
        nxt = np.where(active, nxt, 0.0)
        if k % 2 == 1:
            q += (-1) ** ((k - 1) // 2) * nxt
        else:
            p += (-1) ** (k // 2) * nxt
        term = np.where(active, nxt, term)
        last = np.where(active, np.abs(nxt), last)
        active &= np.abs(nxt) > EPS
        if not np.any(active):
            break
    omega = x - (0.5 * nu + 0.25) * math.pi
    amp = np.sqrt(2.0 / (math.pi * x))
    value = amp * (p * np.cos(omega) - q * np.sin(omega))
    return value, amp * (last + 8 * EPS)


def _check_bessel_args(nu: np.ndarray, x: np.ndarray) -> None:
    if np.any(~(nu >= -1.0)):
        raise DomainError("Bessel order must satisfy nu >= -1")
    if np.any(~(x >= 0.0)):
        raise DomainError("Bessel argument must satisfy x >= 0")


def _regular(nu: np.ndarray, x: np.ndarray, sign: float) -> tuple[np.ndarray, np.ndarray]:
    # order -1: use J_{-1} = -J_1, I_{-1} = I_1 in regular-part form
    minus_one = nu == -1.0
    nu_eff = np.where(minus_one, 1.0, nu)
    value, err = _bessel_regular_series(nu_eff, x, sign)
    factor = np.where(minus_one, sign * 0.25 * x * x, 1.0)
    return value * factor, err * np.abs(factor)


def bessel_j_regular(nu, x):
    r"""Entire part ``(x/2)^{-ν} J_ν(x) = Σ (-x²/4)^k/(k! Γ(k+ν+1))`` (series only)."""
    (n, xa), scalar = _prepare(nu, x)
    _check_bessel_args(n, xa)
    value, _ = _regular(n, xa, -1.0)
    return float(value) if scalar else value


def bessel_i_regular(nu, x):
    r"""Entire part ``(x/2)^{-ν} I_ν(x) = Σ (x²/4)^k/(k! Γ(k+ν+1))``."""
    (n, xa), scalar = _prepare(nu, x)
    _check_bessel_args(n, xa)
    value, _ = _regular(n, xa, 1.0)
    return float(value) if scalar else value


def _power_half(nu: np.ndarray, x: np.ndarray) -> np.ndarray:
    if np.any((x == 0) & (nu < 0) & (nu != -1.0)):
        raise DomainError("Bessel function of negative non-integer order is singular at x = 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.power(0.5 * x, nu)
    return np.where((x == 0) & (nu == 0), 1.0, np.where((x == 0) & (nu == -1.0), 0.0, out))


def bessel_j(nu, x, *, with_error: bool = False):
    """Bessel function of the first kind ``J_ν(x)`` for ``ν >= -1``, ``x >= 0``."""
    (n, xa), scalar = _prepare(nu, x)
    _check_bessel_args(n, xa)
    value = np.empty_like(xa)
    err = np.empty_like(xa)
    low = xa <= BESSEL_SERIES_LIMIT
    if np.any(low):
        nl, xl = n[low], xa[low]
        reg, reg_err = _regular(nl, xl, -1.0)
        scale = _power_half(nl, xl)
        value[low] = scale * reg
        err[low] = np.abs(scale) * reg_err
    high = ~low
    if np.any(high):
        v, e = _hankel_j(n[high], xa[high])
        value[high] = v
        err[high] = e
    return _finish(value, err, scalar, with_error)


def bessel_i(nu, x, *, with_error: bool = False):
    """Modified Bessel function ``I_ν(x)`` for ``ν >= -1``, ``x >= 0`` (series)."""
    (n, xa), scalar = _prepare(nu, x)
    _check_bessel_args(n, xa)
    reg, reg_err = _regular(n, xa, 1.0)
    scale = _power_half(n, xa)
    return _finish(scale * reg, np.abs(scale) * reg_err, scalar, with_error)


# }}}

# {{{ Mittag-Leffler and Kummer


def _sum_log_terms(
    log_term: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]],
    size: int,
    tol: float,
    name: str,
    chunk: int = 64,
) -> tuple[np.ndarray, np.ndarray]:
    """Sum ``Σ_k sign_k exp(log_k)`` where ``log_term(k, rows)`` gives (log|t|, sign)
    for a row of indices ``k`` and the still unfinished series ``rows``.

    Each chunk of terms is summed pairwise and the chunk sums are
    accumulated with Neumaier compensation.
    """
    total = np.zeros(size)
    comp = np.zeros(size)
    abs_total = np.zeros(size)
    last = np.full(size, np.inf)
    rows = np.arange(size)
    start = 0
    while start < MAX_SERIES_TERMS and rows.size:
        k = np.arange(start, start + chunk, dtype=float)
        logs, signs = log_term(k, rows)
        with np.errstate(over="ignore", under="ignore"):
            terms = signs * np.exp(logs)
        part = terms.sum(axis=1)
        if not np.all(np.isfinite(part)):
            idx = int(rows[np.flatnonzero(~np.isfinite(part))[0]])
            raise AccuracyError(f"{name} series terms overflow", float(total[idx]), math.inf)
        old = total[rows]
        new_total = old + part
        comp[rows] += np.where(np.abs(old) >= np.abs(part), (old - new_total) + part, (part - new_total) + old)
        total[rows] = new_total
        absterms = np.abs(terms)
        abs_total[rows] += absterms.sum(axis=1)
        tail = absterms[:, -1]
        decreasing = tail <= absterms[:, -2]
        small = tail <= 0.01 * tol * np.maximum(1.0, np.abs(new_total + comp[rows]))
        small |= absterms[:, -8:].max(axis=1) == 0.0
        done = decreasing & small
        last[rows[done]] = tail[done]
        rows = rows[~done]
        start += chunk
    if rows.size:
        idx = int(rows[0])
        raise AccuracyError(
            f"{name} series exceeded the {MAX_SERIES_TERMS}-term budget",
            float(total[idx] + comp[idx]),
            float(abs_total[idx]),
        )
    value = total + comp
    err = 16 * EPS * abs_total + last
    too_lossy = err > MAX_ROUNDING_LOSS * np.maximum(1.0, np.abs(value))
    if np.any(too_lossy):
        idx = int(np.flatnonzero(too_lossy)[0])
        raise AccuracyError(
            f"{name} series lost accuracy to cancellation", float(value[idx]), float(err[idx])
        )
    return value, err


def mittag_leffler(alpha: float, beta: float, z, *, tol: float = 1e-12, with_error: bool = False):
    r"""Two-parameter Mittag-Leffler function ``E_{α,β}(z) = Σ z^k/Γ(αk+β)``.

    Direct power series with compensated summation.  The series is stopped
    once the tail drops below ``tol``; more than :data:`MAX_SERIES_TERMS`
    terms, or rounding loss beyond :data:`MAX_ROUNDING_LOSS`, raises
    :class:`AccuracyError`.
    """
    if not alpha > 0:
        raise DomainError("mittag_leffler requires alpha > 0")
    (za,), scalar = _prepare(z)
    flat = za.reshape(-1)
    with np.errstate(divide="ignore"):
        log_abs_z = np.log(np.abs(flat))[:, None]
    negative = (flat < 0)[:, None]

    def log_term(k: np.ndarray, rows: np.ndarray):
        lg, sg = log_abs_gamma_signed(alpha * k + beta)
        lz = log_abs_z[rows]
        with np.errstate(invalid="ignore"):
            powers = np.where(k == 0, 0.0, k * lz)
        sign = sg * np.where(negative[rows] & (k % 2 == 1), -1.0, 1.0)
        sign = np.where(powers == -np.inf, 0.0, sign)
        return powers - lg, sign

    value, err = _sum_log_terms(log_term, flat.size, tol, "Mittag-Leffler")
    return _finish(value.reshape(za.shape), err.reshape(za.shape), scalar, with_error)


def _kummer_series(b: float, a: float, z: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Σ (b)_k/(a)_k z^k/k! by term recurrence with compensation (any sign of z)."""
    term = np.ones_like(z)
    total = np.ones_like(z)
    comp = np.zeros_like(z)
    abs_total = np.ones_like(z)
    active = np.ones(z.shape, dtype=bool)
    last = np.zeros_like(z)
    for k in range(MAX_SERIES_TERMS):
        term = np.where(active, term * (b + k) / (a + k) * z / (k + 1.0), 0.0)
        s = total + term
        comp += np.where(np.abs(total) >= np.abs(term), (total - s) + term, (term - s) + total)
        total = s
        abs_total += np.abs(term)
        past_peak = (k + 1.0) > np.abs(z) * max(1.0, abs(b / a) if a != 0 else 1.0) + abs(b) + 1
        done = active & past_peak & (np.abs(term) <= 0.01 * tol * np.maximum(1.0, np.abs(total)))
        last = np.where(done, np.abs(term), last)
        active &= ~done
        if not np.any(active):
            break
    else:
        raise AccuracyError("Kummer series exceeded the term budget")
    value = total + comp
    return value, 16 * EPS * abs_total + last


def kummer(b: float, a: float, z, *, tol: float = 1e-12, with_error: bool = False):
    r"""Confluent hypergeometric function ``Φ(b, a; z) = ₁F₁(b; a; z)``.

    Negative arguments go through Kummer's transformation
    ``Φ(b,a;z) = e^z Φ(a-b,a;-z)`` so that the series has positive terms
    (or terminates).
    """
    if a <= 0 and a == round(a):
        raise DomainError("kummer: a must not be a nonpositive integer")
    (za,), scalar = _prepare(z)
    value = np.empty_like(za)
    err = np.empty_like(za)
    pos = za >= 0
    if np.any(pos):
        v, e = _kummer_series(b, a, za[pos], tol)
        value[pos], err[pos] = v, e
    neg = ~pos
    if np.any(neg):
        zn = za[neg]
        v, e = _kummer_series(a - b, a, -zn, tol)
        scale = np.exp(zn)
        value[neg], err[neg] = scale * v, scale * e + 4 * EPS * np.abs(scale * v)
    bad = err > MAX_ROUNDING_LOSS * np.maximum(1.0, np.abs(value))
    if np.any(bad):
        raise AccuracyError("Kummer series lost accuracy to cancellation")
    return _finish(value, err, scalar, with_error)


# }}}

# vim: foldmethod=marker
