"""Frozen closed-form reference values, computed independently of the package.

Everything here uses ``math`` or ``mpmath`` only, never ``gfvc``.
"""

from __future__ import annotations

import math

import mpmath as mp

mp.mp.dps = 30

SQRT_PI = math.sqrt(math.pi)
#: h_{1.5}(1) = 1/Gamma(1.5) = 2/sqrt(pi)
H15 = 1.1283791670955126
#: h_{0.5}(1) = 1/sqrt(pi)
H05 = 0.5641895835477563
#: h_{1.5}(1)^2 = 4/pi
FOUR_OVER_PI = 1.2732395447351628
#: h_{1.5}(1)^3
H15_CUBED = 1.4366969769407632
#: 4/sqrt(pi)
FOUR_OVER_SQRT_PI = 2.2567583341910252
#: 2/Gamma(2.5)
D05_X2 = 1.5045055561273500
LEIBNIZ_X_X = -0.7522527780636752


def h(alpha: float, t: float) -> float:
    """Power kernel ``t^(alpha-1)/Gamma(alpha)``."""
    return float(mp.power(t, alpha - 1) / mp.gamma(alpha))


def riemann_liouville_power(alpha: float, mu: float, x: float) -> float:
    """``I^alpha x^mu = Gamma(mu+1)/Gamma(mu+1+alpha) x^(mu+alpha)``."""
    return float(mp.gamma(mu + 1) / mp.gamma(mu + 1 + alpha) * mp.power(x, mu + alpha))


def caputo_power(alpha: float, mu: float, x: float) -> float:
    """``D^alpha x^mu = Gamma(mu+1)/Gamma(mu+1-alpha) x^(mu-alpha)`` for ``mu > 0``."""
    return float(mp.gamma(mu + 1) / mp.gamma(mu + 1 - alpha) * mp.power(x, mu - alpha))


def gamma(x: float) -> float:
    return float(mp.gamma(x))


def bessel_j(nu: float, x: float) -> float:
    return float(mp.besselj(nu, x))


def bessel_i(nu: float, x: float) -> float:
    return float(mp.besseli(nu, x))


def lower_gamma(a: float, t: float) -> float:
    return float(mp.gammainc(a, 0, t))


def erfc(z: float) -> float:
    return float(mp.erfc(z))


def mittag_leffler(alpha: float, beta: float, z: float) -> float:
    """Direct high-precision series."""
    total = mp.mpf(0)
    zz = mp.mpf(z)
    for k in range(400):
        term = zz**k * mp.rgamma(alpha * k + beta)
        total += term
        if k > 20 and abs(term) < mp.mpf(10) ** -28:
            break
    return float(total)


def kummer(b: float, a: float, z: float) -> float:
    """Confluent hypergeometric 1F1(b; a; z)."""
    return float(mp.hyp1f1(b, a, z))
