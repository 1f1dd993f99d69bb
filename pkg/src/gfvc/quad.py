r"""Weakly singular convolution quadrature.

The central routine evaluates

.. math::

    (M * f)(x) = \int_0^x M(x - t) f(t) \, dt,
    \qquad M(u) = u^p g(u), \quad f(t) \sim t^q \cdot (\text{smooth}),

for many upper limits ``x`` at once.  After the substitution ``t = x τ`` the
integrand on ``[0, 1]`` has algebraic endpoint behaviour ``τ^q`` and
``(1 - τ)^p``.  A fixed ladder of rules is tried in order:

1. one Gauss-Jacobi panel carrying both endpoint weights, ``n`` nodes;
2. the same with ``2n`` nodes;
3. geometrically graded meshes with ``L = 1, 2, ...`` levels toward both
   endpoints, Gauss-Jacobi on the two end panels, Gauss-Legendre inside.
   Consecutive meshes share all but their end panels, which are reused.

Consecutive rungs are compared; a batch entry is accepted (and frozen) as
soon as the difference drops below ``max(abs_tol, rel_tol |value|)``, or
below the rounding floor of the sum.  Everything is deterministic: the node
sets are fixed and summation order never depends on the data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Protocol

import numpy as np
from scipy.special import roots_jacobi

from .errors import AccuracyError, DomainError

EPS = float(np.finfo(float).eps)
#: smallest positive normal float
TINY = float(np.finfo(float).tiny)


@dataclass(frozen=True)
class QuadSpec:
    """Parameters of the convolution quadrature."""

    #: Gauss nodes per panel
    nodes_per_panel: int = 16
    #: largest number of panels a graded mesh may use
    max_panels: int = 64
    #: absolute tolerance of the rung-difference test
    abs_tol: float = 1e-12
    #: relative tolerance of the rung-difference test
    rel_tol: float = 1e-10
    #: geometric ratio of consecutive panel widths toward an endpoint
    grading: float = 4.0

    def __post_init__(self) -> None:
        if not 2 <= self.nodes_per_panel <= 64:
            raise DomainError("nodes_per_panel must lie in [2, 64]")
        if self.max_panels < 2:
            raise DomainError("max_panels must be at least 2")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if not self.grading >= 1:
            raise DomainError("grading must be >= 1")

    def tightened(self, factor: float = 10.0) -> QuadSpec:
        """Tolerances divided by ``factor`` (floored near machine precision)."""
        return replace(
            self,
            abs_tol=max(self.abs_tol / factor, 1e-15),
            rel_tol=max(self.rel_tol / factor, 1e-14),
        )

    def scaled(self, factor: float) -> QuadSpec:
        """Tolerances multiplied by ``factor``."""
        return replace(self, abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor)


DEFAULT_SPEC = QuadSpec()


class ConvolutionKernel(Protocol):
    """What the quadrature needs from a kernel: its endpoint exponent and values."""

    exponent: float

    def value(self, t: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class UnitKernel:
    """The kernel ``M ≡ 1``; convolution with it is the plain integral."""

    exponent: float = 0.0

    def value(self, t: np.ndarray) -> np.ndarray:
        return np.ones_like(t)


@dataclass(frozen=True)
class PowerKernel:
    r"""``h_a(t) = t^{a-1}/Γ(a)`` for ``0 < a <= 1`` (mainly for tests)."""

    order: float

    @property
    def exponent(self) -> float:
        return self.order - 1.0

    def value(self, t: np.ndarray) -> np.ndarray:
        return np.power(t, self.order - 1.0) / math.gamma(self.order)


# {{{ rules


@dataclass(frozen=True)
class Rule:
    """Quadrature on [0, 1] for integrands that carry their own endpoint
    singularities: ``∫_0^1 F ≈ Σ weights * F(nodes)``.

    ``complement`` holds ``1 - nodes`` computed without cancellation.
    """

    nodes: np.ndarray
    complement: np.ndarray
    weights: np.ndarray


def rule_exponent(q: float | None) -> float:
    """Endpoint exponent actually used to place Gauss-Jacobi weights.

    Integer exponents carry no singularity and large ones no benefit, so
    both map to 0.
    """
    if q is None:
        return 0.0
    if not q > -1.0:
        raise DomainError(f"endpoint exponent {q} is not > -1 (not integrable)")
    if q >= 4.0 or abs(q - round(q)) < 1e-12:
        return 0.0
    return float(q)


def _jacobi_unit(n: int, right: float, left: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gauss-Jacobi on [0,1] for weight ``(1-u)^right u^left``.

    Returns nodes, complements and *reduced* weights, i.e. divided by the
    weight function, so that they integrate the full singular integrand.
    """
    if right == 0.0 and left == 0.0:
        x, w = np.polynomial.legendre.leggauss(n)
    else:
        with np.errstate(invalid="ignore", divide="ignore"):
            x, w = roots_jacobi(n, right, left)
    u = 0.5 * (1.0 + x)
    v = 0.5 * (1.0 - x)
    w = w / 2.0 ** (right + left + 1.0)
    return u, v, w / (np.power(v, right) * np.power(u, left))


@lru_cache(maxsize=256)
def single_panel_rule(n: int, p: float, q: float) -> Rule:
    """One Gauss-Jacobi panel with ``τ^q`` at 0 and ``(1-τ)^p`` at 1."""
    u, v, w = _jacobi_unit(n, p, q)
    return Rule(u, v, w)


def _panel(n: int, lo: float, hi: float, exponent: float, at_right: bool) -> Rule:
    """One panel of a graded mesh; ``lo``/``hi`` are distances from the panel's own end."""
    h = hi - lo
    if lo == 0.0:
        u, _, w = _jacobi_unit(n, 0.0, exponent)
        d, w = h * u, h * w
    else:
        x, w = np.polynomial.legendre.leggauss(n)
        d, w = lo + h * 0.5 * (1.0 + x), 0.5 * h * w
    if at_right:
        return Rule(1.0 - d, d, w)
    return Rule(d, 1.0 - d, w)


@lru_cache(maxsize=1024)
def _cached_panel(n: int, lo: float, hi: float, exponent: float, at_right: bool) -> Rule:
    return _panel(n, lo, hi, exponent, at_right)


def graded_pieces(n: int, p: float, q: float, levels: int, grading: float) -> tuple[Rule, ...]:
    """Panels of a mesh graded geometrically toward both ends of ``[0, 1]``.

    Edges sit at distance ``0.5 grading^-k`` (``k = 0..levels``) from each
    end, so moving to ``levels + 1`` only splits the two end panels; the
    ladder driver caches the rest.
    """
    if grading == 1.0:
        half = [0.5 * (k + 1) / (levels + 1) for k in range(levels + 1)]
    else:
        half = [0.5 * grading ** (-k) for k in range(levels, -1, -1)]
    edges = [0.0, *half]
    pieces = [_cached_panel(n, edges[i], edges[i + 1], q, False) for i in range(len(edges) - 1)]
    pieces += [_cached_panel(n, edges[i], edges[i + 1], p, True) for i in range(len(edges) - 2, -1, -1)]
    return tuple(pieces)


def graded_rule(n: int, p: float, q: float, levels: int, grading: float) -> Rule:
    """The graded mesh of :func:`graded_pieces` as a single rule."""
    pieces = graded_pieces(n, p, q, levels, grading)
    return Rule(*(np.concatenate([getattr(r, f) for r in pieces]) for f in ("nodes", "complement", "weights")))


Rung = tuple[Rule, ...]


def rule_ladder(spec: QuadSpec, p: float, q: float) -> list[Rung]:
    """The ordered rungs tried for exponents ``p`` (at 1) and ``q`` (at 0)."""
    n = spec.nodes_per_panel
    rungs: list[Rung] = [(single_panel_rule(n, p, q),), (single_panel_rule(min(2 * n, 128), p, q),)]
    levels = 1
    while 2 * (levels + 1) <= spec.max_panels:
        rungs.append(graded_pieces(n, p, q, levels, spec.grading))
        levels += 1
    return rungs


# }}}

# {{{ ladder driver


def _run_ladder(
    rungs: list[Rung],
    size: int,
    apply_rule: Callable[[Rule, np.ndarray], tuple[np.ndarray, np.ndarray]],
    spec: QuadSpec,
    what: str,
) -> tuple[np.ndarray, np.ndarray]:
    """Drive the rung comparison for ``size`` independent integrals.

    ``apply_rule(rule, idx)`` returns the weighted terms of ``rule`` (one
    row per batch entry in ``idx``) and their absolute values.  Panel results are cached by
    identity, so a rung costs only the panels it does not share with
    earlier ones.  Entries still active at a rung were active at all earlier
    ones, hence have every earlier panel cached.
    """
    values = np.full(size, np.nan)
    errors = np.full(size, np.inf)
    active = np.arange(size)
    previous = None
    cache: dict[int, tuple[Rule, np.ndarray, np.ndarray]] = {}
    for rung in rungs:
        if active.size == 0:
            break
        fresh = [r for r in rung if id(r) not in cache]
        if fresh:
            merged = fresh[0] if len(fresh) == 1 else Rule(
                *(np.concatenate([getattr(r, f) for r in fresh]) for f in ("nodes", "complement", "weights"))
            )
            sizes = np.cumsum([0] + [r.nodes.size for r in fresh])
            v_all, m_all = apply_rule(merged, active)
            for j, r in enumerate(fresh):
                v = np.zeros(size)
                m = np.zeros(size)
                v[active] = v_all[:, sizes[j]:sizes[j + 1]].sum(axis=1)
                m[active] = m_all[:, sizes[j]:sizes[j + 1]].sum(axis=1)
                cache[id(r)] = (r, v, m)
        current = np.zeros(active.size)
        magnitude = np.zeros(active.size)
        for r in rung:
            _, v, m = cache[id(r)]
            current += v[active]
            magnitude += m[active]
        if previous is not None:
            diff = np.abs(current - previous)
            floor = 64.0 * EPS * magnitude
            tol = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(current))
            ok = diff <= np.maximum(tol, floor)
            values[active] = current
            errors[active] = np.maximum(diff, floor)
            keep = np.flatnonzero(~ok)
            active = active[keep]
            previous = current[keep]
        else:
            values[active] = current
            previous = current
    if active.size:
        worst = int(active[np.argmax(errors[active])])
        raise AccuracyError(
            f"{what} did not converge within {spec.max_panels} panels "
            f"(worst batch entry {worst})",
            float(values[worst]),
            float(errors[worst]),
        )
    return values, errors


def convolve_batch(
    kernel: ConvolutionKernel,
    integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
    upper: np.ndarray,
    spec: QuadSpec = DEFAULT_SPEC,
    q: float | None = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    r"""Evaluate ``∫_0^{x_i} M(x_i - t) f_i(t) dt`` for a flat batch of ``x_i``.

    ``integrand(idx, t)`` receives the batch indices being evaluated and a
    ``(len(idx), N)`` array of abscissae and must return ``f`` there.
    Upper limits equal to 0 give exactly 0.  Returns ``(values, errors)``.
    """
    x = np.asarray(upper, dtype=float).reshape(-1)
    if np.any(x < 0) or np.any(~np.isfinite(x)):
        raise DomainError("convolution upper limits must be finite and >= 0")
    if np.any((x > 0) & (x < TINY)):
        raise DomainError("convolution upper limits must be 0 or normal floats (subnormal scaling underflows)")
    values = np.zeros_like(x)
    errors = np.zeros_like(x)
    nonzero = np.flatnonzero(x > 0)
    if nonzero.size == 0:
        return values, errors
    p = rule_exponent(kernel.exponent)
    qq = rule_exponent(q)

    def apply_rule(rule: Rule, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        orig = nonzero[idx]
        xs = x[orig][:, None]
        f_vals = np.asarray(integrand(orig, xs * rule.nodes[None, :]), dtype=float)
        k_vals = kernel.value(xs * rule.complement[None, :])
        terms = xs * rule.weights[None, :] * k_vals * f_vals
        return terms, np.abs(terms)

    v, e = _run_ladder(rule_ladder(spec, p, qq), nonzero.size, apply_rule, spec, "convolution")
    values[nonzero] = v
    errors[nonzero] = e
    return values, errors


def convolve(
    kernel: ConvolutionKernel,
    f: Callable[[np.ndarray], np.ndarray],
    x,
    spec: QuadSpec = DEFAULT_SPEC,
    *,
    q: float | None = 0.0,
    return_error: bool = False,
):
    r"""``(M * f)(x)`` for a vectorized callable ``f`` with endpoint exponent ``q``.

    ``x`` may be a scalar or an array; the result has the same shape.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("convolve requires x > 0")
    values, errors = convolve_batch(kernel, lambda idx, t: f(t), xa.reshape(-1), spec, q)
    if xa.ndim == 0:
        values, errors = float(values[0]), float(errors[0])
    else:
        values, errors = values.reshape(xa.shape), errors.reshape(xa.shape)
    return (values, errors) if return_error else values


def integrate_regular(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: QuadSpec = DEFAULT_SPEC,
    *,
    left_exponent: float | None = 0.0,
    right_exponent: float | None = 0.0,
    return_error: bool = False,
):
    r"""``∫_a^b f`` with optional declared algebraic endpoint exponents.

    ``f`` must include its own singular factors; the exponents only steer
    the placement of Gauss-Jacobi nodes.
    """
    if not a <= b:
        raise DomainError("integrate_regular requires a <= b")
    if a == b:
        return (0.0, 0.0) if return_error else 0.0
    h = b - a
    p = rule_exponent(right_exponent)
    q = rule_exponent(left_exponent)

    def apply_rule(rule: Rule, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        # evaluate near b from the complement to keep b - t accurate
        t = np.where(rule.nodes <= 0.5, a + h * rule.nodes, b - h * rule.complement)
        terms = h * rule.weights * np.asarray(f(t), dtype=float)
        return terms[None, :], np.abs(terms)[None, :]

    v, e = _run_ladder(rule_ladder(spec, p, q), 1, apply_rule, spec, "integration")
    return (float(v[0]), float(e[0])) if return_error else float(v[0])


# }}}

# vim: foldmethod=marker
