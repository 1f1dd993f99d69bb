"""Lines, regions, surfaces and solids in the closed positive octant.

Every curve or surface is described through coordinate graphs so that the
iterated one-dimensional operators can run along coordinate axes.  All
expressions are stored in the canonical variables ``x, y, z``.

Checks are grid based: :func:`validate` samples each object on
:data:`CHECK_POINTS` points and reports violations as strings rather than
raising.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import fieldlang as fl
from .errors import DomainError

AXES = fl.CARTESIAN
CHECK_POINTS = 64
ENDPOINT_TOL = 1e-10
INVERSE_TOL = 1e-12

Point = tuple[float, float, float]
Coords = tuple[np.ndarray, np.ndarray, np.ndarray]


def _point(p: Sequence[float]) -> Point:
    if len(p) == 2:
        p = (*p, 0.0)
    if len(p) != 3:
        raise DomainError(f"a point needs 2 or 3 coordinates, got {len(p)}")
    return (float(p[0]), float(p[1]), float(p[2]))


def _expr(value: fl.Node | str | float, variables: Sequence[str] = AXES) -> fl.Node:
    if isinstance(value, fl.Node):
        return value
    if isinstance(value, str):
        return fl.parse(value, variables)
    return fl.num(float(value))


def _eval(node: fl.Node, var: str, s) -> np.ndarray:
    """Evaluate an expression of the single variable ``var``."""
    s = np.asarray(s, dtype=float)
    env = {v: (s if v == var else np.zeros_like(s)) for v in AXES}
    return np.broadcast_to(np.asarray(fl.evaluate(node, env), dtype=float), s.shape)


# {{{ monotone inversion


def invert_monotone(
    f: fl.Node | str | Callable[[np.ndarray], np.ndarray],
    interval: tuple[float, float],
    variable: str = "x",
    *,
    extend: bool = True,
) -> Callable[[np.ndarray], np.ndarray]:
    """Numeric inverse of a strictly monotone function of one variable.

    Monotonicity is checked on a grid over ``interval``.  Values outside
    ``f(interval)`` are searched for by expanding the bracket (never below
    0) when ``extend`` is set.  Bisection is followed by a secant polish;
    the result is accurate to about ``1e-12`` absolute.
    """
    if callable(f) and not isinstance(f, fl.Node):
        fn = lambda s: np.asarray(f(np.asarray(s, dtype=float)), dtype=float)  # noqa: E731
    else:
        node = _expr(f)
        fn = lambda s: _eval(node, variable, s)  # noqa: E731
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        raise DomainError("invert_monotone needs a nondegenerate interval")
    grid = np.linspace(lo, hi, CHECK_POINTS)
    steps = np.diff(fn(grid))
    if np.all(steps > 0):
        sign = 1.0
    elif np.all(steps < 0):
        sign = -1.0
    else:
        raise DomainError("function is not strictly monotone on the interval")

    def g(s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        target = sign * s.reshape(-1)
        left = np.full(target.shape, lo)
        right = np.full(target.shape, hi)
        width = hi - lo
        for _ in range(200):
            low_bad = sign * fn(left) > target
            high_bad = sign * fn(right) < target
            if not (np.any(low_bad) or np.any(high_bad)):
                break
            if not extend:
                raise DomainError("value outside the range of the function")
            if np.any(low_bad & (left <= 0.0)):
                raise DomainError("inverse would need a negative argument")
            left = np.where(low_bad, np.maximum(0.0, left - width), left)
            right = np.where(high_bad, right + width, right)
            width *= 2.0
        else:
            raise DomainError("bracket expansion for the inverse did not terminate")
        for _ in range(200):
            mid = 0.5 * (left + right)
            above = sign * fn(mid) >= target
            right = np.where(above, mid, right)
            left = np.where(above, left, mid)
            if np.all(right - left <= 0.25 * INVERSE_TOL * np.maximum(1.0, np.abs(mid))):
                break
        fl_, fr = sign * fn(left) - target, sign * fn(right) - target
        denom = fr - fl_
        with np.errstate(invalid="ignore", divide="ignore"):
            sec = np.where(denom != 0, left - fl_ * (right - left) / denom, 0.5 * (left + right))
        out = np.clip(sec, left, right)
        return out.reshape(s.shape) if s.ndim else out[0]

    return g


# }}}

# {{{ lines


class LinePiece(ABC):
    """An oriented curve on which each coordinate is monotone."""

    @property
    @abstractmethod
    def start(self) -> Point: ...

    @property
    @abstractmethod
    def end(self) -> Point: ...

    def span(self, axis: int) -> tuple[float, float]:
        """Start and end value of coordinate ``axis``."""
        return self.start[axis], self.end[axis]

    def varies(self, axis: int) -> bool:
        s0, s1 = self.span(axis)
        return s0 != s1

    @abstractmethod
    def coords_along(self, axis: int, s: np.ndarray) -> Coords:
        """Points of the (extended) curve whose ``axis`` coordinate is ``s``."""

    @abstractmethod
    def symbolic_map(self, axis: int) -> dict[str, fl.Node] | None:
        """Coordinates as expressions of the ``axis`` coordinate, if available."""

    @abstractmethod
    def reversed(self) -> LinePiece: ...

    @abstractmethod
    def validate(self) -> list[str]: ...

    def pieces(self) -> list[LinePiece]:
        return [self]

    @property
    def closed(self) -> bool:
        return False


@dataclass(frozen=True)
class Segment(LinePiece):
    """The straight segment from ``a`` to ``b``."""

    a: Point
    b: Point

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _point(self.a))
        object.__setattr__(self, "b", _point(self.b))

    @property
    def start(self) -> Point:
        return self.a

    @property
    def end(self) -> Point:
        return self.b

    @property
    def is_zero(self) -> bool:
        return self.a == self.b

    @property
    def parallel_axis(self) -> int | None:
        """The axis this segment runs along, or ``None`` if it is oblique (or empty)."""
        moving = [k for k in range(3) if self.a[k] != self.b[k]]
        return moving[0] if len(moving) == 1 else None

    def coords_along(self, axis: int, s: np.ndarray) -> Coords:
        s = np.asarray(s, dtype=float)
        d = self.b[axis] - self.a[axis]
        if d == 0:
            raise DomainError(f"segment does not move along {AXES[axis]}")
        lam = (s - self.a[axis]) / d
        out = [self.a[k] + lam * (self.b[k] - self.a[k]) for k in range(3)]
        out[axis] = s
        a, b, c = np.broadcast_arrays(*out)
        return a, b, c

    def symbolic_map(self, axis: int) -> dict[str, fl.Node] | None:
        d = self.b[axis] - self.a[axis]
        if d == 0:
            return None
        s = fl.Var(AXES[axis])
        out = {}
        for k in range(3):
            if k == axis:
                out[AXES[k]] = s
                continue
            slope = (self.b[k] - self.a[k]) / d
            out[AXES[k]] = fl.add(fl.num(self.a[k]), fl.mul(fl.num(slope), fl.sub(s, fl.num(self.a[axis]))))
        return out

    def reversed(self) -> Segment:
        return Segment(self.b, self.a)

    def validate(self) -> list[str]:
        if min(self.a + self.b) < 0:
            return ["segment leaves the closed positive octant"]
        return []


@dataclass(frozen=True)
class SimpleLine3D(LinePiece):
    """A curve given as graphs over its ``primary`` coordinate, from ``a`` to ``b``.

    ``maps[k]`` expresses coordinate ``k`` through the primary variable;
    ``maps[primary]`` is ignored.  Inverse graphs over the other axes are
    symbolic for affine maps, optionally user supplied, and numeric
    otherwise.
    """

    primary: int
    a: float
    b: float
    maps: tuple[fl.Node, fl.Node, fl.Node]
    #: optional explicit inverses: ``inverses[k]`` gives the primary coordinate through coordinate ``k``
    inverses: tuple[fl.Node | None, fl.Node | None, fl.Node | None] = (None, None, None)
    label: str = field(default="", compare=False)

    @classmethod
    def graph(
        cls,
        a: float,
        b: float,
        *,
        primary: str = "x",
        label: str = "",
        inverses: dict[str, str] | None = None,
        **maps: str | float,
    ) -> SimpleLine3D:
        """E.g. ``SimpleLine3D.graph(0, 1, y="x", z="x")``; missing coordinates are 0."""
        p = AXES.index(primary)
        nodes = []
        for k, name in enumerate(AXES):
            if k == p:
                nodes.append(fl.Var(name))
                continue
            node = _expr(maps.get(name, 0.0))
            extra = fl.free_variables(node) - {primary}
            if extra:
                raise DomainError(f"{name}({primary}) may not depend on {sorted(extra)}")
            nodes.append(node)
        inv: list[fl.Node | None] = [None, None, None]
        for name, text in (inverses or {}).items():
            inv[AXES.index(name)] = _expr(text)
        return cls(p, float(a), float(b), (nodes[0], nodes[1], nodes[2]), (inv[0], inv[1], inv[2]), label)

    def _coordinate(self, k: int, t) -> np.ndarray:
        if k == self.primary:
            return np.asarray(t, dtype=float)
        return _eval(self.maps[k], AXES[self.primary], t)

    def _point_at(self, t: float) -> Point:
        return (float(self._coordinate(0, t)), float(self._coordinate(1, t)), float(self._coordinate(2, t)))

    @property
    def start(self) -> Point:
        return self._point_at(self.a)

    @property
    def end(self) -> Point:
        return self._point_at(self.b)

    def varies(self, axis: int) -> bool:
        if axis == self.primary:
            return self.a != self.b
        return fl.const_value(fl.diff(self.maps[axis], AXES[self.primary])) != 0.0 and super().varies(axis)

    def _affine_inverse(self, axis: int) -> fl.Node | None:
        var = AXES[self.primary]
        slope = fl.const_value(fl.diff(self.maps[axis], var))
        if slope is None or slope == 0.0:
            return None
        offset = float(_eval(self.maps[axis], var, 0.0))
        return fl.div(fl.sub(fl.Var(AXES[axis]), fl.num(offset)), fl.num(slope))

    def inverse_expr(self, axis: int) -> fl.Node | None:
        """The primary coordinate as an expression of coordinate ``axis``, if known."""
        if axis == self.primary:
            return fl.Var(AXES[axis])
        return self.inverses[axis] or self._affine_inverse(axis)

    def _primary_from(self, axis: int, s: np.ndarray) -> np.ndarray:
        node = self.inverse_expr(axis)
        if node is not None:
            return _eval(node, AXES[axis], s)
        lo, hi = sorted((self.a, self.b))
        return invert_monotone(self.maps[axis], (lo, hi), AXES[self.primary])(s)

    def coords_along(self, axis: int, s: np.ndarray) -> Coords:
        s = np.asarray(s, dtype=float)
        t = s if axis == self.primary else self._primary_from(axis, s)
        out = [self._coordinate(k, t) for k in range(3)]
        out[axis] = s
        a, b, c = np.broadcast_arrays(*out)
        return a, b, c

    def symbolic_map(self, axis: int) -> dict[str, fl.Node] | None:
        inv = self.inverse_expr(axis)
        if inv is None:
            return None
        pv = AXES[self.primary]
        out = {}
        for k in range(3):
            if k == axis:
                out[AXES[k]] = fl.Var(AXES[k])
            elif k == self.primary:
                out[AXES[k]] = inv
            else:
                out[AXES[k]] = fl.substitute(self.maps[k], {pv: inv})
        return out

    def reversed(self) -> SimpleLine3D:
        return SimpleLine3D(self.primary, self.b, self.a, self.maps, self.inverses, self.label)

    def validate(self) -> list[str]:
        issues: list[str] = []
        if self.a == self.b:
            issues.append("line has zero parameter length")
            return issues
        lo, hi = sorted((self.a, self.b))
        if lo < 0:
            issues.append("parameter interval leaves the closed positive octant")
        t = np.linspace(lo, hi, CHECK_POINTS)
        var = AXES[self.primary]
        for k in range(3):
            if k == self.primary:
                continue
            name = AXES[k]
            try:
                values = self._coordinate(k, t)
                slope = _eval(fl.diff(self.maps[k], var), var, t)
            except Exception as exc:  # evaluation failures are violations too
                issues.append(f"{name}({var}) cannot be evaluated on [{lo}, {hi}]: {exc}")
                continue
            if np.any(values < -ENDPOINT_TOL):
                issues.append(f"{name}({var}) is negative somewhere on [{lo}, {hi}]")
            if not np.all(np.isfinite(slope)):
                issues.append(f"{name}({var}) is not differentiable on [{lo}, {hi}]")
            elif np.any(slope > 0) and np.any(slope < 0):
                issues.append(f"derivative of {name}({var}) changes sign on [{lo}, {hi}]")
            elif np.any(slope[1:-1] == 0) and not np.all(slope == 0):
                # the endpoints may be critical points; the open interval may not
                issues.append(f"derivative of {name}({var}) vanishes inside [{lo}, {hi}]")
            inv = self.inverses[k]
            if inv is not None:
                back = _eval(inv, name, values)
                if np.max(np.abs(back - t)) > ENDPOINT_TOL:
                    issues.append(f"supplied inverse {var}({name}) does not invert {name}({var})")
        return issues


def _chain_issues(pieces: Sequence[LinePiece], closed: bool) -> list[str]:
    issues: list[str] = []
    for i in range(len(pieces) - 1):
        gap = max(abs(u - v) for u, v in zip(pieces[i].end, pieces[i + 1].start))
        if gap > ENDPOINT_TOL:
            issues.append(f"piece {i + 1} does not start where piece {i} ends (gap {gap:.3g})")
    if closed and pieces:
        gap = max(abs(u - v) for u, v in zip(pieces[-1].end, pieces[0].start))
        if gap > ENDPOINT_TOL:
            issues.append(f"closed line does not return to its start (gap {gap:.3g})")
    return issues


@dataclass(frozen=True)
class PolygonalChain:
    """A broken line through ``vertices``."""

    vertices: tuple[Point, ...]
    #: zero-length segments contribute 0 when allowed
    allow_zero: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(_point(v) for v in self.vertices))

    def segments(self) -> list[Segment]:
        return [Segment(self.vertices[i], self.vertices[i + 1]) for i in range(len(self.vertices) - 1)]

    def pieces(self) -> list[LinePiece]:
        return [s for s in self.segments() if not s.is_zero]

    @property
    def start(self) -> Point:
        return self.vertices[0]

    @property
    def end(self) -> Point:
        return self.vertices[-1]

    @property
    def closed(self) -> bool:
        return len(self.vertices) > 2 and self.vertices[0] == self.vertices[-1]

    def reversed(self) -> PolygonalChain:
        return PolygonalChain(tuple(reversed(self.vertices)), self.allow_zero)

    def validate(self) -> list[str]:
        issues: list[str] = []
        if len(self.vertices) < 2:
            issues.append("a chain needs at least two vertices")
        if any(c < 0 for v in self.vertices for c in v):
            issues.append("vertex outside the closed positive octant")
        if not self.allow_zero and any(s.is_zero for s in self.segments()):
            issues.append("consecutive vertices coincide")
        return issues

    @property
    def axis_parallel(self) -> bool:
        return all(s.parallel_axis is not None for s in self.pieces())


@dataclass(frozen=True)
class PiecewiseSimpleLine:
    """Simple pieces joined end to start; ``closed`` requires the last end to meet the first start."""

    parts: tuple[LinePiece, ...]
    closed: bool = False

    def pieces(self) -> list[LinePiece]:
        out: list[LinePiece] = []
        for p in self.parts:
            out.extend(p.pieces())
        return out

    @property
    def start(self) -> Point:
        return self.parts[0].start

    @property
    def end(self) -> Point:
        return self.parts[-1].end

    def reversed(self) -> PiecewiseSimpleLine:
        return PiecewiseSimpleLine(tuple(p.reversed() for p in reversed(self.parts)), self.closed)

    def validate(self) -> list[str]:
        if not self.parts:
            return ["a piecewise line needs at least one piece"]
        issues: list[str] = []
        for i, p in enumerate(self.parts):
            issues.extend(f"piece {i}: {m}" for m in p.validate())
        issues.extend(_chain_issues(self.pieces(), self.closed))
        return issues


Path = LinePiece | PolygonalChain | PiecewiseSimpleLine


def elementary_decomposition(chain: PolygonalChain) -> list[PolygonalChain]:
    """Split an axis-parallel chain into runs of at most three segments along distinct axes.

    Runs are greedy and keep the original order; joining their vertex lists
    (dropping shared vertices) gives back the chain.
    """
    segs = chain.segments()
    if not segs:
        raise DomainError("empty chain")
    runs: list[list[Segment]] = []
    used: set[int] = set()
    for s in segs:
        axis = s.parallel_axis
        if axis is None and not s.is_zero:
            raise DomainError(f"segment {s.a} -> {s.b} is not parallel to an axis")
        key = -1 if axis is None else axis
        if runs and key not in used and len(runs[-1]) < 3:
            runs[-1].append(s)
        else:
            runs.append([s])
            used = set()
        used.add(key)
    return [PolygonalChain((r[0].a, *(s.b for s in r)), chain.allow_zero) for r in runs]


# }}}

# {{{ regions


@dataclass(frozen=True)
class SimpleRegion2D:
    r"""A region in the plane of ``axes = (u, v)`` at fixed third coordinate ``level``.

    ``a <= u <= b`` with ``lower(u) <= v <= upper(u)``; optionally also the
    description ``c <= v <= d`` with ``left(v) <= u <= right(v)``.
    Expressions use the canonical names of ``u`` and ``v``.
    """

    axes: tuple[int, int]
    a: float
    b: float
    lower: fl.Node
    upper: fl.Node
    c: float | None = None
    d: float | None = None
    left: fl.Node | None = None
    right: fl.Node | None = None
    level: float = 0.0

    @classmethod
    def rectangle(cls, a: float, b: float, c: float, d: float, axes: tuple[int, int] = (0, 1), level: float = 0.0) -> SimpleRegion2D:
        return cls(axes, float(a), float(b), fl.num(c), fl.num(d), float(c), float(d), fl.num(a), fl.num(b), float(level))

    @classmethod
    def between(
        cls,
        a: float,
        b: float,
        lower: str | float,
        upper: str | float,
        axes: tuple[int, int] = (0, 1),
        *,
        c: float | None = None,
        d: float | None = None,
        left: str | float | None = None,
        right: str | float | None = None,
        level: float = 0.0,
    ) -> SimpleRegion2D:
        return cls(
            axes,
            float(a),
            float(b),
            _expr(lower),
            _expr(upper),
            None if c is None else float(c),
            None if d is None else float(d),
            None if left is None else _expr(left),
            None if right is None else _expr(right),
            float(level),
        )

    @property
    def is_rectangle(self) -> bool:
        return all(fl.const_value(n) is not None for n in (self.lower, self.upper)) and (
            fl.const_value(self.lower) == self.c and fl.const_value(self.upper) == self.d
        )

    @property
    def has_transposed(self) -> bool:
        return None not in (self.c, self.d, self.left, self.right)

    def bounds(self, outer: int) -> tuple[float, float, fl.Node, fl.Node]:
        """Outer interval and inner bounds when ``outer`` (0 for ``u``, 1 for ``v``) is integrated last."""
        if outer == 0:
            return self.a, self.b, self.lower, self.upper
        if not self.has_transposed:
            raise DomainError("region has no description with the second axis outermost")
        return self.c, self.d, self.left, self.right  # type: ignore[return-value]

    def _inner(self, node: fl.Node, outer_axis: int, s) -> np.ndarray:
        return _eval(node, AXES[outer_axis], s)

    def boundary(self) -> PiecewiseSimpleLine:
        """Counterclockwise boundary in the ``(u, v)`` plane (zero-length sides dropped)."""
        u, v = self.axes
        w = 3 - u - v
        lo_a, lo_b = float(self._inner(self.lower, u, self.a)), float(self._inner(self.lower, u, self.b))
        hi_a, hi_b = float(self._inner(self.upper, u, self.a)), float(self._inner(self.upper, u, self.b))

        def pt(uu: float, vv: float) -> Point:
            p = [0.0, 0.0, 0.0]
            p[u], p[v], p[w] = uu, vv, self.level
            return (p[0], p[1], p[2])

        def side(node: fl.Node, a: float, b: float) -> LinePiece:
            value = fl.const_value(node)
            if value is not None:
                return Segment(pt(a, value), pt(b, value))
            maps = {AXES[v]: node, AXES[w]: self.level}
            return SimpleLine3D.graph(a, b, primary=AXES[u], **maps)

        parts: list[LinePiece] = [side(self.lower, self.a, self.b)]
        if hi_b != lo_b:
            parts.append(Segment(pt(self.b, lo_b), pt(self.b, hi_b)))
        parts.append(side(self.upper, self.b, self.a))
        if hi_a != lo_a:
            parts.append(Segment(pt(self.a, hi_a), pt(self.a, lo_a)))
        orientation = 1 if (u, v) in ((0, 1), (1, 2), (2, 0)) else -1
        line = PiecewiseSimpleLine(tuple(parts), closed=True)
        # counterclockwise in the right-handed (u, v) sense
        return line if orientation == 1 else line.reversed()

    def validate(self) -> list[str]:
        issues: list[str] = []
        if not self.b > self.a:
            issues.append("outer interval is empty")
            return issues
        if self.a < 0:
            issues.append("region leaves the closed positive quadrant")
        u, v = self.axes
        t = np.linspace(self.a, self.b, CHECK_POINTS)
        lo, hi = self._inner(self.lower, u, t), self._inner(self.upper, u, t)
        if np.any(lo > hi + ENDPOINT_TOL):
            issues.append("lower bound exceeds upper bound")
        if np.any(lo < -ENDPOINT_TOL):
            issues.append("region leaves the closed positive quadrant")
        if self.has_transposed:
            s = np.linspace(self.c, self.d, CHECK_POINTS)  # type: ignore[arg-type]
            le, ri = self._inner(self.left, v, s), self._inner(self.right, v, s)  # type: ignore[arg-type]
            if np.any(le > ri + ENDPOINT_TOL):
                issues.append("left bound exceeds right bound")
            if abs(float(np.min(lo)) - self.c) > 1e-8 or abs(float(np.max(hi)) - self.d) > 1e-8:  # type: ignore[operator]
                issues.append("the two descriptions disagree on the range of the second axis")
            if abs(float(np.min(le)) - self.a) > 1e-8 or abs(float(np.max(ri)) - self.b) > 1e-8:
                issues.append("the two descriptions disagree on the range of the first axis")
        return issues


# }}}

# {{{ surfaces and solids


@dataclass(frozen=True)
class SurfacePatch:
    """The graph ``coordinate[graph_axis] = graph(other two)`` over ``region``.

    ``orientation`` is +1 when the chosen normal points toward increasing
    ``graph_axis`` and -1 otherwise.
    """

    graph_axis: int
    graph: fl.Node
    region: SimpleRegion2D
    orientation: int = 1

    def __post_init__(self) -> None:
        if self.orientation not in (1, -1):
            raise DomainError("orientation must be +1 or -1")
        if set(self.region.axes) | {self.graph_axis} != {0, 1, 2}:
            raise DomainError("projection axes must be the two axes other than the graph axis")
        if AXES[self.graph_axis] in fl.free_variables(self.graph):
            raise DomainError("a graph may not depend on its own coordinate")

    @property
    def is_flat(self) -> bool:
        return fl.const_value(self.graph) is not None

    def validate(self) -> list[str]:
        issues = [f"projection: {m}" for m in self.region.validate()]
        u, v = self.region.axes
        t = np.linspace(self.region.a, self.region.b, 9)
        pts = []
        for uu in t:
            lo = float(_eval(self.region.lower, AXES[u], uu))
            hi = float(_eval(self.region.upper, AXES[u], uu))
            for vv in np.linspace(lo, hi, 9):
                pts.append((uu, vv))
        arr = np.array(pts)
        env = {AXES[u]: arr[:, 0], AXES[v]: arr[:, 1], AXES[self.graph_axis]: np.zeros(len(arr))}
        try:
            g = np.broadcast_to(np.asarray(fl.evaluate(self.graph, env), dtype=float), arr[:, 0].shape)
        except Exception as exc:
            return issues + [f"graph cannot be evaluated: {exc}"]
        if not np.all(np.isfinite(g)):
            issues.append("graph is not finite on its projection")
        elif np.any(g < -ENDPOINT_TOL):
            issues.append("graph leaves the closed positive octant")
        return issues


@dataclass(frozen=True)
class PiecewiseSimpleSurface:
    """Coordinate-graph patches with an optional oriented boundary."""

    patches: tuple[SurfacePatch, ...]
    boundary: PiecewiseSimpleLine | None = None
    label: str = ""

    def validate(self) -> list[str]:
        issues = [f"patch {i}: {m}" for i, p in enumerate(self.patches) for m in p.validate()]
        if self.boundary is not None:
            issues.extend(f"boundary: {m}" for m in self.boundary.validate())
            if not self.boundary.closed:
                issues.append("boundary must be closed")
        return issues


@dataclass(frozen=True)
class Box3D:
    """``[a, b] x [c, d] x [e, f]``."""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    @property
    def bounds(self) -> tuple[tuple[float, float], tuple[float, float], tuple[float, float]]:
        return (self.a, self.b), (self.c, self.d), (self.e, self.f)

    def face(self, axis: int, upper: bool) -> SurfacePatch:
        """The face at the lower/upper end of ``axis`` with its outward orientation."""
        u, v = [k for k in range(3) if k != axis]
        (ua, ub), (va, vb) = self.bounds[u], self.bounds[v]
        value = self.bounds[axis][1 if upper else 0]
        region = SimpleRegion2D.rectangle(ua, ub, va, vb, (u, v), value)
        return SurfacePatch(axis, fl.num(value), region, 1 if upper else -1)

    def faces(self) -> PiecewiseSimpleSurface:
        """Closed boundary with outward normals."""
        return PiecewiseSimpleSurface(tuple(self.face(k, up) for k in range(3) for up in (True, False)), None, "box")

    def without_bottom(self) -> PiecewiseSimpleSurface:
        """The five faces other than ``z = e``, outward, bounded by the counterclockwise rim at ``z = e``."""
        patches = tuple(self.face(k, up) for k in range(3) for up in (True, False) if not (k == 2 and not up))
        rim = SimpleRegion2D.rectangle(self.a, self.b, self.c, self.d, (0, 1), self.e).boundary()
        return PiecewiseSimpleSurface(patches, rim, "box without bottom")

    def validate(self) -> list[str]:
        issues = []
        for name, (lo, hi) in zip(AXES, self.bounds):
            if lo < 0:
                issues.append(f"{name} range leaves the closed positive octant")
            if not hi >= lo:
                issues.append(f"{name} range is reversed")
        return issues


@dataclass(frozen=True)
class ZSimpleRegion3D:
    """``(x, y)`` in a plane region and ``z1(x, y) <= z <= z2(x, y)``."""

    base: SimpleRegion2D
    z1: fl.Node
    z2: fl.Node

    def __post_init__(self) -> None:
        if tuple(self.base.axes) != (0, 1):
            raise DomainError("the projection of a Z-simple region lies in the XY plane")

    def validate(self) -> list[str]:
        issues = [f"projection: {m}" for m in self.base.validate()]
        t = np.linspace(self.base.a, self.base.b, 9)
        for x in t:
            lo = float(_eval(self.base.lower, "x", x))
            hi = float(_eval(self.base.upper, "x", x))
            ys = np.linspace(lo, hi, 9)
            env = {"x": np.full(ys.shape, x), "y": ys, "z": np.zeros(ys.shape)}
            z1 = np.broadcast_to(np.asarray(fl.evaluate(self.z1, env), dtype=float), ys.shape)
            z2 = np.broadcast_to(np.asarray(fl.evaluate(self.z2, env), dtype=float), ys.shape)
            if np.any(z1 > z2 + ENDPOINT_TOL):
                issues.append("lower surface above upper surface")
                break
            if np.any(z1 < -ENDPOINT_TOL):
                issues.append("region leaves the closed positive octant")
                break
        return issues


# }}}


def validate(obj: object) -> list[str]:
    """Violations of the object's invariants; empty when it is valid."""
    check = getattr(obj, "validate", None)
    if check is None:
        raise DomainError(f"{type(obj).__name__} is not a geometry object")
    return list(check())


def require_valid(obj: object) -> None:
    issues = validate(obj)
    if issues:
        raise DomainError(f"invalid {type(obj).__name__}: " + "; ".join(issues))


# vim: foldmethod=marker
