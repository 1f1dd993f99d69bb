"""Run configurations: declarations of kernels, fields and geometry plus a task list.

A configuration is a YAML mapping with the keys ``quad``, ``timings``,
``kernels``, ``fields``, ``geometry``, ``tasks`` and ``suites`` (only
``tasks`` is required).  :func:`load_config` resolves every reference and
parses every expression before anything is computed; problems surface as
:class:`~gfvc.errors.ConfigError` naming the dotted path of the entry.

Geometry expressions always use the names ``x``, ``y``, ``z``; in tasks
with curvilinear ``coords`` they stand for the first, second and third
coordinate.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field, replace
from dataclasses import fields as dc_fields
from pathlib import Path
from typing import Any, Mapping, Sequence

import yaml

from . import fieldlang as fl
from .errors import ConfigError, GFVCError
from .fields import AXES, Field, VectorField, as_field
from .geometry import (
    Box3D,
    LinePiece,
    PiecewiseSimpleLine,
    PiecewiseSimpleSurface,
    PolygonalChain,
    Segment,
    SimpleLine3D,
    SimpleRegion2D,
    SurfacePatch,
    ZSimpleRegion3D,
    validate,
)
from .kernels import (
    CLASSICAL,
    SONIN_XS,
    Family,
    KernelPair,
    family_parameters,
    family_tolerance,
    make_pair,
    sonin_residual,
)
from .occ import CoordSystem
from .quad import DEFAULT_SPEC, QuadSpec
from .vectorops import KernelTriple

TASK_KINDS = ("verify", "eval", "theorem")

#: operator -> task keys it needs besides the kernels
EVAL_OPS: dict[str, tuple[str, ...]] = {
    "gfi": ("profile", "x"),
    "gfd_caputo": ("profile", "x"),
    "gfd_rl": ("profile", "x"),
    "gfi_interval": ("profile", "a", "b"),
    "gfd_interval": ("profile", "a", "b"),
    "ft_residuals": ("profile", "a", "x"),
    "leibniz_defect": ("f", "g", "x"),
    "semigroup_defect": ("profile", "x"),
    "interval_derivative_of_integral": ("profile", "a", "x"),
    "grad_regional": ("field", "point"),
    "grad_line": ("field", "geometry", "point"),
    "divergence": ("field", "point"),
    "curl_regional": ("field", "point"),
    "curl_surface": ("field", "geometry", "point"),
    "laplacian": ("field", "point"),
    "identity_defects": ("scalar", "field"),
    "curl_grad": ("field",),
    "div_curl": ("field",),
    "line_gfi": ("field", "geometry"),
    "circulation": ("field", "geometry"),
    "double_gfi": ("field", "geometry"),
    "flux": ("field", "geometry"),
    "volume_gfi": ("field", "geometry"),
    "gfi_hat": ("field", "axis", "point"),
    "grad_occ": ("field", "point"),
    "div_occ": ("field", "point"),
    "curl_occ": ("field", "point"),
    "curl_occ_as_printed": ("field", "point"),
}

THEOREMS: dict[str, tuple[str, ...]] = {
    "gradient-regional": ("field", "geometry"),
    "gradient-line": ("field", "geometry"),
    "green": ("field", "geometry"),
    "stokes": ("field", "geometry"),
    "gauss": ("field", "geometry"),
    "gradient-occ": ("field", "geometry"),
    "stokes-occ": ("field", "geometry"),
    "gauss-occ": ("field", "geometry"),
}

#: operators that take one kernel pair rather than a triple
SINGLE_PAIR_OPS = frozenset(
    {
        "gfi",
        "gfd_caputo",
        "gfd_rl",
        "gfi_interval",
        "gfd_interval",
        "ft_residuals",
        "leibniz_defect",
        "semigroup_defect",
        "interval_derivative_of_integral",
        "gfi_hat",
    }
)
#: scalar-field operators (everything else with a ``field`` takes a vector)
SCALAR_FIELD_OPS = frozenset({"grad_regional", "grad_line", "laplacian", "double_gfi", "volume_gfi", "gfi_hat", "grad_occ", "curl_grad"})
#: operators evaluated at ``point`` or at ``samples`` random points
SAMPLED_OPS = frozenset({"identity_defects", "curl_grad", "div_curl"})
SCALAR_THEOREMS = frozenset({"gradient-regional", "gradient-line", "gradient-occ"})

DEFAULT_THEOREM_TOL = 1e-5
DEFAULT_EXPECT_TOL = 1e-8


def _fail(path: str, message: str) -> ConfigError:
    return ConfigError(f"{path}: {message}")


# {{{ scalar readers


def _mapping(value: Any, path: str) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise _fail(path, f"expected a mapping, got {type(value).__name__}")
    return value


def _number(value: Any, path: str) -> float:
    """A finite number; strings may hold constant expressions such as ``pi/2``."""
    if isinstance(value, bool) or value is None:
        raise _fail(path, f"expected a number, got {value!r}")
    if isinstance(value, str):
        try:
            out = fl.const_value(fl.parse(value))
        except GFVCError as exc:
            raise _fail(path, f"expected a number: {exc}") from None
        if out is None:
            raise _fail(path, f"expected a constant, got {value!r}")
    else:
        try:
            out = float(value)
        except (TypeError, ValueError):
            raise _fail(path, f"expected a number, got {value!r}") from None
    if not math.isfinite(out):
        raise _fail(path, "must be finite")
    return out


def _numbers(value: Any, path: str, length: int | None = None) -> tuple[float, ...]:
    if not isinstance(value, Sequence) or isinstance(value, str):
        raise _fail(path, "expected a list of numbers")
    if length is not None and len(value) != length:
        raise _fail(path, f"expected {length} numbers, got {len(value)}")
    return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value))


def _interval(value: Any, path: str) -> tuple[float, float]:
    lo, hi = _numbers(value, path, 2)
    return lo, hi


def _axis(value: Any, path: str, names: Sequence[str] = AXES) -> int:
    if isinstance(value, int) and not isinstance(value, bool) and 0 <= value < 3:
        return value
    if isinstance(value, str) and value in names:
        return list(names).index(value)
    raise _fail(path, f"expected one of {list(names)} or 0..2, got {value!r}")


def _plane(value: Any, path: str) -> tuple[int, int]:
    if isinstance(value, (str, Sequence)) and len(value) == 2:
        return _axis(value[0], path), _axis(value[1], path)
    raise _fail(path, f"expected two axes such as 'xy', got {value!r}")


def _expr(value: Any, path: str, allowed: Sequence[str] = AXES) -> str:
    """Validate an expression in the canonical names and return its text."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = repr(float(value))
    if not isinstance(value, str):
        raise _fail(path, "expected an expression string")
    try:
        node = fl.parse(value)
    except GFVCError as exc:
        raise _fail(path, str(exc)) from None
    extra = fl.free_variables(node) - set(allowed)
    if extra:
        raise _fail(path, f"may only use {sorted(allowed)}, found {sorted(extra)}")
    return value


def _quad(overrides: Any, base: QuadSpec, path: str) -> QuadSpec:
    if overrides is None:
        return base
    overrides = _mapping(overrides, path)
    known = {f.name for f in dc_fields(QuadSpec)}
    values: dict[str, float | int] = {}
    for key, raw in overrides.items():
        if key not in known:
            raise _fail(f"{path}.{key}", f"unknown quadrature setting (known: {sorted(known)})")
        num = _number(raw, f"{path}.{key}")
        values[key] = int(num) if key in ("nodes_per_panel", "max_panels") else num
    try:
        return replace(base, **values)
    except GFVCError as exc:
        raise _fail(path, str(exc)) from None


# }}}

# {{{ kernels


def build_kernel(decl: Any, path: str) -> KernelPair:
    """A pair from ``{family: PowerRL, alpha: 0.5}`` or ``{family: ..., params: {...}}``."""
    decl = _mapping(decl, path)
    if "family" not in decl:
        raise _fail(f"{path}.family", "missing")
    try:
        fam = Family(decl["family"])
    except ValueError:
        known = [f.value for f in Family]
        raise _fail(f"{path}.family", f"unknown kernel family {decl['family']!r} (known: {known})") from None
    names = family_parameters(fam)
    params = dict(_mapping(decl.get("params") or {}, f"{path}.params"))
    params.update({k: v for k, v in decl.items() if k in names})
    extra = set(decl) - {"family", "params", *names}
    if extra:
        raise _fail(path, f"unexpected keys {sorted(extra)}")
    missing = set(names) - set(params)
    if missing:
        raise _fail(f"{path}.{sorted(missing)[0]}", f"{fam.value} needs parameters {list(names)}")
    try:
        return make_pair(fam, {k: _number(v, f"{path}.{k}") for k, v in params.items()})
    except ConfigError:
        raise
    except GFVCError as exc:
        raise _fail(path, str(exc)) from None


# }}}

# {{{ geometry


@dataclass
class _GeometryBuilder:
    decls: Mapping[str, Any]
    built: dict[str, object] = field(default_factory=dict)
    active: set[str] = field(default_factory=set)

    def ref(self, value: Any, path: str) -> object:
        if not isinstance(value, str):
            return self.build(value, path)
        if value not in self.decls:
            raise _fail(path, f"undefined geometry {value!r}")
        if value not in self.built:
            if value in self.active:
                raise _fail(path, f"geometry {value!r} refers to itself")
            self.active.add(value)
            self.built[value] = self.build(self.decls[value], f"geometry.{value}")
            self.active.discard(value)
        return self.built[value]

    def build(self, decl: Any, path: str) -> object:
        decl = _mapping(decl, path)
        kind = decl.get("type")
        builder = getattr(self, "_" + str(kind).replace("-", "_"), None) if isinstance(kind, str) else None
        if builder is None:
            raise _fail(f"{path}.type", f"unknown geometry type {kind!r} (known: {sorted(GEOMETRY_TYPES)})")
        try:
            obj = builder(decl, path)
        except KeyError as exc:
            raise _fail(f"{path}.{exc.args[0]}", "missing") from None
        except ConfigError:
            raise
        except GFVCError as exc:
            raise _fail(path, f"cannot build {kind}: {exc}") from None
        issues = validate(obj)
        if issues:
            raise _fail(path, "; ".join(issues))
        return obj

    def _segment(self, d, path):
        return Segment(_numbers(d["from"], f"{path}.from", 3), _numbers(d["to"], f"{path}.to", 3))

    def _chain(self, d, path):
        verts = d["vertices"]
        if not isinstance(verts, Sequence) or len(verts) < 2:
            raise _fail(f"{path}.vertices", "needs at least two vertices")
        return PolygonalChain(tuple(_numbers(v, f"{path}.vertices[{i}]", 3) for i, v in enumerate(verts)))

    def _line(self, d, path):
        primary = d.get("primary", "x")
        _axis(primary, f"{path}.primary")
        a, b = _interval(d["range"], f"{path}.range")
        maps = {name: _expr(d[name], f"{path}.{name}", (primary,)) for name in AXES if name != primary and name in d}
        inverses = {str(k): _expr(v, f"{path}.inverses.{k}", (str(k),)) for k, v in (d.get("inverses") or {}).items()}
        return SimpleLine3D.graph(a, b, primary=primary, label=str(d.get("label", "")), inverses=inverses or None, **maps)

    def _piecewise(self, d, path):
        parts: list[LinePiece] = []
        for i, part in enumerate(d["parts"]):
            obj = self.ref(part, f"{path}.parts[{i}]")
            parts.extend(obj.pieces())  # type: ignore[attr-defined]
        return PiecewiseSimpleLine(tuple(parts), bool(d.get("closed", False)))

    def _rectangle(self, d, path):
        axes = _plane(d.get("axes", "xy"), f"{path}.axes")
        a, b = _interval(d["u"], f"{path}.u")
        c, dd = _interval(d["v"], f"{path}.v")
        return SimpleRegion2D.rectangle(a, b, c, dd, axes, _number(d.get("level", 0.0), f"{path}.level"))

    def _region(self, d, path):
        axes = _plane(d.get("axes", "xy"), f"{path}.axes")
        un, vn = AXES[axes[0]], AXES[axes[1]]
        a, b = _interval(d["u"], f"{path}.u")
        lower = _expr(d["lower"], f"{path}.lower", (un,))
        upper = _expr(d["upper"], f"{path}.upper", (un,))
        c = dd = left = right = None
        if "v" in d:
            c, dd = _interval(d["v"], f"{path}.v")
            left = _expr(d["left"], f"{path}.left", (vn,))
            right = _expr(d["right"], f"{path}.right", (vn,))
        level = _number(d.get("level", 0.0), f"{path}.level")
        return SimpleRegion2D.between(a, b, lower, upper, axes, c=c, d=dd, left=left, right=right, level=level)

    def _box(self, d, path):
        if "ranges" in d:
            r = d["ranges"]
            if not isinstance(r, Sequence) or len(r) != 3:
                raise _fail(f"{path}.ranges", "expected three intervals")
            bounds = [_interval(v, f"{path}.ranges[{i}]") for i, v in enumerate(r)]
        else:
            bounds = [_interval(d[name], f"{path}.{name}") for name in AXES]
        return Box3D(*bounds[0], *bounds[1], *bounds[2])

    def _flat(self, d, path):
        region = self._region_ref(d["region"], f"{path}.region")
        u, v = region.axes
        patch = SurfacePatch(3 - u - v, fl.num(region.level), region, 1)
        return PiecewiseSimpleSurface((patch,), region.boundary(), str(d.get("label", "flat surface")))

    def _surface(self, d, path):
        patches = []
        for i, pd in enumerate(d["patches"]):
            ppath = f"{path}.patches[{i}]"
            pd = _mapping(pd, ppath)
            region = self._region_ref(pd["region"], f"{ppath}.region")
            g = _axis(pd["axis"], f"{ppath}.axis")
            u, v = region.axes
            graph = fl.parse(_expr(pd["graph"], f"{ppath}.graph", (AXES[u], AXES[v])))
            orientation = int(_number(pd.get("orientation", 1), f"{ppath}.orientation"))
            patches.append(SurfacePatch(g, graph, region, orientation))
        boundary = None
        if "boundary" in d:
            obj = self.ref(d["boundary"], f"{path}.boundary")
            closed = bool(getattr(obj, "closed", False))
            boundary = PiecewiseSimpleLine(tuple(obj.pieces()), closed)  # type: ignore[attr-defined]
        return PiecewiseSimpleSurface(tuple(patches), boundary, str(d.get("label", "surface")))

    def _zsimple(self, d, path):
        base = self._region_ref(d["base"], f"{path}.base")
        z1 = fl.parse(_expr(d["z1"], f"{path}.z1", ("x", "y")))
        z2 = fl.parse(_expr(d["z2"], f"{path}.z2", ("x", "y")))
        return ZSimpleRegion3D(base, z1, z2)

    def _region_ref(self, value: Any, path: str) -> SimpleRegion2D:
        region = self.ref(value, path)
        if not isinstance(region, SimpleRegion2D):
            raise _fail(path, "expected a rectangle or region")
        return region


GEOMETRY_TYPES = frozenset(
    name[1:].replace("_", "-") for name in vars(_GeometryBuilder) if name.startswith("_") and not name.startswith("__") and name != "_region_ref"
)


# }}}

# {{{ tasks


@dataclass(frozen=True)
class Task:
    """One resolved unit of work."""

    index: int
    name: str
    kind: str
    #: operator or theorem name; empty for verification
    what: str
    #: the declaration as written, echoed into the report
    decl: Mapping[str, Any]
    quad: QuadSpec
    pairs: tuple[KernelPair, ...]
    coords: CoordSystem | None
    #: residual threshold (theorems, verification) or per-value bounds (eval)
    tol: float | Mapping[str, float] | None
    #: expected values, compared at ``expect_tol``
    expect: Any
    expect_tol: float
    #: negative controls pass when the residual exceeds ``tol``
    negative: bool = False
    #: resolved fields, geometry and numbers
    objects: Mapping[str, Any] = field(default_factory=dict)

    @property
    def kernel_label(self) -> str:
        if len(self.pairs) == 1:
            return self.pairs[0].label
        if len(set(self.pairs)) == 1:
            return f"{self.pairs[0].label}^{len(self.pairs)}"
        return "(" + ", ".join(p.label for p in self.pairs) + ")"

    @property
    def alpha(self) -> float | None:
        for p in self.pairs:
            if "alpha" in p.param_dict:
                return p.param_dict["alpha"]
        return None

    def triple(self) -> KernelTriple:
        pairs = self.pairs
        if len(pairs) == 1:
            pairs = pairs * 3
        elif len(pairs) == 2:
            pairs = (*pairs, CLASSICAL)
        return KernelTriple(pairs)  # type: ignore[arg-type]


@dataclass(frozen=True)
class RunConfig:
    tasks: tuple[Task, ...]
    suites: Mapping[str, tuple[str, ...]]
    #: digest of the parsed configuration, echoed in report headers
    digest: str
    timings: bool = False
    #: the parsed tree, kept so worker processes can rebuild the tasks
    raw: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def select(self, kinds: Sequence[str] | None = None, suite: str | None = None) -> tuple[Task, ...]:
        out = self.tasks
        if suite is not None:
            if suite not in self.suites:
                raise ConfigError(f"suites.{suite}: undefined suite (known: {sorted(self.suites)})")
            wanted = self.suites[suite]
            out = tuple(t for t in out if t.name in wanted)
        if kinds is not None:
            out = tuple(t for t in out if t.kind in kinds)
        return out


@dataclass
class _Resolver:
    raw: Mapping[str, Any]
    base_quad: QuadSpec
    kernels: dict[str, KernelPair]
    geometry: _GeometryBuilder
    field_decls: Mapping[str, Any]
    sonin_cache: dict[KernelPair, bool] = field(default_factory=dict)

    def pair(self, ref: Any, path: str) -> KernelPair:
        if isinstance(ref, str):
            if ref in self.kernels:
                return self.kernels[ref]
            if ref.lower() == "classical":
                return CLASSICAL
            raise _fail(path, f"undefined kernel {ref!r} (declared: {sorted(self.kernels)})")
        return build_kernel(ref, path)

    def pairs(self, decl: Mapping[str, Any], path: str) -> tuple[KernelPair, ...]:
        if "kernel" in decl and "kernels" in decl:
            raise _fail(path, "give either 'kernel' or 'kernels'")
        if "kernel" in decl:
            return (self.pair(decl["kernel"], f"{path}.kernel"),)
        if "kernels" in decl:
            refs = decl["kernels"]
            if not isinstance(refs, Sequence) or isinstance(refs, str) or not 1 <= len(refs) <= 3:
                raise _fail(f"{path}.kernels", "expected a list of one to three kernels")
            return tuple(self.pair(r, f"{path}.kernels[{i}]") for i, r in enumerate(refs))
        raise _fail(f"{path}.kernel", "missing")

    def require_sonin(self, pairs: Sequence[KernelPair], path: str) -> None:
        for p in pairs:
            if p not in self.sonin_cache:
                self.sonin_cache[p] = sonin_residual(p, SONIN_XS).passes(family_tolerance(p))
            if not self.sonin_cache[p]:
                raise _fail(path, f"kernel {p.label} fails Sonin verification and may only be used by verify tasks")

    def field_(self, ref: Any, path: str, variables: Sequence[str], vector: bool) -> Field | VectorField:
        value = self.field_decls.get(ref, ref) if isinstance(ref, str) else ref
        if isinstance(ref, str) and ref in self.field_decls:
            path = f"fields.{ref}"
        try:
            if vector:
                if isinstance(value, str) or not isinstance(value, Sequence) or len(value) not in (2, 3):
                    raise _fail(path, "expected a vector field (a list of two or three expressions)")
                return VectorField.parse([_text(v) for v in value], variables)
            if not isinstance(value, (str, int, float)) or isinstance(value, bool):
                raise _fail(path, "expected a scalar field expression")
            return as_field(_text(value), variables)
        except ConfigError:
            raise
        except GFVCError as exc:
            raise _fail(path, str(exc)) from None


def _text(v: Any) -> str:
    return repr(float(v)) if isinstance(v, (int, float)) and not isinstance(v, bool) else str(v)


_COMMON_KEYS = {"name", "kind", "op", "theorem", "kernel", "kernels", "quad", "tol", "expect", "expect_tol", "negative", "coords"}
_OPTIONAL_KEYS = {"xs", "point", "samples", "box", "g", "a", "b", "x", "curl", "outer", "order", "lower", "require_axis_parallel"}


def _resolve_task(index: int, decl: Any, r: _Resolver) -> Task:
    path = f"tasks[{index}]"
    decl = _mapping(decl, path)
    name = str(decl.get("name", f"task{index}"))
    path = f"tasks[{index}] ({name})"
    kind = decl.get("kind")
    if kind not in TASK_KINDS:
        raise _fail(f"{path}.kind", f"expected one of {list(TASK_KINDS)}, got {kind!r}")
    quad = _quad(decl.get("quad"), r.base_quad, f"{path}.quad")
    pairs = r.pairs(decl, path)
    coords = None
    if "coords" in decl:
        try:
            coords = CoordSystem.by_name(str(decl["coords"]))
        except GFVCError as exc:
            raise _fail(f"{path}.coords", str(exc)) from None
    variables = coords.variables if coords is not None else fl.CARTESIAN
    objects: dict[str, Any] = {}
    what = ""
    required: tuple[str, ...] = ()
    if kind == "verify":
        objects["xs"] = _numbers(decl.get("xs", list(SONIN_XS)), f"{path}.xs")
        if any(x <= 0 for x in objects["xs"]):
            raise _fail(f"{path}.xs", "sample points must be positive")
    else:
        key = "op" if kind == "eval" else "theorem"
        what = str(decl.get(key))
        table = EVAL_OPS if kind == "eval" else THEOREMS
        if what not in table:
            raise _fail(f"{path}.{key}", f"unknown {key} {decl.get(key)!r} (known: {sorted(table)})")
        required = table[what]
        missing = [k for k in required if k not in decl]
        if missing:
            raise _fail(f"{path}.{missing[0]}", f"missing (needed by {what})")
        single = what in SINGLE_PAIR_OPS
        if single and len(pairs) != 1:
            raise _fail(f"{path}.kernels", f"{what} takes a single kernel")
        if what == "green" and len(pairs) not in (1, 2):
            raise _fail(f"{path}.kernels", "green takes one or two kernels")
        occ = what in ("gfi_hat", "grad_occ", "div_occ", "curl_occ", "curl_occ_as_printed") or what.endswith("-occ")
        if occ and coords is None:
            raise _fail(f"{path}.coords", f"{what} needs a coordinate system")
        if not occ and coords is not None and kind == "theorem":
            raise _fail(f"{path}.coords", f"{what} works in Cartesian coordinates; use the -occ variant")
        r.require_sonin(pairs, f"{path}.kernel" if "kernel" in decl else f"{path}.kernels")
        for k in ("profile", "f", "g"):
            if k in decl and k in required + ("g",):
                objects[k] = _profile_text(decl[k], f"{path}.{k}")
        for k in ("x", "a", "b"):
            if k in decl:
                objects[k] = _number(decl[k], f"{path}.{k}")
        if "point" in decl:
            pt = _numbers(decl["point"], f"{path}.point")
            if len(pt) not in (2, 3):
                raise _fail(f"{path}.point", "expected two or three coordinates")
            objects["point"] = pt
        if "axis" in decl:
            objects["axis"] = _axis(decl["axis"], f"{path}.axis", variables)
        if "field" in decl:
            vector = not (what in SCALAR_FIELD_OPS or what in SCALAR_THEOREMS)
            objects["field"] = r.field_(decl["field"], f"{path}.field", variables, vector)
        if "scalar" in decl:
            objects["scalar"] = r.field_(decl["scalar"], f"{path}.scalar", variables, False)
        if "geometry" in decl:
            objects["geometry"] = r.geometry.ref(decl["geometry"], f"{path}.geometry")
        if "lower" in decl:
            objects["lower"] = _numbers(decl["lower"], f"{path}.lower", 3)
        if "outer" in decl:
            objects["outer"] = int(_number(decl["outer"], f"{path}.outer"))
        if "curl" in decl:
            if decl["curl"] not in ("surface", "regional"):
                raise _fail(f"{path}.curl", "expected 'surface' or 'regional'")
            objects["curl"] = decl["curl"]
        if what in SAMPLED_OPS:
            _resolve_sampling(decl, path, objects)
    extra = set(decl) - _COMMON_KEYS - _OPTIONAL_KEYS - set(required) - {"profile", "f", "g", "field", "scalar", "geometry", "axis"}
    if extra:
        raise _fail(path, f"unexpected keys {sorted(extra)}")
    tol: float | dict[str, float] | None = None
    if isinstance(decl.get("tol"), Mapping):
        if kind != "eval":
            raise _fail(f"{path}.tol", "per-value thresholds are only meaningful for eval tasks")
        tol = {str(k): _number(v, f"{path}.tol.{k}") for k, v in decl["tol"].items()}
    elif "tol" in decl:
        tol = _number(decl["tol"], f"{path}.tol")
    elif kind == "theorem":
        tol = DEFAULT_THEOREM_TOL
    return Task(
        index=index,
        name=name,
        kind=str(kind),
        what=what,
        decl=decl,
        quad=quad,
        pairs=pairs,
        coords=coords,
        tol=tol,
        expect=_expectation(decl.get("expect"), f"{path}.expect"),
        expect_tol=_number(decl.get("expect_tol", DEFAULT_EXPECT_TOL), f"{path}.expect_tol"),
        negative=bool(decl.get("negative", False)),
        objects=objects,
    )


def _resolve_sampling(decl: Mapping[str, Any], path: str, objects: dict[str, Any]) -> None:
    """Fixed ``point`` or ``samples`` random points in ``box`` (drawn from the run seed)."""
    if "point" in decl:
        return
    samples = int(_number(decl.get("samples", 1), f"{path}.samples"))
    if samples < 1:
        raise _fail(f"{path}.samples", "must be at least 1")
    box = decl.get("box", [[0.5, 2.0]] * 3)
    if not isinstance(box, Sequence) or len(box) != 3:
        raise _fail(f"{path}.box", "expected three intervals")
    bounds = tuple(_interval(b, f"{path}.box[{i}]") for i, b in enumerate(box))
    if any(lo <= 0 or hi < lo for lo, hi in bounds):
        raise _fail(f"{path}.box", "intervals must be positive and ordered")
    objects["samples"] = samples
    objects["box"] = bounds


def _profile_text(value: Any, path: str) -> str:
    text = _expr(value, path, ("x",))
    return text


def _expectation(value: Any, path: str) -> Any:
    if value is None:
        return None
    if isinstance(value, Mapping):
        return {str(k): _number(v, f"{path}.{k}") for k, v in value.items()}
    if isinstance(value, Sequence) and not isinstance(value, str):
        return _numbers(value, path)
    return _number(value, path)


# }}}

# {{{ loading


def _label(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return "(" + ",".join(_label(v) for v in value) + ")"
    if isinstance(value, Mapping):
        return "{" + ",".join(f"{k}={_label(v)}" for k, v in value.items()) + "}"
    return str(value)


def expand_matrix(decls: Sequence[Any]) -> list[Any]:
    """Expand ``matrix`` entries into one task per combination, in declared order.

    ``matrix: {kernel: [a, b], "a,x": [[0, 1], [0.5, 2]]}`` gives four tasks;
    a comma-separated key varies several task keys together.
    """
    out: list[Any] = []
    for i, decl in enumerate(decls):
        if not isinstance(decl, Mapping) or "matrix" not in decl:
            out.append(decl)
            continue
        path = f"tasks[{i}].matrix"
        matrix = _mapping(decl["matrix"], path)
        axes = []
        for key, values in matrix.items():
            keys = [k.strip() for k in str(key).split(",")]
            if not isinstance(values, Sequence) or isinstance(values, str) or not values:
                raise _fail(f"{path}.{key}", "expected a nonempty list")
            rows = []
            for j, v in enumerate(values):
                if len(keys) > 1:
                    if not isinstance(v, Sequence) or isinstance(v, str) or len(v) != len(keys):
                        raise _fail(f"{path}.{key}[{j}]", f"expected {len(keys)} values")
                    rows.append(dict(zip(keys, v)))
                else:
                    rows.append({keys[0]: v})
            axes.append(rows)
        base = {k: v for k, v in decl.items() if k != "matrix"}
        name = str(base.get("name", f"task{i}"))
        for combo in itertools.product(*axes):
            merged: dict[str, Any] = {}
            for part in combo:
                merged.update(part)
            suffix = ",".join(f"{k}={_label(v)}" for k, v in merged.items() if k not in ("expect", "expect_tol", "tol"))
            out.append({**base, **merged, "name": f"{name}[{suffix}]"})
    return out


def parse_config(raw: Any, base_quad: QuadSpec = DEFAULT_SPEC) -> RunConfig:
    """Resolve a parsed YAML tree into tasks."""
    raw = _mapping(raw, "config")
    unknown = set(raw) - {"quad", "timings", "kernels", "fields", "geometry", "tasks", "suites", "description"}
    if unknown:
        raise _fail("config", f"unexpected top-level keys {sorted(unknown)}")
    quad = _quad(raw.get("quad"), base_quad, "quad")
    kernel_decls = _mapping(raw.get("kernels") or {}, "kernels")
    kernels = {}
    for name, decl in kernel_decls.items():
        if str(name).lower() == "classical" and not isinstance(decl, Mapping):
            continue
        kernels[str(name)] = build_kernel(decl, f"kernels.{name}")
    field_decls = _mapping(raw.get("fields") or {}, "fields")
    geometry = _GeometryBuilder(_mapping(raw.get("geometry") or {}, "geometry"))
    resolver = _Resolver(raw, quad, kernels, geometry, field_decls)
    task_decls = raw.get("tasks")
    if not isinstance(task_decls, Sequence) or isinstance(task_decls, str) or not task_decls:
        raise _fail("tasks", "expected a nonempty list")
    tasks = tuple(_resolve_task(i, d, resolver) for i, d in enumerate(expand_matrix(task_decls)))
    names = [t.name for t in tasks]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise _fail("tasks", f"duplicate task names {dupes}")
    # geometry that no task uses is still checked
    for gname in geometry.decls:
        geometry.ref(gname, f"geometry.{gname}")
    suites: dict[str, tuple[str, ...]] = {}
    for sname, members in _mapping(raw.get("suites") or {}, "suites").items():
        if not isinstance(members, Sequence) or isinstance(members, str):
            raise _fail(f"suites.{sname}", "expected a list of task names")
        members = [n for m in members for n in _suite_members(str(m), names)]
        missing = [m for m in members if m not in names]
        if missing:
            raise _fail(f"suites.{sname}", f"unknown tasks {missing}")
        suites[str(sname)] = tuple(str(m) for m in members)
    timings = raw.get("timings", False)
    if not isinstance(timings, bool):
        raise _fail("timings", "expected true or false")
    canonical = json.dumps(raw, sort_keys=True, default=str).encode()
    return RunConfig(tasks, suites, hashlib.sha256(canonical).hexdigest()[:16], timings, raw)


def _suite_members(member: str, names: Sequence[str]) -> list[str]:
    """A task name, or the base name of a matrix task standing for all its expansions."""
    if member in names:
        return [member]
    expanded = [n for n in names if n.startswith(member + "[")]
    return expanded or [member]


def load_config(path: str | Path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"--config: cannot read {p}: {exc.strerror}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{p}: not valid YAML: {exc}") from None
    return parse_config(raw)


# }}}

# vim: foldmethod=marker
