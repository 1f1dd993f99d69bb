"""Command-line front end.

``gfvc <command> --config run.yaml --out report.jsonl`` resolves the
configuration (see :mod:`gfvc.config`), runs the selected tasks and writes
one record per task in declared order.  Exit status: 0 when every task
passed, 1 on a numerical failure or a residual above its threshold, 2 on
a usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from . import gfc1d, gfint, occ, theorems, vectorops
from .config import RunConfig, Task, load_config, parse_config
from .errors import ConfigError, GFVCError
from .kernels import (
    Family,
    catalog,
    family_parameters,
    family_tolerance,
    sonin_residual,
)

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2

#: command -> task kinds it runs (``None``: all)
COMMAND_KINDS: dict[str, tuple[str, ...] | None] = {
    "verify-kernels": ("verify",),
    "eval-op": ("eval",),
    "check-theorem": ("theorem",),
    "suite": None,
}

CSV_COLUMNS = ("task", "kernel", "alpha", "lhs", "rhs", "abs_residual", "rel_residual", "seconds")


# {{{ records


@dataclass(frozen=True)
class Record:
    """Outcome of one task; ``status`` is ``pass``, ``fail`` or ``error``."""

    task: str
    kind: str
    what: str
    kernel: str
    alpha: float | None
    params: Mapping[str, Any]
    values: Mapping[str, float]
    lhs: float | None
    rhs: float | None
    abs_residual: float | None
    rel_residual: float | None
    est_numerical_error: float | None
    tol: float | None
    status: str
    message: str
    seconds: float | None

    def as_dict(self) -> dict[str, Any]:
        return {
            "task": self.task,
            "kind": self.kind,
            "what": self.what,
            "kernel": self.kernel,
            "alpha": self.alpha,
            "params": dict(self.params),
            "values": dict(self.values),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_residual": self.abs_residual,
            "rel_residual": self.rel_residual,
            "est_numerical_error": self.est_numerical_error,
            "tol": self.tol,
            "status": self.status,
            "message": self.message,
            "seconds": self.seconds,
        }

    @property
    def ok(self) -> bool:
        return self.status == "pass"


def format_float(v: float) -> str:
    """17 significant digits; non-finite values use the JSON5 spellings."""
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    return format(v, ".17g")


def _json(value: Any) -> str:
    if value is None or isinstance(value, bool):
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, Mapping):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(v)}" for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in value) + "]"
    return json.dumps(str(value))


def render_records(records: Sequence[Record], header: Mapping[str, Any]) -> str:
    """A header line followed by one JSON object per task."""
    lines = [_json(header)]
    lines.extend(_json(r.as_dict()) for r in records)
    return "\n".join(lines) + "\n"


def render_table(records: Sequence[Record]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        row = [r.task, r.kernel, r.alpha, r.lhs, r.rhs, r.abs_residual, r.rel_residual, r.seconds]
        writer.writerow(["" if v is None else format_float(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def table_path(out: str | Path) -> Path:
    """Where the tabular export goes next to a records file."""
    path = Path(out)
    return path.with_name(path.stem + ".table.csv") if path.suffix == ".csv" else path.with_suffix(".csv")


def emit_report(records: Sequence[Record], out: str | Path | None, fmt: str, header: Mapping[str, Any]) -> None:
    """Write records (plus a ``.csv`` table next to them) or the table alone.

    Without ``out`` the selected format goes to standard output.
    """
    if not records:
        raise ConfigError("no tasks selected; the report would be empty")
    text = render_records(records, header) if fmt == "records" else render_table(records)
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text)
    if fmt == "records":
        table_path(path).write_text(render_table(records))


def _check_writable(out: str | Path | None, fmt: str) -> None:
    if out is None:
        return
    targets = [Path(out)]
    if fmt == "records":
        targets.append(table_path(out))
    for p in targets:
        try:
            with open(p, "a"):
                pass
        except OSError as exc:
            raise ConfigError(f"--out: cannot write {p}: {exc.strerror}") from None


# }}}

# {{{ task execution


def _vec_values(v: vectorops.VecResult, names: Sequence[str]) -> dict[str, float]:
    return {n: float(c) for n, c in zip(names, v.components)}


def _eval_values(task: Task, rng_seed: int) -> dict[str, float]:
    o = task.objects
    spec = task.quad
    what = task.what
    names = task.coords.variables if task.coords is not None else ("x", "y", "z")
    if what in ("gfi", "gfd_caputo", "gfd_rl"):
        return {"value": getattr(gfc1d, what)(task.pairs[0], o["profile"], o["x"], spec)}
    if what in ("gfi_interval", "gfd_interval"):
        return {"value": getattr(gfc1d, what)(task.pairs[0], o["profile"], o["a"], o["b"], spec)}
    if what == "ft_residuals":
        res = gfc1d.ft_residuals(task.pairs[0], o["profile"], o["a"], o["x"], spec, o.get("g"))
        return {"ft2": res.ft2, "ft1": res.ft1}
    if what == "leibniz_defect":
        return {"value": gfc1d.leibniz_defect(task.pairs[0], o["f"], o["g"], o["x"], spec)}
    if what == "semigroup_defect":
        return {"value": gfc1d.semigroup_defect(task.pairs[0], o["profile"], o["x"], spec)}
    if what == "interval_derivative_of_integral":
        prof = gfc1d.Profile1D.from_expr(o["profile"])
        value = gfc1d.interval_derivative_of_integral(task.pairs[0], prof, o["a"], o["x"], spec)
        return {"value": value, "residual": abs(value - prof.value(o["x"]))}
    kt = task.triple()
    F = o.get("field")
    if what == "grad_regional":
        return _vec_values(vectorops.grad_regional(kt, F, o["point"], spec), names)
    if what == "grad_line":
        return _vec_values(vectorops.grad_line(kt, F, o["geometry"], o["point"], spec), names)
    if what == "divergence":
        return {"value": vectorops.divergence(kt, F, o["point"], spec)}
    if what == "curl_regional":
        return _vec_values(vectorops.curl_regional(kt, F, o["point"], spec, o.get("lower")), names)
    if what == "curl_surface":
        return _vec_values(vectorops.curl_surface(kt, F, o["geometry"], o["point"], spec), names)
    if what == "laplacian":
        return {"value": vectorops.laplacian_scalar(kt, F, o["point"], spec)}
    if what in ("identity_defects", "curl_grad", "div_curl"):
        return _identity_values(task, kt, rng_seed)
    if what == "line_gfi":
        return {"value": gfint.line_gfi(kt, F, o["geometry"], spec).value}
    if what == "circulation":
        return {"value": gfint.circulation(kt, F, o["geometry"], spec)}
    if what == "double_gfi":
        region = o["geometry"]
        u, v = region.axes
        return {"value": gfint.double_gfi(kt[u], kt[v], F, region, spec, o.get("outer", 0))}
    if what == "flux":
        return {"value": gfint.flux(kt, F, o["geometry"], spec)}
    if what == "volume_gfi":
        return {"value": gfint.volume_gfi(kt, F, o["geometry"], spec).value}
    cs = task.coords
    assert cs is not None
    if what == "gfi_hat":
        return {"value": occ.gfi_hat(cs, task.pairs[0], o["axis"], F, o["point"], spec)}
    if what == "grad_occ":
        return _vec_values(occ.grad_occ(cs, kt, F, o["point"], spec), names)
    if what == "div_occ":
        return {"value": occ.div_occ(cs, kt, F, o["point"], spec)}
    if what == "curl_occ":
        return _vec_values(occ.curl_occ(cs, kt, F, o["point"], spec), names)
    if what == "curl_occ_as_printed":
        return _vec_values(occ.curl_occ_as_printed(cs, kt, F, o["point"], spec), names)
    raise ConfigError(f"unsupported operator {what!r}")


def sample_points(task: Task, seed: int) -> list[tuple[float, ...]]:
    """The fixed ``point``, or ``samples`` uniform points in ``box`` drawn from ``seed``."""
    o = task.objects
    if "point" in o:
        return [tuple(o["point"])]
    # one stream per task so results do not depend on --jobs
    rng = np.random.default_rng([seed, task.index])
    lo = np.array([b[0] for b in o["box"]])
    hi = np.array([b[1] for b in o["box"]])
    return [tuple(float(c) for c in lo + (hi - lo) * rng.random(3)) for _ in range(o["samples"])]


def _identity_values(task: Task, kt: vectorops.KernelTriple, seed: int) -> dict[str, float]:
    """Largest defect magnitudes over the sample points."""
    o = task.objects
    spec = task.quad
    inner = spec.tightened()
    points = sample_points(task, seed)
    if task.what == "curl_grad":
        field_ = vectorops.curl_regional_field(kt, vectorops.grad_regional_field(kt, o["field"], inner), spec)
        return {"curl_grad": max(vectorops.evaluate_vector(field_, p).max_abs() for p in points)}
    if task.what == "div_curl":
        div = vectorops.divergence_field(kt, vectorops.curl_regional_field(kt, o["field"], inner), spec)
        return {"div_curl": max(abs(float(div(*p))) for p in points)}
    cg = dc = gap = 0.0
    for p in points:
        d = vectorops.identity_defects(kt, o["scalar"], o["field"], p, spec)
        cg = max(cg, d.curl_grad.max_abs())
        dc = max(dc, abs(d.div_curl))
        gap = max(gap, d.double_curl_gap.max_abs())
    return {"curl_grad": cg, "div_curl": dc, "double_curl_gap": gap}


def _theorem_report(task: Task) -> theorems.TheoremReport:
    o = task.objects
    spec = task.quad
    F, G = o["field"], o["geometry"]
    what = task.what
    if what == "green":
        p1 = task.pairs[0]
        p2 = task.pairs[1] if len(task.pairs) > 1 else p1
        return theorems.check_green(p1, p2, F, G, spec)
    kt = task.triple()
    if what == "gradient-regional":
        return theorems.check_gradient_regional(kt, F, G, spec, require_axis_parallel=not task.negative)
    if what == "gradient-line":
        return theorems.check_gradient_line(kt, F, G, spec)
    if what == "stokes":
        return theorems.check_stokes(kt, F, G, spec, curl=o.get("curl", "surface"))
    if what == "gauss":
        return theorems.check_gauss(kt, F, G, spec)
    cs = task.coords
    assert cs is not None
    if what == "gradient-occ":
        return occ.check_gradient_occ(cs, kt, F, G, spec)
    if what == "stokes-occ":
        return occ.check_stokes_occ(cs, kt, F, G, spec)
    if what == "gauss-occ":
        return occ.check_gauss_occ(cs, kt, F, G, spec)
    raise ConfigError(f"unsupported theorem {what!r}")


def _params_echo(task: Task) -> dict[str, Any]:
    skip = {"name", "kind", "op", "theorem", "expect", "expect_tol", "tol"}
    return {k: task.decl[k] for k in sorted(task.decl) if k not in skip}


def _compare(values: Mapping[str, float], expect: Any, tol: float) -> tuple[bool, str]:
    if expect is None:
        return True, ""
    if isinstance(expect, Mapping):
        pairs = [(k, values.get(k), v) for k, v in expect.items()]
    elif isinstance(expect, tuple):
        keys = list(values)
        if len(expect) != len(keys):
            return False, f"expected {len(expect)} values, got {len(keys)}"
        pairs = list(zip(keys, values.values(), expect))
    else:
        first = next(iter(values))
        pairs = [(first, values[first], expect)]
    bad = []
    for key, got, want in pairs:
        if got is None:
            bad.append(f"{key} missing")
        elif not abs(got - want) <= tol:
            bad.append(f"{key}={format_float(got)} differs from {format_float(want)} by {abs(got - want):.3e} > {tol:.3e}")
    return not bad, "; ".join(bad)


def _bounds(values: Mapping[str, float], tol: float | Mapping[str, float], scale: float, negative: bool) -> tuple[bool, str]:
    """Thresholds on eval outputs: ``|value| < tol`` (or ``>`` for negative controls)."""
    limits = dict(tol) if isinstance(tol, Mapping) else {k: tol for k in values}
    bad = []
    for key, limit in limits.items():
        if key not in values:
            bad.append(f"{key} missing")
            continue
        mag = abs(values[key])
        within = mag < limit * scale
        if within == negative:
            relation = "is below" if negative else "exceeds"
            bad.append(f"|{key}| = {mag:.3e} {relation} {limit * scale:.3e}")
    return not bad, "; ".join(bad)


def run_task(task: Task, tol_scale: float = 1.0, seed: int = 0, timings: bool = False) -> Record:
    """Execute one task; numerical failures become ``error`` records."""
    t0 = time.perf_counter()
    base = dict(task=task.name, kind=task.kind, what=task.what, kernel=task.kernel_label, alpha=task.alpha, params=_params_echo(task))
    empty: dict[str, Any] = dict(lhs=None, rhs=None, abs_residual=None, rel_residual=None, est_numerical_error=None)
    expect_tol = task.expect_tol * tol_scale
    try:
        if task.kind == "verify":
            reports = [sonin_residual(p, task.objects["xs"], task.quad) for p in task.pairs]
            worst = max(reports, key=lambda r: r.max_abs_residual)
            tol = (task.tol if task.tol is not None else max(family_tolerance(p) for p in task.pairs)) * tol_scale
            values = {f"residual@{format_float(x)}": float(v) for x, v in zip(worst.xs, worst.residuals)}
            values["max_abs_residual"] = worst.max_abs_residual
            ok = worst.max_abs_residual < tol
            msg = "" if ok else f"Sonin residual {worst.max_abs_residual:.3e} exceeds {tol:.3e}"
            fields = dict(empty, abs_residual=worst.max_abs_residual, est_numerical_error=max(worst.errors, default=0.0))
        elif task.kind == "eval":
            values = _eval_values(task, seed)
            ok, msg = _compare(values, task.expect, expect_tol)
            tol = None
            first = next(iter(values.values()))
            fields = dict(empty, lhs=first)
            if task.expect is not None and not isinstance(task.expect, Mapping):
                want = task.expect[0] if isinstance(task.expect, tuple) else task.expect
                fields.update(rhs=want, abs_residual=abs(first - want), rel_residual=abs(first - want) / max(1.0, abs(first), abs(want)))
            if task.tol is not None:
                bok, bmsg = _bounds(values, task.tol, tol_scale, task.negative)
                ok = ok and bok
                msg = "; ".join(m for m in (msg, bmsg) if m)
                tol = task.tol * tol_scale if not isinstance(task.tol, Mapping) else None
        else:
            report = _theorem_report(task)
            tol = (task.tol if task.tol is not None else 0.0) * tol_scale
            values = {"lhs": report.lhs, "rhs": report.rhs}
            passes = report.abs_residual < tol
            ok = not passes if task.negative else passes
            msg = ""
            if not ok:
                relation = "is below" if task.negative else "exceeds"
                msg = f"residual {report.abs_residual:.3e} {relation} {tol:.3e}"
            eok, emsg = _compare(values, task.expect, expect_tol)
            ok = ok and eok
            msg = "; ".join(m for m in (msg, emsg) if m)
            fields = dict(
                lhs=report.lhs, rhs=report.rhs, abs_residual=report.abs_residual, rel_residual=report.rel_residual,
                est_numerical_error=report.est_numerical_error,
            )
            if report.convention:
                base["params"] = {**base["params"], "convention": report.convention}
        status = "pass" if ok else "fail"
    except (GFVCError, ArithmeticError) as exc:
        values, tol, status, msg, fields = {}, task.tol, "error", f"{type(exc).__name__}: {exc}", empty
    seconds = time.perf_counter() - t0 if timings else None
    return Record(**base, values=values, **fields, tol=tol, status=status, message=msg, seconds=seconds)


def _worker(args: tuple[Mapping[str, Any], int, float, int, bool]) -> Record:
    raw, index, tol_scale, seed, timings = args
    cfg = parse_config(raw)
    return run_task(cfg.tasks[index], tol_scale, seed, timings)


def run(
    config: RunConfig,
    tasks: Sequence[Task] | None = None,
    *,
    tol_scale: float = 1.0,
    jobs: int = 1,
    seed: int = 0,
    timings: bool | None = None,
) -> list[Record]:
    """Run ``tasks`` (default: all) and return their records in declared order."""
    tasks = list(config.tasks if tasks is None else tasks)
    timings = config.timings if timings is None else timings
    if jobs <= 1 or len(tasks) <= 1:
        return [run_task(t, tol_scale, seed, timings) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        args = [(config.raw, t.index, tol_scale, seed, timings) for t in tasks]
        return list(pool.map(_worker, args))


def exit_status(records: Iterable[Record]) -> int:
    return EXIT_OK if all(r.ok for r in records) else EXIT_NUMERIC


# }}}

# {{{ built-in suites


def builtin_suites() -> dict[str, str]:
    """Name -> YAML text of the configurations shipped with the package."""
    root = resources.files("gfvc") / "suites"
    out = {}
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".yaml"):
            out[entry.name[: -len(".yaml")]] = entry.read_text()
    return out


def _load_builtin(name: str) -> RunConfig:
    import yaml

    suites = builtin_suites()
    if name not in suites:
        raise ConfigError(f"suite: unknown built-in suite {name!r} (known: {sorted(suites)})")
    return parse_config(yaml.safe_load(suites[name]))


# }}}

# {{{ command line


def _positive_float(text: str) -> float:
    value = float(text)
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError("must be a positive number")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gfvc", description="General fractional vector calculus: operators, kernels and theorem checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (
        ("verify-kernels", "Sonin verification of kernel pairs"),
        ("eval-op", "evaluate operators at points"),
        ("check-theorem", "integral theorem residuals"),
        ("suite", "run a named bundle of tasks"),
    ):
        p = sub.add_parser(name, help=help_text)
        if name == "suite":
            p.add_argument("name", nargs="?", help="suite declared in the config, or a built-in suite when no config is given")
        p.add_argument("--config", help="YAML run configuration")
        p.add_argument("--out", help="report path (default: standard output)")
        p.add_argument("--format", choices=("records", "table"), default="records")
        p.add_argument("--tol-scale", type=_positive_float, default=1.0, help="multiply every task tolerance")
        p.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
        p.add_argument("--seed", type=int, default=0, help="seed for randomly sampled evaluation points")
        p.add_argument("--timings", action="store_true", default=None, help="record wall times (reports are then not reproducible)")
    sub.add_parser("list", help="kernel catalog and built-in suites")
    return parser


def _list() -> str:
    lines = ["kernel catalog (family, parameters, status, max Sonin residual, tolerance):"]
    for entry in catalog():
        pair = entry.pair
        res = entry.report.max_abs_residual if entry.report else float("nan")
        state = "enabled" if entry.enabled else "disabled"
        lines.append(f"  {pair.label:<45} {state:<9} {res:.3e}  {family_tolerance(pair):g}")
    lines.append("families and parameters:")
    for fam in Family:
        lines.append(f"  {fam.value:<18} {', '.join(family_parameters(fam)) or '-'}")
    lines.append("built-in suites:")
    for name in builtin_suites():
        lines.append(f"  {name}")
    return "\n".join(lines) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list":
        sys.stdout.write(_list())
        return EXIT_OK
    try:
        if args.config is None:
            if args.command != "suite" or args.name is None:
                raise ConfigError("--config: required (only 'suite NAME' can fall back to a built-in suite)")
            cfg = _load_builtin(args.name)
            tasks = cfg.tasks
        else:
            cfg = load_config(args.config)
            suite = getattr(args, "name", None)
            tasks = cfg.select(COMMAND_KINDS[args.command], suite if suite is not None else None)
        if not tasks:
            raise ConfigError(f"tasks: no tasks of the kind run by '{args.command}'")
        _check_writable(args.out, args.format)
        header = {"report": "gfvc", "version": 1, "command": args.command, "config_digest": cfg.digest, "tasks": len(tasks)}
        records = run(cfg, tasks, tol_scale=args.tol_scale, jobs=args.jobs, seed=args.seed, timings=args.timings)
        emit_report(records, args.out, args.format, header)
    except ConfigError as exc:
        sys.stderr.write(f"gfvc: config error: {exc}\n")
        return EXIT_USAGE
    for r in records:
        if not r.ok:
            sys.stderr.write(f"gfvc: {r.task}: {r.status}: {r.message}\n")
    return exit_status(records)


# }}}

# vim: foldmethod=marker
