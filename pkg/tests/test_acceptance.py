"""One test per acceptance criterion, each printing a PASS/FAIL line.

Most criteria run the shipped suites through the command-line runner and
then compare the records with independent oracles at the stated tolerances.
"""

from __future__ import annotations

import functools

import pytest

from gfvc import cli, occ
from gfvc.geometry import Box3D
from gfvc.gfc1d import gfi
from gfvc.kernels import make_pair, sonin_residual
from gfvc.occ import CoordSystem
from gfvc.theorems import check_gauss
from gfvc.vectorops import KernelTriple, curl_regional, divergence, grad_regional

from . import oracles
from .verdicts import record

#: errors below this are quadrature noise, not a trend (criterion 10)
NOISE_FLOOR = 1e-9


@functools.lru_cache(maxsize=None)
def suite(name: str) -> dict[str, dict]:
    cfg = cli._load_builtin(name)
    return {r.task: r.as_dict() for r in cli.run(cfg)}


def failures(records: dict[str, dict]) -> list[str]:
    return [f"{name} ({r['status']}: {r['message']})" for name, r in records.items() if r["status"] != "pass"]


def close(value: float, target: float, tol: float) -> bool:
    return value is not None and abs(value - target) < tol


def test_criterion_01_sonin_verification():
    recs = suite("sonin")
    bad = failures(recs)
    xs = [0.1, 0.5, 1, 2, 10]
    power = {a: sonin_residual(make_pair("PowerRL", alpha=a), xs).max_abs_residual for a in (0.25, 0.5, 0.75)}
    other = max(r["values"]["max_abs_residual"] for n, r in recs.items() if n.startswith("sonin-other"))
    ok = not bad and max(power.values()) < 1e-10 and other < 1e-7
    assert record(1, "Sonin verification", ok, f"PowerRL max {max(power.values()):.2e} (< 1e-10), other pairs max {other:.2e} (< 1e-7); failing tasks {bad or 'none'}")


def test_criterion_02_fundamental_theorems():
    recs = suite("fundamental")
    ft2 = max(r["values"]["ft2"] for n, r in recs.items() if n.startswith("integral-of-derivative"))
    ft1 = max(r["values"]["ft1"] for n, r in recs.items() if n.startswith("derivative-of-integral"))
    count = sum(n.startswith("integral-of-derivative") for n in recs)
    control = recs["shifted-derivative-of-integral-control"]["values"]["residual"]
    ok = not failures(recs) and count == 9 * 3 * 2 and ft2 < 1e-6 and ft1 < 1e-5 and control > 0.1
    assert record(2, "fundamental theorems 1-D", ok, f"{count} FT2 cases max {ft2:.2e} (< 1e-6), FT1 max {ft1:.2e} (< 1e-5), negative control {control:.3g} (> 0.1)")


def test_criterion_03_power_rule():
    recs = suite("power-rule")
    worst = 0.0
    checked = 0
    for name, r in recs.items():
        pair = r["params"]
        alpha = r["alpha"]
        mu = float(pair["profile"].removeprefix("x^")) if pair["profile"] != "x" else 1.0
        if name.startswith("integral-of-power"):
            want = oracles.riemann_liouville_power(alpha, mu, 1.0)
        else:
            want = oracles.caputo_power(alpha, mu, 1.0)
        worst = max(worst, abs(r["lhs"] - want) / abs(want))
        checked += 1
    ok = not failures(recs) and checked == 18 and worst < 1e-8
    ok = ok and close(recs["derivative-of-power[kernel=p50,profile=x]"]["lhs"], oracles.H15, 1e-8)
    assert record(3, "power-rule oracles", ok, f"{checked} gfi/Caputo values, worst relative error {worst:.2e} (< 1e-8)")


def test_criterion_04_green():
    recs = suite("green")
    frac, classical = recs["green-rectangle"], recs["green-rectangle-classical"]
    target = oracles.FOUR_OVER_SQRT_PI
    ok = (
        not failures(recs)
        and close(frac["lhs"], target, 1e-5)
        and close(frac["rhs"], target, 1e-5)
        and frac["abs_residual"] < 1e-5
        and close(classical["lhs"], 2.0, 1e-8)
        and close(classical["rhs"], 2.0, 1e-8)
    )
    assert record(4, "Green rectangle", ok, f"lhs {frac['lhs']:.12g}, rhs {frac['rhs']:.12g} vs 4/sqrt(pi), residual {frac['abs_residual']:.2e}; classical {classical['lhs']:.12g} / {classical['rhs']:.12g}")


def test_criterion_05_gauss():
    recs = suite("gauss")
    cube, classical, volume = recs["gauss-cube"], recs["gauss-cube-classical"], recs["volume-of-cube"]
    ok = (
        not failures(recs)
        and close(cube["lhs"], oracles.FOUR_OVER_PI, 1e-5)
        and close(cube["rhs"], oracles.FOUR_OVER_PI, 1e-5)
        and close(classical["lhs"], 3.0, 1e-8)
        and close(classical["rhs"], 3.0, 1e-8)
        and close(volume["lhs"], oracles.H15_CUBED, 1e-6)
    )
    assert record(5, "Gauss unit cube", ok, f"{cube['lhs']:.12g} / {cube['rhs']:.12g} vs 4/pi; classical {classical['lhs']:.12g} / {classical['rhs']:.12g}; volume GFI {volume['lhs']:.12g}")


def test_criterion_06_stokes():
    recs = suite("stokes")
    box, flat = recs["stokes-open-box"], recs["stokes-flat-square-classical"]
    ok = not failures(recs) and box["abs_residual"] < 1e-4 and close(flat["lhs"], 2.0, 1e-8) and close(flat["rhs"], 2.0, 1e-8)
    assert record(6, "Stokes", ok, f"box without bottom {box['lhs']:.12g} / {box['rhs']:.12g}, residual {box['abs_residual']:.2e} (< 1e-4); flat square {flat['lhs']:.12g} / {flat['rhs']:.12g}")


def test_criterion_07_gradient_theorems():
    recs = suite("gradient")
    chain, line = recs["gradient-regional-chain"], recs["gradient-line-diagonal"]
    control = recs["gradient-regional-diagonal-control"]
    ok = (
        not failures(recs)
        and all(close(r[s], 1.0, 1e-5) for r in (chain, line) for s in ("lhs", "rhs"))
        and control["abs_residual"] > 0.05
    )
    assert record(7, "gradient theorems", ok, f"chain {chain['lhs']:.10g}, diagonal {line['lhs']:.10g}, negative control residual {control['abs_residual']:.3g} (> 0.05)")


def test_criterion_08_vector_identities():
    recs = suite("identities")
    cg = max(r["values"]["curl_grad"] for n, r in recs.items() if n.startswith("curl-of-gradient"))
    dc = max(r["values"]["div_curl"] for n, r in recs.items() if n.startswith("divergence-of-curl"))
    leibniz = recs["leibniz-defect"]["values"]["value"]
    semigroup = recs["semigroup-defect"]["values"]["value"]
    ok = (
        not failures(recs)
        and cg < 1e-5
        and dc < 1e-5
        and close(leibniz, oracles.LEIBNIZ_X_X, 1e-6)
        and close(semigroup, -0.5, 1e-5)
    )
    assert record(8, "vector identities", ok, f"curl grad {cg:.2e}, div curl {dc:.2e}, Leibniz defect {leibniz:.12g}, semigroup defect {semigroup:.8g}")


def _cartesian_reduction_gaps() -> list[float]:
    cart = CoordSystem.cartesian()
    kt = KernelTriple.uniform(make_pair("PowerRL", alpha=0.5))
    p = (0.7, 1.3, 0.9)
    gaps = [abs(occ.gfi_hat(cart, kt[0], 0, "x^2", p) - gfi(kt[0], "x^2", p[0]))]
    gaps.append(max(abs(a - b) for a, b in zip(occ.grad_occ(cart, kt, "x*y + z^2", p), grad_regional(kt, "x*y + z^2", p))))
    F = ["x^2", "x*y", "y*z"]
    gaps.append(abs(occ.div_occ(cart, kt, F, p) - divergence(kt, F, p)))
    G = ["y*z", "x^2", "x*y*z"]
    gaps.append(max(abs(a - b) for a, b in zip(occ.curl_occ(cart, kt, G, p), curl_regional(kt, G, p))))
    cube = Box3D(0, 1, 0, 1, 0, 1)
    a, b = occ.check_gauss_occ(cart, kt, ["x", "0", "0"], cube), check_gauss(kt, ["x", "0", "0"], cube)
    gaps.append(max(abs(a.lhs - b.lhs), abs(a.rhs - b.rhs)))
    return gaps


def test_criterion_09_curvilinear():
    recs = suite("occ")
    gaps = _cartesian_reduction_gaps()
    cyl = recs["divergence-radial-cylindrical"]["values"]["value"]
    sph = recs["divergence-radial-spherical"]["values"]["value"]
    sector = recs["gauss-sector-axial"]
    ok = not failures(recs) and len(gaps) == 5 and max(gaps) < 1e-12 and close(cyl, 2.0, 1e-8) and close(sph, 3.0, 1e-8)
    ok = ok and sector["abs_residual"] < 1e-4
    assert record(9, "curvilinear coordinates", ok, f"Cartesian reduction max gap {max(gaps):.1e} over 5 cases (< 1e-12); div(e_r r) {cyl:.12g} / {sph:.12g}; cylindrical sector Gauss residual {sector['abs_residual']:.2e}")


def test_criterion_10_alpha_to_one():
    recs = suite("alpha-limit")
    lines = []
    ok = not failures(recs)
    for theorem in ("green", "gauss", "stokes", "gradient-regional", "gradient-line"):
        classical = recs[f"{theorem}[kernel=classical]"]["lhs"]
        errs = [abs(recs[f"{theorem}[kernel={k}]"]["lhs"] - classical) for k in ("a90", "a99")]
        monotone = errs[1] < errs[0] or max(errs) < NOISE_FLOOR
        ok = ok and monotone
        lines.append(f"{theorem} {errs[0]:.2e} -> {errs[1]:.2e}")
    assert record(10, "alpha -> 1 continuity", ok, "; ".join(lines))


@pytest.mark.parametrize("name", ["green", "power-rule"])
def test_criterion_11_determinism(tmp_path, name):
    outs = [tmp_path / f"run{i}.jsonl" for i in range(2)]
    codes = [cli.main(["suite", name, "--out", str(p)]) for p in outs]
    same = outs[0].read_bytes() == outs[1].read_bytes()
    same_table = cli.table_path(outs[0]).read_bytes() == cli.table_path(outs[1]).read_bytes()
    ok = codes == [0, 0] and same and same_table
    assert record(11, f"CLI determinism ({name})", ok, f"exit codes {codes}, reports identical {same}, tables identical {same_table}")
