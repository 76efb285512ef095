"""End-to-end acceptance checks, one test per numbered criterion.

Each test records a PASS/FAIL line that the terminal summary prints
after the run (see conftest), then asserts, so a red criterion still
leaves its line behind.  Run with `pytest tests/test_acceptance.py -v`.
"""

import json
import math
import time

import numpy as np
import pytest

from confcalc import (
    CallableFn,
    ConfParams,
    IvpProblem,
    PointPatchedFn,
    Tolerance,
    VecValue,
    builtin,
    check_left_inverse,
    check_right_inverse,
    conf_deriv,
    conf_integral,
    convert_order,
    cross_validate,
    default_corpus,
    diag_fn,
    lower_terminal_deriv,
    power_fn,
    solve_tau,
    vector_fn,
)
from confcalc.cli import run as cli_run
from confcalc.errors import DomainError

ALPHAS = (0.1, 0.25, 0.5, 0.75, 0.9, 1.0)
T_OFFSETS = (0.1, 0.5, 1.0, 2.0, 5.0)


def _mx(x) -> float:
    return float(np.max(np.abs(np.asarray(x, dtype=float))))


def _equivalence_residual(f, alpha, a, t):
    """norm(theta-limit derivative - (t-a)^(1-alpha) * exact f')."""
    r = conf_deriv(f, ConfParams(alpha, a), t)
    expected = (t - a) ** (1.0 - alpha) * np.asarray(f.exact_deriv(t), dtype=float)
    return _mx(r.value.data - expected), _mx(expected), r.converged


def test_criterion_1_equivalence_over_corpus(criterion):
    start = time.perf_counter()
    a = 0.0
    cases = 0
    worst = 0.0
    all_ok = True
    for f in default_corpus(a):
        for alpha in ALPHAS:
            for dt in T_OFFSETS:
                t = a + dt
                try:
                    residual, scale, conv = _equivalence_residual(f, alpha, a, t)
                except DomainError:
                    all_ok = False
                    continue
                cases += 1
                bound = 1e-6 * (1.0 + scale)
                worst = max(worst, residual / bound)
                all_ok = all_ok and conv and residual <= bound
    elapsed = time.perf_counter() - start
    ok = all_ok and cases >= 300 and elapsed <= 10.0
    criterion(
        1, "theta-limit matches the scaled first derivative over the corpus",
        ok, f"{cases} cases, worst residual {worst:.2e} of bound, {elapsed:.1f}s",
    )
    assert cases >= 300
    assert elapsed <= 10.0
    assert all_ok


def test_criterion_2_order_conversion(criterion):
    a = 0.0
    members = [builtin("exp"), builtin("sin"), builtin("square")]
    worst = 0.0
    all_ok = True
    checked = 0
    for f in members:
        for t in (a + 0.5, a + 2.0):
            # independent theta-limit runs at every order, no sharing
            runs = {al: conf_deriv(f, ConfParams(al, a), t) for al in ALPHAS}
            for alpha in ALPHAS:
                for beta in ALPHAS:
                    if alpha == beta:
                        continue
                    lhs = runs[alpha].value.data
                    rhs = convert_order(runs[beta].value, beta, alpha, a, t).data
                    bound = 1e-6 * (1.0 + _mx(lhs))
                    residual = _mx(lhs - rhs)
                    worst = max(worst, residual / bound)
                    all_ok = all_ok and residual <= bound
                    checked += 1
    criterion(
        2, "order conversion agrees with independent theta-limit runs",
        all_ok, f"{checked} ordered pairs, worst residual {worst:.2e} of bound",
    )
    assert checked == len(members) * 2 * len(ALPHAS) * (len(ALPHAS) - 1)
    assert all_ok


def test_criterion_3_left_inverse(criterion):
    a = 0.0
    p = ConfParams(0.5, a)
    smooth = [builtin("one"), builtin("identity"), builtin("square"),
              builtin("exp"), builtin("sin")]
    worst = 0.0
    all_ok = True
    for f in smooth:
        for t in (a + 0.5, a + 1.0, a + 2.0):
            r = check_left_inverse(f, p, t)
            all_ok = all_ok and r.status == "passed" and r.residual <= 1e-7
            worst = max(worst, r.residual)

    jump = PointPatchedFn(power_fn(0.5), at=a, value=2.0, label="jump at a")
    rj = check_left_inverse(jump, p, 1.0)
    jump_ok = (rj.status == "passed" and "jump" in rj.diagnostics
               and rj.residual <= 1e-7)
    ok = all_ok and jump_ok
    criterion(
        3, "integrating the derivative recovers f(t) - f(a+0), jumps flagged",
        ok, f"worst smooth residual {worst:.2e}, jump case {rj.status}",
    )
    assert all_ok
    assert jump_ok


def test_criterion_4_right_inverse(criterion):
    a = 0.0
    p = ConfParams(0.5, a)
    worst = 0.0
    interior_ok = True
    for f in [builtin("one"), builtin("exp"), builtin("sin"), builtin("square")]:
        for t in (a + 0.5, a + 1.5):
            r = check_right_inverse(f, p, t)
            interior_ok = (interior_ok and r.status == "passed"
                           and r.residual <= 1e-6)
            worst = max(worst, r.residual)

    # at the terminal the equality holds exactly when f(a+) exists
    r_good = check_right_inverse(builtin("exp"), p, a)
    chatter = CallableFn(
        lambda s: math.sin(1.0 / s) if s > 0.0 else 0.0,
        domain=(0.0, 10.0), label="sin(1/t)",
    )
    r_bad = check_right_inverse(chatter, p, a)
    terminal_ok = r_good.status == "passed" and r_bad.status != "passed"
    ok = interior_ok and terminal_ok
    criterion(
        4, "derivative of the running integral returns the integrand",
        ok, f"worst interior residual {worst:.2e}, terminal: "
            f"limit-exists {r_good.status}, no-limit {r_bad.status}",
    )
    assert interior_ok
    assert terminal_ok


def test_criterion_5_terminal_vanishing(criterion):
    worst = 0.0
    all_ok = True
    for name in ("identity", "exp", "sin"):
        for beta in (0.25, 0.5, 0.9):
            r = lower_terminal_deriv(builtin(name), ConfParams(beta, 0.0))
            mag = _mx(r.value.data)
            all_ok = all_ok and r.converged and mag <= 1e-4
            worst = max(worst, mag)
    criterion(
        5, "terminal derivatives of t, exp, sin vanish at lower orders",
        all_ok, f"worst magnitude {worst:.2e} (bound 1e-4)",
    )
    assert all_ok


def test_criterion_6_fractional_power_fixed_point(criterion):
    f = power_fn(0.5)
    p = ConfParams(0.5, 0.0)
    worst = 0.0
    interior_ok = True
    for t in np.linspace(0.05, 1.0, 20):
        r = conf_deriv(f, p, float(t))
        err = abs(float(r.value.data) - 0.5)
        interior_ok = interior_ok and r.converged and err <= 1e-6
        worst = max(worst, err)
    rt = lower_terminal_deriv(f, p)
    terr = abs(float(rt.value.data) - 0.5)
    terminal_ok = rt.converged and terr <= 1e-4
    ok = interior_ok and terminal_ok
    criterion(
        6, "half-order derivative of sqrt(t) is 1/2 on (0, 1] and at 0",
        ok, f"worst interior {worst:.2e}, terminal {terr:.2e}",
    )
    assert interior_ok
    assert terminal_ok


def test_criterion_7_quadrature_exactness(criterion):
    one = builtin("one")
    worst = 0.0
    all_ok = True
    for a in (0.0, 1.5):
        for alpha in np.arange(0.1, 1.01, 0.1):
            alpha = round(float(alpha), 1)
            for dt in (0.01, 1.0, 100.0):
                v = conf_integral(one, ConfParams(alpha, a), a + dt)
                exact = dt**alpha / alpha
                rel = abs(float(v.data) - exact) / exact
                all_ok = all_ok and rel <= 1e-12
                worst = max(worst, rel)
    criterion(
        7, "integral of 1 equals (t-a)^alpha / alpha to 1e-12",
        all_ok, f"worst relative error {worst:.2e}",
    )
    assert all_ok


def test_criterion_8_ivp_routes(criterion):
    F = lambda t, x: VecValue(x.data)
    prob = IvpProblem(F=F, p=ConfParams(0.5, 0.0),
                      x0=VecValue(np.asarray(1.0)), t_end=1.0)
    exact = math.e**2

    traj = solve_tau(prob, 1000)
    final_err = abs(float(traj.states[-1].data) - exact)
    value_ok = final_err <= 1e-6

    errs = [abs(float(solve_tau(prob, n).states[-1].data) - exact)
            for n in (125, 250, 500, 1000)]
    ratios = [c / f for c, f in zip(errs, errs[1:])]
    order_ok = all(12.0 <= r <= 20.0 for r in ratios)

    dev = cross_validate(prob, 1000, tol=Tolerance(rel=1e-9, abs=1e-9))
    agree_ok = dev <= 1e-5

    ok = value_ok and order_ok and agree_ok
    criterion(
        8, "IVP: analytic value, fourth-order refinement, route agreement",
        ok, f"x(1) err {final_err:.2e}, ratios "
            + "/".join(f"{r:.1f}" for r in ratios) + f", deviation {dev:.2e}",
    )
    assert value_ok
    assert order_ok, ratios
    assert agree_ok


def test_criterion_9_genericity(criterion):
    # the same member replicated into a vector and a diagonal matrix must
    # reproduce the scalar residuals exactly; all control flow is driven
    # by the componentwise max norm, so patterns cannot drift
    a = 0.0
    scalar = builtin("exp")
    instances = {
        "vector": vector_fn([builtin("exp")] * 3, label="[exp]x3"),
        "matrix": diag_fn([builtin("exp")] * 2, label="diag(exp, exp)"),
    }
    drift = 0.0
    all_ok = True

    def close(x, y):
        return abs(x - y) <= 1e-10

    # criterion 1 core: equivalence residual
    res_s, scale_s, conv_s = _equivalence_residual(scalar, 0.5, a, 1.0)
    # criterion 2 core: order conversion residual
    r_half = conf_deriv(scalar, ConfParams(0.5, a), 1.5)
    r_one = conf_deriv(scalar, ConfParams(1.0, a), 1.5)
    res2_s = _mx(r_half.value.data - convert_order(r_one.value, 1.0, 0.5, a, 1.5).data)
    # criteria 3-4 cores: inverse-route residuals
    res3_s = check_left_inverse(scalar, ConfParams(0.5, a), 1.0).residual
    res4_s = check_right_inverse(scalar, ConfParams(0.5, a), 1.5).residual
    # criterion 5 core: terminal magnitude
    res5_s = _mx(lower_terminal_deriv(scalar, ConfParams(0.5, a)).value.data)

    for kind, member in instances.items():
        res, scale, conv = _equivalence_residual(member, 0.5, a, 1.0)
        ra = conf_deriv(member, ConfParams(0.5, a), 1.5)
        rb = conf_deriv(member, ConfParams(1.0, a), 1.5)
        res2 = _mx(ra.value.data - convert_order(rb.value, 1.0, 0.5, a, 1.5).data)
        res3 = check_left_inverse(member, ConfParams(0.5, a), 1.0).residual
        res4 = check_right_inverse(member, ConfParams(0.5, a), 1.5).residual
        res5 = _mx(lower_terminal_deriv(member, ConfParams(0.5, a)).value.data)

        pairs = [(res, res_s), (res2, res2_s), (res3, res3_s),
                 (res4, res4_s), (res5, res5_s)]
        for got, want in pairs:
            drift = max(drift, abs(got - want))
            all_ok = all_ok and close(got, want)
        all_ok = all_ok and conv == conv_s

    bounds_ok = (res_s <= 1e-6 * (1.0 + scale_s) and res2_s <= 1e-6
                 and res3_s <= 1e-7 and res4_s <= 1e-6 and res5_s <= 1e-4)
    ok = all_ok and bounds_ok
    criterion(
        9, "vector and matrix instances reproduce scalar residuals",
        ok, f"largest pattern drift {drift:.2e} (bound 1e-10)",
    )
    assert bounds_ok
    assert all_ok


def test_criterion_10_deterministic_check(criterion, tmp_path, monkeypatch):
    monkeypatch.delenv("CONFCALC_TOL", raising=False)
    out1 = tmp_path / "first.json"
    out2 = tmp_path / "second.json"
    code1 = cli_run(["check", "--output", str(out1)])
    code2 = cli_run(["check", "--output", str(out2)])
    b1 = out1.read_bytes()
    b2 = out2.read_bytes()
    identical = b1 == b2
    failed = json.loads(b1)["summary"]["failed"]
    ok = identical and code1 == code2 == 0 and failed == 0
    criterion(
        10, "the check subcommand is byte-identical across runs",
        ok, f"{len(b1)} bytes, exit {code1}, {failed} failed cases",
    )
    assert identical
    assert code1 == 0 and code2 == 0
