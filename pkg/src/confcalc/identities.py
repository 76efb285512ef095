"""Executable verification of the operator identities.

Each identity gets a checker that evaluates both sides of the claimed
equality numerically and records a residual against a threshold;
:func:`run_suite` sweeps a corpus of functions over a parameter grid and
aggregates the outcomes into an :class:`IdentityReport`.

A case lands in one of three states.  ``passed``/``failed`` mean the
identity's hypotheses held and the residual was measured against the
threshold.  ``not_applicable`` means a hypothesis failed (a limit that
must exist does not, an algebra rule was asked of a non-commutative
instance, g(t) is not invertible); this is not a defect of the identity,
and it does not affect the suite's pass/fail verdict.

Residuals and thresholds use the componentwise max norm, so a
vector-valued case whose components replicate a scalar case reproduces
the scalar residuals exactly.  Reports are deterministic: fixed iteration
order, one fixed seed for the random linearity coefficients, no
timestamps.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .calculus import (
    ConfParams,
    Tolerance,
    _terminal_limit,
    conf_deriv,
    conf_deriv_scaled,
    conf_integral_info,
    convert_order,
    deriv_of_integral,
    lower_terminal_deriv,
    one_sided_limit,
    avg_recover,
)
from .errors import ConfcalcError, DomainError
from .funcs import (
    AbstractFn,
    CallableFn,
    ExprFn,
    builtin,
    diag_fn,
    power_fn,
    vector_fn,
)
from .vecspace import VecValue, to_jsonable

__all__ = [
    "IDENTITY_IDS",
    "STATEMENTS",
    "IdentityCase",
    "CaseResult",
    "IdentityReport",
    "SuiteGrid",
    "default_corpus",
    "check_continuity",
    "check_equivalence",
    "check_order_relation",
    "check_left_inverse",
    "check_right_inverse",
    "check_lower_vanishing",
    "check_avg_recovery",
    "check_algebra_rules",
    "run_suite",
]

_EPS = float(np.finfo(float).eps)

IDENTITY_IDS = (
    "CONTINUITY_3_1",
    "ORDER_REL_3_3",
    "EQUIV_3_4",
    "LEFT_INV_3_5",
    "RIGHT_INV_3_7",
    "RIGHT_INV_AT_A_3_8",
    "LOWER_VANISH_4_3",
    "LINEARITY_i",
    "CONST_ii",
    "PRODUCT_iii",
    "QUOTIENT_iv",
    "AVG_2_10",
    "CLASS_EQ_4_5",
)

# What each identity asserts, in the operator's own terms.
STATEMENTS = {
    "CONTINUITY_3_1": (
        "if the order-alpha derivative exists one-sidedly at a point, the "
        "function is continuous there from that side"
    ),
    "ORDER_REL_3_3": (
        "derivatives of two orders at one point differ only by a power of "
        "the distance to the terminal: T_alpha = (t-a)^(beta-alpha) * T_beta"
    ),
    "EQUIV_3_4": (
        "where f has a first derivative, the order-alpha derivative equals "
        "(t-a)^(1-alpha) * f'(t)"
    ),
    "LEFT_INV_3_5": (
        "integrating the order-alpha derivative up from the terminal gives "
        "f(t) minus the right limit of f at the terminal"
    ),
    "RIGHT_INV_3_7": (
        "the order-alpha derivative of the running order-alpha integral "
        "returns the integrand at each of its continuity points"
    ),
    "RIGHT_INV_AT_A_3_8": (
        "at the terminal, the derivative of the running integral equals the "
        "right limit of the integrand exactly when that limit exists"
    ),
    "LOWER_VANISH_4_3": (
        "if the terminal derivative exists at order alpha, then at every "
        "lower order beta < alpha it exists and equals zero"
    ),
    "LINEARITY_i": "T(c*f + d*g) = c*T(f) + d*T(g)",
    "CONST_ii": "constant functions have derivative zero at every order",
    "PRODUCT_iii": (
        "T(f*g) = g*T(f) + f*T(g) on commutative algebra instances"
    ),
    "QUOTIENT_iv": (
        "T(f/g) = (g*T(f) - f*T(g)) / g^2 on commutative algebra instances "
        "with invertible g(t)"
    ),
    "AVG_2_10": (
        "the shrinking-interval average (1/h) * integral over [t, t+h] "
        "recovers f(t) at continuity points"
    ),
    "CLASS_EQ_4_5": (
        "away from the terminal, alpha-differentiability does not depend on "
        "alpha: convergence at one order implies it at every other"
    ),
}

_SUITE_TOL = Tolerance(rel=1e-6, abs=1e-8)
# terminal-limit families lose about two digits to extrapolation
_TERMINAL_TOL = Tolerance(rel=5e-5, abs=5e-5)


def _m(x) -> float:
    return float(np.max(np.abs(x)))


@dataclass(frozen=True)
class IdentityCase:
    """One identity instance: which claim, on which inputs."""

    identity_id: str
    f: AbstractFn
    p: ConfParams
    t: float
    g: AbstractFn | None = None
    beta: float | None = None
    tol: Tolerance | None = None

    def __post_init__(self):
        if self.identity_id not in IDENTITY_IDS:
            raise ValueError(f"unknown identity id {self.identity_id!r}")


@dataclass(frozen=True)
class CaseResult:
    identity_id: str
    subject: str
    inputs: dict
    lhs: object
    rhs: object
    residual: float | None
    threshold: float | None
    status: str  # passed | failed | not_applicable
    diagnostics: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "passed"

    @property
    def applicable(self) -> bool:
        return self.status != "not_applicable"

    def to_jsonable(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "subject": self.subject,
            "inputs": self.inputs,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "threshold": self.threshold,
            "status": self.status,
            "diagnostics": self.diagnostics,
        }


def _result(identity_id, subject, inputs, lhs, rhs, residual, threshold, diagnostics=""):
    status = "passed" if residual <= threshold else "failed"
    return CaseResult(
        identity_id, subject, inputs,
        lhs, rhs, float(residual), float(threshold), status, diagnostics,
    )


def _na(identity_id, subject, inputs, diagnostics):
    return CaseResult(
        identity_id, subject, inputs,
        None, None, None, None, "not_applicable", diagnostics,
    )


def _jab(v) -> object:
    if v is None:
        return None
    if isinstance(v, VecValue):
        return to_jsonable(v)
    return to_jsonable(VecValue(np.asarray(v, dtype=float)))


def _label(f: AbstractFn) -> str:
    return f.label or type(f).__name__


def _decay_to_zero(f, t, sign, h0, levels, thr):
    """Does norm(f(t + sign*h) - f(t)) fall below thr as h halves?"""
    f0 = f.eval(t).data
    last = math.inf
    for k in range(levels):
        h = sign * h0 * 0.5**k
        last = _m(f.eval(t + h).data - f0)
        if last <= thr:
            return True, last
    return False, last


def check_continuity(f, p, t, tol=None) -> CaseResult:
    """One-sided differentiability at t forces one-sided continuity there.

    Checks decay of norm(f(t+h) - f(t)) on every side where the derivative
    quotient converged; not applicable when no side converged.
    """
    tol = tol if tol is not None else _SUITE_TOL
    inputs = {"alpha": p.alpha, "a": p.a, "t": t}
    sides = []
    r2 = conf_deriv(f, p, t)
    if r2.converged:
        sides = [1.0, -1.0]
    else:
        for sign, name in ((1.0, "right"), (-1.0, "left")):
            try:
                if conf_deriv(f, p, t, side=name).converged:
                    sides.append(sign)
            except DomainError:
                pass
    if not sides:
        return _na(
            "CONTINUITY_3_1", _label(f), inputs,
            "no one-sided derivative converged at t; the implication is vacuous",
        )
    lo, hi = f.domain
    thr = tol.abs + 64.0 * _EPS * (1.0 + _m(f.eval(t).data))
    worst = 0.0
    for sign in sides:
        room = (hi - t) if sign > 0 else (t - lo)
        if room <= 0.0:
            continue
        h0 = min(0.01 * max(1.0, abs(t)), 0.5 * room)
        ok, last = _decay_to_zero(f, t, sign, h0, 34, thr)
        worst = max(worst, last)
    return _result(
        "CONTINUITY_3_1", _label(f), inputs,
        None, None, worst, thr,
        f"checked side(s): {', '.join('right' if s > 0 else 'left' for s in sides)}",
    )


def check_equivalence(f, p, t, tol=None) -> CaseResult:
    """Limit-quotient derivative against the scaled-first-derivative route."""
    tol = tol if tol is not None else _SUITE_TOL
    inputs = {"alpha": p.alpha, "a": p.a, "t": t}
    r_theta = conf_deriv(f, p, t)
    r_scaled = conf_deriv_scaled(f, p, t)
    if not (r_theta.converged and r_scaled.converged):
        which = "quotient" if not r_theta.converged else "scaled"
        return _na(
            "EQUIV_3_4", _label(f), inputs,
            f"{which} derivative did not converge at t "
            f"({r_theta.detail or r_scaled.detail})",
        )
    residual = _m(r_theta.value.data - r_scaled.value.data)
    threshold = tol.abs + tol.rel * (1.0 + _m(r_scaled.value.data))
    return _result(
        "EQUIV_3_4", _label(f), inputs,
        _jab(r_theta.value), _jab(r_scaled.value), residual, threshold,
    )


def check_order_relation(f, alpha, beta, a, t, tol=None) -> CaseResult:
    """T_alpha and T_beta at one point, tied by (t-a)^(beta-alpha).

    Both sides come from independent limit-quotient runs; nothing is
    shared but the function itself.
    """
    tol = tol if tol is not None else _SUITE_TOL
    inputs = {"alpha": alpha, "beta": beta, "a": a, "t": t}
    ra = conf_deriv(f, ConfParams(alpha, a), t)
    rb = conf_deriv(f, ConfParams(beta, a), t)
    if not (ra.converged and rb.converged):
        return _na(
            "ORDER_REL_3_3", _label(f), inputs,
            "derivative quotient did not converge at one of the orders",
        )
    rhs = convert_order(rb.value, beta, alpha, a, t)
    residual = _m(ra.value.data - rhs.data)
    threshold = tol.abs + tol.rel * (1.0 + _m(ra.value.data))
    return _result(
        "ORDER_REL_3_3", _label(f), inputs,
        _jab(ra.value), _jab(rhs), residual, threshold,
    )


def check_left_inverse(f, p, t, tol=None, route="auto") -> CaseResult:
    """Integral of the derivative from the terminal vs f(t) - f(a+0).

    ``route`` picks how the integrand T f is produced: "theta" forces the
    limit quotient at every quadrature sample, "scaled" uses the scaled
    first-derivative form, "auto" uses scaled when an exact derivative is
    on hand.  Compares against the right limit f(a+0), never f(a), and
    flags a bounded jump at the terminal in the diagnostics.
    """
    tol = tol if tol is not None else _SUITE_TOL
    if route not in ("auto", "theta", "scaled"):
        raise ValueError(f"route must be auto, theta, or scaled, not {route!r}")
    inputs = {"alpha": p.alpha, "a": p.a, "t": t, "route": route}
    subject = _label(f)

    fa, _fa_err, fa_ok = one_sided_limit(f, p.a, "right")
    if not fa_ok:
        return _na(
            "LEFT_INV_3_5", subject, inputs,
            "f has no one-sided limit at the terminal; hypothesis fails",
        )
    notes = []
    try:
        gap = _m(f.eval(p.a).data - fa.data)
        if gap > 1e-6 * (1.0 + _m(fa.data)):
            notes.append(
                f"bounded jump at the terminal: f(a) is {gap:.3g} away from "
                "the right limit; comparing against the right limit"
            )
    except DomainError:
        notes.append("f is undefined at the terminal; using the right limit")

    use_scaled = route == "scaled"
    if route == "auto":
        try:
            use_scaled = f.exact_deriv(t) is not None
        except DomainError:
            use_scaled = False
    err_seen = [0.0]
    inner = Tolerance()
    lo_f, hi_f = f.domain
    if use_scaled:
        notes.append("integrand from the scaled derivative route")

        def tf(s):
            r = conf_deriv_scaled(f, p, s, tol=inner)
            if r.err_estimate > err_seen[0]:
                err_seen[0] = r.err_estimate
            return r.value.data

    else:
        notes.append("integrand from the limit-quotient route")
        s_floor = 4096.0 * _EPS * max(1.0, abs(p.a))
        term_cache = []

        def tf(s):
            if s - p.a <= s_floor:
                # below differencing resolution: use the terminal value,
                # whose weighted mass on this sliver is O(s_floor)
                if not term_cache:
                    term_cache.append(lower_terminal_deriv(f, p).value.data)
                return term_cache[0]
            r = conf_deriv(f, p, s, tol=inner)
            if r.err_estimate > err_seen[0]:
                err_seen[0] = r.err_estimate
            return r.value.data

    tf_fn = CallableFn(tf, domain=(p.a, hi_f), label=f"T[{subject}]")
    integral, q_err, _evals = conf_integral_info(
        tf_fn, p, t, tol=Tolerance(rel=1e-9, abs=1e-9),
        noise=lambda: err_seen[0],
    )
    rhs = f.eval(t).data - fa.data
    residual = _m(integral.data - rhs)
    threshold = tol.abs + tol.rel * (1.0 + _m(rhs))
    return _result(
        "LEFT_INV_3_5", subject, inputs,
        _jab(integral), _jab(VecValue(rhs)), residual, threshold,
        "; ".join(notes),
    )


def _bounded_near_terminal(f, a, span):
    worst = 0.0
    for j in range(2, 42, 4):
        s = a + span * 0.5**j
        try:
            worst = max(worst, _m(f.eval(s).data))
        except DomainError:
            return False, worst, f"f not evaluable at t = {s:.3g}"
        if not math.isfinite(worst):
            return False, worst, "f is non-finite near the terminal"
    if worst > 1e8:
        return False, worst, "f grows without bound toward the terminal"
    return True, worst, ""


def check_right_inverse(f, p, t, tol=None) -> CaseResult:
    """Derivative of the running integral vs the integrand.

    Interior t: needs f bounded near the terminal and continuous at t.
    t = a: the reconstructed derivative's terminal limit is compared with
    the right limit of f, which must exist (otherwise not applicable).
    """
    inputs = {"alpha": p.alpha, "a": p.a, "t": t}
    subject = _label(f)
    lo, hi = f.domain
    span = min(1.0, max(hi - p.a, 0.0)) or 1.0
    ok, _worst, why = _bounded_near_terminal(f, p.a, span)
    if not ok:
        return _na("RIGHT_INV_3_7" if t > p.a else "RIGHT_INV_AT_A_3_8",
                   subject, inputs, why)

    if t > p.a:
        tol = tol if tol is not None else _SUITE_TOL
        ft = f.eval(t).data
        thr_cont = 1e-6 * (1.0 + _m(ft)) + 1e-10
        cont_ok = True
        for sign in (1.0, -1.0):
            room = (hi - t) if sign > 0 else (t - lo)
            if room <= 0.0:
                continue
            h0 = min(0.01 * max(1.0, abs(t)), 0.5 * room)
            ok_side, _ = _decay_to_zero(f, t, sign, h0, 24, thr_cont)
            cont_ok = cont_ok and ok_side
        if not cont_ok:
            return _na(
                "RIGHT_INV_3_7", subject, inputs,
                "f is not continuous at t numerically; hypothesis fails",
            )
        r = deriv_of_integral(f, p, t)
        if not r.converged:
            return CaseResult(
                "RIGHT_INV_3_7", subject, inputs, None, None,
                None, None, "failed",
                f"derivative of the running integral did not converge: {r.detail}",
            )
        residual = _m(r.value.data - ft)
        threshold = tol.abs + tol.rel * (1.0 + _m(ft))
        return _result(
            "RIGHT_INV_3_7", subject, inputs,
            _jab(r.value), _jab(VecValue(ft)), residual, threshold,
        )

    # terminal instance
    tol = tol if tol is not None else _TERMINAL_TOL
    fa, _fa_err, fa_ok = one_sided_limit(f, p.a, "right")
    if not fa_ok:
        return _na(
            "RIGHT_INV_AT_A_3_8", subject, inputs,
            "f has no finite one-sided limit at the terminal; "
            "the equality holds exactly when that limit exists",
        )

    def sample(tk):
        r = deriv_of_integral(f, p, tk)
        return r.value.data, r.err_estimate, r.converged

    d0 = min(0.1 * max(1.0, abs(p.a)), 0.5 * (hi - p.a))
    value, _err, conv, _used, note = _terminal_limit(sample, p.a, d0, tol)
    if not conv:
        return CaseResult(
            "RIGHT_INV_AT_A_3_8", subject, inputs, None, _jab(fa),
            None, None, "failed",
            f"terminal limit of the reconstructed derivative did not settle: {note}",
        )
    residual = _m(np.asarray(value) - fa.data)
    threshold = tol.abs + tol.rel * (1.0 + _m(fa.data))
    return _result(
        "RIGHT_INV_AT_A_3_8", subject, inputs,
        _jab(VecValue(np.asarray(value, dtype=float))), _jab(fa),
        residual, threshold,
    )


def check_lower_vanishing(f, alpha, beta, a, tol=None) -> CaseResult:
    """Terminal derivative at a lower order vanishes.

    Hypothesis: the terminal derivative at order alpha converges; then the
    order-beta one (beta < alpha) must be zero within tol.abs + tol.rel.
    """
    tol = tol if tol is not None else _TERMINAL_TOL
    if not beta < alpha:
        raise ValueError(f"need beta < alpha, got beta = {beta}, alpha = {alpha}")
    inputs = {"alpha": alpha, "beta": beta, "a": a}
    subject = _label(f)
    r_hi = lower_terminal_deriv(f, ConfParams(alpha, a))
    if not r_hi.converged:
        return _na(
            "LOWER_VANISH_4_3", subject, inputs,
            "terminal derivative at the higher order did not converge; "
            "hypothesis fails",
        )
    r_lo = lower_terminal_deriv(f, ConfParams(beta, a))
    threshold = tol.abs + tol.rel
    if not r_lo.converged:
        return CaseResult(
            "LOWER_VANISH_4_3", subject, inputs,
            _jab(r_lo.value), _jab(VecValue(np.zeros_like(r_lo.value.data))),
            None, float(threshold), "failed",
            f"terminal derivative at the lower order did not settle: {r_lo.detail}",
        )
    residual = _m(r_lo.value.data)
    return _result(
        "LOWER_VANISH_4_3", subject, inputs,
        _jab(r_lo.value), _jab(VecValue(np.zeros_like(r_lo.value.data))),
        residual, threshold,
    )


def check_avg_recovery(f, t, tol=None) -> CaseResult:
    """Shrinking-interval average against the point value."""
    tol = tol if tol is not None else _SUITE_TOL
    inputs = {"t": t}
    subject = _label(f)
    try:
        avg = avg_recover(f, t, tol=Tolerance(rel=max(tol.rel, 1e-9), abs=tol.abs))
    except ConfcalcError as exc:
        return _na("AVG_2_10", subject, inputs, f"averages did not settle: {exc}")
    ft = f.eval(t).data
    residual = _m(avg.data - ft)
    threshold = tol.abs + tol.rel * (1.0 + _m(ft))
    return _result(
        "AVG_2_10", subject, inputs, _jab(avg), _jab(VecValue(ft)),
        residual, threshold,
    )


def check_algebra_rules(f, g, c, d, p, t, tol=None):
    """The four pointwise algebra rules at t; returns four case results.

    Linearity and the constant rule hold in any instance; the product and
    quotient rules are checked only where multiplication is commutative
    (scalar values), and report not-applicable otherwise, likewise for a
    non-invertible g(t).
    """
    tol = tol if tol is not None else _SUITE_TOL
    inner = Tolerance()
    base_inputs = {"alpha": p.alpha, "a": p.a, "t": t}
    subject = f"{_label(f)}, {_label(g)}"
    lo = max(f.domain[0], g.domain[0])
    hi = min(f.domain[1], g.domain[1])
    results = []

    rf = conf_deriv(f, p, t, tol=inner)
    rg = conf_deriv(g, p, t, tol=inner)
    fv = f.eval(t).data
    gv = g.eval(t).data
    both = rf.converged and rg.converged

    # (i) linearity with the supplied coefficients
    inputs_i = dict(base_inputs, c=c, d=d)
    comb = CallableFn(
        lambda s: c * np.asarray(f(s), dtype=float) + d * np.asarray(g(s), dtype=float),
        domain=(lo, hi), label=f"{c:g}*f + {d:g}*g",
    )
    r_comb = conf_deriv(comb, p, t, tol=inner)
    if both and r_comb.converged:
        rhs = c * rf.value.data + d * rg.value.data
        residual = _m(r_comb.value.data - rhs)
        threshold = (
            tol.abs + tol.rel * (1.0 + _m(rhs))
            + 4.0 * (abs(c) * rf.err_estimate + abs(d) * rg.err_estimate
                     + r_comb.err_estimate)
        )
        results.append(_result(
            "LINEARITY_i", subject, inputs_i,
            _jab(r_comb.value), _jab(VecValue(rhs)), residual, threshold,
        ))
    else:
        results.append(_na(
            "LINEARITY_i", subject, inputs_i,
            "a derivative quotient did not converge at t",
        ))

    # (ii) constants: freeze f's value at t into a constant function
    const_fn = CallableFn(
        lambda s, v=fv: v, domain=(lo, hi),
        deriv=lambda s, v=fv: 0.0 * v, label="const f(t)",
    )
    r_const = conf_deriv(const_fn, p, t, tol=inner)
    residual = _m(r_const.value.data)
    threshold = tol.abs + tol.rel
    results.append(_result(
        "CONST_ii", subject, base_inputs,
        _jab(r_const.value), _jab(VecValue(0.0 * fv)), residual, threshold,
        "constant function frozen at f(t)",
    ))

    commutative = f.eval(t).kind == "scalar" and g.eval(t).kind == "scalar"

    # (iii) product rule
    if not commutative:
        results.append(_na(
            "PRODUCT_iii", subject, base_inputs,
            "multiplication is not commutative for this instance; rule not claimed",
        ))
    elif not both:
        results.append(_na(
            "PRODUCT_iii", subject, base_inputs,
            "a derivative quotient did not converge at t",
        ))
    else:
        prod = CallableFn(
            lambda s: float(f(s)) * float(g(s)), domain=(lo, hi), label="f*g"
        )
        r_prod = conf_deriv(prod, p, t, tol=inner)
        if r_prod.converged:
            rhs = gv * rf.value.data + fv * rg.value.data
            residual = _m(r_prod.value.data - rhs)
            threshold = (
                tol.abs + tol.rel * (1.0 + _m(rhs))
                + 4.0 * (_m(gv) * rf.err_estimate + _m(fv) * rg.err_estimate
                         + r_prod.err_estimate)
            )
            results.append(_result(
                "PRODUCT_iii", subject, base_inputs,
                _jab(r_prod.value), _jab(VecValue(rhs)), residual, threshold,
            ))
        else:
            results.append(_na(
                "PRODUCT_iii", subject, base_inputs,
                "product derivative quotient did not converge at t",
            ))

    # (iv) quotient rule
    if not commutative:
        results.append(_na(
            "QUOTIENT_iv", subject, base_inputs,
            "multiplication is not commutative for this instance; rule not claimed",
        ))
    elif abs(float(gv)) <= 1e-12:
        results.append(_na(
            "QUOTIENT_iv", subject, base_inputs, "g(t) is not invertible",
        ))
    elif not both:
        results.append(_na(
            "QUOTIENT_iv", subject, base_inputs,
            "a derivative quotient did not converge at t",
        ))
    else:
        def quot(s):
            den = float(g(s))
            if den == 0.0:
                raise DomainError(f"g vanishes at t = {s}")
            return float(f(s)) / den

        quot_fn = CallableFn(quot, domain=(lo, hi), label="f/g")
        try:
            r_quot = conf_deriv(quot_fn, p, t, tol=inner)
        except DomainError as exc:
            results.append(_na("QUOTIENT_iv", subject, base_inputs, str(exc)))
            return results
        if r_quot.converged:
            g2 = float(gv) * float(gv)
            rhs = (gv * rf.value.data - fv * rg.value.data) / g2
            residual = _m(r_quot.value.data - rhs)
            threshold = (
                tol.abs + tol.rel * (1.0 + _m(rhs))
                + 4.0 * ((_m(gv) * rf.err_estimate + _m(fv) * rg.err_estimate) / g2
                         + r_quot.err_estimate)
            )
            results.append(_result(
                "QUOTIENT_iv", subject, base_inputs,
                _jab(r_quot.value), _jab(VecValue(rhs)), residual, threshold,
            ))
        else:
            results.append(_na(
                "QUOTIENT_iv", subject, base_inputs,
                "quotient derivative did not converge at t",
            ))
    return results


@dataclass(frozen=True)
class SuiteGrid:
    """Parameter grid for run_suite; empty tuples yield an empty report."""

    alphas: tuple = (0.1, 0.5, 0.9, 1.0)
    betas: tuple = (0.5, 1.0)
    a_values: tuple = (0.0,)
    t_offsets: tuple = (0.5, 2.0)


def default_corpus(a: float = 0.0) -> list[AbstractFn]:
    """Standard mixed corpus: smooth scalars, fractional powers at the
    terminal, oscillatory members, one vector and one matrix instance."""
    vec = vector_fn(
        [builtin("square"), builtin("sin"), builtin("exp")],
        label="[t^2, sin(t), exp(t)]",
    )
    mat = diag_fn([builtin("identity"), builtin("square")], label="diag(t, t^2)")
    members = [
        builtin("one"),
        builtin("identity"),
        builtin("square"),
        power_fn(0.5),
        power_fn(0.5, shift=a),
        builtin("exp"),
        builtin("sin"),
        builtin("t_sin"),
        vec,
        mat,
    ]
    return members


@dataclass(frozen=True)
class IdentityReport:
    """Aggregated suite outcome; deterministic given identical config."""

    cases: tuple
    grid: SuiteGrid
    tol: Tolerance

    @property
    def summary(self) -> dict:
        passed = sum(1 for c in self.cases if c.status == "passed")
        failed = sum(1 for c in self.cases if c.status == "failed")
        na = sum(1 for c in self.cases if c.status == "not_applicable")
        return {
            "total": len(self.cases),
            "passed": passed,
            "failed": failed,
            "not_applicable": na,
        }

    @property
    def all_passed(self) -> bool:
        return self.summary["failed"] == 0

    def to_jsonable(self) -> dict:
        return {
            "summary": self.summary,
            "config": {
                "alphas": list(self.grid.alphas),
                "betas": list(self.grid.betas),
                "a_values": list(self.grid.a_values),
                "t_offsets": list(self.grid.t_offsets),
                "tol_rel": self.tol.rel,
                "tol_abs": self.tol.abs,
            },
            "statements": dict(STATEMENTS),
            "cases": [c.to_jsonable() for c in self.cases],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_jsonable(), indent=indent)

    def to_table(self) -> str:
        lines = [
            f"{'identity':20} {'subject':26} {'residual':>12} {'threshold':>12} status",
            "-" * 84,
        ]
        for c in self.cases:
            res = f"{c.residual:.3e}" if c.residual is not None else "-"
            thr = f"{c.threshold:.3e}" if c.threshold is not None else "-"
            lines.append(
                f"{c.identity_id:20} {c.subject[:26]:26} {res:>12} {thr:>12} {c.status}"
            )
        s = self.summary
        lines.append("-" * 84)
        lines.append(
            f"total {s['total']}  passed {s['passed']}  failed {s['failed']}  "
            f"not applicable {s['not_applicable']}"
        )
        return "\n".join(lines)


def _partner_like(f: AbstractFn, t_probe: float) -> AbstractFn:
    """A smooth nonvanishing companion with f's shape, for the algebra rules."""
    v = f.eval(t_probe)
    if v.kind == "scalar":
        return ExprFn("2 + sin(t)")
    if v.kind == "vector":
        comp = [ExprFn("2 + sin(t)") for _ in range(v.shape[0])]
        return vector_fn(comp, label="[2 + sin(t), ...]")
    comp = [ExprFn("2 + sin(t)") for _ in range(v.shape[0])]
    return diag_fn(comp, label="diag(2 + sin(t), ...)")


def run_suite(corpus=None, grid: SuiteGrid | None = None, tol: Tolerance | None = None) -> IdentityReport:
    """Run every identity over corpus x grid and aggregate the outcomes.

    Iteration order, the seed for the linearity coefficients, and the
    report layout are all fixed, so identical configuration yields a
    byte-identical JSON report.
    """
    grid = grid if grid is not None else SuiteGrid()
    tol = tol if tol is not None else _SUITE_TOL
    if corpus is not None and len(corpus) == 0:
        raise ValueError("corpus must be nonempty (pass None for the default)")
    rng = np.random.default_rng(812741)
    cases: list[CaseResult] = []
    orders = tuple(sorted(set(grid.alphas) | set(grid.betas)))
    conv_status: dict = {}

    for a in grid.a_values:
        members = list(corpus) if corpus is not None else default_corpus(a)

        # EQUIV_3_4, CONTINUITY_3_1, algebra rules: per member, alpha, t
        for f in members:
            for alpha in grid.alphas:
                p = ConfParams(alpha, a)
                for off in grid.t_offsets:
                    t = a + off
                    cases.append(check_equivalence(f, p, t, tol))
                    cases.append(check_continuity(f, p, t, tol))
                    g = _partner_like(f, t)
                    c_coef = float(rng.uniform(-5.0, 5.0))
                    d_coef = float(rng.uniform(-5.0, 5.0))
                    cases.extend(
                        check_algebra_rules(f, g, c_coef, d_coef, p, t, tol)
                    )

        # ORDER_REL_3_3: independent runs per order pair
        for f in members:
            for alpha in grid.alphas:
                for beta in grid.betas:
                    if beta == alpha:
                        continue
                    for off in grid.t_offsets:
                        t = a + off
                        cases.append(
                            check_order_relation(f, alpha, beta, a, t, tol)
                        )

        # CLASS_EQ_4_5: convergence class is order-independent
        for fi, f in enumerate(members):
            for i, alpha in enumerate(orders):
                for beta in orders[i + 1:]:
                    for off in grid.t_offsets:
                        key_a = (a, fi, alpha, off)
                        key_b = (a, fi, beta, off)
                        for key, order in ((key_a, alpha), (key_b, beta)):
                            if key not in conv_status:
                                r = conf_deriv(f, ConfParams(order, a), a + off)
                                conv_status[key] = r.converged
                        same = conv_status[key_a] == conv_status[key_b]
                        cases.append(CaseResult(
                            "CLASS_EQ_4_5", _label(f),
                            {"alpha": alpha, "beta": beta, "a": a, "t": a + off},
                            conv_status[key_a], conv_status[key_b],
                            0.0 if same else 1.0, 0.5,
                            "passed" if same else "failed",
                            "convergence status at the two orders"
                            + (" matches" if same else " differs"),
                        ))

        # LEFT_INV_3_5 and RIGHT_INV_3_7 at interior points
        for f in members:
            for alpha in grid.alphas:
                p = ConfParams(alpha, a)
                for off in grid.t_offsets:
                    t = a + off
                    cases.append(check_left_inverse(f, p, t, tol))
                    cases.append(check_right_inverse(f, p, t, tol))

        # RIGHT_INV_AT_A_3_8 at the terminal
        for f in members:
            for alpha in grid.alphas:
                cases.append(check_right_inverse(f, ConfParams(alpha, a), a))

        # LOWER_VANISH_4_3 for beta < alpha pairs
        for f in members:
            for alpha in grid.alphas:
                for beta in grid.betas:
                    if beta < alpha:
                        cases.append(check_lower_vanishing(f, alpha, beta, a))

        # AVG_2_10 per member and point
        for f in members:
            for off in grid.t_offsets:
                cases.append(check_avg_recovery(f, a + off, tol))

    return IdentityReport(tuple(cases), grid, tol)


def run_case(case: IdentityCase) -> CaseResult:
    """Dispatch a single IdentityCase to its checker."""
    iid = case.identity_id
    tol = case.tol
    if iid == "CONTINUITY_3_1":
        return check_continuity(case.f, case.p, case.t, tol)
    if iid == "EQUIV_3_4":
        return check_equivalence(case.f, case.p, case.t, tol)
    if iid == "ORDER_REL_3_3":
        if case.beta is None:
            raise ValueError("ORDER_REL_3_3 needs beta")
        return check_order_relation(case.f, case.p.alpha, case.beta, case.p.a, case.t, tol)
    if iid == "LEFT_INV_3_5":
        return check_left_inverse(case.f, case.p, case.t, tol)
    if iid in ("RIGHT_INV_3_7", "RIGHT_INV_AT_A_3_8"):
        return check_right_inverse(case.f, case.p, case.t, tol)
    if iid == "LOWER_VANISH_4_3":
        if case.beta is None:
            raise ValueError("LOWER_VANISH_4_3 needs beta")
        return check_lower_vanishing(case.f, case.p.alpha, case.beta, case.p.a, tol)
    if iid == "AVG_2_10":
        return check_avg_recovery(case.f, case.t, tol)
    if iid in ("LINEARITY_i", "CONST_ii", "PRODUCT_iii", "QUOTIENT_iv"):
        g = case.g if case.g is not None else _partner_like(case.f, case.t)
        four = check_algebra_rules(case.f, g, 2.0, -3.0, case.p, case.t, tol)
        for r in four:
            if r.identity_id == iid:
                return r
    if iid == "CLASS_EQ_4_5":
        if case.beta is None:
            raise ValueError("CLASS_EQ_4_5 needs beta")
        ra = conf_deriv(case.f, case.p, case.t)
        rb = conf_deriv(case.f, ConfParams(case.beta, case.p.a), case.t)
        same = ra.converged == rb.converged
        return CaseResult(
            iid, _label(case.f),
            {"alpha": case.p.alpha, "beta": case.beta, "a": case.p.a, "t": case.t},
            ra.converged, rb.converged, 0.0 if same else 1.0, 0.5,
            "passed" if same else "failed",
            "convergence status at the two orders"
            + (" matches" if same else " differs"),
        )
    raise ValueError(f"no dispatcher for identity id {iid!r}")
