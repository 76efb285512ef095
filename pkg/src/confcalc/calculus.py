"""Numerical kernels for the fractional-scaling derivative and integral.

The derivative of order ``alpha`` in (0, 1] with lower terminal ``a`` is
the limit of ``[f(t + theta*(t-a)**(1-alpha)) - f(t)] / theta`` as theta
goes to 0, for t > a.  The matching integral applies the weight
``(s-a)**(alpha-1)`` on [a, t].  This module estimates those limits and
integrals with controlled error:

* difference quotients on a halving step schedule with Neville-style
  extrapolation, one-sided and symmetric (:func:`conf_deriv`,
  :func:`classical_deriv`);
* the scaled form ``(t-a)**(1-alpha) * f'(t)`` as an independent route
  (:func:`conf_deriv_scaled`);
* order conversion between two alphas at a fixed point
  (:func:`convert_order`);
* values at the lower terminal itself as limits of interior derivatives
  along a geometric point sequence with Aitken acceleration
  (:func:`lower_terminal_deriv`);
* the weighted integral via the substitution ``u = (s-a)**alpha``, which
  removes the endpoint singularity exactly for bounded integrands, then
  adaptive composite Gauss-Legendre (:func:`conf_integral`);
* the shrinking-interval average ``(1/h) * integral_t^{t+h} f``
  (:func:`avg_recover`).

Every decision inside the kernels (step acceptance, convergence checks,
refinement) is based on the componentwise max norm, so a vector or matrix
function whose components replicate a scalar function follows exactly the
same control flow as the scalar run.  Kernels are pure; concurrent calls
are safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    DomainError,
    LowerTerminalError,
    QuadratureError,
)
from .expr import pow_real
from .funcs import AbstractFn, GridFn
from .vecspace import VecValue, as_vecvalue

__all__ = [
    "Tolerance",
    "ConfParams",
    "DerivResult",
    "conf_deriv",
    "conf_deriv_scaled",
    "classical_deriv",
    "convert_order",
    "lower_terminal_deriv",
    "conf_integral",
    "conf_integral_info",
    "weighted_integral",
    "deriv_of_integral",
    "avg_recover",
    "one_sided_limit",
]

_EPS = float(np.finfo(float).eps)
_LEVELS = 8  # fixed extrapolation depth: deterministic work and output


def _mnorm(x) -> float:
    # max-abs norm: for replicated components it equals the scalar run's
    # value bit for bit, which keeps control flow instance-agnostic
    return float(np.max(np.abs(x)))


@dataclass(frozen=True)
class Tolerance:
    """Relative/absolute error target; threshold(ref) = abs + rel*ref."""

    rel: float = 1e-8
    abs: float = 1e-10

    def __post_init__(self):
        if not (self.rel > 0.0 and math.isfinite(self.rel)):
            raise ValueError(f"rel tolerance must be positive, got {self.rel}")
        if not (self.abs > 0.0 and math.isfinite(self.abs)):
            raise ValueError(f"abs tolerance must be positive, got {self.abs}")

    def threshold(self, ref: float) -> float:
        return self.abs + self.rel * ref


@dataclass(frozen=True)
class ConfParams:
    """Operator parameters: order alpha in (0, 1] and lower terminal a."""

    alpha: float
    a: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "a", float(self.a))
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not math.isfinite(self.a):
            raise ValueError("lower terminal must be finite")


@dataclass(frozen=True)
class DerivResult:
    """Derivative estimate with diagnostics.

    ``converged`` is True only when the error estimate met the requested
    threshold and, for two-sided runs, the one-sided estimates agree; in
    that case ``err_estimate`` is at or below the threshold that was used.
    ``left``/``right`` carry the one-sided estimates when both were formed.
    """

    value: VecValue
    err_estimate: float
    side: str
    converged: bool
    steps_used: int
    left: VecValue | None = None
    right: VecValue | None = None
    detail: str = ""


def _richardson(seq, p: int, q: int, ratio: float = 2.0):
    """Neville extrapolation over estimates at steps h0/ratio^k.

    Assumes an error expansion c1*h^p + c2*h^(p+q) + ...; returns the
    tableau entry with the smallest error estimate (the larger of its two
    parent deltas), which stays robust once rounding noise takes over.
    """
    best = np.asarray(seq[0], dtype=float)
    best_err = math.inf
    prev_row = [best]
    for k in range(1, len(seq)):
        row = [np.asarray(seq[k], dtype=float)]
        err = _mnorm(row[0] - prev_row[0])
        if err < best_err:
            best, best_err = row[0], err
        for j in range(1, k + 1):
            fac = ratio ** (p + (j - 1) * q) - 1.0
            cand = row[j - 1] + (row[j - 1] - prev_row[j - 1]) / fac
            err = max(_mnorm(cand - row[j - 1]), _mnorm(cand - prev_row[j - 1]))
            row.append(cand)
            if err < best_err:
                best, best_err = cand, err
        prev_row = row
    return best, best_err


def _err_floor(v) -> float:
    return 8.0 * _EPS * (1.0 + _mnorm(v))


def _deriv_core(evalf, t, s, dist_cap, lo, hi, side, tol, detail="", f0=None):
    # evalf maps a point to an ndarray; s is the step scale (t-a)^(1-alpha),
    # so probe k sits at t +/- theta_k*s with quotient denominator theta_k.
    scale_t = max(1.0, abs(t))
    d0 = _EPS ** (1.0 / 3.0) * scale_t
    if math.isfinite(dist_cap):
        # keep every probe strictly between the lower terminal and t + cap/4
        d0 = min(d0, 0.25 * dist_cap)
    want_l = side in ("left", "two-sided")
    want_r = side in ("right", "two-sided")
    use_l = want_l and t - lo > 0.0
    use_r = want_r and hi - t > 0.0
    notes = [detail] if detail else []
    if not (use_l or use_r):
        raise DomainError(
            f"no room for difference probes around t = {t} inside the domain"
        )
    if side == "two-sided" and not (use_l and use_r):
        which = "left" if not use_l else "right"
        notes.append(f"{which} probes unavailable at the domain edge; one-sided result")
    if use_r:
        d0 = min(d0, 0.5 * (hi - t))
    if use_l:
        d0 = min(d0, 0.5 * (t - lo))
    if t + d0 == t or (use_l and t - d0 == t):
        raise DomainError(
            f"difference step underflows at t = {t}; "
            "too close to the lower terminal or a domain edge"
        )

    theta0 = d0 / s
    thetas = [theta0 * 0.5**k for k in range(_LEVELS)]
    evals = 0
    if f0 is None:
        f0 = evalf(t)
        evals += 1
    fr = fl = None
    if use_r:
        fr = [evalf(t + th * s) for th in thetas]
        evals += _LEVELS
    if use_l:
        fl = [evalf(t - th * s) for th in thetas]
        evals += _LEVELS

    left_v = right_v = None
    left_e = right_e = math.inf
    if use_r:
        right_v, right_e = _richardson(
            [(v - f0) / th for v, th in zip(fr, thetas)], 1, 1
        )
        right_e = max(right_e, _err_floor(right_v))
    if use_l:
        left_v, left_e = _richardson(
            [(f0 - v) / th for v, th in zip(fl, thetas)], 1, 1
        )
        left_e = max(left_e, _err_floor(left_v))

    if use_l and use_r:
        cen_v, cen_e = _richardson(
            [(vr - vl) / (2.0 * th) for vr, vl, th in zip(fr, fl, thetas)], 2, 2
        )
        cen_e = max(cen_e, _err_floor(cen_v))
        thr = tol.threshold(_mnorm(cen_v))
        gap = _mnorm(right_v - left_v)
        # two one-sided estimates each within thr of a common limit may
        # differ by 2*thr; a genuine kink or jump shows up as a gap far
        # beyond that, not a few percent over
        agree = gap <= max(2.0 * thr, 8.0 * (left_e + right_e))
        cauchy = cen_e <= thr
        if not agree:
            notes.append(
                "one-sided estimates disagree; the two-sided limit does not exist numerically"
            )
        elif not cauchy:
            notes.append("extrapolation not Cauchy within tolerance")
        err = cen_e if agree else max(cen_e, 0.5 * gap)
        return DerivResult(
            VecValue(cen_v),
            float(err),
            "two-sided",
            bool(cauchy and agree),
            evals,
            left=VecValue(left_v),
            right=VecValue(right_v),
            detail="; ".join(notes),
        )

    if use_r:
        value, err, side_out = right_v, right_e, "right"
    else:
        value, err, side_out = left_v, left_e, "left"
    thr = tol.threshold(_mnorm(value))
    conv = bool(err <= thr)
    if not conv:
        notes.append("extrapolation not Cauchy within tolerance")
    return DerivResult(
        VecValue(value),
        float(err),
        side_out,
        conv,
        evals,
        left=VecValue(left_v) if left_v is not None else None,
        right=VecValue(right_v) if right_v is not None else None,
        detail="; ".join(notes),
    )


def _require_interior(p: ConfParams, t: float):
    if not (t > p.a):
        raise LowerTerminalError(
            f"t = {t} is at or below the lower terminal a = {p.a}; "
            "the interior derivative needs t > a (use lower_terminal_deriv at a)"
        )


def conf_deriv(
    f: AbstractFn,
    p: ConfParams,
    t: float,
    side: str = "two-sided",
    tol: Tolerance | None = None,
) -> DerivResult:
    """Order-alpha derivative at t > a straight from the limit quotient.

    ``side`` selects theta -> 0-, 0+, or the symmetric limit; the default
    two-sided run also reports both one-sided estimates and declares
    non-convergence when they disagree (the limit fails to exist, as for
    a kink or a jump at t).
    """
    tol = tol if tol is not None else Tolerance()
    if side not in ("left", "right", "two-sided"):
        raise ValueError(f"side must be left, right, or two-sided, not {side!r}")
    t = float(t)
    _require_interior(p, t)
    lo, hi = f.domain
    s = pow_real(t - p.a, 1.0 - p.alpha)
    return _deriv_core(lambda u: f.eval(u).data, t, s, t - p.a, lo, hi, side, tol)


def classical_deriv(f: AbstractFn, t: float, tol: Tolerance | None = None) -> DerivResult:
    """First derivative by symmetric differencing with extrapolation.

    Falls back to a one-sided quotient at a domain edge.  At a kink the
    one-sided estimates are still reported (left/right) with
    converged = False.
    """
    tol = tol if tol is not None else Tolerance()
    t = float(t)
    lo, hi = f.domain
    return _deriv_core(
        lambda u: f.eval(u).data, t, 1.0, math.inf, lo, hi, "two-sided", tol
    )


def conf_deriv_scaled(
    f: AbstractFn, p: ConfParams, t: float, tol: Tolerance | None = None
) -> DerivResult:
    """The scaled form (t-a)^(1-alpha) * f'(t), an independent route.

    f' comes from the exact derivative when the function carries one, from
    the interpolant (with an inflated error bound) for grid data, and from
    classical differencing otherwise.  Never evaluates the limit quotient,
    so it can cross-check :func:`conf_deriv`.
    """
    tol = tol if tol is not None else Tolerance()
    t = float(t)
    _require_interior(p, t)
    f._check_domain(t)
    s = pow_real(t - p.a, 1.0 - p.alpha)

    note = ""
    d = None
    try:
        d = f.exact_deriv(t)
    except DomainError:
        note = "exact derivative undefined at t; numeric fallback; "
    if d is not None:
        val = s * np.asarray(d, dtype=float)
        err = _err_floor(val)
        return DerivResult(
            VecValue(val), err, "two-sided", True, 0,
            detail="scaled exact first derivative",
        )

    if isinstance(f, GridFn):
        dv, de = f.interp_deriv(t)
        val = s * np.asarray(dv, dtype=float)
        err = s * float(de) + _err_floor(val)
        conv = bool(err <= tol.threshold(_mnorm(val)))
        return DerivResult(
            VecValue(val), float(err), "two-sided", conv, 1,
            detail="scaled grid-interpolant derivative; error bound inflated",
        )

    r = classical_deriv(f, t, tol)
    val = s * r.value.data
    err = s * r.err_estimate + _err_floor(val)
    conv = bool(r.converged and err <= tol.threshold(_mnorm(val)))
    return DerivResult(
        VecValue(val),
        float(err),
        r.side,
        conv,
        r.steps_used,
        left=VecValue(s * r.left.data) if r.left is not None else None,
        right=VecValue(s * r.right.data) if r.right is not None else None,
        detail=note + "scaled classical difference derivative",
    )


def convert_order(Ta, alpha: float, beta: float, a: float, t0: float) -> VecValue:
    """Turn an order-alpha derivative value at t0 into the order-beta one.

    Both orders act at the same point and terminal, so the two values
    differ only by the factor (t0 - a)^(alpha - beta).
    """
    for name, val in (("alpha", alpha), ("beta", beta)):
        if not (0.0 < val <= 1.0):
            raise ValueError(f"{name} must lie in (0, 1], got {val}")
    if not (t0 > a):
        raise LowerTerminalError(
            f"order conversion needs t0 > a, got t0 = {t0}, a = {a}"
        )
    v = as_vecvalue(Ta)
    return VecValue(pow_real(t0 - a, float(alpha) - float(beta)) * v.data)


# sequence limits: geometric point schedules accelerated by Aitken steps


def _aitken_sweep(seq):
    # one sweep of x2 + rho/(1-rho)*(x2-x1), rho fit by least squares over
    # components; passes entries through unless the deltas are genuinely
    # contracting (|rho| < 1), since extrapolating a growing geometric
    # sequence manufactures a limit that does not exist
    out = []
    for i in range(len(seq) - 2):
        x1, x2 = seq[i + 1], seq[i + 2]
        d1 = x1 - seq[i]
        d2 = x2 - x1
        den = float(np.vdot(d1, d1))
        if den == 0.0:
            out.append(x2)
            continue
        rho = float(np.vdot(d2, d1)) / den
        if not math.isfinite(rho) or abs(rho) > 0.99:
            out.append(x2)
            continue
        out.append(x2 + (rho / (1.0 - rho)) * d2)
    return out


def _sequence_limit(vals):
    cur = vals
    est = cur[-1]
    for _ in range(3):
        if len(cur) < 3:
            break
        cur = _aitken_sweep(cur)
        if not cur:
            break
        est = cur[-1]
    return est


def _terminal_limit(sample, a, d0, tol, kmax=40):
    """Limit of sample(t_k) along t_k = a + d0*2^-k.

    sample returns (value array, inner error, inner ok).  Converges when
    two consecutive accelerated estimates move by at most
    tol.abs + tol.rel*(1 + |estimate|).  Returns (value, err, converged,
    points used, note).
    """
    vals = []
    prev_est = None
    est = None
    streak = 0
    delta = math.inf
    for k in range(kmax):
        tk = a + d0 * 0.5**k
        v, _e, ok = sample(tk)
        v = np.asarray(v, dtype=float)
        if not ok:
            note = f"interior evaluation did not converge at t = {tk:.6g}"
            return (est if est is not None else v), math.inf, False, k + 1, note
        vals.append(v)
        if k >= 8:
            mags = [_mnorm(x) for x in vals[-4:]]
            if (mags[-1] > 1e3 * (1.0 + _mnorm(vals[0]))
                    and mags[0] < mags[1] < mags[2] < mags[3]):
                note = "interior values grow without bound approaching the terminal"
                return v, math.inf, False, k + 1, note
        if len(vals) < 3:
            continue
        est = _sequence_limit(vals)
        if prev_est is not None:
            delta = _mnorm(est - prev_est)
            thr = tol.abs + tol.rel * (1.0 + _mnorm(est))
            if delta <= thr:
                streak += 1
                if streak >= 2:
                    err = max(delta, 8.0 * _EPS * (1.0 + _mnorm(est)))
                    return est, err, True, k + 1, ""
            else:
                streak = 0
        prev_est = est
    note = "sequence of accelerated estimates is not Cauchy within tolerance"
    return est, delta, False, kmax, note


def lower_terminal_deriv(
    f: AbstractFn,
    p: ConfParams,
    side_def: str = "limit-of-deriv",
    tol: Tolerance | None = None,
) -> DerivResult:
    """Derivative value at the lower terminal itself.

    Defined as the limit of interior derivatives along t_k = a + d*2^-k,
    d = 0.1*max(1, |a|).  The value of f exactly at a never enters, so a
    point defect at a does not disturb the result.  The default tolerance
    is looser than the interior kernels': extrapolated limits lose about
    two digits.
    """
    if side_def != "limit-of-deriv":
        raise ValueError(
            f"unsupported terminal definition {side_def!r}; "
            "only 'limit-of-deriv' is implemented"
        )
    tol = tol if tol is not None else Tolerance(rel=1e-5, abs=1e-7)
    lo, hi = f.domain
    if lo > p.a:
        raise DomainError(
            f"f is undefined just above the lower terminal (domain starts at {lo})"
        )
    if hi <= p.a:
        raise DomainError(f"domain ends at {hi}, at or before the terminal {p.a}")
    d0 = min(0.1 * max(1.0, abs(p.a)), 0.5 * (hi - p.a))

    inner = Tolerance()

    def sample(tk):
        r = conf_deriv(f, p, tk, side="two-sided", tol=inner)
        return r.value.data, r.err_estimate, r.converged

    value, err, conv, used, note = _terminal_limit(sample, p.a, d0, tol)
    return DerivResult(
        VecValue(np.asarray(value, dtype=float)),
        float(err),
        "right",
        conv,
        used,
        detail=note or "terminal limit of interior derivatives",
    )


def one_sided_limit(
    f: AbstractFn, at: float, direction: str = "right", tol: Tolerance | None = None
):
    """Numerical one-sided limit of f at a point.

    Returns (VecValue estimate, err, converged).  Uses the same geometric
    schedule and acceleration as the terminal derivative.
    """
    tol = tol if tol is not None else Tolerance(rel=1e-7, abs=1e-9)
    if direction not in ("left", "right"):
        raise ValueError(f"direction must be left or right, not {direction!r}")
    lo, hi = f.domain
    at = float(at)
    if direction == "right":
        room = hi - at
        if room <= 0.0:
            raise DomainError(f"no domain room to the right of {at}")
        d0 = min(0.1 * max(1.0, abs(at)), 0.5 * room)
    else:
        room = at - lo
        if room <= 0.0:
            raise DomainError(f"no domain room to the left of {at}")
        d0 = -min(0.1 * max(1.0, abs(at)), 0.5 * room)

    def sample(tk):
        return f.eval(tk).data, 0.0, True

    value, err, conv, _used, _note = _terminal_limit(sample, at, d0, tol)
    return VecValue(np.asarray(value, dtype=float)), float(err), bool(conv)


# quadrature: cached Gauss-Legendre rules, graded base partition, bisection


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _panel(g, lo: float, hi: float, n: int):
    # fixed accumulation order so replicated components match scalar runs
    x, w = _gl(n)
    c = 0.5 * (hi - lo)
    m = 0.5 * (hi + lo)
    acc = None
    scale = 0.0
    for xi, wi in zip(x, w):
        gv = np.asarray(g(m + c * xi), dtype=float)
        gm = _mnorm(gv)
        if gm > scale:
            scale = gm
        v = wi * gv
        acc = v if acc is None else acc + v
    return c * acc, scale


def _refine(g, lo, hi, budget, noise, depth, max_depth, state):
    v10, s10 = _panel(g, lo, hi, 10)
    v7, s7 = _panel(g, lo, hi, 7)
    state["evals"] += 17
    state["panels"] += 1
    if s10 > state["gmax"]:
        state["gmax"] = s10
    width = hi - lo
    err = _mnorm(v10 - v7)
    floor = width * (4.0 * noise() + 32.0 * _EPS * max(s10, s7))
    # a refinement tree deeper or wider than this means the integrand is
    # fighting back (an interior singularity, say); stop splitting and
    # carry the unresolved estimate, so the total error stays honest and
    # the final budget check can refuse the result
    exhausted = depth >= max_depth or state["panels"] >= state["max_panels"]
    if (err <= max(budget, floor) or width <= 1e-14 * state["wtot"]
            or exhausted):
        state["err"] += err
        return v10
    mid = 0.5 * (lo + hi)
    vl = _refine(g, lo, mid, 0.5 * budget, noise, depth + 1, max_depth, state)
    vr = _refine(g, mid, hi, 0.5 * budget, noise, depth + 1, max_depth, state)
    return vl + vr


def _quad_adaptive(g, lo, hi, tol, noise=None, grade=False, max_depth=60):
    """Adaptive composite Gauss-Legendre on [lo, hi].

    10-point panels with an embedded 7-point error estimate, budgets split
    evenly on bisection.  ``grade`` prepends a geometric partition packed
    toward ``lo`` for integrands with an algebraic endpoint feature.
    ``noise`` is a callable returning the current absolute sample noise;
    panels are accepted once their estimate falls under the noise floor,
    which keeps inexact (estimated) integrands from forcing endless
    refinement.  Returns (value, error sum, eval count).
    """
    if noise is None:
        noise = lambda: 0.0
    width = hi - lo
    if grade:
        sigma, levels = 0.25, 24
        pts = [lo]
        for j in range(levels, 0, -1):
            c = lo + width * sigma**j
            if c > pts[-1]:
                pts.append(c)
        pts.append(hi)
    else:
        pts = [lo, hi]

    coarse = None
    for i in range(len(pts) - 1):
        v, _ = _panel(g, pts[i], pts[i + 1], 10)
        coarse = v if coarse is None else coarse + v
    budget_total = tol.abs + tol.rel * _mnorm(coarse)

    state = {"err": 0.0, "evals": 10 * (len(pts) - 1), "wtot": width,
             "gmax": 0.0, "panels": 0, "max_panels": 5000}
    total = None
    for i in range(len(pts) - 1):
        share = budget_total * (pts[i + 1] - pts[i]) / width
        v = _refine(g, pts[i], pts[i + 1], share, noise, 0, max_depth, state)
        total = v if total is None else total + v
    achieved = state["err"]
    # panels pinned at the width floor can hide a genuinely divergent
    # integrand; refuse to hand back an estimate that is wildly off budget
    cap = (32.0 * budget_total
           + width * (64.0 * noise() + 4096.0 * _EPS * (1.0 + state["gmax"])))
    if achieved > cap:
        raise QuadratureError(
            f"error estimate {achieved:.3g} exceeds the requested budget "
            f"{budget_total:.3g} after full refinement; the integrand may "
            "not be integrable on this interval",
            achieved=achieved,
        )
    return total, achieved, state["evals"]


def _zero_like_probe(f: AbstractFn, a: float):
    try:
        return 0.0 * f.eval(a).data
    except DomainError:
        lo, hi = f.domain
        probe = min(hi, a + 0.5 * max(1e-8, min(1.0, hi - a)))
        return 0.0 * f.eval(probe).data


def conf_integral_info(
    f: AbstractFn,
    p: ConfParams,
    t: float,
    tol: Tolerance | None = None,
    noise=0.0,
):
    """conf_integral plus diagnostics: (value, error estimate, eval count).

    ``noise`` declares the absolute uncertainty of individual f samples,
    either as a number or as a zero-argument callable re-read at each
    panel (for integrands whose own error estimate accumulates as they
    are sampled); the adaptive engine will not chase structure below that
    level.
    """
    tol = tol if tol is not None else Tolerance()
    t = float(t)
    if t < p.a:
        raise LowerTerminalError(
            f"integral runs upward from the terminal; need t >= a, got t = {t} < {p.a}"
        )
    lo, hi = f.domain
    if p.a < lo or t > hi:
        raise DomainError(
            f"integration range [{p.a}, {t}] is not inside the domain [{lo}, {hi}]"
        )
    if t == p.a:
        return VecValue(_zero_like_probe(f, p.a)), 0.0, 1

    inv_alpha = 1.0 / p.alpha
    upper = pow_real(t - p.a, p.alpha)

    def g(u: float):
        s_eval = p.a + pow_real(u, inv_alpha)
        if s_eval > hi:
            s_eval = hi
        elif s_eval < lo:
            s_eval = lo
        return f.eval(s_eval).data

    # budget in the substituted variable: the final value carries 1/alpha
    sub_tol = Tolerance(rel=tol.rel, abs=tol.abs * p.alpha)
    noise_fn = noise if callable(noise) else (lambda: float(noise))
    val, err, evals = _quad_adaptive(
        g, 0.0, upper, sub_tol, noise=noise_fn, grade=(p.alpha < 1.0)
    )
    return VecValue(inv_alpha * val), inv_alpha * err, evals


def conf_integral(
    f: AbstractFn, p: ConfParams, t: float, tol: Tolerance | None = None
) -> VecValue:
    """Weighted integral of f over [a, t]: integral of (s-a)^(alpha-1) f(s).

    Computed after the substitution u = (s-a)^alpha, whose inverse map is
    smooth away from u = 0 and bounded on the whole range, so the endpoint
    weight never has to be sampled.  Returns the zero element at t = a.
    """
    v, _err, _evals = conf_integral_info(f, p, t, tol)
    return v


def weighted_integral(
    f: AbstractFn, p: ConfParams, t1: float, t2: float, tol: Tolerance | None = None
) -> VecValue:
    """Integral of (s-a)^(alpha-1) f(s) over an interior slice [t1, t2].

    Needs a < t1 <= t2: away from the terminal the weight is smooth and
    no substitution is required.
    """
    tol = tol if tol is not None else Tolerance()
    t1, t2 = float(t1), float(t2)
    if not (t1 > p.a):
        raise LowerTerminalError(
            f"interior slice needs t1 > a; for t1 = a use conf_integral (got t1 = {t1})"
        )
    if t2 < t1:
        raise ValueError(f"need t1 <= t2, got [{t1}, {t2}]")
    lo, hi = f.domain
    if t1 < lo or t2 > hi:
        raise DomainError(f"slice [{t1}, {t2}] outside the domain [{lo}, {hi}]")
    if t1 == t2:
        return VecValue(_zero_like_probe(f, t1))

    def g(s: float):
        return pow_real(s - p.a, p.alpha - 1.0) * f.eval(s).data

    val, _err, _evals = _quad_adaptive(g, t1, t2, tol)
    return VecValue(val)


def deriv_of_integral(
    f: AbstractFn,
    p: ConfParams,
    t: float,
    tol: Tolerance | None = None,
    side: str = "two-sided",
) -> DerivResult:
    """Order-alpha derivative at t of the running integral of f.

    The quotient needs g(t + theta*s) - g(t) where g is the running
    integral; that difference IS the integral over the tiny panel between
    the two points, so it is computed directly by one 10-point rule per
    probe.  Differencing two independently adaptive integrals would lose
    six digits to cancellation; this loses none.
    """
    tol = tol if tol is not None else Tolerance()
    t = float(t)
    _require_interior(p, t)
    lo, hi = f.domain
    if p.a < lo or t > hi:
        raise DomainError(
            f"running integral needs [{p.a}, {t}] inside the domain [{lo}, {hi}]"
        )

    def wfun(s: float):
        return pow_real(s - p.a, p.alpha - 1.0) * f.eval(s).data

    def g_inc(u: float):
        v, _ = _panel(wfun, t, u, 10)
        return v

    s = pow_real(t - p.a, 1.0 - p.alpha)
    zero = 0.0 * f.eval(t).data
    return _deriv_core(
        g_inc, t, s, t - p.a, lo, hi, side, tol,
        detail="derivative of the running integral via local increments",
        f0=zero,
    )


def avg_recover(f: AbstractFn, t: float, tol: Tolerance | None = None) -> VecValue:
    """Limit of (1/h) * integral over [t, t+h] as h shrinks.

    At a continuity point this recovers f(t).  Uses the right side, or the
    left one at the right domain edge.  Raises ConvergenceError when the
    shrinking averages do not settle (no limit at t numerically).
    """
    tol = tol if tol is not None else Tolerance()
    t = float(t)
    f._check_domain(t)
    lo, hi = f.domain
    if hi - t > 0.0:
        sign, room = 1.0, hi - t
    elif t - lo > 0.0:
        sign, room = -1.0, t - lo
    else:
        raise DomainError(f"no domain room on either side of t = {t}")
    h0 = sign * min(0.01 * max(1.0, abs(t)), 0.5 * room)
    if t + h0 == t:
        raise DomainError(f"averaging interval underflows at t = {t}")

    def raw(s: float):
        return f.eval(s).data

    avgs = []
    for k in range(12):
        h = h0 * 0.5**k
        v, _ = _panel(raw, t, t + h, 10)
        avgs.append(v / h)
    val, err = _richardson(avgs, 1, 1)
    err = max(err, _err_floor(val))
    thr = tol.threshold(_mnorm(val))
    if err > thr:
        raise ConvergenceError(
            f"shrinking-interval averages did not settle at t = {t} "
            f"(error estimate {err:.3g} exceeds {thr:.3g})"
        )
    return VecValue(val)
