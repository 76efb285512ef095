"""Function objects the calculus kernels operate on.

Every function maps a real ``t`` to a scalar, vector, or square-matrix
value.  Calling the object returns the raw payload (float or ndarray);
:func:`evaluate` wraps the result in a :class:`~confcalc.vecspace.VecValue`
and enforces the declared domain and finiteness.  ``exact_deriv`` returns
the exact first derivative where one is known (expression trees and named
builtins) and None where it is not (grid data).

Kinds:

* :class:`ExprFn`: parsed expression text, differentiable symbolically.
* :class:`GridFn`: tabulated nodes with linear or cubic Hermite
  interpolation, exact at the nodes.
* :class:`BuiltinFn`: named analytic functions with hand-written
  derivative closures, independent of the symbolic differentiator.
* :class:`CompositeFn`: vector or square-matrix assembly of scalar
  functions.
* :class:`CallableFn`: adapter around an arbitrary callable, used for
  derived quantities such as running integrals.
* :class:`PointPatchedFn`: a function with its value overridden at one
  point, for jump examples at a lower terminal.

All of these are immutable after construction.
"""

from __future__ import annotations

import csv
import math
from typing import Callable, Sequence

import numpy as np

from . import expr as _e
from .errors import DomainError, ShapeError
from .vecspace import VecValue

__all__ = [
    "AbstractFn",
    "ExprFn",
    "GridFn",
    "BuiltinFn",
    "CompositeFn",
    "CallableFn",
    "PointPatchedFn",
    "parse_expr",
    "evaluate",
    "exact_first_deriv",
    "builtin",
    "builtin_names",
    "power_fn",
    "vector_fn",
    "matrix_fn",
    "diag_fn",
    "load_grid_csv",
]

_INF = math.inf


class AbstractFn:
    """Base contract: a callable on [domain lo, domain hi]."""

    kind = "abstract"

    def __init__(self, domain=(-_INF, _INF), label: str = ""):
        lo, hi = float(domain[0]), float(domain[1])
        if not lo < hi:
            raise ValueError(f"empty domain [{lo}, {hi}]")
        self._domain = (lo, hi)
        self.label = label

    @property
    def domain(self) -> tuple[float, float]:
        return self._domain

    def _check_domain(self, t: float):
        lo, hi = self._domain
        if not (lo <= t <= hi):
            raise DomainError(f"t = {t} outside domain [{lo}, {hi}]")

    def __call__(self, t: float):
        raise NotImplementedError

    def exact_deriv(self, t: float):
        """Raw exact first derivative, or None when unavailable."""
        return None

    def eval(self, t: float) -> VecValue:
        self._check_domain(t)
        raw = self(t)
        arr = np.asarray(raw, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise DomainError(f"non-finite value at t = {t}")
        return VecValue(arr)


def evaluate(f: AbstractFn, t: float) -> VecValue:
    """Evaluate ``f`` at ``t`` with domain and finiteness checks."""
    return f.eval(t)


def exact_first_deriv(f: AbstractFn, t: float) -> VecValue | None:
    """Exact first derivative as a value, or None when unavailable."""
    f._check_domain(t)
    raw = f.exact_deriv(t)
    if raw is None:
        return None
    return VecValue(np.asarray(raw, dtype=float))


class ExprFn(AbstractFn):
    """Function defined by expression text in the variable ``t``."""

    kind = "expr"

    def __init__(self, text: str, domain=(-_INF, _INF), label: str = ""):
        super().__init__(domain, label or text)
        self.text = text
        self.node = _e.parse_text(text, variables=("t",))
        self._deriv_node = None

    def __call__(self, t: float) -> float:
        self._check_domain(t)
        v = _e.eval_node(self.node, {"t": t})
        if not math.isfinite(v):
            raise DomainError(f"non-finite value at t = {t}")
        return v

    def _dnode(self):
        if self._deriv_node is None:
            self._deriv_node = _e.diff_node(self.node, "t")
        return self._deriv_node

    def exact_deriv(self, t: float) -> float:
        self._check_domain(t)
        return _e.eval_node(self._dnode(), {"t": t})

    def printed(self) -> str:
        """Canonical text that re-parses to an equivalent expression."""
        return _e.node_to_text(self.node)


def parse_expr(text: str, domain=(-_INF, _INF)) -> ExprFn:
    """Parse expression text into a function of ``t``.

    Malformed input raises with the byte offset of the problem.
    """
    return ExprFn(text, domain=domain)


class BuiltinFn(AbstractFn):
    """Named analytic function with a hand-written derivative closure."""

    kind = "builtin"

    def __init__(
        self,
        name: str,
        fn: Callable[[float], float],
        dfn: Callable[[float], float],
        domain=(-_INF, _INF),
    ):
        super().__init__(domain, name)
        self.name = name
        self._fn = fn
        self._dfn = dfn

    def __call__(self, t: float) -> float:
        self._check_domain(t)
        try:
            return self._fn(t)
        except (ValueError, OverflowError) as exc:
            raise DomainError(f"{self.name}({t}): {exc}") from None

    def exact_deriv(self, t: float) -> float:
        self._check_domain(t)
        try:
            return self._dfn(t)
        except (ValueError, OverflowError) as exc:
            raise DomainError(f"{self.name}'({t}): {exc}") from None


def power_fn(p: float, shift: float = 0.0) -> BuiltinFn:
    """The function (t - shift)^p with its exact derivative.

    Domain starts at the shift for non-integer exponents.  The value at
    the left endpoint is 0 for p > 0; the derivative there is a domain
    error when p < 1.
    """
    p = float(p)
    shift = float(shift)
    if p == round(p) and p >= 0:
        lo = -_INF
    else:
        lo = shift

    def fn(t: float) -> float:
        return _e.pow_real(t - shift, p)

    def dfn(t: float) -> float:
        return p * _e.pow_real(t - shift, p - 1.0)

    name = f"pow:{p:g}" if shift == 0.0 else f"pow:{p:g}:{shift:g}"
    return BuiltinFn(name, fn, dfn, domain=(lo, _INF))


def _mk_builtins() -> dict[str, Callable[[], BuiltinFn]]:
    return {
        "one": lambda: BuiltinFn("one", lambda t: 1.0, lambda t: 0.0),
        "identity": lambda: BuiltinFn("identity", lambda t: t, lambda t: 1.0),
        "square": lambda: BuiltinFn("square", lambda t: t * t, lambda t: 2.0 * t),
        "cube": lambda: BuiltinFn(
            "cube", lambda t: t * t * t, lambda t: 3.0 * t * t
        ),
        "sqrt": lambda: BuiltinFn(
            "sqrt", math.sqrt, lambda t: 0.5 / math.sqrt(t), domain=(0.0, _INF)
        ),
        "exp": lambda: BuiltinFn("exp", math.exp, math.exp),
        "sin": lambda: BuiltinFn("sin", math.sin, math.cos),
        "cos": lambda: BuiltinFn("cos", math.cos, lambda t: -math.sin(t)),
        "log": lambda: BuiltinFn("log", math.log, lambda t: 1.0 / t, domain=(0.0, _INF)),
        "t_sin": lambda: BuiltinFn(
            "t_sin",
            lambda t: t * math.sin(t),
            lambda t: math.sin(t) + t * math.cos(t),
        ),
    }


_BUILTINS = _mk_builtins()


def builtin_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILTINS)) + ("pow:P", "pow:P:A")


def builtin(spec: str) -> BuiltinFn:
    """Look up a builtin by name.

    ``pow:P`` gives t^P and ``pow:P:A`` gives (t - A)^P; other names are
    fixed functions, see :func:`builtin_names`.
    """
    if spec in _BUILTINS:
        return _BUILTINS[spec]()
    if spec.startswith("pow:"):
        parts = spec.split(":")[1:]
        if len(parts) in (1, 2):
            try:
                p = float(parts[0])
                shift = float(parts[1]) if len(parts) == 2 else 0.0
            except ValueError:
                raise ValueError(f"bad pow builtin spec {spec!r}") from None
            return power_fn(p, shift)
    raise ValueError(
        f"unknown builtin {spec!r}; available: {', '.join(builtin_names())}"
    )


class GridFn(AbstractFn):
    """Tabulated data on strictly increasing nodes with interpolation.

    ``interp`` is ``linear`` or ``cubic`` (Hermite with second order
    finite-difference slopes, so quadratic data is reproduced exactly).
    Evaluation at a node returns the stored value exactly.  There is no
    exact derivative; ``interp_deriv`` exposes the interpolant's
    derivative together with an inflated error bound.
    """

    kind = "grid"

    def __init__(self, nodes, values, interp: str = "cubic", label: str = ""):
        ts = np.asarray(nodes, dtype=float)
        vs = np.asarray(values, dtype=float)
        if ts.ndim != 1 or ts.size < 2:
            raise ValueError("need at least two grid nodes")
        if not np.all(np.diff(ts) > 0.0):
            raise ValueError("grid nodes must be strictly increasing")
        if vs.shape[0] != ts.size:
            raise ShapeError(
                f"values first axis {vs.shape[0]} does not match {ts.size} nodes"
            )
        if vs.ndim > 3 or (vs.ndim == 3 and vs.shape[1] != vs.shape[2]):
            raise ShapeError(f"unsupported grid value shape {vs.shape[1:]}")
        if not np.all(np.isfinite(ts)) or not np.all(np.isfinite(vs)):
            raise ValueError("grid data must be finite")
        if interp not in ("linear", "cubic"):
            raise ValueError(f"interp must be linear or cubic, not {interp!r}")
        super().__init__((float(ts[0]), float(ts[-1])), label)
        self.nodes_t = ts
        self.values = vs
        self.interp = interp
        self._slopes = self._node_slopes() if interp == "cubic" else None

    def _node_slopes(self) -> np.ndarray:
        # Three-point finite differences, exact for quadratic data even on
        # non-uniform grids; one-sided variants at the two ends.
        ts, vs = self.nodes_t, self.values
        m = ts.size
        out = np.empty_like(vs)
        if m == 2:  # no quadratic available, fall back to the chord
            slope = (vs[1] - vs[0]) / (ts[1] - ts[0])
            out[0] = slope
            out[1] = slope
            return out
        for i in range(m):
            if i == 0:
                j = 0
            elif i == m - 1:
                j = m - 3
            else:
                j = i - 1
            t0, t1, t2 = ts[j], ts[j + 1], ts[j + 2]
            v0, v1, v2 = vs[j], vs[j + 1], vs[j + 2]
            t = ts[i]
            # derivative of the quadratic through the three points
            out[i] = (
                v0 * (2.0 * t - t1 - t2) / ((t0 - t1) * (t0 - t2))
                + v1 * (2.0 * t - t0 - t2) / ((t1 - t0) * (t1 - t2))
                + v2 * (2.0 * t - t0 - t1) / ((t2 - t0) * (t2 - t1))
            )
        return out

    def _locate(self, t: float) -> int:
        i = int(np.searchsorted(self.nodes_t, t, side="right")) - 1
        return min(max(i, 0), self.nodes_t.size - 2)

    def __call__(self, t: float):
        self._check_domain(t)
        ts = self.nodes_t
        i = self._locate(t)
        if t == ts[i]:
            return self.values[i]
        if t == ts[i + 1]:
            return self.values[i + 1]
        h = ts[i + 1] - ts[i]
        x = (t - ts[i]) / h
        v0, v1 = self.values[i], self.values[i + 1]
        if self.interp == "linear":
            return v0 + (v1 - v0) * x
        s0, s1 = self._slopes[i], self._slopes[i + 1]
        h00 = (1.0 + 2.0 * x) * (1.0 - x) ** 2
        h10 = x * (1.0 - x) ** 2
        h01 = x * x * (3.0 - 2.0 * x)
        h11 = x * x * (x - 1.0)
        return h00 * v0 + h10 * h * s0 + h01 * v1 + h11 * h * s1

    def interp_deriv(self, t: float):
        """Interpolant derivative and a heuristic error bound.

        The bound is inflated by the interpolation order: for linear data
        it is the jump between neighboring chord slopes, for cubic it is
        scaled by the local third differences.
        """
        self._check_domain(t)
        ts = self.nodes_t
        i = self._locate(t)
        h = ts[i + 1] - ts[i]
        x = (t - ts[i]) / h
        v0, v1 = self.values[i], self.values[i + 1]
        chord = (v1 - v0) / h
        if self.interp == "linear":
            jm = self._chord(max(i - 1, 0))
            jp = self._chord(min(i + 1, ts.size - 2))
            err = float(
                max(np.linalg.norm(chord - jm), np.linalg.norm(jp - chord))
            )
            return chord, err
        s0, s1 = self._slopes[i], self._slopes[i + 1]
        d00 = (6.0 * x * x - 6.0 * x) / h
        d10 = 3.0 * x * x - 4.0 * x + 1.0
        d01 = -d00
        d11 = 3.0 * x * x - 2.0 * x
        val = d00 * v0 + d10 * s0 + d01 * v1 + d11 * s1
        err = float(np.linalg.norm(s1 - s0) + np.linalg.norm(s0 + s1 - 2.0 * chord))
        return val, err

    def _chord(self, i: int):
        return (self.values[i + 1] - self.values[i]) / (
            self.nodes_t[i + 1] - self.nodes_t[i]
        )


class CompositeFn(AbstractFn):
    """Vector or square-matrix assembly of scalar component functions."""

    kind = "composite"

    def __init__(self, components, label: str = ""):
        comps = [list(row) for row in components] if _nested(components) else list(
            components
        )
        if _nested(components):
            n = len(comps)
            if any(len(row) != n for row in comps):
                raise ShapeError("matrix assembly needs an n by n grid of functions")
            flat = [f for row in comps for f in row]
            self._shape = (n, n)
        else:
            if not comps:
                raise ShapeError("empty composite")
            flat = comps
            self._shape = (len(comps),)
        lo = max(f.domain[0] for f in flat)
        hi = min(f.domain[1] for f in flat)
        super().__init__((lo, hi), label)
        self._comps = comps

    def __call__(self, t: float):
        self._check_domain(t)
        if len(self._shape) == 1:
            return np.array([f(t) for f in self._comps], dtype=float)
        return np.array([[f(t) for f in row] for row in self._comps], dtype=float)

    def exact_deriv(self, t: float):
        self._check_domain(t)
        if len(self._shape) == 1:
            ds = [f.exact_deriv(t) for f in self._comps]
            if any(d is None for d in ds):
                return None
            return np.array(ds, dtype=float)
        ds = [[f.exact_deriv(t) for f in row] for row in self._comps]
        if any(d is None for row in ds for d in row):
            return None
        return np.array(ds, dtype=float)


def _nested(components) -> bool:
    first = next(iter(components))
    return not isinstance(first, AbstractFn)


def vector_fn(components: Sequence[AbstractFn], label: str = "") -> CompositeFn:
    return CompositeFn(list(components), label)


def matrix_fn(rows: Sequence[Sequence[AbstractFn]], label: str = "") -> CompositeFn:
    return CompositeFn([list(r) for r in rows], label)


def diag_fn(components: Sequence[AbstractFn], label: str = "") -> CompositeFn:
    """Square matrix function with the given diagonal and zeros elsewhere."""
    comps = list(components)
    n = len(comps)
    zero = BuiltinFn("zero", lambda t: 0.0, lambda t: 0.0)
    rows = [
        [comps[i] if i == j else zero for j in range(n)] for i in range(n)
    ]
    return matrix_fn(rows, label)


class CallableFn(AbstractFn):
    """Adapter for a plain callable, optionally with a derivative callable."""

    kind = "callable"

    def __init__(self, fn, domain=(-_INF, _INF), deriv=None, label: str = ""):
        super().__init__(domain, label)
        self._fn = fn
        self._deriv = deriv

    def __call__(self, t: float):
        self._check_domain(t)
        return self._fn(t)

    def exact_deriv(self, t: float):
        if self._deriv is None:
            return None
        self._check_domain(t)
        return self._deriv(t)


class PointPatchedFn(AbstractFn):
    """A function whose value is overridden at exactly one point."""

    kind = "patched"

    def __init__(self, inner: AbstractFn, at: float, value, label: str = ""):
        super().__init__(inner.domain, label or inner.label)
        self.inner = inner
        self.at = float(at)
        self.patch_value = np.asarray(value, dtype=float)

    def __call__(self, t: float):
        if t == self.at:
            return self.patch_value
        return self.inner(t)

    def exact_deriv(self, t: float):
        if t == self.at:
            return None
        return self.inner.exact_deriv(t)


def load_grid_csv(path, interp: str = "cubic") -> GridFn:
    """Read ``t,v0[,v1,...]`` rows into a GridFn.

    One value column gives a scalar function, several give a vector one.
    A header row is detected and skipped.
    """
    ts: list[float] = []
    vals: list[list[float]] = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not row[0].strip():
                continue
            try:
                head = float(row[0])
            except ValueError:
                continue  # header line
            ts.append(head)
            vals.append([float(x) for x in row[1:]])
    if not ts:
        raise ValueError(f"no data rows in {path}")
    width = len(vals[0])
    if width == 0 or any(len(r) != width for r in vals):
        raise ValueError("every row needs the same number of value columns")
    arr = np.asarray(vals, dtype=float)
    if width == 1:
        arr = arr[:, 0]
    return GridFn(np.asarray(ts), arr, interp=interp, label=str(path))
