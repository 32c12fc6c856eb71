"""Vectorised evaluation of expression batches on sample grids.

Expressions are flattened into a small instruction table (one row per atom)
and evaluated either by numba-compiled loops or by a pure numpy fallback.
Set ``LUTZFORMS_DISABLE_NUMBA=1`` to force the numpy path.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .scalar import COORD, COS, FN, NORM, POLE_TOL, SIN, Base, ScalarExpr

try:  # pragma: no cover - exercised implicitly
    import numba
    from numba import njit, prange
    # the bundled TBB is too old on some hosts; the portable layer avoids the warning
    if "NUMBA_THREADING_LAYER" not in os.environ:
        numba.config.THREADING_LAYER = "workqueue"
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

OP_POW, OP_SIN, OP_SIN2, OP_COS, OP_COS2 = 0, 1, 2, 3, 4

# RK4 exit codes
ARRIVED, ESCAPED, EXHAUSTED, POLE = 0, 1, 2, 3


def numba_enabled() -> bool:
    flag = os.environ.get("LUTZFORMS_DISABLE_NUMBA", "").strip().lower()
    return _HAVE_NUMBA and flag not in ("1", "true", "yes", "on")


@dataclass(frozen=True)
class Program:
    """Flattened batch of expressions over ``ncols = dim + len(extras)`` columns."""
    dim: int
    extras: tuple[Base, ...]
    coef: np.ndarray
    term_start: np.ndarray
    expr_start: np.ndarray
    op: np.ndarray
    col: np.ndarray
    exp: np.ndarray

    @property
    def n_exprs(self) -> int:
        return len(self.expr_start) - 1

    @property
    def pure(self) -> bool:
        return not self.extras


def compile_exprs(exprs: Sequence[ScalarExpr], dim: int) -> Program:
    extras: dict[Base, int] = {}
    coef, term_start, expr_start = [], [0], [0]
    op, col, exp = [], [], []
    for e in exprs:
        for key, c in e.terms:
            coef.append(float(c))
            for b, ex in key:
                if b.tag == COORD:
                    op.append(OP_POW)
                    col.append(b.index)
                elif b.tag in (SIN, COS):
                    code = {(SIN, False): OP_SIN, (SIN, True): OP_SIN2,
                            (COS, False): OP_COS, (COS, True): OP_COS2}[(b.tag, b.squared)]
                    op.append(code)
                    col.append(b.index)
                else:
                    op.append(OP_POW)
                    col.append(dim + extras.setdefault(b, len(extras)))
                exp.append(ex)
            term_start.append(len(op))
        expr_start.append(len(coef))
    return Program(dim, tuple(extras), np.asarray(coef, dtype=np.float64),
                   np.asarray(term_start, dtype=np.int64), np.asarray(expr_start, dtype=np.int64),
                   np.asarray(op, dtype=np.int64), np.asarray(col, dtype=np.int64),
                   np.asarray(exp, dtype=np.int64))


def extra_columns(prog: Program, points: np.ndarray,
                  profiles: Mapping[str, Callable] | None) -> np.ndarray:
    """Append norm and profile values as extra columns."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    if prog.pure:
        return points
    cols = [points]
    for b in prog.extras:
        if b.index < 0:
            u = np.sqrt(np.sum(points[:, list(b.group)] ** 2, axis=1))
        else:
            u = points[:, b.index] ** 2 if b.squared else points[:, b.index]
        if b.tag == NORM:
            cols.append(u[:, None])
            continue
        if profiles is None or b.name not in profiles:
            raise KeyError(f"no concrete profile registered for {b.name!r}")
        f = profiles[b.name]
        vals = np.array([float(f(float(u[k]), b.order, points[k])) for k in range(len(u))])
        cols.append(vals[:, None])
    return np.hstack(cols)


# --------------------------------------------------------------------------
# numpy path

def _eval_numpy(prog: Program, cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = cols.shape[0]
    out = np.zeros((n, prog.n_exprs))
    pole = np.zeros(n, dtype=bool)
    for e in range(prog.n_exprs):
        acc = np.zeros(n)
        hit = np.zeros(n, dtype=bool)
        for t in range(prog.expr_start[e], prog.expr_start[e + 1]):
            term = np.full(n, prog.coef[t])
            for a in range(prog.term_start[t], prog.term_start[t + 1]):
                x = cols[:, prog.col[a]]
                code = prog.op[a]
                if code == OP_POW:
                    base = x
                elif code == OP_SIN:
                    base = np.sin(x)
                elif code == OP_SIN2:
                    base = np.sin(x * x)
                elif code == OP_COS:
                    base = np.cos(x)
                else:
                    base = np.cos(x * x)
                ex = int(prog.exp[a])
                if ex < 0:
                    bad = np.abs(base) <= POLE_TOL
                    hit |= bad
                    base = np.where(bad, 1.0, base)
                term = term * base ** ex
            acc += term
        acc[hit] = np.nan
        out[:, e] = acc
        pole |= hit
    return out, pole


# --------------------------------------------------------------------------
# numba path

if _HAVE_NUMBA:
    @njit(cache=True)
    def _eval_one(coef, term_start, expr_start, op, col, exp, e, cols, k):
        """Expression ``e`` at row ``k`` of ``cols``; NaN at a pole."""
        acc = 0.0
        for t in range(expr_start[e], expr_start[e + 1]):
            term = coef[t]
            for a in range(term_start[t], term_start[t + 1]):
                x = cols[k, col[a]]
                code = op[a]
                if code == OP_POW:
                    base = x
                elif code == OP_SIN:
                    base = math.sin(x)
                elif code == OP_SIN2:
                    base = math.sin(x * x)
                elif code == OP_COS:
                    base = math.cos(x)
                else:
                    base = math.cos(x * x)
                ex = exp[a]
                if ex < 0:
                    if abs(base) <= POLE_TOL:
                        return np.nan
                    base = 1.0 / base
                    ex = -ex
                # integer power by squaring
                r = 1.0
                while ex:
                    if ex & 1:
                        r *= base
                    base *= base
                    ex >>= 1
                term *= r
            acc += term
        return acc

    @njit(parallel=True, cache=True)
    def _eval_grid_numba(coef, term_start, expr_start, op, col, exp, cols):
        n = cols.shape[0]
        m = expr_start.shape[0] - 1
        out = np.empty((n, m))
        for k in prange(n):
            for e in range(m):
                out[k, e] = _eval_one(coef, term_start, expr_start, op, col, exp, e, cols, k)
        return out

    @njit(cache=True)
    def _field(coef, term_start, expr_start, op, col, exp, x, dim):
        row = x.reshape((1, x.shape[0]))
        v = np.empty(dim)
        for i in range(dim):
            v[i] = _eval_one(coef, term_start, expr_start, op, col, exp, i, row, 0)
        return v

    @njit(cache=True)
    def _rk4_numba(coef, term_start, expr_start, op, col, exp, x0, lo, hi,
                   h, max_steps, thresh, path):
        dim = x0.shape[0]
        x = x0.copy()
        for step in range(max_steps + 1):
            path[step] = x
            c = _eval_one(coef, term_start, expr_start, op, col, exp, dim,
                          x.reshape((1, dim)), 0)
            if c != c:
                return POLE, step, x
            if c > thresh:
                return ARRIVED, step, x
            if step == max_steps:
                break
            k1 = _field(coef, term_start, expr_start, op, col, exp, x, dim)
            k2 = _field(coef, term_start, expr_start, op, col, exp, x + 0.5 * h * k1, dim)
            k3 = _field(coef, term_start, expr_start, op, col, exp, x + 0.5 * h * k2, dim)
            k4 = _field(coef, term_start, expr_start, op, col, exp, x + h * k3, dim)
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            for i in range(dim):
                if x[i] != x[i] or x[i] < lo[i] or x[i] > hi[i]:
                    path[step + 1] = x
                    return ESCAPED, step + 1, x
        return EXHAUSTED, max_steps, x


def _args(prog: Program):
    return (prog.coef, prog.term_start, prog.expr_start, prog.op, prog.col, prog.exp)


class BatchEvaluator:
    """Compiled batch of expressions, reusable across point sets."""

    def __init__(self, exprs: Sequence[ScalarExpr], dim: int, profiles=None,
                 use_numba: bool | None = None):
        self.prog = compile_exprs(exprs, dim)
        self.profiles = profiles
        self.use_numba = numba_enabled() if use_numba is None else use_numba

    def __call__(self, points) -> tuple[np.ndarray, np.ndarray]:
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        cols = extra_columns(self.prog, points, self.profiles)
        if self.use_numba and len(self.prog.coef) and len(points):
            out = _eval_grid_numba(*_args(self.prog), cols)
            return out, np.isnan(out).any(axis=1)
        return _eval_numpy(self.prog, cols)


def eval_grid(exprs: Sequence[ScalarExpr], points: np.ndarray, profiles=None,
              dim: int | None = None, use_numba: bool | None = None
              ) -> tuple[np.ndarray, np.ndarray]:
    """Values ``[n_points, n_exprs]`` and a per-row pole mask; entries at a pole are NaN."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    ev = BatchEvaluator(exprs, points.shape[1] if dim is None else dim, profiles, use_numba)
    return ev(points)


def rk4_trace(field: Sequence[ScalarExpr], coefficient: ScalarExpr, x0: Sequence[float],
              lo: Sequence[float], hi: Sequence[float], *, h: float, max_steps: int,
              thresh: float, profiles=None, use_numba: bool | None = None
              ) -> tuple[int, int, np.ndarray]:
    """Integrate ``x' = field(x)`` until ``coefficient(x) > thresh``.

    Returns ``(code, steps, path)`` where ``path[k]`` is the point after ``k``
    steps and ``code`` is one of ARRIVED, ESCAPED, EXHAUSTED, POLE.
    """
    dim = len(field)
    prog = compile_exprs(list(field) + [coefficient], dim)
    x0 = np.asarray(x0, dtype=np.float64)
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if use_numba is None:
        use_numba = numba_enabled()
    if use_numba and prog.pure:
        path = np.full((int(max_steps) + 1, dim), np.nan)
        code, steps, _ = _rk4_numba(*_args(prog), x0, lo, hi, float(h), int(max_steps),
                                    float(thresh), path)
        return int(code), int(steps), path[:steps + 1].copy()

    def ev(x):
        vals, pole = _eval_numpy(prog, extra_columns(prog, x[None, :], profiles))
        return vals[0], bool(pole[0])

    x = x0.copy()
    path = [x]
    for step in range(max_steps + 1):
        vals, pole = ev(x)
        if pole:
            return POLE, step, np.array(path)
        if vals[dim] > thresh:
            return ARRIVED, step, np.array(path)
        if step == max_steps:
            break
        k1 = vals[:dim]
        k2 = ev(x + 0.5 * h * k1)[0][:dim]
        k3 = ev(x + 0.5 * h * k2)[0][:dim]
        k4 = ev(x + h * k3)[0][:dim]
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        path.append(x)
        if np.any(~np.isfinite(x)) or np.any(x < lo) or np.any(x > hi):
            return ESCAPED, step + 1, np.array(path)
    return EXHAUSTED, max_steps, np.array(path)
