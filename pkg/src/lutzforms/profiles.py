"""One-variable piecewise polynomial profiles."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ProfileViolation

__all__ = ["PiecewiseProfile", "hermite_piece", "smoothstep_profile"]

CONTINUITY_TOL = 1e-12


def hermite_piece(x0: float, x1: float, y0: float, y1: float, m0: float, m1: float) -> np.ndarray:
    """Cubic in ``t = x - x0`` with the given end values and slopes (low-to-high coefficients)."""
    h = x1 - x0
    if h <= 0:
        raise ValueError("empty Hermite interval")
    d = (y1 - y0) / h
    c2 = (3 * d - 2 * m0 - m1) / h
    c3 = (m0 + m1 - 2 * d) / (h * h)
    return np.array([y0, m0, c2, c3], dtype=float)


@dataclass
class PiecewiseProfile:
    """Piecewise polynomial on ``breaks[k] <= x <= breaks[k+1]``.

    Outside the breakpoints the first or last polynomial is extrapolated.
    Pieces are coefficient arrays in the local variable ``x - breaks[k]``.
    """
    name: str
    breaks: Sequence[float]
    pieces: Sequence[Sequence[float]]
    monotone: str | None = None  # "increasing", "decreasing" or None
    _polys: list = field(init=False, repr=False)

    def __post_init__(self):
        self.breaks = [float(b) for b in self.breaks]
        if len(self.pieces) != len(self.breaks) - 1 or not self.pieces:
            raise ValueError("need exactly one piece per interval")
        if any(a >= b for a, b in zip(self.breaks, self.breaks[1:])):
            raise ValueError("breakpoints must increase")
        self._polys = [np.polynomial.Polynomial(np.asarray(p, dtype=float)) for p in self.pieces]
        for k in range(1, len(self._polys)):
            h = self.breaks[k] - self.breaks[k - 1]
            left, right = self._polys[k - 1](h), self._polys[k](0.0)
            if abs(left - right) > CONTINUITY_TOL * max(1.0, abs(left)):
                raise ProfileViolation(
                    f"{self.name} is discontinuous at {self.breaks[k]}: {left} vs {right}")
        if self.monotone:
            self.check_monotone(self.monotone)

    @classmethod
    def hermite(cls, name: str, xs: Sequence[float], ys: Sequence[float],
                slopes: Sequence[float], monotone: str | None = None) -> "PiecewiseProfile":
        pieces = [hermite_piece(xs[k], xs[k + 1], ys[k], ys[k + 1], slopes[k], slopes[k + 1])
                  for k in range(len(xs) - 1)]
        return cls(name, xs, pieces, monotone)

    def _locate(self, x: float) -> int:
        k = int(np.searchsorted(self.breaks, x, side="right")) - 1
        return min(max(k, 0), len(self._polys) - 1)

    def __call__(self, x: float, order: int = 0, point=None) -> float:
        k = self._locate(x)
        p = self._polys[k].deriv(order) if order else self._polys[k]
        return float(p(x - self.breaks[k]))

    def derivative(self, x: float, order: int = 1) -> float:
        return self(x, order)

    def continuity_defects(self, order: int = 0) -> list[float]:
        out = []
        for k in range(1, len(self._polys)):
            h = self.breaks[k] - self.breaks[k - 1]
            out.append(abs(self._polys[k - 1].deriv(order)(h) - self._polys[k].deriv(order)(0.0))
                       if order else abs(self._polys[k - 1](h) - self._polys[k](0.0)))
        return out

    def check_monotone(self, direction: str, samples: int = 64) -> None:
        sign = 1.0 if direction == "increasing" else -1.0
        for k, p in enumerate(self._polys):
            h = self.breaks[k + 1] - self.breaks[k]
            dp = p.deriv()
            ts = np.linspace(0.0, h, samples)
            crit = [r.real for r in dp.deriv().roots() if abs(r.imag) < 1e-12 and 0 <= r.real <= h]
            vals = sign * dp(np.concatenate([ts, crit]))
            if np.min(vals) < -1e-12:
                raise ProfileViolation(f"{self.name} is not {direction} on piece {k}")


def smoothstep_profile(name: str, a: float, b: float, lo: float = 0.0, hi: float = 1.0,
                       left: float | None = None, right: float | None = None) -> PiecewiseProfile:
    """``lo`` up to ``a``, cubic Hermite rise to ``hi`` at ``b``, ``hi`` afterwards."""
    left = a - 1.0 if left is None else left
    right = b + 1.0 if right is None else right
    xs = [left, a, b, right]
    pieces = [[lo], hermite_piece(a, b, lo, hi, 0.0, 0.0), [hi]]
    return PiecewiseProfile(name, xs, pieces,
                            "increasing" if hi >= lo else "decreasing")
