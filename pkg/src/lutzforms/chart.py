"""Coordinate charts."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = ["Kind", "ANGLE", "RADIAL", "LINEAR", "bounded", "Chart"]


@dataclass(frozen=True)
class Kind:
    """Coordinate kind; ``lo``/``hi`` only matter for bounded linear coordinates."""
    tag: str
    lo: float | None = None
    hi: float | None = None

    @property
    def allows_negative_power(self) -> bool:
        return self.tag in ("radial", "linear", "bounded")

    @property
    def allows_square_arg(self) -> bool:
        return self.tag != "angle"

    def contains(self, value: float) -> bool:
        if self.tag == "radial":
            return value >= 0.0
        if self.tag == "bounded":
            return self.lo <= value <= self.hi
        return math.isfinite(value)

    def default_range(self) -> tuple[float, float]:
        if self.tag == "angle":
            return (0.0, 2.0 * math.pi)
        if self.tag == "radial":
            return (0.0, 2.0)
        if self.tag == "bounded":
            return (self.lo, self.hi)
        return (-2.0, 2.0)


ANGLE = Kind("angle")
RADIAL = Kind("radial")
LINEAR = Kind("linear")


def bounded(lo: float, hi: float) -> Kind:
    if not lo < hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    return Kind("bounded", float(lo), float(hi))


@dataclass(frozen=True)
class Chart:
    coords: tuple[tuple[str, Kind], ...]

    def __post_init__(self):
        names = [c[0] for c in self.coords]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate coordinate names in {names}")

    @classmethod
    def of(cls, coords: Iterable[tuple[str, Kind]]) -> "Chart":
        return cls(tuple((str(n), k) for n, k in coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(c[0] for c in self.coords)

    def kind(self, i: int) -> Kind:
        return self.coords[i][1]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no coordinate named {name!r}") from None

    def resolve(self, key: int | str) -> int:
        if isinstance(key, str):
            return self.index(key)
        if not 0 <= key < self.dim:
            raise KeyError(f"coordinate index {key} out of range for dim {self.dim}")
        return key

    def drop(self, indices: Sequence[int]) -> "Chart":
        gone = set(indices)
        return Chart(tuple(c for i, c in enumerate(self.coords) if i not in gone))

    def __str__(self) -> str:
        return "(" + ", ".join(n for n, _ in self.coords) + ")"
