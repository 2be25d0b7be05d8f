"""Integer arithmetic on the hexagonal (Eisenstein) lattice.

Coordinates ``(u, v)`` refer to the basis ``e1 = (1, 0)``, ``e2 = (1/2, sqrt(3)/2)``.
The squared Euclidean length of ``u*e1 + v*e2`` is the Loeschian norm
``u^2 + uv + v^2``, so every distance test on lattice points can be done
with exact integers.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Keeps u^2 + uv + v^2 (and differences of two vectors) inside int64.
MAX_COORD = 2**30

SQRT3_2 = math.sqrt(3.0) / 2.0


@dataclass(frozen=True, order=True)
class LatticeVector:
    u: int
    v: int

    def __post_init__(self) -> None:
        if not isinstance(self.u, (int, np.integer)) or not isinstance(self.v, (int, np.integer)):
            raise TypeError(f"lattice coordinates must be integers, got {self.u!r}, {self.v!r}")
        object.__setattr__(self, "u", int(self.u))
        object.__setattr__(self, "v", int(self.v))
        if abs(self.u) > MAX_COORD or abs(self.v) > MAX_COORD:
            raise OverflowError(f"lattice coordinates ({self.u}, {self.v}) exceed +/-{MAX_COORD}")

    @property
    def norm(self) -> int:
        return self.u * self.u + self.u * self.v + self.v * self.v

    def __add__(self, other: LatticeVector) -> LatticeVector:
        return LatticeVector(self.u + other.u, self.v + other.v)

    def __sub__(self, other: LatticeVector) -> LatticeVector:
        return LatticeVector(self.u - other.u, self.v - other.v)

    def __neg__(self) -> LatticeVector:
        return LatticeVector(-self.u, -self.v)

    def scale(self, t: int) -> LatticeVector:
        return LatticeVector(self.u * t, self.v * t)

    def rotate60(self) -> LatticeVector:
        """Counterclockwise rotation by 60 degrees (e1 -> e2, e2 -> e2 - e1)."""
        return LatticeVector(-self.v, self.u + self.v)

    def reflect(self) -> LatticeVector:
        """Mirror in the x axis (e1 -> e1, e2 -> e1 - e2)."""
        return LatticeVector(self.u + self.v, -self.v)

    def symmetries(self) -> list[LatticeVector]:
        """Images under the 12-element point group of the lattice."""
        out = []
        w = self
        for _ in range(6):
            out.append(w)
            out.append(w.reflect())
            w = w.rotate60()
        return out

    def hex_radius(self) -> int:
        """Ring index: number of lattice steps from the origin."""
        return max(abs(self.u), abs(self.v), abs(self.u + self.v))

    def to_cartesian(self, step: float = 1.0) -> tuple[float, float]:
        return to_cartesian(self, step)

    def as_list(self) -> list[int]:
        return [self.u, self.v]


def loeschian_norm(w: LatticeVector | tuple[int, int]) -> int:
    if not isinstance(w, LatticeVector):
        w = LatticeVector(*w)
    return w.norm


def to_cartesian(w: LatticeVector | tuple[int, int], step: float = 1.0) -> tuple[float, float]:
    if step <= 0:
        raise ValueError("step must be positive")
    u, v = (w.u, w.v) if isinstance(w, LatticeVector) else w
    return (step * (u + 0.5 * v), step * v * SQRT3_2)


@dataclass(frozen=True)
class LoeschianTable:
    limit: int
    members: tuple[int, ...]

    def __contains__(self, n: object) -> bool:
        if not isinstance(n, (int, np.integer)):
            return False
        i = bisect_left(self.members, n)
        return i < len(self.members) and self.members[i] == n

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def count(self) -> int:
        return len(self.members)

    def count_in(self, a: int, b: int) -> int:
        return bisect_right(self.members, b) - bisect_left(self.members, a)

    def below(self, n: int) -> int | None:
        """Largest member strictly smaller than ``n``."""
        i = bisect_left(self.members, n)
        return self.members[i - 1] if i > 0 else None

    def above(self, n: int) -> int | None:
        """Smallest member strictly larger than ``n``."""
        i = bisect_right(self.members, n)
        return self.members[i] if i < len(self.members) else None


@lru_cache(maxsize=32)
def loeschian_upto(limit: int) -> LoeschianTable:
    if limit < 0:
        raise ValueError("limit must be non-negative")
    r = math.isqrt(limit) + 1
    u = np.arange(r + 1, dtype=np.int64)
    grid = u[:, None] ** 2 + u[:, None] * u[None, :] + u[None, :] ** 2
    vals = np.unique(grid[grid <= limit])
    return LoeschianTable(limit, tuple(int(x) for x in vals))


def is_loeschian(n: int) -> bool:
    if n < 0:
        return False
    return n in loeschian_upto(_bucket(n))


def loeschian_count_in(a: int, b: int) -> int:
    """Number of Loeschian numbers in the closed range ``[a, b]``."""
    if not 0 <= a <= b:
        raise ValueError("need 0 <= a <= b")
    return loeschian_upto(_bucket(b)).count_in(a, b)


def next_loeschian(n: int) -> int:
    table = loeschian_upto(_bucket(n + 1) * 2)
    nxt = table.above(n)
    assert nxt is not None
    return nxt


def prev_loeschian(n: int) -> int | None:
    return loeschian_upto(_bucket(n)).below(n)


def vectors_with_norm(n: int) -> list[LatticeVector]:
    """All lattice vectors of norm ``n`` (empty when ``n`` is not Loeschian)."""
    r = math.isqrt(n) + 1
    out = []
    for u in range(-2 * r, 2 * r + 1):
        for v in range(-2 * r, 2 * r + 1):
            if u * u + u * v + v * v == n:
                out.append(LatticeVector(u, v))
    return out


def hex_ball(m: int) -> list[LatticeVector]:
    """Lattice points within ``m`` steps of the origin, ordered by (ring, angle)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    pts = [
        LatticeVector(u, v)
        for u in range(-m, m + 1)
        for v in range(-m, m + 1)
        if abs(u + v) <= m
    ]
    pts.sort(key=_ring_angle_key)
    return pts


def _ring_angle_key(w: LatticeVector) -> tuple[int, float]:
    x, y = to_cartesian(w)
    ang = math.atan2(y, x) % (2 * math.pi)
    return (w.hex_radius(), round(ang, 12))


def _bucket(n: int) -> int:
    # Round cache keys up to powers of two so repeated queries share tables.
    return 1 << max(6, int(n).bit_length())
