"""Colourings of the plane and of annuli by tiles (lower bounds on d).

Three constructions live here:

* lattice-sublattice colourings: one hexagonal tile per lattice cell, colour
  classes are the cosets of an index-``k`` sublattice;
* radial colourings of the annulus ``1 <= r <= d`` by straight-edged sectors;
* a verifier for arbitrary periodic or annulus tilings given as polygons.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from . import geometry as geo
from .geometry import Polygon
from .lattice import LatticeVector, is_loeschian, to_cartesian, vectors_with_norm

HEX_STEP = math.sqrt(3.0) / 2.0  # centre spacing of side-1/2 hexagons
AREA_RTOL = 1e-6


class TilingError(ValueError):
    def __init__(self, message: str, tiles: Sequence = ()) -> None:
        super().__init__(message)
        self.tiles = list(tiles)


# --------------------------------------------------------------------------
# tiling specs and verification


@dataclass(frozen=True)
class PeriodicRegion:
    basis: tuple[tuple[float, float], tuple[float, float]]

    @property
    def area(self) -> float:
        (a, b), (c, d) = self.basis
        return abs(a * d - b * c)

    def shift(self, i: int, j: int) -> tuple[float, float]:
        (a, b), (c, d) = self.basis
        return (i * a + j * c, i * b + j * d)

    def to_json(self) -> dict:
        return {"type": "periodic", "basis": [list(v) for v in self.basis]}


@dataclass(frozen=True)
class AnnulusRegion:
    inner: float
    outer: float

    @property
    def area(self) -> float:
        return math.pi * (self.outer**2 - self.inner**2)

    def to_json(self) -> dict:
        return {"type": "annulus", "inner": self.inner, "outer": self.outer}


@dataclass(frozen=True)
class TilingSpec:
    region: PeriodicRegion | AnnulusRegion
    tiles: tuple[tuple[Polygon, int], ...]
    k: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "tiles", tuple((p, int(c)) for p, c in self.tiles))
        colors = {c for _, c in self.tiles}
        if not colors <= set(range(self.k)):
            raise TilingError(f"tile colours {sorted(colors)} outside 0..{self.k - 1}")

    def scaled(self, t: float) -> TilingSpec:
        if isinstance(self.region, PeriodicRegion):
            region = PeriodicRegion(tuple((x * t, y * t) for x, y in self.region.basis))
        else:
            region = AnnulusRegion(self.region.inner * t, self.region.outer * t)
        return TilingSpec(region, tuple((p.scale(t), c) for p, c in self.tiles), self.k)

    def to_json(self) -> dict:
        tiles = []
        for p, c in self.tiles:
            item = {"color": c, **p.to_json()}
            tiles.append(item)
        return {"region": self.region.to_json(), "k": self.k, "tiles": tiles}

    @classmethod
    def from_json(cls, data: dict) -> TilingSpec:
        reg = data["region"]
        if reg["type"] == "periodic":
            region = PeriodicRegion(tuple(tuple(map(float, v)) for v in reg["basis"]))
        elif reg["type"] == "annulus":
            region = AnnulusRegion(float(reg.get("inner", 1.0)), float(reg["outer"]))
        else:
            raise TilingError(f"unknown region type {reg['type']!r}")
        tiles = tuple((Polygon.from_json(t), int(t["color"])) for t in data["tiles"])
        return cls(region, tiles, int(data["k"]))


@dataclass
class TilingReport:
    max_width: float
    min_same_color_gap: float
    violations: list[dict] = field(default_factory=list)
    tolerance: float = geo.EPS
    closest_pair: tuple | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def ratio(self) -> float:
        """Gap measured in units of the widest tile."""
        return self.min_same_color_gap / self.max_width

    def to_json(self) -> dict:
        return {"max_width": self.max_width, "min_same_color_gap": self.min_same_color_gap,
                "ratio": self.ratio, "violations": self.violations, "tolerance": self.tolerance,
                "closest_pair": list(self.closest_pair) if self.closest_pair else None}


def _bbox_gap(b1: tuple, b2: tuple) -> float:
    dx = max(b1[0] - b2[2], b2[0] - b1[2], 0.0)
    dy = max(b1[1] - b2[3], b2[1] - b1[3], 0.0)
    return math.hypot(dx, dy)


def verify_tiling(spec: TilingSpec, shell: int = 2, width_limit: float = 1.0) -> TilingReport:
    """Widest tile and smallest distance between two tiles of the same colour.

    Periodic regions are checked against every translate within ``shell``
    periods. Raises :class:`TilingError` when the tiles overlap or fail to
    cover the fundamental domain / annulus.
    """
    tiles = list(spec.tiles)
    if not tiles:
        raise TilingError("no tiles")
    total = sum(p.area for p, _ in tiles)
    region_area = spec.region.area
    if abs(total - region_area) > AREA_RTOL * region_area:
        raise TilingError(f"tile area {total:.9g} differs from region area {region_area:.9g}")

    periodic = isinstance(spec.region, PeriodicRegion)
    shifts = [(0, 0)]
    if periodic:
        shifts = [(i, j) for i in range(-shell, shell + 1) for j in range(-shell, shell + 1)]
    else:
        outer, inner = spec.region.outer, spec.region.inner
        tol = 1e-9 * max(1.0, outer)
        for idx, (p, _) in enumerate(tiles):
            r = np.hypot(*np.asarray(p.vertices).T)
            if r.max() > outer + tol or r.min() < inner - tol:
                raise TilingError(f"tile {idx} leaves the annulus", [idx])

    widths = [geo.diameter(p) for p, _ in tiles]
    violations = [{"kind": "width", "tile": i, "width": w}
                  for i, w in enumerate(widths) if w > width_limit + geo.EPS]

    placed = []  # (tile index, shift, polygon, bbox)
    for i, (p, _) in enumerate(tiles):
        for s in shifts:
            dx, dy = spec.region.shift(*s) if periodic else (0.0, 0.0)
            q = p.translate(dx, dy) if (dx or dy) else p
            placed.append((i, s, q, q.shape.bounds))

    best = math.inf
    closest = None
    for i, (p, ci) in enumerate(tiles):
        bi = p.shape.bounds
        for j, s, q, bq in placed:
            if (j, s) == (i, (0, 0)):
                continue
            if not periodic and j < i:
                continue
            cj = tiles[j][1]
            near = _bbox_gap(bi, bq)
            if near <= 1e-6:
                if geo.overlap_area(p, q) > geo._overlap_tol(p, q):
                    raise TilingError(f"tiles {i} and {j}{s} overlap", [i, j])
            if ci != cj or near >= best:
                continue
            d = geo.min_distance(p, q, check_overlap=False)
            if d < best:
                best, closest = d, (i, j, s)
    if closest is None:
        best = math.inf
    elif best <= geo.EPS:
        violations.append({"kind": "touch", "tiles": [closest[0], closest[1]], "shift": list(closest[2])})
    if not periodic and best < spec.region.outer - 1e-9:
        violations.append({"kind": "gap", "gap": best, "outer": spec.region.outer})
    return TilingReport(max(widths), best, violations, geo.EPS, closest)


# --------------------------------------------------------------------------
# lattice-sublattice colourings


def hnf(rows: Sequence[Sequence[int]]) -> tuple[tuple[int, int], tuple[int, int]]:
    """Hermite normal form ``((a, c), (0, d))`` with ``0 <= c < d`` of a rank-2 row lattice."""
    (x1, y1), (x2, y2) = rows
    g, s, t = _egcd(x1, x2)
    if g == 0:
        raise ValueError("rows do not span a rank-2 lattice")
    top = (s * x1 + t * x2, s * y1 + t * y2)
    bottom = (x2 // g * x1 - x1 // g * x2, x2 // g * y1 - x1 // g * y2)
    d = abs(bottom[1])
    if d == 0:
        raise ValueError("rows do not span a rank-2 lattice")
    a, c = top
    if a < 0:
        a, c = -a, -c
    return ((a, c % d), (0, d))


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, s, t = _egcd(b, a % b)
    return (g, t, s - (a // b) * t)


def sublattices(k: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """All index-``k`` sublattices of Z^2 in Hermite normal form."""
    out = []
    for a in range(1, k + 1):
        if k % a == 0:
            d = k // a
            out.extend(((a, c), (0, d)) for c in range(d))
    return out


def sublattice_classes(k: int) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Index-``k`` sublattices up to relabelling the edges of a centrally
    symmetric hexagon (cyclic shift and reversal of the three edge vectors)."""
    rot = lambda r: (-r[1], r[0] + r[1])  # t1 -> t2, t2 -> t2 - t1
    swap = lambda r: (r[1], r[0])
    seen = set()
    reps = []
    for h in sublattices(k):
        if h in seen:
            continue
        reps.append(h)
        orbit = [h]
        while orbit:
            cur = orbit.pop()
            for f in (rot, swap):
                nxt = hnf([f(cur[0]), f(cur[1])])
                if nxt not in seen:
                    seen.add(nxt)
                    orbit.append(nxt)
        seen.add(h)
    return reps


def coset_representatives(h: tuple[tuple[int, int], tuple[int, int]]) -> list[tuple[int, int]]:
    (a, _), (_, d) = h
    return [(x, y) for x in range(a) for y in range(d)]


@dataclass(frozen=True)
class SublatticeColoring:
    k: int
    tile: Polygon
    tile_lattice: tuple[tuple[float, float], tuple[float, float]]
    color_sublattice: tuple[tuple[int, int], tuple[int, int]]  # integer rows over tile_lattice
    d: float

    def period_basis(self) -> tuple[tuple[float, float], tuple[float, float]]:
        T = np.asarray(self.tile_lattice)
        W = np.asarray(self.color_sublattice, dtype=float) @ T
        b1, b2 = _reduce(W[0], W[1])  # short basis keeps nearest translates in the shell
        return (tuple(map(float, b1)), tuple(map(float, b2)))

    def tiling_spec(self) -> TilingSpec:
        h = hnf(self.color_sublattice)
        T = np.asarray(self.tile_lattice)
        tiles = []
        for c, (x, y) in enumerate(coset_representatives(h)):
            dx, dy = x * T[0] + y * T[1]
            tiles.append((self.tile.translate(float(dx), float(dy)), c))
        if len(tiles) != self.k:
            raise AssertionError("sublattice index differs from k")
        return TilingSpec(PeriodicRegion(self.period_basis()), tuple(tiles), self.k)

    def to_json(self) -> dict:
        return {"k": self.k, "d": self.d, "tile": self.tile.to_json(),
                "tile_lattice": [list(v) for v in self.tile_lattice],
                "color_sublattice": [list(v) for v in self.color_sublattice]}


def regular_hexagon() -> Polygon:
    """Pointy-top regular hexagon of side 1/2 (width 1) centred at the origin."""
    return geo.regular_polygon(6, 0.5, math.pi / 6)


def _regular_for_generator(g: LatticeVector, hexagon: Polygon) -> float:
    wg = g.rotate60()
    best = math.inf
    for x in range(-2, 3):
        for y in range(-2, 3):
            if (x, y) == (0, 0) or x * x + x * y + y * y > 4:
                continue
            w = g.scale(x) + wg.scale(y)
            dx, dy = to_cartesian(w, HEX_STEP)
            best = min(best, geo.min_distance(hexagon, hexagon.translate(dx, dy)))
    return best


def regular_sublattice_colorings(k: int) -> list[SublatticeColoring]:
    """One colouring per inequivalent generator ``g`` of norm ``k``."""
    if k < 1 or not is_loeschian(k):
        raise ValueError(f"k={k} is not a positive Loeschian number")
    hexagon = regular_hexagon()
    step1 = to_cartesian(LatticeVector(1, 0), HEX_STEP)
    step2 = to_cartesian(LatticeVector(0, 1), HEX_STEP)
    out = []
    for g in vectors_with_norm(k):
        if not (g.u > 0 and g.v >= 0):
            continue
        wg = g.rotate60()
        d = _regular_for_generator(g, hexagon)
        out.append(SublatticeColoring(k, hexagon, (step1, step2), ((g.u, g.v), (wg.u, wg.v)), d))
    return out


def regular_sublattice_distance(k: int) -> float:
    """Best same-colour gap for regular hexagons coloured by a hexagonal index-k sublattice."""
    return max(c.d for c in regular_sublattice_colorings(k))


def _hexagon_from_params(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = np.abs(x[:3]) + 1e-12
    p3 = math.pi * expit(x[3])
    p2 = p3 * expit(x[4])
    ph = np.array([0.0, p2, p3])
    e = np.stack([r * np.cos(ph), r * np.sin(ph)], 1)
    verts = [-(e.sum(0)) / 2]
    for ed in (e[0], e[1], e[2], -e[0], -e[1]):
        verts.append(verts[-1] + ed)
    return np.array(verts), e


def _polygon_diameter(V: np.ndarray) -> float:
    diff = V[:, None, :] - V[None, :, :]
    return float(np.sqrt((diff**2).sum(-1)).max())


def _reduce(b1: np.ndarray, b2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    for _ in range(100):
        if b1 @ b1 > b2 @ b2:
            b1, b2 = b2, b1
        mu = round(float(b1 @ b2) / float(b1 @ b1))
        if mu == 0:
            break
        b2 = b2 - mu * b1
    return b1, b2


def lattice_gap(V: np.ndarray, W: np.ndarray) -> float:
    """min over nonzero ``w`` in the row lattice ``W`` of dist(T, T + w), where
    ``T`` is the convex centrally symmetric polygon ``V`` centred at the origin.

    Uses dist(T, T + w) = dist(w, T - T) = dist(w, 2T)."""
    b1, b2 = _reduce(W[0].astype(float), W[1].astype(float))
    n1, n2 = math.sqrt(b1 @ b1), math.sqrt(b2 @ b2)
    if n1 < 1e-12:
        return 0.0
    rad = float(np.sqrt((V**2).sum(1)).max())
    reach = n1 + 2 * rad  # any w farther than this is beaten by b1
    sin_t = max(abs(b1[0] * b2[1] - b1[1] * b2[0]) / (n1 * n2), 1e-12)
    nx = int(math.ceil(reach / (n1 * sin_t))) + 1
    ny = int(math.ceil(reach / (n2 * sin_t))) + 1
    X, Y = np.meshgrid(np.arange(-nx, nx + 1), np.arange(-ny, ny + 1))
    X, Y = X.ravel(), Y.ravel()
    keep = (X != 0) | (Y != 0)
    pts = np.outer(X[keep], b1) + np.outer(Y[keep], b2)
    P = 2 * V
    A, E = P, np.roll(P, -1, 0) - P
    rel = pts[:, None, :] - A[None]
    t = np.clip((rel * E[None]).sum(-1) / (E * E).sum(-1)[None], 0.0, 1.0)
    dseg = np.linalg.norm(rel - t[..., None] * E[None], axis=-1).min(1)
    cross = E[None, :, 0] * rel[..., 1] - E[None, :, 1] * rel[..., 0]
    inside = (cross >= -1e-15).all(1)
    return float(np.where(inside, 0.0, dseg).min())


def _shape_gap(x: np.ndarray, h) -> float:
    V, e = _hexagon_from_params(x)
    diam = _polygon_diameter(V)
    if not math.isfinite(diam) or diam < 1e-12:
        return 0.0
    T = np.array([e[0] + e[1], e[1] + e[2]])
    if abs(T[0, 0] * T[1, 1] - T[0, 1] * T[1, 0]) / diam**2 < 1e-6:
        return 0.0
    V, T = V / diam, T / diam
    return lattice_gap(V, np.asarray(h, dtype=float) @ T)


def _coloring_from_params(k: int, x: np.ndarray, h) -> SublatticeColoring:
    V, e = _hexagon_from_params(x)
    diam = _polygon_diameter(V)
    V, e = V / diam, e / diam
    T = ((float(e[0, 0] + e[1, 0]), float(e[0, 1] + e[1, 1])),
         (float(e[1, 0] + e[2, 0]), float(e[1, 1] + e[2, 1])))
    d = lattice_gap(V, np.asarray(h, dtype=float) @ np.asarray(T))
    return SublatticeColoring(k, Polygon(tuple(map(tuple, V))), T, h, d)


def general_sublattice_distance(k: int, restarts: int = 64, seed: int | None = 0,
                                rounds: int = 2, maxiter: int = 1500,
                                verify: bool = True) -> tuple[float, SublatticeColoring]:
    """Best gap over centrally symmetric hexagon tiles and index-k sublattices.

    Restarts cycle through the sublattice classes; each one runs Nelder-Mead
    on the five shape parameters from a random start. For Loeschian ``k`` the
    regular construction is included as a candidate. The winner is re-checked
    by :func:`verify_tiling`.
    """
    if k < 1:
        raise ValueError("k must be positive")
    rng = np.random.default_rng(seed)
    classes = sublattice_classes(k)
    best_d, best = -1.0, None
    if is_loeschian(k):
        reg = max(regular_sublattice_colorings(k), key=lambda c: c.d)
        best_d, best = reg.d, reg
    opts = {"maxiter": maxiter, "xatol": 1e-10, "fatol": 1e-12}
    order = rng.permutation(len(classes))
    for r in range(restarts):
        h = classes[order[r % len(classes)]]
        x0 = np.concatenate([rng.uniform(0.3, 1.0, 3), rng.normal(0.0, 1.0, 2)])
        f = lambda x: -_shape_gap(x, h)
        res = minimize(f, x0, method="Nelder-Mead", options=opts)
        for _ in range(rounds - 1):
            res = minimize(f, res.x, method="Nelder-Mead", options=opts)
        if -res.fun > best_d + 1e-12:
            best_d, best = float(-res.fun), _coloring_from_params(k, res.x, h)
    if verify and best is not None and best.d > 0:
        report = verify_tiling(best.tiling_spec())
        if abs(report.min_same_color_gap - best.d) > 1e-6 or report.max_width > 1 + 1e-9:
            raise AssertionError(f"optimizer result failed verification: {report.to_json()}")
    return best.d, best


# --------------------------------------------------------------------------
# classification of k


CLASS_NAMES = ("L+", "L-", "Lbar+", "Lbar-")


def classify_k(k: int, table: dict[int, float], non_hexagonal: dict[int, float] | None = None,
               rtol: float = 5e-6) -> tuple[str, ...]:
    """Class labels of ``k``: Loeschian or not, and whether ``table[k]`` beats
    every ``table[j]``, ``j < k`` (values compared with relative tolerance).

    For Loeschian ``k``, ``non_hexagonal`` may hold the best gap reached with a
    sublattice that is not hexagonal; if that tiling beats all predecessors as
    well, ``k`` gets both labels.
    """
    prev = max((table[j] for j in table if j < k), default=0.0)
    beats = lambda d: d > prev + rtol * max(1.0, abs(d))
    up = beats(table[k])
    if not is_loeschian(k):
        return ("Lbar+" if up else "Lbar-",)
    if up and non_hexagonal and k in non_hexagonal and beats(non_hexagonal[k]):
        return ("L+", "Lbar+")
    return ("L+" if up else "L-",)


# --------------------------------------------------------------------------
# radial colourings of the annulus


@dataclass(frozen=True)
class RadialColoring:
    k: int
    n: int
    angles: tuple[float, ...]
    colors: tuple[int, ...]
    d: float
    width_limited: bool = False

    def sectors(self, phase: float = 0.0) -> list[tuple[Polygon, int]]:
        out = []
        t = phase
        for th, c in zip(self.angles, self.colors):
            out.append((geo.annular_sector(1.0, self.d, t, t + th), c))
            t += th
        return out

    def tiling_spec(self, phase: float = 0.0) -> TilingSpec:
        return TilingSpec(AnnulusRegion(1.0, self.d), tuple(self.sectors(phase)), self.k)

    def to_json(self) -> dict:
        return {"k": self.k, "n": self.n, "d": self.d, "angles": list(self.angles),
                "colors": list(self.colors), "width_limited": self.width_limited}


def sector_width_limit(theta: float) -> float:
    """Largest outer radius ``d`` for which the sector of angle ``theta`` has width <= 1."""
    if theta >= math.pi / 2:
        return 1.0 if theta < math.pi else 0.0
    return min(1.0 / (2.0 * math.sin(theta / 2.0)), 2.0 * math.cos(theta))


def sector_width(theta: float, d: float) -> float:
    return max(2.0 * d * math.sin(min(theta, math.pi) / 2.0),
               math.sqrt(max(0.0, 1.0 + d * d - 2.0 * d * math.cos(theta))), d - 1.0)


def _same_color_separations(angles: np.ndarray, k: int) -> np.ndarray:
    """Angular gap between sector ``i`` and sector ``i + k`` (the k-1 sectors in between)."""
    n = len(angles)
    ext = np.concatenate([angles, angles])
    return np.array([ext[i + 1:i + k].sum() for i in range(n)])


def radial_d(angles: Sequence[float], k: int) -> tuple[float, bool]:
    """Exact ``d`` of a cyclic radial colouring and whether the width bound is the active one."""
    angles = np.asarray(angles, dtype=float)
    width = min(sector_width_limit(t) for t in angles)
    if k >= len(angles):
        return width, True
    seps = _same_color_separations(angles, k)
    gap = min(2.0 * math.sin(min(s, math.pi) / 2.0) for s in seps)
    return min(width, gap), width <= gap


def _refine_angles(angles: np.ndarray, k: int) -> np.ndarray:
    n = len(angles)
    idx = [[(i + j) % n for j in range(1, k)] for i in range(n)]

    def cons(z):
        th, d = z[:-1], z[-1]
        out = [1.0 - 2.0 * d * np.sin(th / 2.0), 2.0 * np.cos(th) - d]
        if k < n:
            seps = np.array([th[ix].sum() for ix in idx])
            out.append(2.0 * np.sin(np.minimum(seps, math.pi) / 2.0) - d)
        return np.concatenate(out)

    z0 = np.append(angles, radial_d(angles, k)[0])
    res = minimize(lambda z: -z[-1], z0, method="SLSQP",
                   constraints=[{"type": "ineq", "fun": cons},
                                {"type": "eq", "fun": lambda z: z[:-1].sum() - 2 * math.pi}],
                   bounds=[(1e-6, math.pi / 2)] * n + [(1.0, 3.0)],
                   options={"maxiter": 300, "ftol": 1e-14})
    th = np.clip(res.x[:-1], 1e-9, None)
    return th * (2 * math.pi / th.sum())


def radial_optimum(k: int, n_max: int | None = None, refine: bool = True) -> tuple[float, RadialColoring]:
    """Best cyclic radial colouring with ``n = k, 2k, ... <= n_max`` sectors."""
    if k < 2:
        raise ValueError("k must be at least 2")
    n_max = 6 * k if n_max is None else n_max
    if n_max < k:
        raise ValueError("n_max must be at least k")
    best: RadialColoring | None = None
    for n in range(k, n_max + 1, k):
        cands = [np.full(n, 2 * math.pi / n)]
        if refine and n > k:
            cands.append(_refine_angles(cands[0], k))
        for th in cands:
            d, wl = radial_d(th, k)
            if best is None or d > best.d + 1e-12:
                best = RadialColoring(k, n, tuple(float(t) for t in th),
                                      tuple(i % k for i in range(n)), d, wl)
    return best.d, best


# --------------------------------------------------------------------------
# bundled example tilings


def bundled_tiling(k: int) -> TilingSpec:
    """Regular-hexagon sublattice tilings shipped with the package (k in {7, 9, 12})."""
    path = resources.files("chromplane") / "data" / f"tiling_k{k}.json"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled tiling for k={k}")
    return TilingSpec.from_json(json.loads(path.read_text()))


def regular_tiling_spec(k: int) -> TilingSpec:
    return max(regular_sublattice_colorings(k), key=lambda c: c.d).tiling_spec()


def write_bundled(directory, ks: Iterable[int] = (7, 9, 12)) -> None:
    from pathlib import Path
    for k in ks:
        spec = regular_tiling_spec(k)
        Path(directory, f"tiling_k{k}.json").write_text(json.dumps(spec.to_json(), indent=1) + "\n")

