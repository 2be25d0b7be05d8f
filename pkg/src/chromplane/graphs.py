"""Finite unit-distance-interval graphs: e-graphs on the hexagonal lattice,
w-graphs on concentric circles, poly-chromatic vertices and clique search.

A :class:`ColoringInstance` stores *base* vertices, each with a multiplicity
``t >= 1``. Expanding the instance replaces a vertex of multiplicity ``t`` by
``t`` mutually adjacent copies sharing its neighbourhood; colourers, the CNF
encoder and the clique finder all work on the expanded graph.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .lattice import (LatticeVector, hex_ball, is_loeschian, loeschian_upto,
                      to_cartesian, vectors_with_norm)

CART_TOL = 1e-9
MAX_EGRAPH_EDGES = 20_000_000


@dataclass(frozen=True)
class EGraphSpec:
    m: int
    a: int
    b: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not 1 <= self.a <= self.b:
            raise ValueError("need 1 <= a <= b")
        for name, val in (("a", self.a), ("b", self.b)):
            if not is_loeschian(val):
                raise ValueError(f"{name}={val} is not a Loeschian number")

    @property
    def d(self) -> float:
        return math.sqrt(self.b / self.a)

    @property
    def step(self) -> float:
        """Lattice step after normalising the window to [1, d]."""
        return math.sqrt(1.0 / self.a)

    @property
    def vertex_count(self) -> int:
        return 3 * self.m * self.m + 3 * self.m + 1


@dataclass(frozen=True)
class WGraphSpec:
    p: int
    c: int
    d: float
    radii: tuple[float, ...] | None = None
    offsets: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.p < 3 or self.c < 1 or self.d < 1:
            raise ValueError("need p >= 3, c >= 1, d >= 1")
        radii = self.radii
        if radii is None:
            radii = (1.0,) if self.c == 1 else tuple(
                float(x) for x in np.linspace(1.0, self.d, self.c))
        radii = tuple(float(r) for r in radii)
        if len(radii) != self.c:
            raise ValueError(f"expected {self.c} radii, got {len(radii)}")
        for r in radii:
            if not 1.0 - CART_TOL <= r <= self.d + CART_TOL:
                raise ValueError(f"radius {r} outside [1, {self.d}]")
        offsets = tuple(float(o) for o in (self.offsets or (0.0,) * self.c))
        if len(offsets) != self.c:
            raise ValueError(f"expected {self.c} offsets, got {len(offsets)}")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "offsets", offsets)

    @property
    def resolution(self) -> float:
        return 2.0 * math.pi / self.p


@dataclass(frozen=True)
class BiPlacement:
    """Distance from the tri-chromatic centre to the bi-chromatic vertex.

    Lattice instances use the exact squared distance ``s_squared``;
    Cartesian ones use ``s``."""

    s_squared: int | None = None
    s: float | None = None

    def __post_init__(self) -> None:
        if (self.s_squared is None) == (self.s is None):
            raise ValueError("give exactly one of s_squared or s")


@dataclass(frozen=True)
class Expanded:
    n: int
    edges: np.ndarray  # (E, 2), i < j, lexicographic
    owner: np.ndarray  # base vertex of each copy

    @cached_property
    def adjacency(self) -> list[int]:
        """Neighbour sets as Python int bitsets."""
        adj = [0] * self.n
        for i, j in self.edges.tolist():
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return adj


@dataclass(frozen=True, eq=False)
class ColoringInstance:
    kind: str  # "egraph" | "wgraph" | "custom"
    positions: np.ndarray  # (n, 2): int lattice coords for egraph, floats otherwise
    multiplicity: np.ndarray
    edges: np.ndarray  # base edges (i < j)
    window: tuple[float, float]  # (a, b) squared norms for lattice, (lo, hi) distances otherwise
    precolored: tuple[int, ...] = ()
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions)
        pos = pos.astype(np.int64 if self.lattice else float).reshape(-1, 2)
        mult = np.asarray(self.multiplicity, dtype=np.int64).reshape(-1)
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            edges = np.sort(edges, axis=1)
            edges = np.unique(edges, axis=0)
        for arr in (pos, mult, edges):
            arr.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "multiplicity", mult)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "precolored", tuple(int(i) for i in self.precolored))
        if (mult < 1).any():
            raise ValueError("multiplicities must be >= 1")
        n = len(mult)
        if len(pos) not in (0, n):
            raise ValueError("positions and multiplicity lengths differ")
        if edges.size and (edges[:, 0] == edges[:, 1]).any():
            raise ValueError("self loops are not allowed")
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge index out of range")
        if len(set(self.precolored)) != len(self.precolored):
            raise ValueError("duplicate pre-coloured vertex")

    @property
    def lattice(self) -> bool:
        return self.kind == "egraph"

    @property
    def n(self) -> int:
        return len(self.multiplicity)

    @cached_property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.multiplicity)])

    @property
    def n_expanded(self) -> int:
        return int(self.offsets[-1])

    def copies(self, i: int) -> range:
        return range(int(self.offsets[i]), int(self.offsets[i + 1]))

    @cached_property
    def expanded(self) -> Expanded:
        off, mult = self.offsets, self.multiplicity
        owner = np.repeat(np.arange(self.n), mult)
        chunks = []
        for i, j in self.edges.tolist():
            ci = np.arange(off[i], off[i + 1])
            cj = np.arange(off[j], off[j + 1])
            chunks.append(np.stack(np.meshgrid(ci, cj, indexing="ij"), -1).reshape(-1, 2))
        for i in np.nonzero(mult > 1)[0].tolist():
            ci = np.arange(off[i], off[i + 1])
            a, b = np.triu_indices(len(ci), 1)
            chunks.append(np.column_stack([ci[a], ci[b]]))
        if chunks:
            e = np.vstack(chunks)
            e = np.unique(np.sort(e, axis=1), axis=0)
        else:
            e = np.zeros((0, 2), dtype=np.int64)
        return Expanded(self.n_expanded, e, owner)

    def poly_copies(self) -> list[int]:
        out = []
        for i in np.nonzero(self.multiplicity > 1)[0].tolist():
            out.extend(self.copies(i))
        return out

    def distance_in_window(self, p: Sequence, q: Sequence) -> bool:
        if self.lattice:
            du, dv = int(p[0]) - int(q[0]), int(p[1]) - int(q[1])
            nrm = du * du + du * dv + dv * dv
            return self.window[0] <= nrm <= self.window[1]
        dist = math.hypot(p[0] - q[0], p[1] - q[1])
        return self.window[0] - CART_TOL <= dist <= self.window[1] + CART_TOL

    def neighbours_of_point(self, p: Sequence) -> np.ndarray:
        if self.lattice:
            du = self.positions[:, 0] - int(p[0])
            dv = self.positions[:, 1] - int(p[1])
            nrm = du * du + du * dv + dv * dv
            mask = (nrm >= self.window[0]) & (nrm <= self.window[1])
        else:
            dist = np.hypot(self.positions[:, 0] - p[0], self.positions[:, 1] - p[1])
            mask = (dist >= self.window[0] - CART_TOL) & (dist <= self.window[1] + CART_TOL)
        return np.nonzero(mask)[0]

    def cartesian(self) -> np.ndarray:
        if not self.lattice:
            return self.positions.astype(float)
        step = math.sqrt(1.0 / self.window[0])
        u, v = self.positions[:, 0], self.positions[:, 1]
        return np.column_stack([step * (u + 0.5 * v), step * v * math.sqrt(3.0) / 2.0])

    def with_precolored(self, vertices: Iterable[int]) -> ColoringInstance:
        return replace(self, precolored=tuple(vertices))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "spec": self.params,
            "window": list(self.window),
            "vertices": self.positions.tolist(),
            "multiplicity": self.multiplicity.tolist(),
            "edges": self.edges.tolist(),
            "precolored": list(self.precolored),
        }

    @classmethod
    def from_json(cls, data: dict) -> ColoringInstance:
        mult = data.get("multiplicity")
        verts = data.get("vertices") or []
        if mult is None:
            mult = [1] * (len(verts) if verts else int(data["n"]))
        return cls(
            kind=data.get("kind", "custom"),
            positions=np.asarray(verts, dtype=float if data.get("kind") != "egraph" else np.int64).reshape(-1, 2),
            multiplicity=mult,
            edges=data.get("edges", []),
            window=tuple(data.get("window", (1.0, 1.0))),
            precolored=tuple(data.get("precolored", ())),
            params=dict(data.get("spec", {})),
        )


def custom_instance(n: int, edges: Iterable[tuple[int, int]], multiplicity: Sequence[int] | None = None,
                    precolored: Sequence[int] = ()) -> ColoringInstance:
    """Abstract graph without geometry (used for tests and JSON input)."""
    mult = np.ones(n, dtype=np.int64) if multiplicity is None else multiplicity
    return ColoringInstance("custom", np.zeros((0, 2)), mult, list(edges), (1.0, 1.0), tuple(precolored))


# --------------------------------------------------------------------------
# builders


def _lattice_edges(pos: np.ndarray, a: int, b: int) -> np.ndarray:
    n = len(pos)
    chunks = []
    total = 0
    u, v = pos[:, 0], pos[:, 1]
    for i in range(n - 1):
        du = u[i + 1:] - u[i]
        dv = v[i + 1:] - v[i]
        nrm = du * du + du * dv + dv * dv
        js = np.nonzero((nrm >= a) & (nrm <= b))[0] + i + 1
        if js.size:
            total += js.size
            if total > MAX_EGRAPH_EDGES:
                raise MemoryError(f"e-graph exceeds {MAX_EGRAPH_EDGES} edges")
            chunks.append(np.column_stack([np.full(js.size, i), js]))
    return np.vstack(chunks) if chunks else np.zeros((0, 2), dtype=np.int64)


def build_egraph(spec: EGraphSpec) -> ColoringInstance:
    """Hexagonal ball of radius ``m`` with edges at squared distance in [a, b]."""
    est = spec.vertex_count * (math.pi * (spec.b - spec.a + 2 * math.sqrt(spec.b) + 1)
                               / (math.sqrt(3) / 2)) / 2
    if est > MAX_EGRAPH_EDGES:
        raise MemoryError(f"e-graph m={spec.m} (a,b)=({spec.a},{spec.b}) too large: ~{est:.3g} edges")
    pts = hex_ball(spec.m)
    pos = np.array([p.as_list() for p in pts], dtype=np.int64)
    edges = _lattice_edges(pos, spec.a, spec.b)
    params = {"m": spec.m, "a": spec.a, "b": spec.b}
    return ColoringInstance("egraph", pos, np.ones(len(pos), dtype=np.int64), edges,
                            (spec.a, spec.b), params=params)


def _cartesian_edges(pos: np.ndarray, lo: float, hi: float) -> np.ndarray:
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt((diff**2).sum(-1))
    mask = (dist >= lo - CART_TOL) & (dist <= hi + CART_TOL)
    i, j = np.nonzero(np.triu(mask, 1))
    return np.column_stack([i, j])


def build_wgraph(spec: WGraphSpec) -> ColoringInstance:
    """``p`` evenly spaced points on each of ``c`` circles inside the annulus [1, d]."""
    pts = []
    for r, off in zip(spec.radii, spec.offsets):
        ang = off + 2.0 * math.pi * np.arange(spec.p) / spec.p
        pts.append(np.column_stack([r * np.cos(ang), r * np.sin(ang)]))
    pos = np.vstack(pts)
    edges = _cartesian_edges(pos, 1.0, spec.d)
    params = {"p": spec.p, "c": spec.c, "d": spec.d, "radii": list(spec.radii),
              "offsets": list(spec.offsets)}
    return ColoringInstance("wgraph", pos, np.ones(len(pos), dtype=np.int64), edges,
                            (1.0, spec.d), params=params)


# --------------------------------------------------------------------------
# poly-chromatic vertices


def bi_position(g: ColoringInstance, bi: BiPlacement) -> tuple:
    """Representative position of the bi-chromatic vertex, "above" the centre."""
    if g.lattice:
        if bi.s_squared is None:
            raise ValueError("lattice instances need an integer s_squared")
        s2 = int(bi.s_squared)
        if not g.window[0] <= s2 <= g.window[1]:
            raise ValueError(f"s^2={s2} outside the window [{g.window[0]}, {g.window[1]}]")
        cands = vectors_with_norm(s2)
        if not cands:
            raise ValueError(f"s^2={s2} is not a Loeschian number")

        def key(w: LatticeVector) -> tuple:
            x, _ = to_cartesian(w)
            return (w.v, -round(abs(x), 12), x >= 0)

        w = max(cands, key=key)
        return (w.u, w.v)
    if bi.s is None:
        raise ValueError("Cartesian instances need a real s")
    s = float(bi.s)
    if not g.window[0] - CART_TOL <= s <= g.window[1] + CART_TOL:
        raise ValueError(f"s={s} outside the window [{g.window[0]}, {g.window[1]}]")
    return (0.0, s)


def _set_multiplicity(g: ColoringInstance, pos: tuple, t: int) -> ColoringInstance:
    """Raise the multiplicity of the vertex at ``pos`` to ``t`` (appending it if absent)."""
    if len(g.positions):
        if g.lattice:
            hit = np.nonzero((g.positions[:, 0] == pos[0]) & (g.positions[:, 1] == pos[1]))[0]
        else:
            hit = np.nonzero(np.hypot(g.positions[:, 0] - pos[0], g.positions[:, 1] - pos[1]) < CART_TOL)[0]
    else:
        hit = np.zeros(0, dtype=int)
    if hit.size:
        i = int(hit[0])
        mult = g.multiplicity.copy()
        mult[i] = max(int(mult[i]), t)
        return replace(g, multiplicity=mult, precolored=())
    nbrs = g.neighbours_of_point(pos)
    if nbrs.size == 0:
        raise ValueError(f"position {pos} has no neighbours in the forbidden window")
    new = g.n
    positions = np.vstack([g.positions, np.asarray([pos], dtype=g.positions.dtype)])
    mult = np.append(g.multiplicity, t)
    edges = np.vstack([g.edges.reshape(-1, 2), np.column_stack([nbrs, np.full(nbrs.size, new)])])
    return replace(g, positions=positions, multiplicity=mult, edges=edges, precolored=())


def attach_polychromatic(g: ColoringInstance, tri_at_center: bool = True,
                         bi: BiPlacement | None = None) -> ColoringInstance:
    """Add a tri-chromatic vertex at the origin and optionally a bi-chromatic
    one at distance ``s`` above it."""
    if g.kind == "custom":
        raise ValueError("poly-chromatic vertices need a geometric instance")
    params = dict(g.params)
    out = g
    center = (0, 0) if g.lattice else (0.0, 0.0)
    if tri_at_center:
        if g.neighbours_of_point(center).size == 0:
            raise ValueError("centre has no neighbours in the forbidden window")
        out = _set_multiplicity(out, center, 3)
        params["tri"] = True
    if bi is not None:
        pos = bi_position(g, bi)
        out = _set_multiplicity(out, pos, 2)
        params["bi"] = {"s_squared": bi.s_squared} if g.lattice else {"s": bi.s}
        params["bi_position"] = list(pos)
    return replace(out, params=params)


def default_bi(g: ColoringInstance) -> BiPlacement:
    """``s = sqrt(a)`` for e-graphs, ``s = 1`` for w-graphs."""
    if g.lattice:
        return BiPlacement(s_squared=int(g.window[0]))
    return BiPlacement(s=float(g.window[0]))


def sweep_bichromatic(g_base: ColoringInstance, s_candidates: Sequence | None = None,
                      tri_at_center: bool = True) -> list[tuple[float, ColoringInstance]]:
    """One instance per bi-chromatic distance. For e-graphs the default
    candidates are every Loeschian ``s^2`` in ``[a, b]``."""
    if s_candidates is None:
        if not g_base.lattice:
            raise ValueError("w-graph sweeps need explicit s candidates")
        a, b = int(g_base.window[0]), int(g_base.window[1])
        s_candidates = [n for n in loeschian_upto(b) if n >= a]
    out = []
    for s in s_candidates:
        bi = BiPlacement(s_squared=int(s)) if g_base.lattice else BiPlacement(s=float(s))
        out.append((s, attach_polychromatic(g_base, tri_at_center, bi)))
    return out


# --------------------------------------------------------------------------
# maximum clique


@dataclass(frozen=True)
class CliqueResult:
    vertices: tuple[int, ...]
    exact: bool
    nodes: int = 0

    @property
    def size(self) -> int:
        return len(self.vertices)


class _Budget(Exception):
    pass


def clique_in_bitsets(adj: Sequence[int], candidates: int | None = None,
                      time_budget: float | None = None) -> CliqueResult:
    """Branch and bound with a greedy colouring bound (Tomita-style MCQ).

    ``adj`` holds neighbour bitsets; ``candidates`` restricts the search."""
    n = len(adj)
    if candidates is None:
        candidates = (1 << n) - 1
    cand = [v for v in range(n) if candidates >> v & 1]
    if not cand:
        return CliqueResult((), True)
    # renumber: high degree (inside the candidate set) first
    deg = {v: bin(adj[v] & candidates).count("1") for v in cand}
    order = sorted(cand, key=lambda v: (-deg[v], v))
    pos = {v: i for i, v in enumerate(order)}
    local = []
    for v in order:
        bits = 0
        nb = adj[v] & candidates
        while nb:
            low = nb & -nb
            bits |= 1 << pos[low.bit_length() - 1]
            nb ^= low
        local.append(bits)

    deadline = None if time_budget is None else time.monotonic() + time_budget
    best: list[int] = []
    nodes = 0

    def color_sort(R: int) -> tuple[list[int], list[int]]:
        verts, cols = [], []
        k = 0
        Q = R
        while Q:
            k += 1
            Qk = Q
            while Qk:
                low = Qk & -Qk
                v = low.bit_length() - 1
                Qk &= ~local[v]
                Qk ^= low
                Q ^= low
                verts.append(v)
                cols.append(k)
        return verts, cols

    def expand(R: int, C: list[int]) -> None:
        nonlocal best, nodes
        nodes += 1
        if deadline is not None and nodes % 256 == 0 and time.monotonic() > deadline:
            raise _Budget
        verts, cols = color_sort(R)
        for idx in range(len(verts) - 1, -1, -1):
            if len(C) + cols[idx] <= len(best):
                return
            v = verts[idx]
            C.append(v)
            NR = R & local[v]
            if NR:
                expand(NR, C)
            elif len(C) > len(best):
                best = C.copy()
            C.pop()
            R &= ~(1 << v)

    exact = True
    try:
        expand((1 << len(order)) - 1, [])
    except _Budget:
        exact = False
    return CliqueResult(tuple(sorted(order[v] for v in best)), exact, nodes)


def max_clique(g: ColoringInstance, time_budget: float | None = None) -> CliqueResult:
    """Maximum clique of the expanded graph (expanded vertex indices)."""
    return clique_in_bitsets(g.expanded.adjacency, time_budget=time_budget)


def egraph_clique(g: ColoringInstance, time_budget: float | None = None) -> CliqueResult:
    """Maximum clique of a plain e-graph, searched around the centre.

    When the inscribed disk of the ball (radius ``m*sqrt(3)/2`` lattice
    steps) reaches ``sqrt(b)``, any clique can be translated so that one of
    its vertices sits at the centre without leaving the ball, so the centre's
    neighbourhood holds a maximum clique. Otherwise the whole graph is searched.
    """
    m = g.params.get("m")
    if not g.lattice or m is None or (g.multiplicity > 1).any() or 3 * m * m < 4 * g.window[1]:
        return max_clique(g, time_budget)
    centre = int(np.nonzero((g.positions[:, 0] == 0) & (g.positions[:, 1] == 0))[0][0])
    adj = g.expanded.adjacency
    res = clique_in_bitsets(adj, adj[centre], time_budget)
    return CliqueResult(tuple(sorted((centre,) + res.vertices)), res.exact, res.nodes)


def is_clique(adj: Sequence[int], vertices: Iterable[int]) -> bool:
    vs = list(vertices)
    return all(adj[u] >> v & 1 for i, u in enumerate(vs) for v in vs[i + 1:])


def precolor_clique(g: ColoringInstance, time_budget: float | None = None) -> tuple[ColoringInstance, CliqueResult]:
    """Choose the pre-coloured clique.

    The poly-chromatic copies come first when they are pairwise adjacent; the
    clique is then extended by a maximum clique of their common neighbourhood.
    Without poly-chromatic vertices a maximum clique of the whole graph is used.
    """
    adj = g.expanded.adjacency
    base = g.poly_copies()
    if base and not is_clique(adj, base):
        # bi vertex outside the window of the centre: keep the largest copy group
        groups = [list(g.copies(i)) for i in np.nonzero(g.multiplicity > 1)[0].tolist()]
        base = max(groups, key=len)
    if not base:
        res = max_clique(g, time_budget)
        return g.with_precolored(res.vertices), res
    common = (1 << g.n_expanded) - 1
    for v in base:
        common &= adj[v]
    res = clique_in_bitsets(adj, common, time_budget)
    chosen = tuple(base) + res.vertices
    return g.with_precolored(chosen), CliqueResult(chosen, res.exact, res.nodes)
