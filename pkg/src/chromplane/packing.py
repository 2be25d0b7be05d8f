"""Narrowest q-cliques: q points with pairwise distances >= 1 and the
smallest possible largest distance (the clique width)."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.distance import pdist

FEAS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PackingResult:
    q: int
    points: np.ndarray
    width: float
    min_dist: float
    seed: int | None = None
    restarts: int = 0

    @classmethod
    def from_points(cls, points, seed=None, restarts=0) -> PackingResult:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        mn, w = verify_packing(pts)
        return cls(len(pts), pts, w, mn, seed, restarts)

    @property
    def feasible(self) -> bool:
        return self.min_dist >= 1.0 - FEAS_TOL

    def to_json(self) -> dict:
        return {"q": self.q, "width": self.width, "min_dist": self.min_dist,
                "points": self.points.tolist(), "seed": self.seed, "restarts": self.restarts}

    @classmethod
    def from_json(cls, data: dict) -> PackingResult:
        # width and min_dist are always recomputed from the points
        res = cls.from_points(data["points"], data.get("seed"), data.get("restarts", 0))
        if "q" in data and int(data["q"]) != res.q:
            raise ValueError(f"q={data['q']} but {res.q} points given")
        return res


def verify_packing(points) -> tuple[float, float]:
    """(smallest, largest) pairwise distance."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) < 2:
        raise ValueError("need at least two points")
    d = pdist(pts)
    return float(d.min()), float(d.max())


def clique_chi_bound(q: int) -> int:
    """Colours forced by a q-clique together with a tri- and a bi-chromatic point."""
    if q < 1:
        raise ValueError("q must be positive")
    return q + 3


def refine(P: np.ndarray, maxiter: int = 100) -> np.ndarray:
    """Local solve of: minimise t subject to 1 <= |p_i - p_j|^2 <= t (SLSQP)."""
    q = len(P)
    I, J = np.triu_indices(q, 1)
    m = len(I)
    rows = np.arange(m)
    x0 = np.concatenate([P.ravel(), [pdist(P).max() ** 2]])

    def cons(x):
        p = x[:-1].reshape(q, 2)
        D = p[I] - p[J]
        s = (D * D).sum(1)
        return np.concatenate([x[-1] - s, s - 1.0])

    def jac(x):
        p = x[:-1].reshape(q, 2)
        D = p[I] - p[J]
        out = np.zeros((2 * m, 2 * q + 1))
        for c in range(2):
            out[rows, 2 * I + c] = -2 * D[:, c]
            out[rows, 2 * J + c] = 2 * D[:, c]
            out[m + rows, 2 * I + c] = 2 * D[:, c]
            out[m + rows, 2 * J + c] = -2 * D[:, c]
        out[:m, -1] = 1.0
        return out

    grad = np.zeros(2 * q + 1)
    grad[-1] = 1.0
    res = minimize(lambda x: x[-1], x0, jac=lambda x: grad, method="SLSQP",
                   constraints=[{"type": "ineq", "fun": cons, "jac": jac}],
                   options={"maxiter": maxiter, "ftol": 1e-12})
    out = res.x[:-1].reshape(q, 2)
    return out if np.all(np.isfinite(out)) else P


def _feasible(P: np.ndarray) -> tuple[np.ndarray, float]:
    """Rescale slightly infeasible configurations so every distance is >= 1."""
    mn = pdist(P).min()
    if mn <= 0:
        return P, math.inf
    if mn < 1.0:
        P = P / mn
    return P, float(pdist(P).max())


def _one_restart(q: int, seq: np.random.SeedSequence, iterations: tuple[int, int],
                 cycles: int) -> tuple[float, np.ndarray]:
    rng = np.random.default_rng(seq)
    P = rng.uniform(-1.0, 1.0, (q, 2)) * math.sqrt(q)
    P, w = _feasible(refine(P))
    best_w, best_P = w, P
    for _ in range(cycles):
        for strategy, count in enumerate(iterations):
            for _ in range(count):
                Q = best_P.copy()
                if strategy == 0:
                    # large jumps for a few points
                    n_move = int(rng.integers(1, max(2, q // 3) + 1))
                    idx = rng.choice(q, n_move, replace=False)
                    Q[idx] += rng.uniform(-2.0, 2.0, (n_move, 2))
                else:
                    # small shake of every point
                    Q += rng.uniform(-0.05, 0.05, Q.shape)
                Q, w = _feasible(refine(Q, 60))
                if w < best_w - 1e-12:
                    best_w, best_P = w, Q
    return best_w, best_P


def pack(q: int, restarts: int = 16, seed: int | None = 0, iterations: tuple[int, int] = (400, 400),
         cycles: int = 3, workers: int = 1) -> PackingResult:
    """Best of ``restarts`` independent runs of the two-strategy search."""
    if q < 2:
        raise ValueError("q must be at least 2")
    if restarts < 1:
        raise ValueError("restarts must be positive")
    seqs = np.random.SeedSequence(seed).spawn(restarts)
    args = [(q, s, tuple(iterations), cycles) for s in seqs]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            runs = list(ex.map(_one_restart, *zip(*args)))
    else:
        runs = [_one_restart(*a) for a in args]
    best = min(runs, key=lambda r: r[0])
    P = best[1] - best[1].mean(0)
    return PackingResult.from_points(P, seed, restarts)


def table_csv(results: list[PackingResult], per_row: int = 10) -> str:
    """Rows of ``per_row`` widths, like a q-indexed table (row offset, +1..+per_row)."""
    by_q = {r.q: r.width for r in results}
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["q"] + [f"+{i}" for i in range(1, per_row + 1)])
    top = max(by_q) if by_q else 0
    for base in range(0, top, per_row):
        row = [f"+{base}"]
        for i in range(1, per_row + 1):
            q = base + i
            row.append("0.00000" if q == 1 else (f"{by_q[q]:.5f}" if q in by_q else ""))
        w.writerow(row)
    return buf.getvalue()
