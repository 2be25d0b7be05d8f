"""Sweep orchestration: solve e-graph instances through the result store and
run the record search over (a, b).

Record search: with ``a`` fixed, step ``b`` down through Loeschian values
until the instance becomes colourable; the last uncolourable ``(a, b)`` is the
record. Then move ``a`` up, pick the largest Loeschian ``b`` keeping
``sqrt(b/a)`` at or below the record, and repeat once an uncolourable
instance turns up again.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .colorsat import SolveOutcome, Status, exact_color, instance_hash, run_external, encode
from .graphs import (BiPlacement, ColoringInstance, EGraphSpec, attach_polychromatic,
                     build_egraph, egraph_clique, precolor_clique)
from .lattice import loeschian_count_in, loeschian_upto, next_loeschian, prev_loeschian
from .store import ResultStore


def default_m(b: int, ratio: float = 1.3) -> int:
    """Smallest multiple of 5 that is at least ``ratio * sqrt(b)``."""
    return max(5, 5 * math.ceil(ratio * math.sqrt(b) / 5 - 1e-12))


def egraph_instance(m: int, a: int, b: int, tri: bool = True, bi_s2: int | None = None,
                    precolor: bool = True) -> ColoringInstance:
    g = build_egraph(EGraphSpec(m, a, b))
    if tri or bi_s2 is not None:
        g = attach_polychromatic(g, tri, BiPlacement(s_squared=bi_s2) if bi_s2 is not None else None)
    if precolor:
        g, _ = precolor_clique(g)
    return g


@dataclass
class SolverSettings:
    command: list[str] | None = None
    timeout: float | None = None
    internal: bool = False
    budget: int | None = 2_000_000


def solve_cached(g: ColoringInstance, K: int, settings: SolverSettings, store: ResultStore | None,
                 force: bool = False) -> tuple[dict, bool]:
    """Solve ``g`` at ``K`` colours unless the store already holds the answer.

    Returns the store row and whether a solver was actually run.
    """
    key = instance_hash(g, K)
    if store is not None and not force and key in store:
        return store.get(key), False
    if settings.internal:
        out: SolveOutcome = exact_color(g, K, budget=settings.budget)
    else:
        out = run_external(encode(g, K), settings.command, settings.timeout)
    row = {"status": out.status.value, "colors": K, "spec": g.params, "n": g.n_expanded,
           "precolored": list(g.precolored), "solver": out.solver, "wall_time": out.wall_time}
    if store is not None:
        store.put(key, row)
    return {"hash": key, **row}, True


def solve_many(tasks: list[tuple[ColoringInstance, int]], settings: SolverSettings,
               store: ResultStore | None, parallelism: int = 1) -> list[dict]:
    """Solve independent instances with a bounded worker pool (order preserved)."""
    if parallelism <= 1 or len(tasks) <= 1:
        return [solve_cached(g, K, settings, store)[0] for g, K in tasks]
    with ThreadPoolExecutor(max_workers=parallelism) as ex:
        futs = [ex.submit(solve_cached, g, K, settings, store) for g, K in tasks]
        try:
            return [f.result()[0] for f in futs]
        except KeyboardInterrupt:
            for f in futs:
                f.cancel()
            raise


@dataclass
class SweepPlan:
    colors: int
    a: int
    b: int
    m: int | None = None  # fixed radius; otherwise chosen from b
    m_ratio: float = 1.3
    max_solves: int = 20
    max_seconds: float | None = None
    settings: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self) -> None:
        for name in ("a", "b"):
            if getattr(self, name) not in loeschian_upto(max(self.a, self.b)):
                raise ValueError(f"{name}={getattr(self, name)} is not a Loeschian number")
        if self.b <= self.a:
            raise ValueError("need b > a")


@dataclass
class FrontierRow:
    k: int
    a: int
    b: int
    d: float
    l: int
    m: int
    q: int
    time: float

    def as_list(self) -> list:
        return [self.k, self.a, self.b, round(self.d, 5), self.l, self.m, self.q, round(self.time, 3)]


FRONTIER_HEADER = ["k", "a", "b", "d", "l", "m", "q", "time"]


@dataclass
class HuntResult:
    frontier: list[FrontierRow]
    probes: list[dict]
    solves: int
    stopped: str


def hunt(plan: SweepPlan, store: ResultStore | None = None) -> HuntResult:
    t_start = time.monotonic()
    K = plan.colors
    probes: list[dict] = []
    frontier: list[FrontierRow] = []
    solves = 0
    stopped = "budget"

    def probe(a: int, b: int) -> str | None:
        nonlocal solves
        m = plan.m or default_m(b, plan.m_ratio)
        g = egraph_instance(m, a, b, tri=True, bi_s2=a)
        cached = store is not None and instance_hash(g, K) in store
        # the budget counts solver runs only; stored answers are replayed for free
        if not cached:
            if solves >= plan.max_solves:
                return None
            if plan.max_seconds is not None and time.monotonic() - t_start > plan.max_seconds:
                return None
        row, ran = solve_cached(g, K, plan.settings, store)
        solves += ran
        probes.append({"a": a, "b": b, "m": m, "status": row["status"], "solved": ran})
        if row["status"] == Status.UNSAT.value:
            q = len(egraph_clique(build_egraph(EGraphSpec(m, a, b)), time_budget=60).vertices)
            frontier.append(FrontierRow(K, a, b, math.sqrt(b / a), loeschian_count_in(a, b), m, q,
                                        float(row.get("wall_time", 0.0))))
        return row["status"]

    a, b = plan.a, plan.b
    try:
        status = probe(a, b)
        # climb until the seed is uncolourable
        while status == Status.SAT.value:
            b = next_loeschian(b)
            status = probe(a, b)
        while status is not None:
            if status == Status.UNSAT.value:
                nb = prev_loeschian(b)
                if nb is None or nb <= a:
                    status = None
                    stopped = "exhausted"
                    break
                b = nb
                status = probe(a, b)
                continue
            # colourable (or unknown): the record is the last uncolourable pair
            rec = frontier[-1] if frontier else None
            if rec is None:
                stopped = "no-record"
                break
            while True:
                a = next_loeschian(a)
                table = loeschian_upto(a * rec.b // rec.a + 1)
                b = max(x for x in table if x * rec.a <= a * rec.b)
                if b <= a:
                    continue
                status = probe(a, b)
                if status != Status.SAT.value:
                    break
    except KeyboardInterrupt:
        stopped = "interrupted"
    return HuntResult(frontier, probes, solves, stopped)
