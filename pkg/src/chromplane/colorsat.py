"""K-colourability: DIMACS encoding, an external solver driver, an internal
exact colourer and colouring verification.

Variable ``i*K + j + 1`` means "expanded vertex ``i`` has colour ``j``".
At-most-one clauses are left out: any model of the relaxed formula can be
decoded to a proper colouring by taking one true colour per vertex.
"""

from __future__ import annotations

import enum
import hashlib
import json
import os
import shlex
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from typing import Sequence

from .graphs import ColoringInstance

DEFAULT_CAP = 80
DEFAULT_SOLVER = [sys.executable, "-m", "chromplane.satshim"]


class SolverError(RuntimeError):
    def __init__(self, message: str, output: str = "") -> None:
        super().__init__(message)
        self.output = output


class Status(str, enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass
class SolveOutcome:
    status: Status
    model: list[int] | None = None
    wall_time: float = 0.0
    solver: str = ""
    detail: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if (self.model is not None) != (self.status is Status.SAT):
            raise ValueError("a model is present exactly for SAT outcomes")

    def to_json(self) -> dict:
        return {"status": self.status.value, "model": self.model, "solver": self.solver,
                "detail": self.detail}


@dataclass(frozen=True)
class Violation:
    kind: str  # "edge" | "precolor" | "range"
    where: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.kind} {self.where}"


def instance_hash(g: ColoringInstance, K: int | None = None) -> str:
    payload = g.to_json()
    payload["colors"] = K
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# --------------------------------------------------------------------------
# encoding


@dataclass(frozen=True, eq=False)
class CnfInstance:
    n_vertices: int
    K: int
    clauses: list[list[int]]
    precolored: tuple[int, ...]
    instance: ColoringInstance | None = field(default=None, repr=False)
    tag: str = ""

    @property
    def variable_count(self) -> int:
        return self.n_vertices * self.K

    def var(self, vertex: int, color: int) -> int:
        if not (0 <= vertex < self.n_vertices and 0 <= color < self.K):
            raise IndexError((vertex, color))
        return vertex * self.K + color + 1

    def mapping(self, var: int) -> tuple[int, int]:
        return divmod(var - 1, self.K)

    def to_dimacs(self) -> str:
        lines = []
        if self.tag:
            lines.append(f"c chromplane {self.tag}")
        lines.append(f"p cnf {self.variable_count} {len(self.clauses)}")
        lines.extend(" ".join(map(str, c)) + " 0" for c in self.clauses)
        return "\n".join(lines) + "\n"

    def write(self, path: str | os.PathLike) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_dimacs())

    def decode(self, true_vars: set[int]) -> list[int]:
        pre = {v: t for t, v in enumerate(self.precolored)}
        colors = []
        for i in range(self.n_vertices):
            if i in pre:
                colors.append(pre[i])
                continue
            for j in range(self.K):
                if i * self.K + j + 1 in true_vars:
                    colors.append(j)
                    break
            else:
                raise SolverError(f"model leaves vertex {i} without a colour")
        return colors


def encode(g: ColoringInstance, K: int) -> CnfInstance:
    """Direct encoding of the expanded graph with unit clauses for the pre-colouring."""
    if K < 1:
        raise ValueError("K must be positive")
    if K < len(g.precolored):
        raise ValueError(f"K={K} is smaller than the pre-coloured clique ({len(g.precolored)})")
    ex = g.expanded
    n = ex.n
    clauses: list[list[int]] = [[i * K + j + 1 for j in range(K)] for i in range(n)]
    for i, j in ex.edges.tolist():
        bi, bj = i * K + 1, j * K + 1
        clauses.extend([-(bi + c), -(bj + c)] for c in range(K))
    for t, v in enumerate(g.precolored):
        clauses.append([v * K + t + 1])
    return CnfInstance(n, K, clauses, g.precolored, g, instance_hash(g, K))


# --------------------------------------------------------------------------
# verification


def verify_coloring(g: ColoringInstance, colors: Sequence[int], K: int | None = None) -> list[Violation]:
    """Every monochromatic edge and pre-colouring mismatch; empty means proper."""
    ex = g.expanded
    if len(colors) != ex.n:
        raise ValueError(f"colouring has {len(colors)} entries for {ex.n} vertices")
    out = []
    if K is not None:
        out.extend(Violation("range", (i,)) for i, c in enumerate(colors) if not 0 <= c < K)
    out.extend(Violation("edge", (i, j)) for i, j in ex.edges.tolist() if colors[i] == colors[j])
    out.extend(Violation("precolor", (v, t)) for t, v in enumerate(g.precolored) if colors[v] != t)
    return out


# --------------------------------------------------------------------------
# external solvers


def _command(solver_command: str | Sequence[str] | None) -> list[str]:
    if solver_command is None:
        return list(DEFAULT_SOLVER)
    if isinstance(solver_command, str):
        return shlex.split(solver_command)
    return list(solver_command)


def parse_solver_output(text: str, returncode: int) -> tuple[Status, set[int]]:
    status = None
    true_vars: set[int] = set()
    saw_values = False
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                status = Status.SAT
            elif word == "UNSATISFIABLE":
                status = Status.UNSAT
            elif word in ("UNKNOWN", "INDETERMINATE"):
                status = Status.UNKNOWN
            else:
                raise SolverError(f"unrecognised status line {line!r}", text)
        elif line.startswith("v "):
            saw_values = True
            for tok in line[2:].split():
                try:
                    lit = int(tok)
                except ValueError:
                    raise SolverError(f"bad literal {tok!r} in model line", text) from None
                if lit > 0:
                    true_vars.add(lit)
    if status is None:
        if returncode == 10:
            status = Status.SAT
        elif returncode == 20:
            status = Status.UNSAT
        else:
            raise SolverError(f"no status line (exit code {returncode})", text)
    if status is Status.SAT and not saw_values:
        raise SolverError("SAT reported without a model", text)
    return status, true_vars


def run_external(cnf: CnfInstance, solver_command: str | Sequence[str] | None = None,
                 timeout: float | None = None, workdir: str | None = None) -> SolveOutcome:
    """Write ``cnf`` to a temporary file and run ``solver_command FILE``.

    SAT models are decoded and checked against the instance before returning.
    """
    cmd = _command(solver_command)
    fd, path = tempfile.mkstemp(suffix=".cnf", dir=workdir)
    os.close(fd)
    try:
        cnf.write(path)
        t0 = time.monotonic()
        try:
            proc = subprocess.run(cmd + [path], capture_output=True, text=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            return SolveOutcome(Status.UNKNOWN, None, time.monotonic() - t0, " ".join(cmd),
                                {"reason": "timeout"})
        except FileNotFoundError as exc:
            raise SolverError(f"solver not found: {cmd[0]}") from exc
        elapsed = time.monotonic() - t0
    finally:
        os.unlink(path)
    status, true_vars = parse_solver_output(proc.stdout, proc.returncode)
    model = None
    if status is Status.SAT:
        model = cnf.decode(true_vars)
        if cnf.instance is not None:
            bad = verify_coloring(cnf.instance, model, cnf.K)
            if bad:
                raise SolverError(f"decoded model is not a proper colouring: {bad[:5]}", proc.stdout)
    return SolveOutcome(status, model, elapsed, " ".join(cmd), {"returncode": proc.returncode})


# --------------------------------------------------------------------------
# internal exact colourer


class _OutOfBudget(Exception):
    pass


def exact_color(g: ColoringInstance, K: int, budget: int | None = 2_000_000,
                cap: int = DEFAULT_CAP) -> SolveOutcome:
    """DSATUR branch and bound with forward checking.

    ``budget`` bounds the number of search nodes; exhausting it gives UNKNOWN.
    """
    if K < 1:
        raise ValueError("K must be positive")
    ex = g.expanded
    n = ex.n
    if n > cap:
        raise ValueError(f"{n} expanded vertices exceed the internal colourer cap ({cap})")
    t0 = time.monotonic()
    pre = list(g.precolored)
    if len(pre) > K:
        return SolveOutcome(Status.UNSAT, None, time.monotonic() - t0, "internal", {"nodes": 0})
    adj = ex.adjacency
    full = (1 << K) - 1

    # vertices of degree < K can always be coloured last
    alive = (1 << n) - 1
    pre_mask = 0
    for v in pre:
        pre_mask |= 1 << v
    peeled: list[int] = []
    changed = True
    while changed:
        changed = False
        for v in range(n):
            if alive >> v & 1 and not pre_mask >> v & 1 and (adj[v] & alive).bit_count() < K:
                alive &= ~(1 << v)
                peeled.append(v)
                changed = True

    colors = [-1] * n
    domain = [full] * n
    for t, v in enumerate(pre):
        if domain[v] >> t & 1 == 0:
            return SolveOutcome(Status.UNSAT, None, time.monotonic() - t0, "internal", {"nodes": 0})
        colors[v] = t
        nb = adj[v]
        while nb:
            low = nb & -nb
            domain[low.bit_length() - 1] &= ~(1 << t)
            nb ^= low
    for v in pre:
        if any(colors[u] == colors[v] for u in _bits(adj[v])):
            return SolveOutcome(Status.UNSAT, None, time.monotonic() - t0, "internal", {"nodes": 0})

    todo = [v for v in range(n) if alive >> v & 1 and colors[v] < 0]
    deg = [(adj[v] & alive).bit_count() for v in range(n)]
    nodes = 0

    def search(remaining: list[int], top: int) -> bool:
        nonlocal nodes
        if not remaining:
            return True
        nodes += 1
        if budget is not None and nodes > budget:
            raise _OutOfBudget
        # most saturated (smallest domain) vertex, ties by degree
        best = min(remaining, key=lambda v: (domain[v].bit_count(), -deg[v]))
        rest = [v for v in remaining if v != best]
        allowed = domain[best] & ((1 << min(top + 2, K)) - 1)
        nbrs = [u for u in _bits(adj[best]) if colors[u] < 0 and alive >> u & 1]
        while allowed:
            low = allowed & -allowed
            c = low.bit_length() - 1
            allowed ^= low
            ok = True
            touched = []
            for u in nbrs:
                if domain[u] & low:
                    domain[u] ^= low
                    touched.append(u)
                    if not domain[u]:
                        ok = False
            if ok:
                colors[best] = c
                if search(rest, max(top, c)):
                    return True
                colors[best] = -1
            for u in touched:
                domain[u] |= low
        return False

    try:
        found = search(todo, len(pre) - 1)
    except _OutOfBudget:
        return SolveOutcome(Status.UNKNOWN, None, time.monotonic() - t0, "internal",
                            {"nodes": nodes, "reason": "budget"})
    elapsed = time.monotonic() - t0
    if not found:
        return SolveOutcome(Status.UNSAT, None, elapsed, "internal", {"nodes": nodes})
    for v in reversed(peeled):
        used = {colors[u] for u in _bits(adj[v]) if colors[u] >= 0}
        colors[v] = next(c for c in range(K) if c not in used)
    bad = verify_coloring(g, colors, K)
    if bad:
        raise AssertionError(f"internal colourer produced an improper colouring: {bad[:5]}")
    return SolveOutcome(Status.SAT, colors, elapsed, "internal", {"nodes": nodes})


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def solve(g: ColoringInstance, K: int, solver_command=None, timeout: float | None = None,
          internal: bool = False, budget: int | None = 2_000_000) -> SolveOutcome:
    if internal:
        out = exact_color(g, K, budget=budget)
    else:
        out = run_external(encode(g, K), solver_command, timeout)
    out.detail["instance"] = dict(g.params)
    return out
