"""Bounds ledger: per-chi lower/upper bounds on d, islands of certainty,
linear extrapolation of d(r) and asymptotic estimates.

Conventions: ``d_lb(chi)`` is the largest d for which a proper chi-colouring
of the plane is known; ``d_ub(chi)`` is the smallest d at which a finite graph
is known to need more than chi colours. ``chi`` colours are then exactly
right on ``(d_ub(chi - 1), d_lb(chi + 1)]`` whenever that range is nonempty.
"""

from __future__ import annotations

import csv
import io
import json
import math
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .colorsat import SolveOutcome, Status
from .packing import PackingResult, clique_chi_bound
from .tilings import TilingReport

KINDS = ("lb", "ub", "ub_clique")
PROVENANCE_CLASSES = ("paper-import", "computed", "external-unverified")


@dataclass(frozen=True)
class BoundEntry:
    chi: int
    kind: str
    d: float
    provenance: str = ""
    provenance_class: str = "computed"
    timestamp: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.provenance_class not in PROVENANCE_CLASSES:
            raise ValueError(f"provenance class must be one of {PROVENANCE_CLASSES}")
        if not math.isfinite(self.d) or self.d < 0:
            raise ValueError(f"bad distance {self.d}")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> BoundEntry:
        return cls(int(data["chi"]), data["kind"], float(data["d"]), data.get("provenance", ""),
                   data.get("provenance_class", "computed"), data.get("timestamp"))


@dataclass
class BoundsRecord:
    chi: int
    d_lb: float | None = None
    lb_provenance: str | None = None
    d_ub: float | None = None
    ub_provenance: str | None = None
    d_ub_clique: float | None = None
    clique_provenance: str | None = None

    @property
    def consistent(self) -> bool:
        return self.d_lb is None or self.d_ub is None or self.d_lb <= self.d_ub


class BoundsLedger:
    """Best bound per (chi, kind); dominated entries are ignored.

    With a ``path`` the accepted entries are appended to a JSONL file.
    """

    def __init__(self, path: str | Path | None = None) -> None:
        self.path = Path(path) if path else None
        self.entries: list[BoundEntry] = []
        self._best: dict[tuple[int, str], BoundEntry] = {}
        self._lock = threading.Lock()
        if self.path and self.path.exists():
            for lineno, line in enumerate(self.path.read_text().splitlines(), 1):
                if not line.strip():
                    continue
                try:
                    entry = BoundEntry.from_json(json.loads(line))
                except (ValueError, KeyError, TypeError) as exc:
                    raise ValueError(f"{self.path}:{lineno}: {exc}") from exc
                self._accept(entry)

    def _better(self, entry: BoundEntry) -> bool:
        cur = self._best.get((entry.chi, entry.kind))
        if cur is None:
            return True
        return entry.d > cur.d if entry.kind == "lb" else entry.d < cur.d

    def _accept(self, entry: BoundEntry) -> bool:
        if not self._better(entry):
            return False
        self._best[(entry.chi, entry.kind)] = entry
        self.entries.append(entry)
        return True

    def add(self, entry: BoundEntry) -> bool:
        """Record ``entry`` if it improves the current bound; returns whether it did."""
        with self._lock:
            if not self._accept(entry):
                return False
            if self.path:
                with self.path.open("a") as fh:
                    fh.write(json.dumps(entry.to_json()) + "\n")
            return True

    def extend(self, entries: Iterable[BoundEntry]) -> int:
        return sum(self.add(e) for e in entries)

    def best(self, chi: int, kind: str) -> BoundEntry | None:
        return self._best.get((chi, kind))

    def chis(self) -> list[int]:
        return sorted({c for c, _ in self._best})

    def records(self) -> list[BoundsRecord]:
        out = []
        for chi in self.chis():
            rec = BoundsRecord(chi)
            if (e := self.best(chi, "lb")) is not None:
                rec.d_lb, rec.lb_provenance = e.d, e.provenance
            if (e := self.best(chi, "ub")) is not None:
                rec.d_ub, rec.ub_provenance = e.d, e.provenance
            if (e := self.best(chi, "ub_clique")) is not None:
                rec.d_ub_clique, rec.clique_provenance = e.d, e.provenance
            out.append(rec)
        return out


def monotonicity_violations(records: Sequence[BoundsRecord]) -> list[tuple[int, str]]:
    """(chi, kind) pairs where a bound drops below the one for chi - 1."""
    out = []
    by = {r.chi: r for r in records}
    for chi in sorted(by):
        prev = by.get(chi - 1)
        if prev is None:
            continue
        for attr, kind in (("d_lb", "lb"), ("d_ub", "ub")):
            a, b = getattr(prev, attr), getattr(by[chi], attr)
            if a is not None and b is not None and b < a:
                out.append((chi, kind))
    return out


# --------------------------------------------------------------------------
# islands


@dataclass(frozen=True)
class IslandRow:
    chi: int
    d_min: float | None
    d_max: float | None
    status: str  # island | empty | unknown
    predicted: bool = False


def compute_islands(records: Sequence[BoundsRecord],
                    predictions: dict[int, float] | None = None) -> list[IslandRow]:
    """One row per chi: ``d_min = d_ub(chi-1)``, ``d_max = d_lb(chi+1)``.

    ``predictions`` maps chi to an extrapolated ``d_min``; a non-island row is
    flagged ``predicted`` when that value falls below ``d_max``.
    """
    by = {r.chi: r for r in records}
    rows = []
    for chi in sorted(by):
        lo = by.get(chi - 1)
        hi = by.get(chi + 1)
        d_min = lo.d_ub if lo else None
        d_max = hi.d_lb if hi else None
        if d_min is None or d_max is None:
            status = "unknown"
        else:
            status = "island" if d_min < d_max else "empty"
        pred = False
        if status == "empty" and predictions and chi in predictions:
            pred = predictions[chi] < d_max
        rows.append(IslandRow(chi, d_min, d_max, status, pred))
    return rows


# --------------------------------------------------------------------------
# extrapolation


@dataclass(frozen=True)
class ExtrapolationFit:
    points: tuple[tuple[float, float], ...]
    slope: float
    intercept: float
    residual: float

    def predict(self, r: float) -> float:
        return self.intercept + self.slope * r

    def to_json(self) -> dict:
        return {"points": [list(p) for p in self.points], "slope": self.slope,
                "intercept": self.intercept, "residual": self.residual}


def extrapolate(points: Iterable[tuple[float, float]]) -> ExtrapolationFit:
    """Ordinary least squares ``d = intercept + slope * r``."""
    pts = tuple((float(r), float(d)) for r, d in points)
    if len(pts) < 2:
        raise ValueError("need at least two points")
    r = np.array([p[0] for p in pts])
    d = np.array([p[1] for p in pts])
    if np.ptp(r) == 0:
        raise ValueError("all r values are equal")
    A = np.column_stack([np.ones_like(r), r])
    (intercept, slope), *_ = np.linalg.lstsq(A, d, rcond=None)
    res = float(((A @ np.array([intercept, slope]) - d) ** 2).sum())
    return ExtrapolationFit(pts, float(slope), float(intercept), res)


def egraph_point(a: int, b: int) -> tuple[float, float]:
    """(r, d) = (sqrt(1/a), sqrt(b/a))."""
    return (math.sqrt(1.0 / a), math.sqrt(b / a))


def wgraph_point(p: int, d: float) -> tuple[float, float]:
    return (2.0 * math.pi / p, float(d))


def lower_envelope(unsat: Iterable[tuple[int, int]]) -> list[tuple[float, float]]:
    """For each ``a`` keep the smallest UNSAT ``b``; return the (r, d) points."""
    best: dict[int, int] = {}
    for a, b in unsat:
        best[a] = min(b, best.get(a, b))
    return [egraph_point(a, best[a]) for a in sorted(best)]


# --------------------------------------------------------------------------
# asymptotics


def asymptotic_chi_bounds(d: float) -> tuple[float, float]:
    """Area-ratio estimates (4/3) d^2 and (pi / sqrt 3) d^2 for large d."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return (4.0 / 3.0 * d * d, math.pi / math.sqrt(3.0) * d * d)


# --------------------------------------------------------------------------
# witnesses


class WitnessError(ValueError):
    pass


def record_from_witness(witness, *, colors: int | None = None, d: float | None = None,
                        provenance: str = "", provenance_class: str = "computed") -> BoundEntry | None:
    """Turn a verified result into a ledger entry.

    * plane tiling report with ``colors=k``: proper k-colouring for every d up
      to the gap/width ratio, so the ratio bounds ``d_lb(k + 1)``;
    * UNSAT outcome with ``colors=K`` total colours at ratio ``d``: ``d_ub(K)``
      (``d`` defaults to sqrt(b/a) or the w-graph d of the solved instance);
    * feasible packing of q points: ``d_ub_clique(q + 3)``.

    SAT/UNKNOWN outcomes carry no bound and give ``None``.
    """
    ts = time.time()
    if isinstance(witness, TilingReport):
        if colors is None:
            raise WitnessError("tiling witnesses need the colour count")
        if not witness.ok:
            raise WitnessError(f"tiling has violations: {witness.violations}")
        return BoundEntry(colors + 1, "lb", witness.ratio, provenance, provenance_class, ts)
    if isinstance(witness, SolveOutcome):
        if witness.status is not Status.UNSAT:
            return None
        if colors is None:
            raise WitnessError("solver witnesses need the total colour count")
        if d is None:
            inst = witness.detail.get("instance", {})
            if "a" in inst and "b" in inst:
                d = math.sqrt(inst["b"] / inst["a"])
            elif "d" in inst:
                d = float(inst["d"])
            else:
                raise WitnessError("cannot infer d from the solver witness")
        return BoundEntry(colors, "ub", float(d), provenance, provenance_class, ts)
    if isinstance(witness, PackingResult):
        if not witness.feasible:
            raise WitnessError(f"packing violates the unit distance (min {witness.min_dist})")
        return BoundEntry(clique_chi_bound(witness.q), "ub_clique", witness.width, provenance,
                          provenance_class, ts)
    raise WitnessError(f"unsupported witness type {type(witness).__name__}")


# --------------------------------------------------------------------------
# export


TABLE_COLUMNS = ("chi", "status", "lower", "min", "max", "upper", "clique", "pred", "slope")


def table_rows(ledger: BoundsLedger, fits: dict[int, tuple[float, float]] | None = None,
               chis: Iterable[int] | None = None) -> list[dict]:
    records = ledger.records()
    preds = {c: f[0] for c, f in (fits or {}).items()}
    islands = {row.chi: row for row in compute_islands(records, preds)}
    by = {r.chi: r for r in records}
    out = []
    for chi in (chis if chis is not None else sorted(islands)):
        rec, isl = by[chi], islands[chi]
        status = isl.status
        if status == "empty":
            status = "pred" if isl.predicted else "?"
        fit = (fits or {}).get(chi)
        out.append({"chi": chi, "status": status, "lower": rec.d_lb, "min": isl.d_min,
                    "max": isl.d_max, "upper": rec.d_ub, "clique": rec.d_ub_clique,
                    "pred": fit[0] if fit else None, "slope": fit[1] if fit else None})
    return out


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def table_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(TABLE_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in TABLE_COLUMNS])
    return buf.getvalue()


def table_text(rows: list[dict]) -> str:
    cells = [list(TABLE_COLUMNS)] + [[_fmt(r[c]) for c in TABLE_COLUMNS] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(TABLE_COLUMNS))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells) + "\n"

