"""Loaders for the reference tables shipped in ``chromplane/data``."""

from __future__ import annotations

import csv
import json
from functools import lru_cache
from importlib import resources

from .bounds import BoundEntry, BoundsLedger


def _text(name: str) -> str:
    return (resources.files("chromplane") / "data" / name).read_text()


def _rows(name: str) -> list[dict]:
    return list(csv.DictReader(_text(name).splitlines()))


def _num(s: str):
    if s == "":
        return None
    try:
        return int(s)
    except ValueError:
        return float(s)


@lru_cache(maxsize=None)
def table(name: str) -> tuple[dict, ...]:
    """Rows of a bundled CSV with numeric cells converted."""
    out = []
    for row in _rows(name):
        out.append({k: (_num(v) if k not in ("status", "class") else v) for k, v in row.items()})
    return tuple(out)


def sublattice_distances() -> dict[int, float]:
    return {r["k"]: float(r["d"]) for r in table("table2.csv")}


def class_table() -> dict[int, tuple[str, ...]]:
    out: dict[int, tuple[str, ...]] = {}
    for r in table("table3.csv"):
        out[r["k"]] = out.get(r["k"], ()) + (r["class"],)
    return out


def annulus_table() -> tuple[dict, ...]:
    return table("table4.csv")


def clique_widths() -> dict[int, float]:
    return {r["q"]: float(r["width"]) for r in table("table5.csv")}


def record_graphs() -> tuple[dict, ...]:
    return table("table6.csv")


def main_table() -> tuple[dict, ...]:
    return table("table1_columns.csv")


def main_bounds() -> list[BoundEntry]:
    return [BoundEntry.from_json(json.loads(line)) for line in _text("table1.jsonl").splitlines() if line.strip()]


def reference_ledger(path=None) -> BoundsLedger:
    ledger = BoundsLedger(path)
    ledger.extend(main_bounds())
    return ledger
