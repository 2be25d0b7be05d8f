"""Runtime configuration: an INI file plus environment overrides.

Example file::

    [solver]
    command = kissat -q
    flags = --forcephase
    timeout = 600
    parallelism = 4
    internal_cap = 80

    [packing]
    iterations = 400,400
    cycles = 3

    [paths]
    store = results.jsonl
    ledger = ledger.jsonl

Environment variables ``CHROMPLANE_CONFIG``, ``CHROMPLANE_SOLVER``,
``CHROMPLANE_TIMEOUT`` and ``CHROMPLANE_PARALLELISM`` override the file.
"""

from __future__ import annotations

import configparser
import os
import shlex
import sys
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class Config:
    solver: list[str] = field(default_factory=lambda: [sys.executable, "-m", "chromplane.satshim"])
    solver_flags: list[str] = field(default_factory=list)
    timeout: float | None = None
    parallelism: int = field(default_factory=lambda: os.cpu_count() or 1)
    internal_cap: int = 80
    pack_iterations: tuple[int, int] = (400, 400)
    pack_cycles: int = 3
    store: Path = Path("chromplane-results.jsonl")
    ledger: Path = Path("chromplane-ledger.jsonl")

    @property
    def solver_command(self) -> list[str]:
        return self.solver + self.solver_flags


def load_config(path: str | os.PathLike | None = None, env: dict | None = None) -> Config:
    env = os.environ if env is None else env
    cfg = Config()
    path = path or env.get("CHROMPLANE_CONFIG")
    if path:
        if not Path(path).is_file():
            raise FileNotFoundError(f"config file not found: {path}")
        cp = configparser.ConfigParser()
        cp.read(path)
        if cp.has_section("solver"):
            s = cp["solver"]
            if s.get("command"):
                cfg.solver = shlex.split(s["command"])
            cfg.solver_flags = shlex.split(s.get("flags", ""))
            if s.get("timeout"):
                cfg.timeout = s.getfloat("timeout")
            cfg.parallelism = s.getint("parallelism", cfg.parallelism)
            cfg.internal_cap = s.getint("internal_cap", cfg.internal_cap)
        if cp.has_section("packing"):
            p = cp["packing"]
            if p.get("iterations"):
                a, b = (int(x) for x in p["iterations"].split(","))
                cfg.pack_iterations = (a, b)
            cfg.pack_cycles = p.getint("cycles", cfg.pack_cycles)
        if cp.has_section("paths"):
            cfg.store = Path(cp["paths"].get("store", str(cfg.store)))
            cfg.ledger = Path(cp["paths"].get("ledger", str(cfg.ledger)))
    if env.get("CHROMPLANE_SOLVER"):
        cfg.solver = shlex.split(env["CHROMPLANE_SOLVER"])
    if env.get("CHROMPLANE_TIMEOUT"):
        cfg.timeout = float(env["CHROMPLANE_TIMEOUT"])
    if env.get("CHROMPLANE_PARALLELISM"):
        cfg.parallelism = max(1, int(env["CHROMPLANE_PARALLELISM"]))
    return cfg
