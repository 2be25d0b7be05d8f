import json

import pytest

from chromplane.colorsat import instance_hash
from chromplane.config import load_config
from chromplane.hunt import SolverSettings, SweepPlan, default_m, egraph_instance, hunt, solve_cached
from chromplane.store import ResultStore


def test_default_m():
    assert default_m(21) == 10
    assert default_m(4) == 5
    assert default_m(133) == 15


def test_store_round_trip(tmp_path):
    path = tmp_path / "r.jsonl"
    s = ResultStore(path)
    s.put("abc", {"status": "UNSAT"})
    again = ResultStore(path)
    assert "abc" in again and again.get("abc")["status"] == "UNSAT"
    assert len(again) == 1


def test_cache_skips_solved_instances(tmp_path):
    store = ResultStore(tmp_path / "r.jsonl")
    g = egraph_instance(5, 13, 21, tri=True, bi_s2=13)
    row, ran = solve_cached(g, 6, SolverSettings(), store)
    assert ran and row["status"] == "UNSAT"
    row2, ran2 = solve_cached(g, 6, SolverSettings(), store)
    assert not ran2 and row2["status"] == "UNSAT"
    assert row["hash"] == instance_hash(g, 6)


def test_hunt_protocol(tmp_path):
    store = ResultStore(tmp_path / "r.jsonl")
    res = hunt(SweepPlan(6, 13, 21, max_solves=5), store)
    probes = [(p["a"], p["b"], p["status"]) for p in res.probes]
    # shrink b until colourable, then grow a at the record ratio
    assert probes[:2] == [(13, 21, "UNSAT"), (13, 19, "SAT")]
    assert probes[2][0] == 16
    rec = res.frontier[0]
    assert (rec.a, rec.b, rec.l) == (13, 21, 4)
    assert res.solves == 5 and res.stopped == "budget"
    # second pass is served from the store
    again = hunt(SweepPlan(6, 13, 21, max_solves=0), store)
    assert again.probes == [dict(p, solved=False) for p in res.probes]
    assert again.solves == 0


def test_plan_validation():
    with pytest.raises(ValueError):
        SweepPlan(6, 13, 20)
    with pytest.raises(ValueError):
        SweepPlan(6, 21, 13)


def test_config_file_and_environment(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[solver]\ncommand = kissat\nflags = --sat\ntimeout = 30\nparallelism = 3\n"
                   "[packing]\niterations = 100,200\ncycles = 2\n[paths]\nstore = s.jsonl\n")
    cfg = load_config(ini, env={})
    assert cfg.solver_command == ["kissat", "--sat"]
    assert (cfg.timeout, cfg.parallelism, cfg.pack_iterations, cfg.pack_cycles) == (30.0, 3, (100, 200), 2)
    cfg = load_config(ini, env={"CHROMPLANE_SOLVER": "cadical -q", "CHROMPLANE_PARALLELISM": "0"})
    assert cfg.solver_command == ["cadical", "-q", "--sat"] and cfg.parallelism == 1
    with pytest.raises(FileNotFoundError):
        load_config(tmp_path / "missing.ini", env={})
