import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize_scalar

from chromplane import datasets
from chromplane.packing import (PackingResult, _feasible, clique_chi_bound, pack, refine,
                                table_csv, verify_packing)

FAST = dict(restarts=3, iterations=(60, 60), cycles=1)
PHI = (1 + math.sqrt(5)) / 2


def test_triangle_square_pentagon():
    tri = [(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)]
    assert verify_packing(tri) == pytest.approx((1.0, 1.0))
    assert verify_packing([(0, 0), (1, 0), (1, 1), (0, 1)]) == pytest.approx((1.0, math.sqrt(2)))
    r = 1 / (2 * math.sin(math.pi / 5))
    pent = [(r * math.cos(2 * math.pi * i / 5), r * math.sin(2 * math.pi * i / 5)) for i in range(5)]
    assert verify_packing(pent) == pytest.approx((1.0, PHI))


def test_duplicates_are_infeasible():
    res = PackingResult.from_points([(0, 0), (0, 0), (1, 0)])
    assert res.min_dist == 0.0 and not res.feasible


def test_clique_bound():
    assert clique_chi_bound(3) == 6
    assert clique_chi_bound(6) == 9
    assert clique_chi_bound(1) == 4
    with pytest.raises(ValueError):
        clique_chi_bound(0)


def rhombus_oracle():
    # unit rhombus with angle t: diagonals 2 sin(t/2), 2 cos(t/2)
    f = lambda t: max(2 * math.sin(t / 2), 2 * math.cos(t / 2))
    return minimize_scalar(f, bounds=(math.pi / 3, 2 * math.pi / 3), method="bounded",
                           options={"xatol": 1e-12}).fun


@pytest.mark.parametrize("q,expect", [(2, 1.0), (3, 1.0), (4, None), (5, PHI)])
def test_small_q(q, expect):
    if expect is None:
        expect = rhombus_oracle()
        assert expect == pytest.approx(math.sqrt(2), abs=1e-6)
    res = pack(q, seed=1, **FAST)
    assert res.feasible
    assert res.width == pytest.approx(expect, abs=1e-6)


def test_seeded_determinism():
    a = pack(6, seed=11, **FAST)
    b = pack(6, seed=11, **FAST)
    assert np.array_equal(a.points, b.points) and a.width == b.width


def test_pack_rejects_tiny_q():
    with pytest.raises(ValueError):
        pack(1)


def test_output_invariants():
    res = pack(7, seed=2, **FAST)
    assert res.min_dist >= 1 - 1e-9
    assert (res.min_dist, res.width) == verify_packing(res.points)


def test_json_recomputes_width():
    res = pack(4, seed=0, **FAST)
    data = res.to_json()
    data["width"] = 0.1
    again = PackingResult.from_json(data)
    assert again.width == res.width
    data["q"] = 9
    with pytest.raises(ValueError):
        PackingResult.from_json(data)


@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_feasibility_repair(q, seed):
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(q, 2))
    Q, w = _feasible(refine(P, 20))
    assert verify_packing(Q)[0] >= 1 - 1e-12
    assert w == pytest.approx(verify_packing(Q)[1])


def test_reference_widths_are_monotone():
    widths = datasets.clique_widths()
    qs = sorted(widths)
    assert all(widths[a] <= widths[b] for a, b in zip(qs, qs[1:]))


def test_table_layout():
    rows = table_csv([PackingResult.from_points([(0, 0), (1, 0)]),
                      PackingResult.from_points([(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)])]).splitlines()
    assert rows[0].startswith("q,+1,+2")
    assert rows[1].startswith("+0,0.00000,1.00000,1.00000")
