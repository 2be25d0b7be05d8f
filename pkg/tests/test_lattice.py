import math

import pytest
from hypothesis import given, strategies as st

from chromplane.lattice import (LatticeVector, hex_ball, is_loeschian, loeschian_count_in,
                                loeschian_norm, loeschian_upto, next_loeschian, prev_loeschian,
                                to_cartesian, vectors_with_norm)

coords = st.integers(-300, 300)


def brute_loeschian(limit):
    r = math.isqrt(limit) + 1
    return {u * u + u * v + v * v for u in range(-r, r + 1) for v in range(-r, r + 1)
            if u * u + u * v + v * v <= limit}


@pytest.mark.parametrize("w,n", [((0, 0), 0), ((1, 2), 7), ((5, 6), 91), ((1, -1), 1), ((2, -1), 3)])
def test_norm_values(w, n):
    assert loeschian_norm(w) == n


def test_table_up_to_13():
    assert set(loeschian_upto(13)) == {0, 1, 3, 4, 7, 9, 12, 13}


def test_table_matches_enumeration_up_to_2000():
    assert set(loeschian_upto(2000)) == brute_loeschian(2000)


@pytest.mark.parametrize("a,b,n", [(13, 21, 4), (27, 76, 18), (0, 0, 1), (91, 624, 148)])
def test_interval_counts(a, b, n):
    assert loeschian_count_in(a, b) == n


def test_count_rejects_reversed_range():
    with pytest.raises(ValueError):
        loeschian_count_in(5, 4)


def test_cartesian_basis():
    assert to_cartesian((1, 0)) == (1.0, 0.0)
    x, y = to_cartesian((0, 1))
    assert x == 0.5 and y == pytest.approx(math.sqrt(3) / 2, abs=1e-15)
    with pytest.raises(ValueError):
        to_cartesian((1, 0), step=0)


@given(coords, coords)
def test_cartesian_length_agrees_with_norm(u, v):
    x, y = to_cartesian((u, v))
    assert math.isclose(x * x + y * y, loeschian_norm((u, v)), rel_tol=1e-12, abs_tol=1e-9)


@given(coords, coords)
def test_point_group_preserves_norm(u, v):
    w = LatticeVector(u, v)
    images = w.symmetries()
    assert len(images) == 12
    assert {im.norm for im in images} == {w.norm}
    assert w.rotate60().rotate60().rotate60() == -w


@given(coords, coords, coords, coords)
def test_norm_is_multiplicative_over_sums(a, b, c, d):
    # |w1 - w2|^2 computed two ways
    w1, w2 = LatticeVector(a, b), LatticeVector(c, d)
    x1, y1 = w1.to_cartesian()
    x2, y2 = w2.to_cartesian()
    assert math.isclose((w1 - w2).norm, (x1 - x2) ** 2 + (y1 - y2) ** 2, rel_tol=1e-12, abs_tol=1e-9)


@given(st.integers(0, 5000))
def test_membership_matches_representation_search(n):
    assert is_loeschian(n) == bool(vectors_with_norm(n))


@given(st.integers(1, 3000))
def test_neighbours_in_table(n):
    nxt = next_loeschian(n)
    assert nxt > n and is_loeschian(nxt)
    assert not any(is_loeschian(j) for j in range(n + 1, nxt))
    prv = prev_loeschian(n)
    assert prv < n and is_loeschian(prv)
    assert not any(is_loeschian(j) for j in range(prv + 1, n))


def test_prev_of_zero_is_none():
    assert prev_loeschian(0) is None


@pytest.mark.parametrize("m", [0, 1, 2, 5, 9])
def test_hex_ball_size(m):
    ball = hex_ball(m)
    assert len(ball) == 3 * m * m + 3 * m + 1
    assert len(set(ball)) == len(ball)
    assert ball[0] == LatticeVector(0, 0)
    assert max(w.hex_radius() for w in ball) == m


def test_vector_distance_sqrt7():
    x, y = to_cartesian((1, 2))
    assert math.hypot(x, y) == pytest.approx(math.sqrt(7), abs=1e-12)


def test_coordinate_overflow_guard():
    with pytest.raises(OverflowError):
        LatticeVector(2**40, 0)
