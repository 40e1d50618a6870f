import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prefattach.closed_form import (
    a_closed,
    a_closed_general,
    p_closed,
    p_closed_float,
    p_first_degree_max,
    p_first_degree_one,
)
from prefattach.combinatorics import factorial, odd_product
from prefattach.recurrence import first_node_table, scaled_table


@pytest.mark.parametrize("n, expected", [(1, F(1)), (2, F(2, 3)), (5, F(128, 315))])
def test_degree_one(n, expected):
    assert p_first_degree_one(n).exact == expected


@pytest.mark.parametrize("n, expected", [(1, F(1)), (2, F(1, 3)), (3, F(2, 15))])
def test_degree_max(n, expected):
    assert p_first_degree_max(n).exact == expected


def test_a_closed_values():
    assert a_closed(7, 7).exact == 1
    assert a_closed(3, 1).exact == 16
    assert a_closed(4, 3).exact == 6
    assert a_closed(4, 2).exact == 22


@pytest.mark.parametrize("n, k", [(3, 4), (3, 0), (0, 0)])
def test_a_closed_domain(n, k):
    with pytest.raises(ValueError):
        a_closed(n, k)
    with pytest.raises(ValueError):
        p_closed(n, k)


def test_diagonal_branches_agree():
    for n in range(1, 80):
        assert a_closed_general(n, n).exact == a_closed(n, n).exact == 1


@pytest.mark.parametrize(
    "n, k, expected", [(1, 1, F(1)), (3, 2, F(1, 3)), (3, 1, F(8, 15)), (3, 3, F(2, 15))]
)
def test_p_closed_values(n, k, expected):
    assert p_closed(n, k).exact == expected


def test_p_closed_carries_coordinates():
    v = p_closed(9, 4)
    assert (v.n, v.k, v.m) == (9, 4, 1)


def test_p_closed_matches_dp_to_200():
    for row in first_node_table(200):
        for k in row.support:
            assert p_closed(row.n, k).exact == row[k]


def test_p_closed_normalized_to_200():
    for n in range(1, 201):
        assert sum(p_closed(n, k).exact for k in range(1, n + 1)) == 1


def test_a_closed_boundaries_to_200():
    for n in range(1, 201):
        assert a_closed(n, 1).exact == 4 ** (n - 1)
        assert a_closed(n, n).exact == 1


def test_a_closed_matches_scaled_near_diagonal():
    s = scaled_table(200)
    for n in range(2, 201):
        assert a_closed(n, n - 1).exact == s.value(n, n - 1)


def test_transform_round_trip():
    for n in range(1, 90):
        for k in range(1, n + 1):
            factor = F(factorial(n - 1), 2 ** (n - k) * odd_product(n))
            assert p_closed(n, k).exact == factor * a_closed(n, k).exact


def test_boundary_laws_match_general_formula():
    for n in range(1, 201):
        assert p_closed(n, 1).exact == p_first_degree_one(n).exact
        assert p_closed(n, n).exact == p_first_degree_max(n).exact


def test_float_small():
    v = p_closed_float(3, 2)
    assert float(v) == pytest.approx(1 / 3, rel=1e-10)
    assert v.approx.relative_error(F(1, 3)) <= 1e-10


def test_float_degree_one_n100():
    v = p_closed_float(100, 1)
    assert v.approx.relative_error(p_first_degree_one(100).exact) <= 1e-10


def test_float_fidelity_to_100():
    worst = 0.0
    for n in range(1, 101):
        for k in range(1, n + 1):
            err = p_closed_float(n, k).approx.relative_error(p_closed(n, k).exact)
            worst = max(worst, err)
    assert worst <= 1e-10


@pytest.mark.parametrize("n, k", [(10**5, 5), (10**5, 1), (10**5, 10**5), (50_000, 2_500)])
def test_float_large_in_unit_interval(n, k):
    v = float(p_closed_float(n, k))
    log_v = p_closed_float(n, k).approx.log_value
    assert math.isfinite(log_v) and log_v < 0
    assert 0.0 <= v < 1.0


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 150).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))))
def test_probability_in_unit_interval(nk):
    n, k = nk
    assert 0 < p_closed(n, k).exact <= 1
    assert a_closed(n, k).exact >= 1
