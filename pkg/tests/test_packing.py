from fractions import Fraction
from itertools import product
from math import gamma, pi

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apeuler.errors import ConstructionError, PackingInfeasibleError
from apeuler.packing import (LayoutSpec, PointLayout, ball_constant, ball_measure_fraction, epsilon_zero,
                             monte_carlo_leftover, select_points, torus_delta, torus_distance,
                             verify_layout)

DESK = LayoutSpec(1, (2, 1, 1), "1/10")


def test_ball_constants():
    assert ball_constant(1) == pytest.approx(2 / pi, abs=1e-15)
    assert ball_constant(2) == pytest.approx(1 / pi, abs=1e-15)
    # |B_2r| / (2 pi)^m = C_m r^m, checked against the volume formula
    for m in (1, 2, 3, 4):
        r = 0.3
        vol = pi ** (m / 2) / gamma(m / 2 + 1) * (2 * r) ** m
        assert ball_measure_fraction(m, r) == pytest.approx(vol / (2 * pi) ** m, rel=1e-14)


def test_one_dimensional_length_oracle():
    r = 0.1
    assert abs(ball_measure_fraction(1, r) - 4 * r / (2 * pi)) <= 1e-14
    assert ball_measure_fraction(1, r) == pytest.approx(0.06366, abs=1e-5)
    with pytest.raises(ValueError):
        ball_measure_fraction(1, 4.0)


def test_epsilon_zero():
    assert epsilon_zero(1, [2, 1, 1], 0.5) == pytest.approx(0.125)
    assert epsilon_zero(2, [1], 0.1) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        epsilon_zero(1, [], 1.0)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.data())
def test_torus_distance_is_nearest_image(m, data):
    a = np.array(data.draw(st.lists(st.floats(-10, 10), min_size=m, max_size=m)))
    b = np.array(data.draw(st.lists(st.floats(-10, 10), min_size=m, max_size=m)))
    am, bm = np.mod(a, 2 * pi), np.mod(b, 2 * pi)
    brute = min(np.linalg.norm(am - bm + 2 * pi * np.array(s)) for s in product((-1, 0, 1), repeat=m))
    assert torus_distance(a, b) == pytest.approx(brute, abs=1e-12)
    assert np.all(np.abs(torus_delta(a, b)) <= pi)


def test_spec_validation():
    with pytest.raises(ConstructionError):
        LayoutSpec(0, (1,), "1/10")
    with pytest.raises(ConstructionError):
        LayoutSpec(1, (), "1/10")
    with pytest.raises(ConstructionError):
        LayoutSpec(1, (1,), "3/2")
    assert DESK.K == 3
    assert DESK.n_k(2) == (2, 1, 1)
    assert DESK.radius(2) == pytest.approx(0.02)


def test_epsilon_too_large_is_rejected():
    with pytest.raises(ConstructionError, match="not below"):
        select_points(LayoutSpec(1, (2, 1, 1), "1/2"))


def test_desk_layout():
    layout = select_points(DESK, rng_seed=7)
    assert sum(len(v) for v in layout.centers.values()) == 4
    rep = verify_layout(layout)
    assert rep.passed
    assert rep.min_gap > 0
    assert layout.eps0 == pytest.approx(0.125)
    # pairwise-distance oracle, independent of verify_layout
    recs = layout.to_records()
    for i, a in enumerate(recs):
        for b in recs[i + 1:]:
            d = torus_distance(np.array(a["center"]), np.array(b["center"]))
            assert d > a["radius"] + b["radius"]


def test_layout_is_deterministic():
    a = select_points(DESK, rng_seed=7).to_records()
    b = select_points(DESK, rng_seed=7).to_records()
    c = select_points(DESK, rng_seed=8).to_records()
    assert a == b
    assert a != c


def test_records_round_trip():
    layout = select_points(DESK, rng_seed=7)
    back = PointLayout.from_records(DESK, layout.to_records())
    for k in layout.centers:
        np.testing.assert_array_equal(back.centers[k], layout.centers[k])
    assert back.eps11 == layout.eps11


@pytest.mark.parametrize("m,J,eps", [(1, (3, 2, 2, 1), "1/20"), (2, (2, 3), "1/8"), (3, (2, 2), "1/5")])
def test_other_layouts(m, J, eps):
    spec = LayoutSpec(m, J, eps)
    try:
        layout = select_points(spec, rng_seed=1)
    except ConstructionError:
        pytest.skip("eps above eps_0 for these scale-1 points")
    assert verify_layout(layout).passed


def test_equispaced_strategy():
    layout = select_points(DESK, strategy="equispaced")
    assert layout.strategy == "equispaced"
    assert verify_layout(layout).passed
    with pytest.raises(ConstructionError):
        select_points(LayoutSpec(2, (2,), "1/10"), strategy="equispaced")


def test_infeasible_rejection():
    spec = LayoutSpec(2, (40,), "1/13")
    with pytest.raises((PackingInfeasibleError, ConstructionError)):
        select_points(spec, rng_seed=0, max_tries=1)


def test_ledger_bound_arithmetic():
    layout = select_points(DESK, rng_seed=7)
    rep = verify_layout(layout)
    for k, (ok, leftover, bound) in rep.item_iii.items():
        exact = 1 - sum(Fraction(1, 4**n) for n in range(1, k + 1))
        assert ok and bound == float(exact) and exact > Fraction(2, 3)
    assert rep.condition_b


def test_monte_carlo_agrees_with_closed_form():
    layout = select_points(DESK, rng_seed=7)
    frac, se = monte_carlo_leftover(layout, 3, samples=200_000, rng=0)
    assert abs(frac - (1 - layout.occupied_measure(3))) <= 5 * se
