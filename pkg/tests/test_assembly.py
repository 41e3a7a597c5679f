import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apeuler.assembly import AssembledField, BlockVector, EmbeddingPoint, TangentVector
from apeuler.base_flow import BaseFlow
from apeuler.errors import NoWitnessError, RegularityError
from apeuler.frequencies import FrequencySeq
from apeuler.verify import euler_residual, stratified_points


def unit(j, d=2):
    return tuple(int(i == j) for i in range(d))


def test_block_vectors():
    shapes = [(2, 1), (1, 1)]
    bv = BlockVector.from_flat([1.0, 2.0, 3.0], shapes)
    assert bv.shapes == shapes
    np.testing.assert_array_equal(bv.flat(), [1, 2, 3])
    assert bv.sup_norm() == 3.0
    with pytest.raises(ValueError):
        BlockVector.from_flat([1.0, 2.0], shapes)
    ep = EmbeddingPoint([[[7.0], [-1.0]], [[0.5]]])
    assert np.all((ep.flat() >= 0) & (ep.flat() < 2 * np.pi))
    moved = ep.shifted([np.ones((2, 1)), np.ones((1, 1))], 2 * np.pi)
    np.testing.assert_allclose(moved.flat(), ep.flat(), atol=1e-12)


def test_copies_and_routing(desk):
    assert sum(len(v) for v in desk.copies.values()) == 4
    for c in desk.iter_copies():
        anchor = desk.copy_anchor(c, np.zeros(1))
        ks, js = desk.locate(anchor[None, :])
        assert (ks[0], js[0]) == (c.k, c.j)
        inside = anchor + np.array([1.9 * 0.1**c.k, 2.0])
        assert desk.locate(inside[None, :])[0][0] == c.k
    # a point at x' far from every center sees nothing
    ys = np.concatenate([c.center for c in desk.iter_copies()])
    far = np.linspace(0, 2 * np.pi, 2000)
    gap = np.min(np.abs(np.mod(far[:, None] - ys[None, :] + np.pi, 2 * np.pi) - np.pi), axis=1)
    x = np.column_stack([far[gap > 0.5], np.ones((gap > 0.5).sum())])
    assert np.all(desk.locate(x)[0] == 0)
    assert np.all(desk.eval_u(0.3, x) == 0.0)
    assert np.all(desk.eval_pressure_sum(0.3, x) == 0.0)


def test_time_evaluation_is_embedding_along_the_line(desk, rng):
    pts = stratified_points(desk, desk._time_shifts(2.5), 400, rng)
    for t in (0.0, 2.5, 1e4):
        np.testing.assert_allclose(desk.eval_u(t, pts), desk.eval_embedding(desk.phase_at(t), pts),
                                   atol=1e-13)


def test_dtu_matches_time_differences(desk, rng):
    t0 = 0.8
    pts = stratified_points(desk, desk._time_shifts(t0), 400, rng)
    h = 1e-4
    fd = (8 * (desk.eval_u(t0 + h, pts) - desk.eval_u(t0 - h, pts))
          - (desk.eval_u(t0 + 2 * h, pts) - desk.eval_u(t0 - 2 * h, pts))) / (12 * h)
    exact = desk.eval_dtu(t0, pts)
    np.testing.assert_allclose(fd, exact, atol=1e-7 * np.abs(exact).max())


def test_residual_and_divergence(desk, rng):
    for t in (0.0, 13.7):
        pts = stratified_points(desk, desk._time_shifts(t), 1000, rng)
        res, div = euler_residual(desk, t, pts)
        assert res.max() <= 1e-11
        assert div.max() <= 1e-11


def test_zero_frequencies_are_stationary(desk, rng):
    zero = FrequencySeq.stationary(desk.shapes, desk.S, desk.epsilon)
    af = AssembledField(desk.base, desk.S, desk.layout, zero, desk.p)
    pts = stratified_points(af, af._time_shifts(0.0), 500, rng)
    assert np.all(af.eval_dtu(5.0, pts) == 0.0)
    np.testing.assert_array_equal(af.eval_u(5.0, pts), af.eval_u(0.0, pts))
    res, _ = euler_residual(af, 5.0, pts)
    assert res.max() <= 1e-11


def test_pressure_mean_matches_grid_average(desk):
    n = 1024
    ax = 2 * np.pi * np.arange(n) / n
    pts = np.stack(np.meshgrid(ax, ax, indexing="ij"), axis=-1).reshape(-1, 2)
    grid_mean = desk.eval_pressure_sum(0.0, pts).mean()
    # the unresolved finest copies contribute below 1e-12 of the mean
    assert desk.pressure_mean() == pytest.approx(grid_mean, rel=1e-6)
    assert desk.eval_pressure_sum(0.0, pts, mean_free=True).mean() == pytest.approx(
        grid_mean - desk.pressure_mean(), abs=1e-15)


def test_regularity_guard(desk):
    with pytest.raises(RegularityError):
        desk.eval_u(0.0, np.zeros(2), (8, 0))
    with pytest.raises(RegularityError):
        desk.eval_dtu(0.0, np.zeros(2), (7, 0))


def test_truncation_depth(desk, desk_parts):
    layout, freqs = desk_parts
    af2 = AssembledField(desk.base, desk.S, layout, freqs, desk.p, K=2)
    c3 = desk.copies[3][0]
    anchor = desk.copy_anchor(c3, np.zeros(1))
    assert np.all(af2.eval_embedding(af2.theta, anchor) == 0.0)
    near = anchor + np.array([0.0, 0.0003])
    assert np.any(desk.eval_embedding(desk.theta, near) != 0.0)
    with pytest.raises(ValueError):
        AssembledField(desk.base, desk.S, layout, freqs, desk.p, K=4)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 2 * np.pi), min_size=4, max_size=4),
       st.lists(st.integers(-2, 2), min_size=4, max_size=4))
def test_embedding_is_periodic_in_theta(desk, theta, winds):
    shapes = desk.shapes
    th = EmbeddingPoint(TangentVector.from_flat(theta, shapes).blocks)
    moved = EmbeddingPoint(TangentVector.from_flat(np.array(theta) + 2 * np.pi * np.array(winds), shapes).blocks)
    c = desk.copies[1][0]
    x = desk.copy_anchor(c, th.block(1)[0]) + np.array([0.03, 0.04])
    np.testing.assert_allclose(desk.eval_embedding(th, x), desk.eval_embedding(moved, x), atol=1e-12)


def test_non_symmetry_witness(desk, desk_parts):
    found = desk.non_symmetry_witness(extra_directions=3, rng=0)
    assert len(found) == 5
    for e, x, delta, gap in found[:2]:
        assert gap > 0
    layout, freqs = desk_parts
    empty = AssembledField(desk.base, desk.S, layout, freqs, desk.p, K=0)
    with pytest.raises(NoWitnessError):
        empty.non_symmetry_witness()


def test_initial_data(desk):
    x = desk.copy_anchor(desk.copies[1][1], np.zeros(1)) + np.array([0.02, 0.01])
    np.testing.assert_array_equal(desk.initial_data(x), desk.eval_u(0.0, x))
