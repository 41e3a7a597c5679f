import numpy as np
import pytest

from apeuler.spectral import VorticityEuler2D, grid_points, inverse_neg_laplacian, wavenumbers


def test_grid_points_order():
    pts = grid_points(4, 2)
    assert pts.shape == (16, 2)
    np.testing.assert_allclose(pts[1], [0.0, np.pi / 2])
    kx, ky = wavenumbers(4, 2)
    assert kx[1, 0] == 1 and ky[0, 3] == -1


@pytest.mark.parametrize("d", [1, 2, 3])
def test_inverse_laplacian_on_modes(d):
    n = 16
    pts = grid_points(n, d).reshape((n,) * d + (d,))
    phase = sum((i + 1) * pts[..., i] for i in range(d))
    k2 = sum((i + 1) ** 2 for i in range(d))
    src = np.cos(phase) + 3.0
    got = inverse_neg_laplacian(src)
    np.testing.assert_allclose(got, np.cos(phase) / k2, atol=1e-13)
    assert abs(got.mean()) <= 1e-15


def test_constant_field_has_zero_pressure():
    assert np.all(inverse_neg_laplacian(np.zeros((8, 8))) == 0.0)


def test_odd_grid_rejected():
    with pytest.raises(ValueError):
        VorticityEuler2D(63)


def taylor_green(solver, n):
    x = grid_points(n, 2)
    u1 = np.cos(x[:, 0]) * np.sin(x[:, 1])
    u2 = -np.sin(x[:, 0]) * np.cos(x[:, 1])
    return u1.reshape(n, n), u2.reshape(n, n)


def test_velocity_vorticity_round_trip():
    n = 32
    s = VorticityEuler2D(n, mean_velocity=(0.3, -0.1))
    u1, u2 = taylor_green(s, n)
    w = s.vorticity_hat(u1 + 0.3, u2 - 0.1)
    v1, v2 = s.velocity(w)
    np.testing.assert_allclose(v1, u1 + 0.3, atol=1e-13)
    np.testing.assert_allclose(v2, u2 - 0.1, atol=1e-13)


def test_steady_state_is_preserved():
    # w = 2 cos x cos y is a function of the stream function, hence steady
    n = 32
    s = VorticityEuler2D(n)
    u1, u2 = taylor_green(s, n)
    w0 = s.vorticity_hat(u1, u2)
    w1 = s.integrate(w0, 0.5, 1e-2)
    assert np.abs(s.vorticity(w1) - s.vorticity(w0)).max() <= 1e-12


def test_uniform_translation():
    # a shear profile advected by a constant mean flow moves rigidly
    n = 64
    s = VorticityEuler2D(n, mean_velocity=(0.0, 0.7))
    x = grid_points(n, 2)
    u1 = np.sin(x[:, 1]).reshape(n, n)
    w0 = s.vorticity_hat(u1, np.zeros((n, n)) + 0.7)
    t = 0.4
    w1 = s.integrate(w0, t, 1e-3)
    v1, _ = s.velocity(w1)
    np.testing.assert_allclose(v1, np.sin(x[:, 1] - 0.7 * t).reshape(n, n), atol=1e-10)


def test_checkpoints_and_guards():
    n = 32
    s = VorticityEuler2D(n)
    u1, u2 = taylor_green(s, n)
    w0 = s.vorticity_hat(u1, u2)
    seen = []
    s.integrate(w0, 0.1, 0.01, checkpoints=[0.0, 0.05], callback=lambda t, w: seen.append(t))
    assert seen == [0.0, pytest.approx(0.05)]
    with pytest.raises(ValueError, match="CFL"):
        s.integrate(w0, 1.0, 0.5)
    with pytest.raises(ValueError, match="multiple"):
        s.integrate(w0, 0.105, 0.01)
    with pytest.raises(FloatingPointError):
        s.integrate(w0 * 1e3, 0.02, 1e-5, blowup=1e-6)
