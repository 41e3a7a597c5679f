import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from apeuler import _kernels_py, kernels
from apeuler.scale_wrap import multi_indices

BACKENDS = kernels.available_backends()


def sympy_radial(d, a, alpha):
    xs = sp.symbols(f"x0:{d}", real=True)
    g = (1 - sum(x**2 for x in xs)) ** a
    expr = sp.diff(g, *[v for v, k in zip(xs, alpha) for _ in range(k)]) if sum(alpha) else g
    return sp.lambdify(xs, expr, "numpy")


@pytest.mark.parametrize("name", sorted(BACKENDS))
@pytest.mark.parametrize("d", [2, 4])
def test_radial_derivative_matches_symbolic(name, d, rng):
    mod = BACKENDS[name]
    a = 6
    pts = rng.uniform(-0.55, 0.55, (40, d))
    s = np.einsum("ij,ij->i", pts, pts)
    for n in range(5):
        for alpha in multi_indices(d, n):
            want = sympy_radial(d, a, alpha)(*pts.T) * np.ones(len(pts))
            got = mod.radial_derivative(pts, alpha, mod.power_profile_table(s, a, n))
            np.testing.assert_allclose(got, want, rtol=1e-11, atol=1e-12)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_power_profile_table_is_zero_outside(name):
    mod = BACKENDS[name]
    s = np.array([0.0, 0.5, 1.0, 1.5])
    tab = mod.power_profile_table(s, 4, 6)
    assert tab.shape == (7, 4)
    assert np.all(tab[:, 2:] == 0.0)
    np.testing.assert_allclose(tab[:, 0], [1, -4, 12, -24, 24, 0, 0])
    assert np.all(tab[5:] == 0.0)


def test_radial_terms_count_and_cache():
    terms = kernels.radial_terms((3, 2))
    # beta ranges over {0,1} x {0,1}
    assert len(terms) == 4
    assert kernels.radial_terms((3, 2)) is terms


def test_smoothstep_table_matches_symbolic():
    p = 3
    sig = sp.Symbol("s")
    t = (sig - 1) / 3
    # order-p smoothstep through its derivative t^p (1-t)^p
    dens = t**p * (1 - t) ** p
    norm = sp.integrate(dens.subs(sig, 3 * sp.Symbol("u") + 1), (sp.Symbol("u"), 0, 1))
    inner = 1 - sp.integrate(dens, (sig, 1, sig)) / (3 * norm)
    sigma = np.array([0.5, 1.3, 2.0, 2.9, 3.7, 4.5])
    tab = _kernels_py.smoothstep_table(sigma, p, p)
    for j in range(p + 1):
        f = sp.lambdify(sig, sp.diff(inner, sig, j))
        want = [0.0 if (s <= 1 and j) or s >= 4 else (1.0 if s <= 1 else float(f(s))) for s in sigma]
        np.testing.assert_allclose(tab[j], want, rtol=1e-11, atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1.2, 1.2), min_size=2, max_size=2),
       st.tuples(st.integers(0, 4), st.integers(0, 4)),
       st.integers(1, 9))
def test_backends_agree(x, alpha, a):
    if "cython" not in BACKENDS:
        pytest.skip("extension not built")
    pts = np.array([x])
    s = np.einsum("ij,ij->i", pts, pts)
    n = sum(alpha)
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    ta, tb = py.power_profile_table(s, a, n), cy.power_profile_table(s, a, n)
    np.testing.assert_allclose(ta, tb, rtol=1e-13, atol=1e-300)
    np.testing.assert_allclose(py.radial_derivative(pts, alpha, ta), cy.radial_derivative(pts, alpha, tb),
                               rtol=1e-12, atol=1e-12)


def test_backend_name():
    assert kernels.BACKEND in ("python", "cython")
