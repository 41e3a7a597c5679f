"""Pure NumPy implementations of the numerical kernels.

These mirror the compiled routines in ``_ckernels.pyx`` one to one and are
used whenever the extension is unavailable (or ``APEULER_PURE_PYTHON`` is
set). All functions take C-contiguous float64 arrays.
"""
from functools import lru_cache
from itertools import product
from math import comb, factorial

import numpy as np


@lru_cache(maxsize=None)
def radial_terms(alpha):
    """Expansion terms of ``d^alpha G(|x|^2)``.

    Returns a tuple of ``(coef, exponents, order)`` so that

        d^alpha G(|x|^2) = sum coef * prod(x_i ** exponents_i) * G^(order)(|x|^2)
    """
    terms = []
    n = sum(alpha)
    for beta in product(*(range(a // 2 + 1) for a in alpha)):
        coef = 1
        expo = []
        for a, b in zip(alpha, beta):
            e = a - 2 * b
            coef *= factorial(a) // (factorial(b) * factorial(e)) * 2**e
            expo.append(e)
        terms.append((float(coef), tuple(expo), n - sum(beta)))
    return tuple(terms)


def radial_derivative(x, alpha, gtab):
    """Evaluate ``d^alpha G(|x|^2)`` at each row of ``x``.

    Parameters
    ----------
    x : (npts, d) array
    alpha : sequence of int, length d
    gtab : (|alpha| + 1, npts) array with ``gtab[j] = G^(j)(|x|^2)``
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros(x.shape[0])
    for coef, expo, order in radial_terms(tuple(alpha)):
        term = coef * gtab[order]
        for i, e in enumerate(expo):
            if e:
                term = term * x[:, i] ** e
        out += term
    return out


def power_profile_table(s, a, jmax):
    """Table of derivatives of ``G(s) = (1 - s)^a`` for ``s < 1``, zero beyond.

    Row ``j`` holds ``G^(j)(s)`` for ``j = 0..jmax``.
    """
    s = np.asarray(s, dtype=np.float64)
    tab = np.zeros((jmax + 1, s.shape[0]))
    inside = s < 1.0
    one_minus = np.where(inside, 1.0 - s, 0.0)
    for j in range(min(jmax, a) + 1):
        c = (-1) ** j * factorial(a) // factorial(a - j)
        tab[j] = np.where(inside, c * one_minus ** (a - j), 0.0)
    return tab


def smoothstep_table(sigma, p, jmax):
    """Derivatives of the even cutoff profile in the squared variable.

    ``P(sigma) = 1`` for ``sigma <= 1``, ``0`` for ``sigma >= 4`` and
    ``1 - I_p((sigma - 1) / 3)`` in between, where ``I_p`` is the order-p
    smoothstep (regularized incomplete beta with parameters p+1, p+1).
    Row ``j`` holds ``P^(j)(sigma)``.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    tab = np.zeros((jmax + 1, sigma.shape[0]))
    mid = (sigma > 1.0) & (sigma < 4.0)
    t = np.where(mid, (sigma - 1.0) / 3.0, 0.0)
    u = 1.0 - t
    # Bernstein form keeps every term nonnegative
    ip = np.zeros_like(t)
    for i in range(p + 1, 2 * p + 2):
        ip += comb(2 * p + 1, i) * t**i * u ** (2 * p + 1 - i)
    tab[0] = np.where(sigma <= 1.0, 1.0, np.where(mid, 1.0 - ip, 0.0))
    inv_beta = factorial(2 * p + 1) / factorial(p) ** 2
    for j in range(1, jmax + 1):
        r = j - 1
        acc = np.zeros_like(t)
        for i in range(r + 1):
            if i > p or r - i > p:
                continue
            c = (comb(r, i) * (factorial(p) // factorial(p - i))
                 * (-1) ** (r - i) * (factorial(p) // factorial(p - r + i)))
            acc += c * t ** (p - i) * u ** (p - r + i)
        tab[j] = np.where(mid, -inv_beta * acc / 3.0**j, 0.0)
    return tab
