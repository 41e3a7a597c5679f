"""Radial cutoffs and the stationary drift fields built from them.

The cutoff of scale ``k`` is ``chi_k(r) = P(r^2 / eps^(2k))`` where ``P``
equals 1 on ``[0, 1]``, 0 on ``[4, inf)`` and ``1 - I_p((s - 1) / 3)`` in
between, ``I_p`` being the order-p smoothstep. ``P`` is C^p, so
``chi_k(|z|)`` is C^p on R^m, equal to 1 for ``|z| <= eps^k`` and 0 for
``|z| >= 2 eps^k``, and ``|d^n chi_k| = eps^(-kn) |d^n chi_1-shape|``.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from apeuler import kernels
from apeuler.base_flow import as_points
from apeuler.errors import RegularityError
from apeuler.packing import torus_delta
from apeuler.scale_wrap import as_fraction


@dataclass(frozen=True)
class Cutoff:
    k: int
    epsilon: Fraction
    p: int

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        if self.p < 1:
            raise ValueError(f"cutoff smoothness p={self.p} must be >= 1")

    @property
    def inner_radius(self):
        return float(self.epsilon**self.k)

    @property
    def outer_radius(self):
        return 2.0 * self.inner_radius

    def _table(self, s, n):
        rho2 = float(self.epsilon ** (2 * self.k))
        tab = kernels.smoothstep_table(s / rho2, self.p, n)
        for j in range(1, n + 1):
            tab[j] *= float(self.epsilon ** (-2 * self.k * j))
        return tab

    def derivative(self, z, alpha):
        """``d^alpha chi_k(|z|)`` for displacements ``z`` in R^m."""
        alpha = tuple(int(a) for a in alpha)
        n = sum(alpha)
        if n > self.p:
            raise RegularityError(f"|alpha|={n} exceeds the C^{self.p} cutoff regularity")
        pts, single = as_points(z, len(alpha))
        s = np.einsum("ij,ij->i", pts, pts)
        out = kernels.radial_derivative(pts, alpha, self._table(s, n))
        return out[0] if single else out

    def radial(self, r, n=0):
        """``d^n/dr^n chi_k(r)`` for real ``r`` (even extension)."""
        r = np.asarray(r, dtype=np.float64)
        out = self.derivative(r.reshape(-1, 1), (n,))
        return out.reshape(r.shape)

    def __call__(self, r):
        return self.radial(r, 0)


def make_cutoff(k, epsilon, p):
    return Cutoff(k=int(k), epsilon=epsilon, p=int(p))


class DriftField:
    """``w_k(x) = (0, F_k(x'))`` with ``F_k = sum_j nu_{k,j} chi_k(|x' - y_{k,j}|)``.

    Each component depends on ``x'`` only and the first ``m`` components
    vanish, so ``div w_k = 0`` and ``w_k . grad w_k = 0``.
    """

    def __init__(self, cutoff, centers, nus, d):
        self.cutoff = cutoff
        self.centers = np.asarray(centers, dtype=np.float64).reshape(len(nus), -1)
        self.nus = np.asarray(nus, dtype=np.float64).reshape(len(nus), -1)
        self.d = d
        self.m = self.centers.shape[1]
        if self.nus.shape[1] != d - self.m:
            raise ValueError("frequency block does not match d - m")

    @property
    def order(self):
        return self.cutoff.p

    def derivative(self, x, alpha):
        alpha = tuple(int(a) for a in alpha)
        if sum(alpha) > self.order:
            raise RegularityError(f"|alpha|={sum(alpha)} exceeds the drift regularity C^{self.order}")
        pts, single = as_points(x, self.d)
        out = np.zeros_like(pts)
        if any(alpha[self.m:]):
            return out[0] if single else out
        reach = self.cutoff.outer_radius
        for y, nu in zip(self.centers, self.nus):
            z = torus_delta(pts[:, : self.m], y)
            near = np.einsum("ij,ij->i", z, z) < reach * reach
            if near.any():
                chi = self.cutoff.derivative(z[near], alpha[: self.m])
                out[near, self.m:] += chi[:, None] * nu[None, :]
        return out[0] if single else out

    def __call__(self, x):
        return self.derivative(x, (0,) * self.d)


def eval_drift(df, x, alpha):
    return df.derivative(x, alpha)
