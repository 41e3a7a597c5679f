"""Compactly supported stationary Euler flow on R^d, d even.

The flow is the rotational field ``v(x) = f(|x|) J x`` with
``f(r) = (1 - r^2)^q`` on the unit ball, where ``J`` rotates each
coordinate pair, ``J(x1, x2, x3, x4, ...) = (-x2, x1, -x4, x3, ...)``.
Since ``J`` is skew, ``div v = 0`` and ``v . grad v = -f(|x|)^2 x``; the
pressure ``p(x) = -(1 - |x|^2)^(2q+1) / (4q + 2)`` balances it and
vanishes outside the ball.

Both fields are functions of ``s = |x|^2`` times at most a linear factor,
so every partial derivative is evaluated exactly through
:func:`apeuler.kernels.radial_derivative`.
"""
from dataclasses import dataclass

import numpy as np

from apeuler import kernels
from apeuler.errors import InvalidProfileError, RegularityError, UnsupportedDimensionError


def as_points(x, d):
    """Return ``x`` as a C-contiguous ``(npts, d)`` array and a flag for single points."""
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    arr = np.ascontiguousarray(arr.reshape(-1, d))
    return arr, single


def _check_alpha(alpha, d):
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != d or min(alpha) < 0:
        raise ValueError(f"multi-index {alpha} does not fit dimension {d}")
    return alpha


def lower(alpha, i):
    """``alpha - e_i``."""
    out = list(alpha)
    out[i] -= 1
    return tuple(out)


def raise_index(alpha, i):
    """``alpha + e_i``."""
    out = list(alpha)
    out[i] += 1
    return tuple(out)


@dataclass(frozen=True)
class BaseFlow:
    d: int
    q: int

    def __post_init__(self):
        if self.d % 2 or self.d < 2:
            raise UnsupportedDimensionError(
                f"d={self.d}: only even d >= 2 is built; the d = 3 Gavrilov "
                "flow is out of scope (no closed form suitable for exact checks)"
            )
        if self.q < 1:
            raise InvalidProfileError(f"profile exponent q={self.q} must be >= 1")

    @property
    def support_radius(self):
        return 1.0

    @property
    def velocity_order(self):
        """Highest derivative order that is continuous across the unit sphere."""
        return self.q - 1

    @property
    def pressure_order(self):
        return 2 * self.q

    def profile(self, r):
        r = np.asarray(r, dtype=np.float64)
        return np.where(np.abs(r) < 1.0, (1.0 - np.minimum(r * r, 1.0)) ** self.q, 0.0)

    def _partner(self, i):
        # (Jx)_i = sign * x_partner
        return (i + 1, -1.0) if i % 2 == 0 else (i - 1, 1.0)

    def velocity_derivative(self, x, alpha):
        """All components of ``d^alpha v`` at the points ``x``."""
        alpha = _check_alpha(alpha, self.d)
        n = sum(alpha)
        if n > self.velocity_order:
            raise RegularityError(
                f"|alpha|={n} exceeds the C^{self.velocity_order} regularity of v (q={self.q})"
            )
        pts, single = as_points(x, self.d)
        s = np.einsum("ij,ij->i", pts, pts)
        gtab = kernels.power_profile_table(s, self.q, n)
        dg = kernels.radial_derivative(pts, alpha, gtab)
        lowered = {}
        for c in range(self.d):
            if alpha[c]:
                lowered[c] = kernels.radial_derivative(pts, lower(alpha, c), gtab)
        out = np.empty((pts.shape[0], self.d))
        for i in range(self.d):
            c, sign = self._partner(i)
            col = sign * pts[:, c] * dg
            if c in lowered:
                col = col + sign * alpha[c] * lowered[c]
            out[:, i] = col
        return out[0] if single else out

    def velocity(self, x):
        return self.velocity_derivative(x, (0,) * self.d)

    def derivative(self, x, alpha, component):
        return self.velocity_derivative(x, alpha)[..., component]

    def pressure_derivative(self, x, alpha):
        alpha = _check_alpha(alpha, self.d)
        n = sum(alpha)
        if n > self.pressure_order:
            raise RegularityError(
                f"|alpha|={n} exceeds the C^{self.pressure_order} regularity of p_v"
            )
        pts, single = as_points(x, self.d)
        s = np.einsum("ij,ij->i", pts, pts)
        a = 2 * self.q + 1
        gtab = kernels.power_profile_table(s, a, n)
        out = kernels.radial_derivative(pts, alpha, gtab) * (-1.0 / (2 * a))
        return out[0] if single else out

    def pressure(self, x):
        return self.pressure_derivative(x, (0,) * self.d)

    def pressure_integral(self):
        """Exact integral of ``p_v`` over R^d."""
        from scipy.special import beta, gamma

        a = 2 * self.q + 1
        # int_0^1 (1 - r^2)^a r^(d-1) dr = B(d/2, a + 1) / 2
        sphere = 2 * np.pi ** (self.d / 2) / gamma(self.d / 2)
        return -sphere * beta(self.d / 2, a + 1) / 2 / (2 * a)


def make_base_flow(d, q):
    return BaseFlow(d=int(d), q=int(q))


def eval_velocity(bf, x):
    return bf.velocity(x)


def eval_derivative(bf, x, alpha, component):
    return bf.derivative(x, alpha, component)


def eval_pressure(bf, x):
    return bf.pressure(x)
