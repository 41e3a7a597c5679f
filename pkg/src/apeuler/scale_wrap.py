"""Rescaled copies of the base flow, torus periodization and seminorms.

For a scale index ``k`` the copy is

    v_k(x) = eps^((S+1)(k-1)) v(x / eps^k),
    p_k(x) = eps^(2(S+1)(k-1)) p_v(x / eps^k),

supported in the ball of radius ``eps^k``. Derivatives follow from the
chain rule, so ``||v_k||_n`` equals ``eps^(k(S+1-n)-S-1) ||v||_n`` on
dilated sample sets.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product

import numpy as np

from apeuler.base_flow import as_points

TWO_PI = 2.0 * np.pi


def as_fraction(value):
    """Parse ``value`` (Fraction, int, ``"p/q"`` string or float) as an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    return Fraction(value)


@dataclass(frozen=True)
class ScaleParams:
    epsilon: Fraction
    S: int
    k: int

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon={self.epsilon} must lie in (0, 1)")
        if self.S < 1 or self.k < 1:
            raise ValueError("S and k must be positive integers")

    def power(self, exponent):
        """``eps ** exponent`` computed exactly, then rounded once."""
        return float(self.epsilon**exponent)

    @property
    def radius(self):
        return self.power(self.k)

    @property
    def amplitude(self):
        return self.power((self.S + 1) * (self.k - 1))

    def velocity_exponent(self, n):
        return self.k * (self.S + 1 - n) - self.S - 1

    def pressure_exponent(self, n):
        return self.k * (2 * self.S + 2 - n) - 2 * self.S - 2


class ScaledFlow:
    """The pair ``(v_k, p_{v_k})`` on R^d."""

    def __init__(self, base, params):
        self.base = base
        self.params = params
        self.d = base.d
        self._inv_radius = float(1 / params.epsilon**params.k)

    @property
    def support_radius(self):
        return self.params.radius

    @property
    def velocity_order(self):
        return self.base.velocity_order

    @property
    def pressure_order(self):
        return self.base.pressure_order

    def velocity_derivative(self, x, alpha):
        pts, single = as_points(x, self.d)
        factor = self.params.power(self.params.velocity_exponent(sum(alpha)))
        out = factor * self.base.velocity_derivative(pts * self._inv_radius, alpha)
        return out[0] if single else out

    def velocity(self, x):
        return self.velocity_derivative(x, (0,) * self.d)

    def pressure_derivative(self, x, alpha):
        pts, single = as_points(x, self.d)
        p = self.params
        factor = p.power(p.pressure_exponent(sum(alpha)))
        out = factor * self.base.pressure_derivative(pts * self._inv_radius, alpha)
        return out[0] if single else out

    def pressure(self, x):
        return self.pressure_derivative(x, (0,) * self.d)

    @cached_property
    def pressure_integral(self):
        p = self.params
        return float(p.epsilon ** (2 * (p.S + 1) * (p.k - 1) + p.k * self.d)) * self.base.pressure_integral()


def rescale(bf, sp):
    return ScaledFlow(bf, sp)


def wrap(x):
    """Map coordinates into the fundamental domain ``[-pi, pi)``."""
    return np.mod(np.asarray(x, dtype=np.float64) + np.pi, TWO_PI) - np.pi


class PeriodizedFlow:
    """Lattice sum of a compactly supported field, evaluated by wrapping.

    With support radius below ``pi`` at most one lattice translate is
    nonzero at any point, so wrapping into ``[-pi, pi)^d`` is exact.
    """

    def __init__(self, field):
        if not field.support_radius < np.pi:
            raise ValueError(
                f"support radius {field.support_radius} >= pi: periodic copies would overlap"
            )
        self.field = field
        self.d = field.d

    @property
    def support_radius(self):
        return self.field.support_radius

    def velocity_derivative(self, x, alpha):
        return self.field.velocity_derivative(wrap(x), alpha)

    def velocity(self, x):
        return self.velocity_derivative(x, (0,) * self.d)

    def pressure_derivative(self, x, alpha):
        return self.field.pressure_derivative(wrap(x), alpha)

    def pressure(self, x):
        return self.pressure_derivative(x, (0,) * self.d)


def periodize(field):
    return PeriodizedFlow(field)


def multi_indices(d, n):
    """All ``alpha`` in N_0^d with ``|alpha| = n``, in lexicographic order."""
    if d == 1:
        return [(n,)]
    return [(a,) + rest for a in range(n, -1, -1) for rest in multi_indices(d - 1, n - a)]


def support_grid(d, per_dim=65, half_width=1.0, radial_samples=1025):
    """Sample points for sup-norm audits of a field supported near the origin.

    A tensor grid on ``[-half_width, half_width]^d`` (odd ``per_dim`` keeps
    the origin and makes ``2 * per_dim - 1`` a refinement of ``per_dim``)
    plus dense radial lines along every axis and the main diagonal, where
    the extrema of radial profiles sit.
    """
    axis = np.linspace(-half_width, half_width, per_dim)
    grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    parts = [grid]
    if radial_samples:
        r = np.linspace(-half_width, half_width, radial_samples)
        dirs = list(np.eye(d)) + [np.ones(d) / np.sqrt(d)]
        parts.extend(np.outer(r, u) for u in dirs)
    return np.ascontiguousarray(np.concatenate(parts))


def seminorm(deriv, n, points, d=None):
    """Grid supremum of ``max_{|alpha|=n} |d^alpha f|``.

    ``deriv(points, alpha)`` returns either scalars ``(npts,)`` or vectors
    ``(npts, c)``; vectors are measured in the Euclidean norm. The result
    is a lower bound for the true seminorm and is monotone under adding
    points.
    """
    points = np.asarray(points, dtype=np.float64)
    d = points.shape[1] if d is None else d
    best = 0.0
    for alpha in multi_indices(d, n):
        vals = np.asarray(deriv(points, alpha))
        mags = np.abs(vals) if vals.ndim == 1 else np.sqrt(np.einsum("ij,ij->i", vals, vals))
        if mags.size:
            best = max(best, float(mags.max()))
    return best
