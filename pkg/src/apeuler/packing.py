"""Placement of the support centers on the base torus T^m.

Every scale ``k`` carries ``J_k`` closed balls of radius ``2 eps^k``. The
centers are chosen scale by scale so that all balls are pairwise disjoint
and the uncovered part of T^m keeps at least ``1 - sum_{n<=k} 4^-n`` of
the total measure, which stays above 2/3.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gamma, inf, pi

import numpy as np

from apeuler.errors import ConstructionError, PackingInfeasibleError
from apeuler.scale_wrap import as_fraction

log = logging.getLogger(__name__)

TWO_PI = 2.0 * pi


def ball_constant(m):
    """``C_m = 1 / (pi^(m/2) Gamma(m/2 + 1))``."""
    return 1.0 / (pi ** (m / 2) * gamma(m / 2 + 1))


def ball_measure_fraction(m, r):
    """Fraction of T^m covered by a ball of radius ``2r``: ``C_m r^m``."""
    if r < 0 or r >= pi:
        raise ValueError(f"radius parameter r={r} must lie in [0, pi)")
    return ball_constant(m) * r**m


def epsilon_zero(m, J, eps11):
    """``min{eps_11, (4 ||J||_inf)^(-1/m)}``."""
    J = list(J)
    if not J:
        raise ValueError("empty J sequence")
    return min(eps11, (4 * max(J)) ** (-1.0 / m))


def torus_delta(a, b):
    """Componentwise shortest signed displacement ``a - b`` on the torus.

    For coordinates in a product torus, taking the nearest of the 3^m
    neighbouring periodic images is the same as wrapping each component
    into ``[-pi, pi)``.
    """
    return np.mod(np.asarray(a) - np.asarray(b) + pi, TWO_PI) - pi


def torus_distance(a, b):
    delta = torus_delta(a, b)
    return np.sqrt(np.sum(delta * delta, axis=-1))


@dataclass(frozen=True)
class LayoutSpec:
    m: int
    J: tuple
    epsilon: Fraction
    j_bound: int = None

    def __post_init__(self):
        object.__setattr__(self, "J", tuple(int(j) for j in self.J))
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon))
        if self.j_bound is None:
            object.__setattr__(self, "j_bound", max(self.J, default=0))
        if self.m < 1:
            raise ConstructionError(f"m={self.m} must be >= 1")
        if not self.J or min(self.J) < 1:
            raise ConstructionError(f"J={self.J} must be a nonempty sequence of positive integers")
        if max(self.J) > self.j_bound:
            raise ConstructionError(
                f"J={self.J} exceeds the bound ||J||_inf={self.j_bound} used for eps_0"
            )
        if not 0 < self.epsilon < 1:
            raise ConstructionError(f"epsilon={self.epsilon} must lie in (0, 1)")

    @property
    def K(self):
        return len(self.J)

    def n_k(self, d):
        """``N_k = (d - m) J_k`` for every stored scale."""
        return tuple((d - self.m) * j for j in self.J)

    def radius(self, k):
        """Radius ``2 eps^k`` of the scale-k balls."""
        return 2.0 * float(self.epsilon**k)


@dataclass
class PointLayout:
    spec: LayoutSpec
    centers: dict = field(default_factory=dict)  # k -> (J_k, m) array
    eps11: float = inf
    strategy: str = "rejection"

    @property
    def m(self):
        return self.spec.m

    def radius(self, k):
        return self.spec.radius(k)

    def items(self):
        """Yield ``(k, j, center)`` with 1-based ``k`` and ``j``."""
        for k in sorted(self.centers):
            for j, y in enumerate(self.centers[k], start=1):
                yield k, j, y

    def all_centers(self):
        ks, ys = [], []
        for k, _, y in self.items():
            ks.append(k)
            ys.append(y)
        return np.array(ks, dtype=int), np.array(ys).reshape(-1, self.m)

    def occupied_measure(self, k):
        """Closed-form covered fraction of T^m after scale ``k`` (balls are disjoint)."""
        cm = ball_constant(self.m)
        eps = float(self.spec.epsilon)
        return sum(cm * self.spec.J[kk - 1] * eps ** (kk * self.m) for kk in range(1, k + 1))

    @property
    def eps0(self):
        return epsilon_zero(self.m, [self.spec.j_bound], self.eps11)

    def to_records(self):
        return [
            {"k": k, "j": j, "center": [float(c) for c in y], "radius": self.radius(k)}
            for k, j, y in self.items()
        ]

    @classmethod
    def from_records(cls, spec, records, strategy="file"):
        centers = {}
        for rec in sorted(records, key=lambda r: (r["k"], r["j"])):
            centers.setdefault(int(rec["k"]), []).append(rec["center"])
        layout = cls(spec, {k: np.array(v, dtype=float) for k, v in centers.items()},
                     strategy=strategy)
        layout.eps11 = _eps11(layout.centers.get(1, np.zeros((0, spec.m))))
        return layout


def _eps11(scale_one):
    """A quarter of the smallest pairwise distance among the scale-1 centers."""
    n = len(scale_one)
    if n < 2:
        return inf
    dmin = min(
        float(torus_distance(scale_one[a], scale_one[b])) for a in range(n) for b in range(a + 1, n)
    )
    return dmin / 4.0


def _admissible(y, r, placed, margin):
    for yy, rr in placed:
        if not torus_distance(y, yy) > r + rr + margin * r:
            return False
    return True


def _rejection(spec, rng, margin, max_tries):
    placed = []
    centers = {}
    for k in range(1, spec.K + 1):
        r = spec.radius(k)
        chosen = []
        for j in range(spec.J[k - 1]):
            for _ in range(max_tries):
                y = rng.uniform(0.0, TWO_PI, spec.m)
                if _admissible(y, r, placed, margin):
                    break
            else:
                raise PackingInfeasibleError(
                    f"no admissible center for (k={k}, j={j + 1}) after {max_tries} draws; "
                    f"epsilon={spec.epsilon} is too large for rejection sampling"
                )
            placed.append((y, r))
            chosen.append(y)
        centers[k] = np.array(chosen)
    return centers


def _equispaced(spec, margin):
    if spec.m != 1:
        raise ConstructionError("the equispaced strategy is only defined for m = 1")
    placed = []
    centers = {}
    for k in range(1, spec.K + 1):
        r = spec.radius(k)
        chosen = []
        if k == 1:
            cands = TWO_PI * np.arange(spec.J[0]) / spec.J[0]
        else:
            cands = np.arange(0.0, TWO_PI, r / 4.0)
        for c in cands:
            if len(chosen) == spec.J[k - 1]:
                break
            y = np.array([c])
            if _admissible(y, r, placed, margin):
                placed.append((y, r))
                chosen.append(y)
        if len(chosen) < spec.J[k - 1]:
            raise PackingInfeasibleError(f"equispaced scan found only {len(chosen)} centers at k={k}")
        centers[k] = np.array(chosen)
    return centers


def select_points(spec, strategy="rejection", rng_seed=0, margin=0.1, max_tries=10_000):
    """Choose the centers for every scale ``k <= K``.

    Parameters
    ----------
    spec : LayoutSpec
    strategy : {"rejection", "equispaced"}
        Seeded uniform rejection sampling, or a deterministic scan (m = 1).
        Rejection falls back to the scan when it fails and ``m == 1``.
    rng_seed : int
    margin : float
        Extra clearance required between balls, as a fraction of the
        radius of the ball being placed.

    Raises
    ------
    ConstructionError
        ``epsilon`` is not below ``eps_0``.
    PackingInfeasibleError
        The strategy could not place all centers.
    """
    eps = float(spec.epsilon)
    bound = (4 * spec.j_bound) ** (-1.0 / spec.m)
    if not eps < bound:
        raise ConstructionError(
            f"epsilon={spec.epsilon} is not below (4 ||J||_inf)^(-1/m) = {bound:.6g}"
        )
    if strategy == "rejection":
        rng = np.random.default_rng(rng_seed)
        try:
            centers = _rejection(spec, rng, margin, max_tries)
        except PackingInfeasibleError:
            if spec.m != 1:
                raise
            log.warning("rejection sampling failed, falling back to the equispaced scan")
            centers, strategy = _equispaced(spec, margin), "equispaced"
    elif strategy == "equispaced":
        centers = _equispaced(spec, margin)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    layout = PointLayout(spec, centers, strategy=strategy)
    layout.eps11 = _eps11(centers[1])
    if not eps < layout.eps0:
        raise ConstructionError(
            f"epsilon={spec.epsilon} is not below eps_0={layout.eps0:.6g} for the chosen scale-1 points"
        )
    return layout


@dataclass
class LayoutReport:
    condition_a: bool
    min_gap: float
    item_i: dict
    item_ii: dict
    item_iii: dict
    measure_balls: dict
    condition_b: bool
    leftover: float
    eps0: float
    eps_below_eps0: bool

    @property
    def passed(self):
        return (
            self.condition_a
            and self.condition_b
            and self.eps_below_eps0
            and all(self.item_i.values())
            and all(self.item_ii.values())
            and all(ok for ok, _, _ in self.item_iii.values())
            and all(ok for ok, _, _ in self.measure_balls.values())
        )


def _pair_gaps(ya, ra, yb, rb, same):
    """``dist - (ra + rb)`` for every pair (upper triangle when ``same``)."""
    if len(ya) == 0 or len(yb) == 0:
        return np.zeros(0)
    dist = torus_distance(ya[:, None, :], yb[None, :, :])
    gaps = dist - (ra + rb)
    if same:
        iu = np.triu_indices(len(ya), k=1)
        return gaps[iu]
    return gaps.ravel()


def verify_layout(layout):
    """Check conditions (A)/(B) and items (i)-(iii) of the placement.

    Closed balls are disjoint iff the center distance strictly exceeds the
    sum of radii; equality counts as a violation.
    """
    spec = layout.spec
    ks = sorted(layout.centers)
    item_i, item_ii, item_iii, measure_balls = {}, {}, {}, {}
    min_gap = inf
    cm = ball_constant(spec.m)
    eps = float(spec.epsilon)
    for k in ks:
        yk, rk = layout.centers[k], layout.radius(k)
        gaps = _pair_gaps(yk, rk, yk, rk, same=True)
        item_ii[k] = bool(np.all(gaps > 0))
        if gaps.size:
            min_gap = min(min_gap, float(gaps.min()))
        ok_i = True
        for kk in ks:
            if kk >= k:
                continue
            g = _pair_gaps(yk, rk, layout.centers[kk], layout.radius(kk), same=False)
            ok_i &= bool(np.all(g > 0))
            if g.size:
                min_gap = min(min_gap, float(g.min()))
        item_i[k] = ok_i
        leftover = 1.0 - layout.occupied_measure(k)
        bound = float(1 - sum(Fraction(1, 4**n) for n in range(1, k + 1)))
        item_iii[k] = (leftover >= bound, leftover, bound)
        level = cm * spec.J[k - 1] * eps ** (k * spec.m)
        measure_balls[k] = (level <= 4.0**-k, level, 4.0**-k)
    leftover = 1.0 - layout.occupied_measure(max(ks))
    return LayoutReport(
        condition_a=all(item_i.values()) and all(item_ii.values()),
        min_gap=min_gap,
        item_i=item_i,
        item_ii=item_ii,
        item_iii=item_iii,
        measure_balls=measure_balls,
        condition_b=leftover >= 2.0 / 3.0,
        leftover=leftover,
        eps0=layout.eps0,
        eps_below_eps0=eps < layout.eps0,
    )


def monte_carlo_leftover(layout, k, samples=100_000, rng=None):
    """Monte-Carlo estimate of ``|T^m \\ E_k| / |T^m|`` and its standard error."""
    rng = np.random.default_rng(rng)
    pts = rng.uniform(0.0, TWO_PI, (samples, layout.m))
    covered = np.zeros(samples, dtype=bool)
    for kk in range(1, k + 1):
        r = layout.radius(kk)
        for y in layout.centers[kk]:
            covered |= torus_distance(pts, y) <= r
    frac = 1.0 - covered.mean()
    return frac, np.sqrt(frac * (1.0 - frac) / samples)
