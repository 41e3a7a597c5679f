"""The truncated almost-periodic solution and its torus embedding.

    u(t, x) = sum_{k<=K} sum_j vbar_k(x' - y_kj, x'' - theta_kj - nu_kj t) + w_k(x')
    p(t, x) = sum_{k<=K} sum_j pbar_k(x' - y_kj, x'' - theta_kj - nu_kj t)

Every copy lives in the cylinder ``B(y_kj, 2 eps^k) x T^(d-m)`` and the
cylinders are pairwise disjoint, so a point sees at most one copy. Points
are routed to their copy with one periodic KD-tree per scale.
"""
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from apeuler.base_flow import as_points, raise_index
from apeuler.cutoff_drift import Cutoff
from apeuler.errors import NoWitnessError, RegularityError
from apeuler.packing import TWO_PI, torus_delta
from apeuler.scale_wrap import ScaledFlow, ScaleParams


class BlockVector:
    """A finite family of blocks ``(J_k, d - m)`` indexed by scale ``k >= 1``."""

    def __init__(self, blocks):
        self.blocks = [np.atleast_2d(np.asarray(b, dtype=np.float64)).copy() for b in blocks]

    @classmethod
    def zeros(cls, shapes):
        return cls([np.zeros(s) for s in shapes])

    @classmethod
    def from_flat(cls, flat, shapes):
        flat = np.asarray(flat, dtype=np.float64).ravel()
        out, start = [], 0
        for s in shapes:
            n = int(np.prod(s))
            out.append(flat[start:start + n].reshape(s))
            start += n
        if start != flat.size:
            raise ValueError(f"expected {start} entries, got {flat.size}")
        return cls(out)

    @property
    def shapes(self):
        return [b.shape for b in self.blocks]

    def flat(self):
        return np.concatenate([b.ravel() for b in self.blocks]) if self.blocks else np.zeros(0)

    def sup_norm(self):
        """``sup_k |block_k|`` (Euclidean norm of each block)."""
        return max((float(np.linalg.norm(b)) for b in self.blocks), default=0.0)

    def block(self, k):
        return self.blocks[k - 1]

    def __len__(self):
        return len(self.blocks)


class EmbeddingPoint(BlockVector):
    """A point of the product torus; entries are kept in ``[0, 2 pi)``."""

    def __init__(self, blocks):
        super().__init__(blocks)
        self.blocks = [np.mod(b, TWO_PI) for b in self.blocks]

    def shifted(self, nus, t):
        """``theta + nu t`` reduced mod ``2 pi``."""
        return EmbeddingPoint([b + t * np.asarray(n) for b, n in zip(self.blocks, nus)])


class TangentVector(BlockVector):
    pass


@dataclass(frozen=True)
class _Copy:
    k: int
    j: int
    center: np.ndarray
    nu: np.ndarray


class AssembledField:
    """The pair ``(u, p_u)``, ``d_t u`` and the embedding ``U`` up to depth ``K``.

    Parameters
    ----------
    base : BaseFlow
    S : int
    layout : PointLayout
    freqs : FrequencySeq
    p : int
        Cutoff smoothness order.
    K : int, optional
        Truncation depth, at most the number of scales in ``layout``.
    theta : EmbeddingPoint, optional
        Initial phase; zero by default.
    pressure_scale : float
        Multiplies the pressure. Anything but 1 breaks the solution; it
        exists to check that audits catch a corrupted field.
    """

    def __init__(self, base, S, layout, freqs, p, K=None, theta=None, pressure_scale=1.0):
        self.base = base
        self.S = int(S)
        self.layout = layout
        self.freqs = freqs
        self.p = int(p)
        self.d = base.d
        self.m = layout.m
        self.epsilon = layout.spec.epsilon
        self.K = layout.spec.K if K is None else int(K)
        if self.K > layout.spec.K or self.K > freqs.K:
            raise ValueError(f"K={self.K} exceeds the stored scales")
        self.pressure_scale = float(pressure_scale)
        self.shapes = [(layout.spec.J[k - 1], self.d - self.m) for k in range(1, self.K + 1)]
        self.theta = EmbeddingPoint.zeros(self.shapes) if theta is None else EmbeddingPoint(theta.blocks)
        self.flows = {k: ScaledFlow(base, ScaleParams(self.epsilon, self.S, k)) for k in self.scales}
        self.cutoffs = {k: Cutoff(k, self.epsilon, self.p) for k in self.scales}
        self.copies = {
            k: [_Copy(k, j + 1, np.mod(layout.centers[k][j], TWO_PI), freqs.block(k)[j])
                for j in range(layout.spec.J[k - 1])]
            for k in self.scales
        }
        self._trees = {
            k: cKDTree(np.array([c.center for c in self.copies[k]]), boxsize=TWO_PI)
            for k in self.scales
        }

    @property
    def scales(self):
        return range(1, self.K + 1)

    @property
    def nus(self):
        return [self.freqs.block(k) for k in self.scales]

    def iter_copies(self):
        for k in self.scales:
            yield from self.copies[k]

    @property
    def velocity_order(self):
        return min(self.base.velocity_order, self.p)

    # -- routing -----------------------------------------------------------

    def locate(self, x, scales=None):
        """Copy index per point: arrays ``(k, j)`` (1-based), zero where no cylinder."""
        pts = np.asarray(x, dtype=np.float64).reshape(-1, self.d)
        xp = np.mod(pts[:, : self.m], TWO_PI)
        ks = np.zeros(len(pts), dtype=int)
        js = np.zeros(len(pts), dtype=int)
        for k in self.scales if scales is None else scales:
            tree = self._trees[k]
            dist, idx = tree.query(xp, distance_upper_bound=self.cutoffs[k].outer_radius)
            hit = idx < tree.n
            ks[hit] = k
            js[hit] = idx[hit] + 1
        return ks, js

    def _groups(self, pts, scales):
        ks, js = self.locate(pts, scales)
        for k in self.scales if scales is None else scales:
            for c in self.copies[k]:
                sel = np.nonzero((ks == k) & (js == c.j))[0]
                if sel.size:
                    yield c, sel

    def _local(self, pts, copy, shift):
        anchor = np.concatenate([copy.center, shift])
        return torus_delta(pts, anchor)

    def _shifts(self, phase):
        return {k: phase.block(k) for k in self.scales}

    def _directional(self, flow, local, alpha, vec):
        """``-sum_i vec_i d_{x''_i} d^alpha vbar`` at local coordinates."""
        out = np.zeros((len(local), self.d))
        for i, vi in enumerate(vec):
            if vi:
                out -= vi * flow.velocity_derivative(local, raise_index(alpha, self.m + i))
        return out

    def _check(self, alpha, extra=0):
        n = sum(alpha) + extra
        if n > self.base.velocity_order:
            raise RegularityError(f"derivative order {n} exceeds C^{self.base.velocity_order}")

    # -- evaluation on shifts --------------------------------------------

    def _velocity(self, shifts, x, alpha, scales=None, drift=True):
        alpha = tuple(int(a) for a in alpha)
        self._check(alpha)
        pts, single = as_points(x, self.d)
        out = np.zeros_like(pts)
        xpp = any(alpha[self.m:])
        for c, sel in self._groups(pts, scales):
            local = self._local(pts[sel], c, shifts[c.k][c.j - 1])
            val = self.flows[c.k].velocity_derivative(local, alpha)
            if drift and not xpp:
                chi = self.cutoffs[c.k].derivative(local[:, : self.m], alpha[: self.m])
                val[:, self.m:] += chi[:, None] * c.nu[None, :]
            out[sel] = val
        return out[0] if single else out

    def _transport(self, shifts, x, alpha, directions, scales=None):
        alpha = tuple(int(a) for a in alpha)
        self._check(alpha, 1)
        pts, single = as_points(x, self.d)
        out = np.zeros_like(pts)
        for c, sel in self._groups(pts, scales):
            local = self._local(pts[sel], c, shifts[c.k][c.j - 1])
            out[sel] = self._directional(self.flows[c.k], local, alpha, directions[c.k][c.j - 1])
        return out[0] if single else out

    def _pressure(self, shifts, x, alpha, scales=None):
        alpha = tuple(int(a) for a in alpha)
        pts, single = as_points(x, self.d)
        out = np.zeros(len(pts))
        for c, sel in self._groups(pts, scales):
            local = self._local(pts[sel], c, shifts[c.k][c.j - 1])
            out[sel] = self.pressure_scale * self.flows[c.k].pressure_derivative(local, alpha)
        return out[0] if single else out

    def _time_shifts(self, t):
        return {k: np.mod(self.theta.block(k) + t * self.freqs.block(k), TWO_PI) for k in self.scales}

    # -- public API --------------------------------------------------------

    def eval_u(self, t, x, alpha=None, scales=None):
        alpha = (0,) * self.d if alpha is None else alpha
        return self._velocity(self._time_shifts(t), x, alpha, scales)

    def eval_dtu(self, t, x, alpha=None, scales=None):
        alpha = (0,) * self.d if alpha is None else alpha
        nus = {k: self.freqs.block(k) for k in self.scales}
        return self._transport(self._time_shifts(t), x, alpha, nus, scales)

    def eval_pressure_sum(self, t, x, alpha=None, scales=None, mean_free=False):
        alpha = (0,) * self.d if alpha is None else alpha
        out = self._pressure(self._time_shifts(t), x, alpha, scales)
        if mean_free and not any(alpha):
            out = out - self.pressure_mean()
        return out

    def pressure_mean(self):
        """Exact mean of ``p_u`` over T^d (independent of time)."""
        total = sum(len(self.copies[k]) * self.flows[k].pressure_integral for k in self.scales)
        return self.pressure_scale * total / TWO_PI**self.d

    def eval_embedding(self, theta, x, alpha=None, scales=None):
        alpha = (0,) * self.d if alpha is None else alpha
        theta = theta if isinstance(theta, EmbeddingPoint) else EmbeddingPoint(theta.blocks)
        return self._velocity(self._shifts(theta), x, alpha, scales)

    def eval_embedding_derivative(self, theta, theta_hat, x, alpha=None, scales=None):
        alpha = (0,) * self.d if alpha is None else alpha
        theta = theta if isinstance(theta, EmbeddingPoint) else EmbeddingPoint(theta.blocks)
        dirs = {k: theta_hat.block(k) for k in self.scales}
        return self._transport(self._shifts(theta), x, alpha, dirs, scales)

    def embedding_pressure(self, theta, x, alpha=None):
        alpha = (0,) * self.d if alpha is None else alpha
        theta = theta if isinstance(theta, EmbeddingPoint) else EmbeddingPoint(theta.blocks)
        return self._pressure(self._shifts(theta), x, alpha)

    def initial_data(self, x):
        """``u_theta = U(theta)`` at the stored initial phase."""
        return self.eval_embedding(self.theta, x)

    def phase_at(self, t):
        return self.theta.shifted(self.nus, t)

    def copy_anchor(self, copy, shift):
        """Position of a copy's moving center on T^d."""
        return np.concatenate([copy.center, np.mod(shift, TWO_PI)])

    def non_symmetry_witness(self, theta=None, extra_directions=0, rng=None):
        """Points showing that ``U(theta)`` is not invariant under translations.

        For each direction ``e`` (the coordinate axes plus optional random
        unit vectors) returns ``(e, x, delta, |U(x + delta e) - U(x)|)`` with
        ``x`` just inside the support of the largest copy and ``x + delta e``
        just outside it.
        """
        theta = self.theta if theta is None else theta
        copies = list(self.iter_copies())
        if not copies:
            raise NoWitnessError("no active copy: the field has no compact structure to witness")
        c = copies[0]
        r = self.flows[c.k].support_radius
        anchor = self.copy_anchor(c, theta.block(c.k)[c.j - 1])
        dirs = list(np.eye(self.d))
        if extra_directions:
            g = np.random.default_rng(rng).normal(size=(extra_directions, self.d))
            dirs.extend(g / np.linalg.norm(g, axis=1, keepdims=True))
        out = []
        for e in dirs:
            x = anchor + 0.9 * r * e
            delta = 0.2 * r
            u0 = self.eval_embedding(theta, x)
            u1 = self.eval_embedding(theta, x + delta * e)
            gap = float(np.linalg.norm(u1 - u0))
            if not gap > 0:
                raise NoWitnessError(f"direction {e} produced no witness")
            out.append((np.asarray(e), x, delta, gap))
        return out
