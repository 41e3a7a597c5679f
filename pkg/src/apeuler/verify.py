"""Numerical audits of the assembled solution.

Closed-form checks (residuals, scaling laws, seminorm bounds) use exact
derivatives, so a failure points at an implementation bug rather than at
discretization. The two spectral checks (pressure through the inverse
Laplacian, and time integration) are judged by grid refinement.
"""
import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import pi

import numpy as np

from apeuler.assembly import EmbeddingPoint, TangentVector
from apeuler.cutoff_drift import Cutoff
from apeuler.errors import NoWitnessError
from apeuler.frequencies import check_smallness, exact_combination, probe_nonresonance
from apeuler.packing import ball_measure_fraction, verify_layout
from apeuler.scale_wrap import multi_indices, seminorm, support_grid
from apeuler.spectral import VorticityEuler2D, grid_points, inverse_neg_laplacian

IDENTITY_TOL = 1e-11
SCALING_TOL = 1e-12
BOUND_TOL = 1e-10


@dataclass
class CheckEntry:
    name: str
    audits: str
    measured: float
    bound: float
    passed: bool
    tolerance: float = 0.0
    grid: str = ""
    wall_time: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def ratio(self):
        if self.bound in (None, 0):
            return None
        return self.measured / self.bound


@dataclass
class VerificationReport:
    entries: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def add(self, entry):
        self.entries.append(entry)
        return entry

    def extend(self, entries):
        for e in entries:
            self.add(e)

    @property
    def passed(self):
        return all(e.passed for e in self.entries)

    def failures(self):
        return [e for e in self.entries if not e.passed]

    def to_dict(self, metadata=None):
        """Deterministic content; wall times and ``metadata`` go under ``"metadata"``."""
        entries = []
        for e in self.entries:
            row = asdict(e)
            row.pop("wall_time")
            row["ratio"] = e.ratio
            entries.append(row)
        meta = dict(metadata or {})
        meta["wall_time"] = {e.name: e.wall_time for e in self.entries}
        return {"passed": self.passed, "config": self.config, "entries": entries, "metadata": meta}

    def to_json(self, metadata=None):
        return json.dumps(_jsonable(self.to_dict(metadata)), indent=2, sort_keys=True) + "\n"

    def summary(self):
        lines = []
        for e in self.entries:
            mark = "PASS" if e.passed else "FAIL"
            bound = "-" if e.bound is None else f"{e.bound:.3e}"
            lines.append(f"[{mark}] {e.name}: measured={e.measured:.3e} bound={bound}  ({e.audits})")
        n_fail = len(self.failures())
        lines.append(f"{len(self.entries) - n_fail}/{len(self.entries)} checks passed")
        return "\n".join(lines)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _unit(e, d):
    return tuple(int(i == e) for i in range(d))


# -- sampling ---------------------------------------------------------------


def _random_directions(rng, n, dim):
    g = rng.normal(size=(n, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _random_ball(rng, n, dim, radius):
    return _random_directions(rng, n, dim) * (radius * rng.uniform(0, 1, n) ** (1.0 / dim))[:, None]


def stratified_points(af, shifts, n, rng):
    """Half uniform on T^d, a quarter on support shells, a quarter on plateaus.

    Shells are the cutoff edges ``|x' - y| = eps^k, 2 eps^k`` and the copy
    boundary ``|x - anchor| = eps^k``; plateaus are the copy interiors.
    """
    d, m = af.d, af.m
    copies = list(af.iter_copies())
    n_uniform = n - 2 * (n // 4)
    parts = [rng.uniform(0.0, 2 * np.pi, (n_uniform, d))]
    if not copies:
        parts.append(rng.uniform(0.0, 2 * np.pi, (n - n_uniform, d)))
        return np.concatenate(parts)
    pick = rng.integers(0, len(copies), n // 4)
    shell = np.empty((n // 4, d))
    for row, ci in enumerate(pick):
        c = copies[ci]
        anchor = af.copy_anchor(c, shifts[c.k][c.j - 1])
        r = af.flows[c.k].support_radius
        kind = row % 3
        if kind == 2:
            shell[row] = anchor + r * _random_directions(rng, 1, d)[0]
        else:
            shell[row, :m] = anchor[:m] + (kind + 1) * r * _random_directions(rng, 1, m)[0]
            shell[row, m:] = anchor[m:] + _random_ball(rng, 1, d - m, r)[0]
    parts.append(shell)
    pick = rng.integers(0, len(copies), n // 4)
    plateau = np.empty((n // 4, d))
    for row, ci in enumerate(pick):
        c = copies[ci]
        anchor = af.copy_anchor(c, shifts[c.k][c.j - 1])
        plateau[row] = anchor + _random_ball(rng, 1, d, af.flows[c.k].support_radius)[0]
    parts.append(plateau)
    return np.mod(np.concatenate(parts), 2 * np.pi)


# -- closed-form identities ----------------------------------------------------


def euler_residual(af, t, pts):
    """Pointwise ``|d_t u + u . grad u + grad p|`` and ``|div u|`` from closed forms."""
    d = af.d
    u = af.eval_u(t, pts)
    grads = np.stack([af.eval_u(t, pts, _unit(j, d)) for j in range(d)], axis=1)
    gradp = np.stack([af.eval_pressure_sum(t, pts, _unit(j, d)) for j in range(d)], axis=1)
    res = af.eval_dtu(t, pts) + np.einsum("pj,pji->pi", u, grads) + gradp
    return np.linalg.norm(res, axis=1), np.abs(np.einsum("pii->p", grads))


def residual_audit(af, t_samples, points_per_time=500, rng=0, tol=IDENTITY_TOL):
    """Maxima of the Euler residual and of ``div u`` over stratified samples."""
    rng = np.random.default_rng(rng)
    start = time.perf_counter()
    worst_res, worst_div, worst_t = 0.0, 0.0, None
    total = 0
    for t in np.atleast_1d(t_samples):
        shifts = af._time_shifts(float(t))
        pts = stratified_points(af, shifts, points_per_time, rng)
        res, div = euler_residual(af, float(t), pts)
        total += len(pts)
        if res.max() > worst_res:
            worst_res, worst_t = float(res.max()), float(t)
        worst_div = max(worst_div, float(div.max()))
    wall = time.perf_counter() - start
    grid = f"{total} stratified (t, x) samples"
    return [
        CheckEntry("euler_residual", "momentum equation d_t u + u.grad u + grad p = 0",
                   worst_res, tol, worst_res <= tol, tol, grid, wall, {"worst_t": worst_t}),
        CheckEntry("divergence", "incompressibility div u = 0",
                   worst_div, tol, worst_div <= tol, tol, grid, wall),
    ]


def base_flow_audit(bf, n_points=1000, rng=0, tol=IDENTITY_TOL):
    """Stationary identities of the base flow and literal support exactness."""
    rng = np.random.default_rng(rng)
    start = time.perf_counter()
    d = bf.d
    pts = _random_ball(rng, n_points, d, 1.0)
    v = bf.velocity(pts)
    grads = np.stack([bf.velocity_derivative(pts, _unit(j, d)) for j in range(d)], axis=1)
    gradp = np.stack([bf.pressure_derivative(pts, _unit(j, d)) for j in range(d)], axis=1)
    res = np.linalg.norm(np.einsum("pj,pji->pi", v, grads) + gradp, axis=1).max()
    div = np.abs(np.einsum("pii->p", grads)).max()
    outside = _random_directions(rng, n_points, d) * rng.uniform(1.0, 3.0, n_points)[:, None]
    outside[: d] = np.eye(d)
    leak = max(np.abs(bf.velocity(outside)).max(), np.abs(bf.pressure(outside)).max())
    wall = time.perf_counter() - start
    grid = f"{n_points} points in the unit ball"
    return [
        CheckEntry("base_divergence", "div v = 0 for the stationary flow", float(div), tol,
                   div <= tol, tol, grid, wall),
        CheckEntry("base_stationary_residual", "v.grad v + grad p_v = 0", float(res), tol,
                   res <= tol, tol, grid, wall),
        CheckEntry("base_support", "v = p_v = 0 for |x| >= 1 (exact zero)", float(leak), 0.0,
                   leak == 0.0, 0.0, f"{n_points} points with |x| >= 1", wall),
    ]


# -- seminorm suite ------------------------------------------------------------


class _Constants:
    """Measured reference seminorms of the base flow and the cutoff shape."""

    def __init__(self, af, per_dim):
        self.grid = support_grid(af.d, per_dim, half_width=2.0)
        base, d, m = af.base, af.d, af.m
        shape = Cutoff(0, af.epsilon, af.p)
        self.v = {n: seminorm(base.velocity_derivative, n, self.grid)
                  for n in range(base.velocity_order + 1)}
        self.p = {n: seminorm(base.pressure_derivative, n, self.grid)
                  for n in range(2 * af.S + 3)}
        gm = np.ascontiguousarray(self.grid[:, :m])
        self.chi = {n: seminorm(shape.derivative, n, gm, m) for n in range(af.p + 1)}
        self.c = af.freqs.c
        self.root = np.sqrt(d - m)

    def u(self, n):
        return self.v[n] + self.c * self.chi[n]

    def dtu(self, n):
        return self.c * self.root * self.v[n + 1]


def _copy_grid(af, c, shift, grid):
    return np.mod(af.copy_anchor(c, shift) + af.flows[c.k].support_radius * grid, 2 * np.pi)


def _measure_scale(af, k, shifts, grid, fn, n):
    """Seminorm of one scale's field over the dilated grids of its copies."""
    best = 0.0
    for c in af.copies[k]:
        pts = _copy_grid(af, c, shifts[k][c.j - 1], grid)
        best = max(best, seminorm(lambda x, a: fn(x, a, [k]), n, pts, af.d))
    return best


def rescaling_entries(af, consts, n_max_v=None, n_max_p=None):
    """Exact chain-rule scaling of ``v_k`` and ``p_{v_k}`` on dilated grids."""
    eps = af.epsilon
    S = af.S
    out = []
    n_max_v = af.base.velocity_order if n_max_v is None else n_max_v
    n_max_p = 2 * S + 2 if n_max_p is None else n_max_p
    for k in af.scales:
        flow = af.flows[k]
        pts = flow.support_radius * consts.grid
        for n in range(n_max_v + 1):
            measured = seminorm(flow.velocity_derivative, n, pts)
            expect = float(eps ** flow.params.velocity_exponent(n)) * consts.v[n]
            rel = abs(measured / expect - 1.0)
            out.append(CheckEntry(
                f"rescaled_velocity[k={k},n={n}]",
                "||v_k||_n = eps^(k(S+1-n)-S-1) ||v||_n (rescaled-flow estimate)",
                measured, expect, rel <= SCALING_TOL, SCALING_TOL, "dilated support grid",
                details={"relative_error": rel, "k": k, "n": n}))
        for n in range(n_max_p + 1):
            measured = seminorm(flow.pressure_derivative, n, pts)
            expect = float(eps ** flow.params.pressure_exponent(n)) * consts.p[n]
            rel = abs(measured / expect - 1.0)
            out.append(CheckEntry(
                f"rescaled_pressure[k={k},n={n}]",
                "||p_k||_n = eps^(k(2S+2-n)-2S-2) ||p_v||_n (rescaled-flow estimate)",
                measured, expect, rel <= SCALING_TOL, SCALING_TOL, "dilated support grid",
                details={"relative_error": rel, "k": k, "n": n}))
    return out


def divergence_trend_entries(af, consts):
    """Above order S+1 the rescaled seminorms grow by ``eps^-(n-S-1)`` per scale."""
    out = []
    eps = float(af.epsilon)
    for n in range(af.S + 2, af.base.velocity_order + 1):
        vals = [seminorm(af.flows[k].velocity_derivative, n, af.flows[k].support_radius * consts.grid)
                for k in af.scales]
        growth = [b / a for a, b in zip(vals, vals[1:])]
        expect = eps ** -(n - af.S - 1)
        ok = all(abs(g / expect - 1) <= SCALING_TOL and g > 1 for g in growth)
        out.append(CheckEntry(
            f"divergent_growth[n={n}]", "seminorms above order S+1 diverge as k grows",
            min(growth, default=expect), expect, ok, SCALING_TOL,
            details={"growth": growth, "seminorms": vals}))
    return out


def scale_bound_entries(af, consts, t_samples):
    """Per-scale bounds on u_k, d_t u_k, p_{u_k} and the resulting uniform bounds."""
    eps = af.epsilon
    S = af.S
    vo = af.base.velocity_order
    per_scale = []
    uniform = {"u": {}, "dtu": {}, "p": {}}
    for t in np.atleast_1d(t_samples):
        shifts = af._time_shifts(float(t))
        for k in af.scales:
            params = af.flows[k].params
            for n in range(vo + 1):
                mu = _measure_scale(af, k, shifts, consts.grid,
                                    lambda x, a, s: af.eval_u(t, x, a, s), n)
                per_scale.append(("u", k, n, t, mu, consts.u(n) * float(eps ** params.velocity_exponent(n))))
                if n <= S + 1:
                    uniform["u"][n] = max(uniform["u"].get(n, 0.0), mu)
            for n in range(vo):
                mu = _measure_scale(af, k, shifts, consts.grid,
                                    lambda x, a, s: af.eval_dtu(t, x, a, s), n)
                expo = k * (2 * S + 2 - (n + 1)) - 2 * S - 2
                per_scale.append(("dtu", k, n, t, mu, consts.dtu(n) * float(eps**expo)))
                if n <= 2 * S + 1:
                    uniform["dtu"][n] = max(uniform["dtu"].get(n, 0.0), mu)
            for n in range(2 * S + 3):
                mu = _measure_scale(af, k, shifts, consts.grid,
                                    lambda x, a, s: af.eval_pressure_sum(t, x, a, s), n)
                per_scale.append(("p", k, n, t, mu, consts.p[n] * float(eps ** params.pressure_exponent(n))))
                uniform["p"][n] = max(uniform["p"].get(n, 0.0), mu)
    out = []
    worst = {}
    for what, k, n, t, mu, bound in per_scale:
        key = (what, k, n)
        r = mu / bound if bound else 0.0
        if key not in worst or r > worst[key][0]:
            worst[key] = (r, mu, bound, t)
    labels = {"u": "||u_k||_n <= C_n eps^(k(S+1-n)-S-1)",
              "dtu": "||d_t u_k||_n <= C_n eps^(k(2S+2-(n+1))-2S-2)",
              "p": "||p_k||_n <= C_n eps^(k(2S+2-n)-2S-2)"}
    for (what, k, n), (r, mu, bound, t) in sorted(worst.items()):
        out.append(CheckEntry(f"scale_bound_{what}[k={k},n={n}]", f"per-scale estimate {labels[what]}",
                              mu, bound, r <= 1 + BOUND_TOL, BOUND_TOL, "dilated copy grids",
                              details={"worst_t": t}))
    eps_f = float(eps)
    finals = {"u": (lambda n: consts.u(n) * eps_f ** (-S - 1), "sup_t ||u||_n <= C_n eps^(-S-1), n <= S+1"),
              "dtu": (lambda n: consts.dtu(n) * eps_f ** (-2 * S - 2),
                      "sup_t ||d_t u||_n <= C_n eps^(-2S-2), n <= 2S+1"),
              "p": (lambda n: consts.p[n] * eps_f ** (-2 * S - 2),
                    "sup_t ||p_u||_n <= C_n eps^(-2S-2), n <= 2S+2")}
    for what, (bound_fn, label) in finals.items():
        for n, mu in sorted(uniform[what].items()):
            bound = bound_fn(n)
            out.append(CheckEntry(f"uniform_bound_{what}[n={n}]", f"uniform estimate {label}",
                                  mu, bound, mu <= bound * (1 + BOUND_TOL), BOUND_TOL,
                                  f"{len(np.atleast_1d(t_samples))} times"))
    return out


def random_phase(af, rng):
    return EmbeddingPoint([rng.uniform(0, 2 * np.pi, s) for s in af.shapes])


def random_tangent(af, rng):
    return TangentVector([rng.normal(size=s) for s in af.shapes])


def embedding_bound_entries(af, consts, n_samples=20, rng=0):
    """Bounds on ``U(theta)`` and ``dU(theta)[theta_hat]`` for sampled phases."""
    rng = np.random.default_rng(rng)
    eps_f = float(af.epsilon)
    S = af.S
    worst_u = {n: (0.0, 0.0) for n in range(S + 1)}
    worst_du = {n: (0.0, 0.0) for n in range(S + 1)}
    for _ in range(n_samples):
        theta, hat = random_phase(af, rng), random_tangent(af, rng)
        shifts = {k: theta.block(k) for k in af.scales}
        size = hat.sup_norm()
        for n in range(S + 1):
            mu = max(_measure_scale(af, k, shifts, consts.grid,
                                    lambda x, a, s: af.eval_embedding(theta, x, a, s), n)
                     for k in af.scales)
            bound = consts.u(n) * eps_f ** (-S - 1)
            if mu / bound >= worst_u[n][0]:
                worst_u[n] = (mu / bound, mu, bound)
            mu = max(_measure_scale(af, k, shifts, consts.grid,
                                    lambda x, a, s: af.eval_embedding_derivative(theta, hat, x, a, s), n)
                     for k in af.scales)
            bound = consts.root * consts.v[n + 1] * eps_f ** (-S - 1) * size
            if mu / bound >= worst_du[n][0]:
                worst_du[n] = (mu / bound, mu, bound)
    out = []
    for n, (r, mu, bound) in worst_u.items():
        out.append(CheckEntry(f"embedding_bound[n={n}]", "sup ||U(theta)||_n <= C_n eps^(-S-1), n <= S",
                              mu, bound, r <= 1 + BOUND_TOL, BOUND_TOL, f"{n_samples} phases"))
    for n, (r, mu, bound) in worst_du.items():
        out.append(CheckEntry(f"embedding_derivative_bound[n={n}]",
                              "||dU(theta)[theta_hat]||_n <= C_n eps^(-S-1) |theta_hat|_inf, n <= S",
                              mu, bound, r <= 1 + BOUND_TOL, BOUND_TOL, f"{n_samples} phase/tangent pairs"))
    return out


def estimate_suite(af, t_samples=(0.0, 0.7, 3.1), n_phase=20, per_dim=65, rng=0):
    """Every seminorm measurement with its bound, one entry per (inequality, n, k)."""
    consts = _Constants(af, per_dim)
    out = []
    out += rescaling_entries(af, consts)
    out += divergence_trend_entries(af, consts)
    out += scale_bound_entries(af, consts, t_samples)
    out += embedding_bound_entries(af, consts, n_phase, rng)
    return out


# -- embedding derivative ------------------------------------------------------


_STENCILS = {
    2: ((1, 1.0),),
    4: ((1, 8.0), (2, -1.0)),
    6: ((1, 45.0), (2, -9.0), (3, 1.0)),
}
_STENCIL_DENOM = {2: 2.0, 4: 12.0, 6: 60.0}


def central_difference(f, h, order=6):
    """Central-difference derivative of ``f`` at 0 with base step ``h``."""
    acc = sum(w * (f(i * h) - f(-i * h)) for i, w in _STENCILS[order])
    return acc / (_STENCIL_DENOM[order] * h)


def embedding_derivative_check(af, n_samples=50, h=1e-5, order=6, rng=0, tol=1e-6):
    """Closed-form ``dU(theta)[theta_hat]`` against central differences in theta.

    Directions are scaled to ``|theta_hat|_inf = 1``. The worst two-point
    error is kept in the details for comparison.
    """
    rng = np.random.default_rng(rng)
    start = time.perf_counter()
    worst, worst_two_point = 0.0, 0.0
    copies = list(af.iter_copies())
    for _ in range(n_samples):
        theta, hat = random_phase(af, rng), random_tangent(af, rng)
        hat = TangentVector([b / hat.sup_norm() for b in hat.blocks])
        c = copies[rng.integers(len(copies))]
        anchor = af.copy_anchor(c, theta.block(c.k)[c.j - 1])
        x = anchor + _random_ball(rng, 1, af.d, 0.9 * af.flows[c.k].support_radius)[0]
        exact = af.eval_embedding_derivative(theta, hat, x)

        def at(s):
            return af.eval_embedding(EmbeddingPoint([b + s * v for b, v in zip(theta.blocks, hat.blocks)]), x)

        scale = max(np.linalg.norm(exact), 1e-300)
        worst = max(worst, float(np.linalg.norm(central_difference(at, h, order) - exact) / scale))
        two = central_difference(at, h, 2)
        worst_two_point = max(worst_two_point, float(np.linalg.norm(two - exact) / scale))
    return CheckEntry("embedding_derivative_fd", "Frechet derivative dU(theta)[theta_hat] vs central differences",
                      worst, tol, worst <= tol, tol, f"{n_samples} points, h={h}, order {order}",
                      time.perf_counter() - start, {"two_point_error": worst_two_point})


# -- spectral checks -----------------------------------------------------------

MAX_GRID_POINTS = 2**24


def _grid_guard(n, d):
    if n % 2:
        raise ValueError(f"grid size N={n} must be even")
    if n**d > MAX_GRID_POINTS:
        raise MemoryError(f"N^d = {n}^{d} exceeds the {MAX_GRID_POINTS}-point grid guard")


def reconstruct_pressure(af, theta, n):
    """``(-Laplace)^-1 div(U . grad U)`` on an ``n^d`` grid, with the direct pressure."""
    _grid_guard(n, af.d)
    d = af.d
    pts = grid_points(n, d)
    grads = [af.eval_embedding(theta, pts, _unit(j, d)) for j in range(d)]
    # div(U . grad U) = sum_ij d_i U_j d_j U_i when div U = 0
    source = sum(grads[i][:, j] * grads[j][:, i] for i in range(d) for j in range(d))
    recon = inverse_neg_laplacian(source.reshape((n,) * d))
    direct = af.embedding_pressure(theta, pts).reshape((n,) * d) - af.pressure_mean()
    return recon, direct


def pressure_reconstruction(af, theta=None, n=256):
    theta = af.theta if theta is None else theta
    start = time.perf_counter()
    recon, direct = reconstruct_pressure(af, theta, n)
    err = float(np.abs(recon - direct).max() / np.abs(direct).max())
    return CheckEntry(f"pressure_reconstruction[N={n}]",
                      "P(theta) = (-Laplace)^-1 div(U.grad U) matches the mean-free pressure sum",
                      err, None, True, 0.0, f"{n}^{af.d} grid", time.perf_counter() - start,
                      {"reconstructed_mean": float(recon.mean())})


def pressure_refinement(af, theta=None, ladder=(128, 256, 512), tol=5e-4):
    """Relative sup error on a refinement ladder; passes if it decreases and ends below ``tol``."""
    entries = [pressure_reconstruction(af, theta, n) for n in ladder]
    errs = [e.measured for e in entries]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    entries.append(CheckEntry("pressure_refinement", "spectral pressure error decreases under refinement",
                              errs[-1], tol, decreasing and errs[-1] <= tol, tol,
                              "ladder " + ",".join(map(str, ladder)), details={"errors": errs}))
    return entries


def spectral_drift(af, theta=None, t_final=1.0, dt=1e-3, n=256, checkpoints=None):
    """Sup deviation between pseudo-spectral integration from ``U(theta)`` and ``U(theta + nu t)``.

    Returns ``{t: deviation}`` over the checkpoints (``t_final`` included).
    """
    if af.d != 2:
        raise ValueError("the time-integration cross-check is implemented for d = 2 only")
    _grid_guard(n, 2)
    theta = af.theta if theta is None else theta
    pts = grid_points(n, 2)
    u0 = af.eval_embedding(theta, pts)
    solver = VorticityEuler2D(n, u0.mean(axis=0))
    w_hat = solver.vorticity_hat(u0[:, 0].reshape(n, n), u0[:, 1].reshape(n, n))
    marks = sorted(set(checkpoints or ()) | {t_final})
    out = {}

    def record(t, state):
        u1, u2 = solver.velocity(state)
        exact = af.eval_embedding(theta.shifted(af.nus, t), pts)
        out[t] = float(max(np.abs(u1.ravel() - exact[:, 0]).max(), np.abs(u2.ravel() - exact[:, 1]).max()))

    if t_final == 0:
        record(0.0, w_hat)
        return out
    solver.integrate(w_hat, t_final, dt, checkpoints=marks, callback=record)
    return out


def spectral_drift_check(af, theta=None, t_final=1.0, dt=1e-3, n=256, fine=None, tol=1e-4):
    """Drift at ``(n, dt)`` against ``tol``; with ``fine=(n2, dt2)`` also require a decrease."""
    start = time.perf_counter()
    coarse = spectral_drift(af, theta, t_final, dt, n)[t_final]
    entries = [CheckEntry(f"spectral_drift[N={n},dt={dt}]",
                          "u(t) = U(theta + nu t) solves Euler: independent time integration",
                          coarse, tol, coarse <= tol, tol, f"{n}^2 grid, T={t_final}",
                          time.perf_counter() - start)]
    if fine is not None:
        n2, dt2 = fine
        start = time.perf_counter()
        finer = spectral_drift(af, theta, t_final, dt2, n2)[t_final]
        entries.append(CheckEntry(f"spectral_drift_refinement[N={n2},dt={dt2}]",
                                  "time-integration deviation decreases under refinement",
                                  finer, coarse, finer < coarse, 0.0, f"{n2}^2 grid, T={t_final}",
                                  time.perf_counter() - start))
    return entries



# -- layout, frequencies and symmetry ------------------------------------------


def layout_entries(layout):
    """Disjointness items, the measure ledger and the ``C_1`` length oracle."""
    rep = verify_layout(layout)
    out = [CheckEntry("layout_disjoint", "all closed balls pairwise disjoint (condition A, items i-ii)",
                      rep.min_gap, 0.0, rep.condition_a, 0.0, "pairwise torus distances",
                      details={"item_i": rep.item_i, "item_ii": rep.item_ii})]
    for k, (ok, leftover, bound) in sorted(rep.item_iii.items()):
        # the ledger bound is exact rational arithmetic; 1 - sum 4^-n > 2/3 for every k
        exact = 1 - sum(Fraction(1, 4**n) for n in range(1, k + 1))
        out.append(CheckEntry(f"layout_leftover[k={k}]",
                              "|T^m minus E_k| >= (1 - sum_{n<=k} 4^-n)|T^m| (item iii)",
                              leftover, bound, ok and exact > Fraction(2, 3), 0.0, "closed form",
                              details={"exact_bound": str(exact)}))
    for k, (ok, level, bound) in sorted(rep.measure_balls.items()):
        out.append(CheckEntry(f"layout_level_measure[k={k}]", "C_m J_k eps^(km) <= 4^-k",
                              level, bound, ok, 0.0, "closed form"))
    out.append(CheckEntry("layout_condition_b", "uncovered measure stays >= 2/3 (condition B)",
                          rep.leftover, 2.0 / 3.0, rep.condition_b, 0.0, "closed form"))
    out.append(CheckEntry("layout_eps_below_eps0", "eps < eps_0 = min(eps_11, (4 ||J||)^(-1/m))",
                          float(layout.spec.epsilon), rep.eps0, rep.eps_below_eps0, 0.0, "closed form"))
    if layout.m == 1:
        r = 0.1
        err = abs(ball_measure_fraction(1, r) - 4 * r / (2 * pi))
        out.append(CheckEntry("ball_constant_1d", "C_1 = 2/pi against the interval length 4r / 2pi",
                              err, 1e-14, err <= 1e-14, 1e-14, "r = 0.1"))
    return out


def frequency_entries(fs, weight_max=10.0, comp_max=3, budget=10**7):
    start = time.perf_counter()
    small = check_smallness(fs)
    err = abs(small.value - fs.c)
    out = [CheckEntry("frequency_smallness", "sup_k eps^(-(S+1)(k-1)) |nu_k| <= c (attained)",
                      small.value, fs.c, small.passed and err <= 1e-12 * fs.c, 1e-12, "all scales",
                      details={"per_scale": small.per_scale})]
    probe = probe_nonresonance(fs, weight_max=weight_max, comp_max=comp_max, budget=budget)
    details = {"argmin": probe.argmin, "count": probe.count, "eta": probe.eta}
    if fs.mode == "sqrt_prime" and probe.argmin:
        details["certificate"] = str(exact_combination(fs, probe.argmin))
    out.append(CheckEntry("frequency_nonresonance", "min |sum_k nu_k . l_k| > 0 over the bounded probe set",
                          probe.minimum, 0.0, probe.passed, 0.0,
                          f"|l|_eta <= {weight_max}, entries <= {comp_max}",
                          time.perf_counter() - start, details))
    return out


def witness_entries(af, extra_directions=2, rng=0):
    try:
        found = af.non_symmetry_witness(extra_directions=extra_directions, rng=rng)
    except NoWitnessError as exc:
        return [CheckEntry("non_symmetry_witness", "U(theta) is not translation invariant",
                           0.0, 0.0, False, 0.0, details={"error": str(exc)})]
    return [CheckEntry(f"non_symmetry_witness[{i}]", "U(theta)(x + delta e) != U(theta)(x)",
                       gap, 0.0, gap > 0, 0.0, "support boundary",
                       details={"direction": e, "x": x, "delta": delta})
            for i, (e, x, delta, gap) in enumerate(found)]
