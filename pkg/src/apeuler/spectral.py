"""Periodic Fourier tools on the torus ``[0, 2 pi)^d``: Poisson inversion and a
pseudo-spectral 2-D Euler integrator in vorticity form."""
import numpy as np


def wavenumbers(n, d):
    """Integer wavenumber grids ``(k_1, ..., k_d)`` for an ``n^d`` FFT."""
    k = np.fft.fftfreq(n, d=1.0 / n)
    return np.meshgrid(*([k] * d), indexing="ij")


def grid_points(n, d):
    """Uniform grid ``2 pi i / n`` flattened to ``(n^d, d)`` in C order."""
    axis = 2.0 * np.pi * np.arange(n) / n
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def inverse_neg_laplacian(source):
    """Zero-mean solution ``P`` of ``-Laplace(P) = source`` on the periodic box."""
    source = np.asarray(source, dtype=np.float64)
    n, d = source.shape[0], source.ndim
    ks = wavenumbers(n, d)
    k2 = sum(k * k for k in ks)
    sh = np.fft.fftn(source)
    k2[(0,) * d] = 1.0
    ph = sh / k2
    ph[(0,) * d] = 0.0
    return np.real(np.fft.ifftn(ph))


class VorticityEuler2D:
    """Pseudo-spectral 2-D Euler, ``w_t + u . grad w = 0``, classical RK4.

    The state is the full (real-FFT) vorticity spectrum; the nonlinear term is
    truncated by the 2/3 rule. The spatial mean velocity is conserved and
    carried separately because the vorticity does not determine it.
    """

    def __init__(self, n, mean_velocity=(0.0, 0.0)):
        if n % 2:
            raise ValueError(f"grid size n={n} must be even")
        self.n = n
        k = np.fft.fftfreq(n, d=1.0 / n)
        kr = np.fft.rfftfreq(n, d=1.0 / n)
        self.k1, self.k2 = np.meshgrid(k, kr, indexing="ij")
        ksq = self.k1**2 + self.k2**2
        ksq[0, 0] = 1.0
        self.inv_ksq = 1.0 / ksq
        self.inv_ksq[0, 0] = 0.0
        cut = n // 3
        self.mask = (np.abs(self.k1) <= cut) & (np.abs(self.k2) <= cut)
        self.mean = np.asarray(mean_velocity, dtype=np.float64)
        self.h = 2.0 * np.pi / n

    def velocity_hat(self, w_hat):
        psi = w_hat * self.inv_ksq
        return 1j * self.k2 * psi, -1j * self.k1 * psi

    def velocity(self, w_hat):
        u1h, u2h = self.velocity_hat(w_hat)
        shape = (self.n, self.n)
        return (np.fft.irfft2(u1h, s=shape) + self.mean[0],
                np.fft.irfft2(u2h, s=shape) + self.mean[1])

    def rhs(self, w_hat):
        u1, u2 = self.velocity(w_hat)
        shape = (self.n, self.n)
        wx = np.fft.irfft2(1j * self.k1 * w_hat, s=shape)
        wy = np.fft.irfft2(1j * self.k2 * w_hat, s=shape)
        return -np.fft.rfft2(u1 * wx + u2 * wy) * self.mask

    def step(self, w_hat, dt):
        a = self.rhs(w_hat)
        b = self.rhs(w_hat + 0.5 * dt * a)
        c = self.rhs(w_hat + 0.5 * dt * b)
        e = self.rhs(w_hat + dt * c)
        return w_hat + dt / 6.0 * (a + 2 * b + 2 * c + e)

    def vorticity_hat(self, u1, u2):
        """Spectral curl of sampled velocity components."""
        return 1j * self.k1 * np.fft.rfft2(u2) - 1j * self.k2 * np.fft.rfft2(u1)

    def vorticity(self, w_hat):
        return np.fft.irfft2(w_hat, s=(self.n, self.n))

    def integrate(self, w_hat, t_final, dt, checkpoints=(), callback=None, blowup=1e3):
        """Advance to ``t_final``; ``callback(t, w_hat)`` fires at each checkpoint.

        Raises
        ------
        ValueError
            The CFL number exceeds 1.
        FloatingPointError
            The vorticity grows beyond ``blowup`` times its initial maximum.
        """
        nsteps = int(round(t_final / dt))
        if nsteps and abs(nsteps * dt - t_final) > 1e-9 * max(1.0, t_final):
            raise ValueError("t_final must be a multiple of dt")
        marks = {int(round(c / dt)) for c in checkpoints}
        w0 = np.abs(self.vorticity(w_hat)).max()
        u1, u2 = self.velocity(w_hat)
        cfl = dt * max(np.abs(u1).max(), np.abs(u2).max()) / self.h
        if cfl > 1.0:
            raise ValueError(f"CFL number {cfl:.3g} exceeds 1")
        if callback and 0 in marks:
            callback(0.0, w_hat)
        for i in range(1, nsteps + 1):
            w_hat = self.step(w_hat, dt)
            if i in marks or i == nsteps:
                peak = np.abs(self.vorticity(w_hat)).max()
                if not np.isfinite(peak) or peak > blowup * max(w0, 1e-300):
                    raise FloatingPointError(f"vorticity blow-up at t={i * dt:.4g}")
                if callback and i in marks:
                    callback(i * dt, w_hat)
        return w_hat
