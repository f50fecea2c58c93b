"""Pseudo-spectral solver for the 2-D vorticity equation on the periodic unit box.

    w_t + u . grad(w) = nu * lap(w) + f,   f = A*(sin(2pi(x+y)) + cos(2pi(x+y)))

Velocity comes from the streamfunction psi = -lap^-1(w) (zero-mean mode),
u = (d_y psi, -d_x psi). The nonlinear term is evaluated in physical space
and dealiased with the 2/3 rule; diffusion is Crank-Nicolson, advection and
forcing explicit. Ten seconds of simulation, 101 stored frames, spatial
output always subsampled down to 64x64.

The internal step starts at 1e-3 s and halves (up to three times) if the run
blows up.
"""

import numpy as np

from ..errors import ConfigError, SolverDivergenceError
from .grf import gaussian_random_field
from .params import Equation, SystemParams
from .trajectory import FRAME_COUNT, GRID, Trajectory

NS_DOMAIN = ((0.0, 1.0), (0.0, 1.0))
NS_SIM_SECONDS = 10.0
NS_DT_INTERNAL = 1e-3
NS_MAX_HALVINGS = 3

_BLOWUP = 1e6


class _SpectralWorkspace:
    def __init__(self, grid):
        m_full = np.fft.fftfreq(grid, d=1.0 / grid)
        m_half = np.fft.rfftfreq(grid, d=1.0 / grid)
        self.kx = (2.0 * np.pi * m_half)[None, :]
        self.ky = (2.0 * np.pi * m_full)[:, None]
        self.lap = self.kx**2 + self.ky**2
        inv = np.zeros_like(self.lap)
        nz = self.lap > 0
        inv[nz] = 1.0 / self.lap[nz]
        self.inv_lap = inv
        cutoff = grid // 3
        self.dealias = (np.abs(m_half)[None, :] <= cutoff) & (
            np.abs(m_full)[:, None] <= cutoff
        )


def forcing_field(grid, amplitude):
    xs = np.arange(grid) / grid
    x = xs[None, :]
    y = xs[:, None]
    phase = 2.0 * np.pi * (x + y)
    return amplitude * (np.sin(phase) + np.cos(phase))


def velocity_from_vorticity(w):
    """(u, v) with u = d_y psi, v = -d_x psi and psi = -lap^-1 w."""
    grid = w.shape[0]
    ws = _SpectralWorkspace(grid)
    w_hat = np.fft.rfft2(w)
    psi_hat = w_hat * ws.inv_lap
    u = np.fft.irfft2(1j * ws.ky * psi_hat, s=w.shape)
    v = np.fft.irfft2(-1j * ws.kx * psi_hat, s=w.shape)
    return u, v


def _run(w0, nu, f, grid, dt, store_every, stride):
    ws = _SpectralWorkspace(grid)
    f_hat = np.fft.rfft2(f)
    w_hat = np.fft.rfft2(w0)
    half = 0.5 * dt * nu * ws.lap
    decay = (1.0 - half) / (1.0 + half)
    gain = dt / (1.0 + half)
    frames = np.empty((FRAME_COUNT, GRID, GRID), dtype=np.float64)
    frames[0] = w0[::stride, ::stride]
    shape = (grid, grid)
    for frame in range(1, FRAME_COUNT):
        for _ in range(store_every):
            psi_hat = w_hat * ws.inv_lap
            u = np.fft.irfft2(1j * ws.ky * psi_hat, s=shape)
            v = np.fft.irfft2(-1j * ws.kx * psi_hat, s=shape)
            wx = np.fft.irfft2(1j * ws.kx * w_hat, s=shape)
            wy = np.fft.irfft2(1j * ws.ky * w_hat, s=shape)
            adv_hat = np.fft.rfft2(u * wx + v * wy)
            adv_hat *= ws.dealias
            adv_hat[0, 0] = 0.0  # advection is mean-free in the continuum
            w_hat = w_hat * decay + gain * (f_hat - adv_hat)
        w = np.fft.irfft2(w_hat, s=shape)
        if not np.isfinite(w).all() or np.abs(w).max() > _BLOWUP:
            raise SolverDivergenceError(f"vorticity run diverged at output frame {frame}")
        frames[frame] = w[::stride, ::stride]
    return frames


def solve_navier_stokes(params: SystemParams, grid=GRID, w0=None) -> Trajectory:
    """Simulate one vorticity trajectory; ``grid`` is the solver resolution
    (64 for desk scale, 256 for the full recipe). Output is 64x64 regardless,
    via strided subsampling."""
    if params.equation is not Equation.NAVIER_STOKES:
        raise ConfigError(f"solve_navier_stokes got a {params.equation.value} parameter set")
    if grid % GRID:
        raise ConfigError(f"solver grid {grid} must be a multiple of {GRID}")
    if w0 is None:
        w0 = gaussian_random_field(params.seed, grid)
    w0 = np.asarray(w0, dtype=np.float64)
    f = forcing_field(grid, params.amplitude)
    stride = grid // GRID
    dt_out = NS_SIM_SECONDS / (FRAME_COUNT - 1)
    dt = NS_DT_INTERNAL
    last_err = None
    for _ in range(NS_MAX_HALVINGS + 1):
        store_every = int(round(dt_out / dt))
        try:
            frames = _run(w0, params.nu, f, grid, dt, store_every, stride)
            return Trajectory(
                params=params,
                frames=frames.astype(np.float32),
                domain=NS_DOMAIN,
                dt_out=dt_out,
            )
        except SolverDivergenceError as err:
            last_err = err
            dt *= 0.5
    raise last_err
