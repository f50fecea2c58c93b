"""Spectrally sampled periodic Gaussian random fields.

Power spectrum (4*pi^2*|k|^2 + tau^2)^(-alpha) with tau=7, alpha=2.5 and the
matching tau^(alpha-1) normalization; the mean mode is zeroed, and the field
comes back through an inverse FFT so it is real by construction.
"""

import math

import numpy as np

from ..errors import ConfigError

GRF_ALPHA = 2.5
GRF_TAU = 7.0


def gaussian_random_field(seed, grid, alpha=GRF_ALPHA, tau=GRF_TAU):
    if grid < 2 or grid & (grid - 1):
        raise ConfigError(f"grid must be a power of two, got {grid}")
    m = np.fft.fftfreq(grid, d=1.0 / grid)
    kx = m[None, :]
    ky = m[:, None]
    sigma = tau ** (0.5 * (2.0 * alpha - 2.0))
    sqrt_eig = (
        grid**2
        * math.sqrt(2.0)
        * sigma
        * (4.0 * math.pi**2 * (kx**2 + ky**2) + tau**2) ** (-alpha / 2.0)
    )
    sqrt_eig[0, 0] = 0.0
    rng = np.random.Generator(np.random.Philox(seed))
    noise = rng.standard_normal((grid, grid)) + 1j * rng.standard_normal((grid, grid))
    return np.fft.ifft2(sqrt_eig * noise).real
