"""Physical system parameters and their sampling distributions."""

import hashlib
import struct
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..errors import ConfigError


class Equation(str, Enum):
    HEAT = "heat"
    BURGERS = "burgers"
    NAVIER_STOKES = "navier_stokes"
    SHALLOW_WATER = "shallow_water"


class BCType(str, Enum):
    PERIODIC = "periodic"
    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"


# Discrete inventories for the vorticity runs.
NU_CHOICES = (1e-8, 5e-8, 1e-7, 1e-6, 5e-6, 1e-5, 5e-5)
AMPLITUDE_CHOICES = (0.001, 0.005, 0.01, 0.05, 0.1)

BETA_RANGE = (0.001, 0.01)
ALPHA_RANGE = (-1.0, 1.0)
BC_VALUE_RANGE = (-0.1, 0.1)

_EQ_CODE = {e: i for i, e in enumerate(Equation)}
_BC_CODE = {b: i for i, b in enumerate(BCType)}


@dataclass(frozen=True)
class SystemParams:
    """Everything the solvers and the sentence renderer need about one system.

    ``bc_value`` is the Neumann gradient or Dirichlet value (unused for
    periodic walls; all four walls share one type and value). ``seed`` drives
    the initial condition where it is random (vorticity runs).
    """

    equation: Equation
    bc_type: BCType = BCType.PERIODIC
    bc_value: float = 0.0
    beta: float = 0.0
    alpha_x: float = 0.0
    alpha_y: float = 0.0
    nu: float = 0.0
    amplitude: float = 0.0
    seed: int = 0

    def digest(self) -> bytes:
        """32-byte hash over a fixed-layout packing of every field."""
        packed = struct.pack(
            "<BBddddddQ",
            _EQ_CODE[self.equation],
            _BC_CODE[self.bc_type],
            self.bc_value,
            self.beta,
            self.alpha_x,
            self.alpha_y,
            self.nu,
            self.amplitude,
            self.seed,
        )
        return hashlib.sha256(packed).digest()

    def to_dict(self):
        return {
            "equation": self.equation.value,
            "bc_type": self.bc_type.value,
            "bc_value": self.bc_value,
            "beta": self.beta,
            "alpha_x": self.alpha_x,
            "alpha_y": self.alpha_y,
            "nu": self.nu,
            "amplitude": self.amplitude,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            equation=Equation(d["equation"]),
            bc_type=BCType(d["bc_type"]),
            bc_value=float(d["bc_value"]),
            beta=float(d["beta"]),
            alpha_x=float(d["alpha_x"]),
            alpha_y=float(d["alpha_y"]),
            nu=float(d["nu"]),
            amplitude=float(d["amplitude"]),
            seed=int(d["seed"]),
        )


def sample_system(equation, rng_seed) -> SystemParams:
    """Draw one parameter set. All four walls share one BC type/value."""
    equation = Equation(equation)
    if equation is Equation.SHALLOW_WATER:
        raise ConfigError("shallow-water data is ingest-only; no sampler exists")
    rng = np.random.Generator(np.random.Philox(rng_seed))
    if equation is Equation.NAVIER_STOKES:
        nu = NU_CHOICES[rng.integers(len(NU_CHOICES))]
        amp = AMPLITUDE_CHOICES[rng.integers(len(AMPLITUDE_CHOICES))]
        return SystemParams(
            equation=equation,
            bc_type=BCType.PERIODIC,
            nu=float(nu),
            amplitude=float(amp),
            seed=int(rng_seed),
        )
    bc_type = list(BCType)[rng.integers(3)]
    bc_value = float(rng.uniform(*BC_VALUE_RANGE)) if bc_type is not BCType.PERIODIC else 0.0
    beta = float(rng.uniform(*BETA_RANGE))
    if equation is Equation.BURGERS:
        alpha_x = float(rng.uniform(*ALPHA_RANGE))
        alpha_y = float(rng.uniform(*ALPHA_RANGE))
    else:
        alpha_x = alpha_y = 0.0
    return SystemParams(
        equation=equation,
        bc_type=bc_type,
        bc_value=bc_value,
        beta=beta,
        alpha_x=alpha_x,
        alpha_y=alpha_y,
        seed=int(rng_seed),
    )
