from .dataset import read_dataset, write_dataset
from .fdsolve import (
    cell_centers,
    default_initial_condition,
    solve_burgers,
    solve_heat,
)
from .generate import generate_trajectories
from .grf import gaussian_random_field
from .params import (
    ALPHA_RANGE,
    AMPLITUDE_CHOICES,
    BC_VALUE_RANGE,
    BETA_RANGE,
    NU_CHOICES,
    BCType,
    Equation,
    SystemParams,
    sample_system,
)
from .spectral import forcing_field, solve_navier_stokes, velocity_from_vorticity
from .trajectory import FRAME_COUNT, GRID, Trajectory

__all__ = [
    "read_dataset",
    "write_dataset",
    "cell_centers",
    "default_initial_condition",
    "solve_burgers",
    "solve_heat",
    "generate_trajectories",
    "gaussian_random_field",
    "ALPHA_RANGE",
    "AMPLITUDE_CHOICES",
    "BC_VALUE_RANGE",
    "BETA_RANGE",
    "NU_CHOICES",
    "BCType",
    "Equation",
    "SystemParams",
    "sample_system",
    "forcing_field",
    "solve_navier_stokes",
    "velocity_from_vorticity",
    "FRAME_COUNT",
    "GRID",
    "Trajectory",
]
