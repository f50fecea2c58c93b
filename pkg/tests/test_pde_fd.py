"""Finite-difference solver physics and the parameter sampler."""

import numpy as np
import pytest

from pdetext.errors import ConfigError, SolverDivergenceError
from pdetext.pde import (
    ALPHA_RANGE,
    AMPLITUDE_CHOICES,
    BC_VALUE_RANGE,
    BETA_RANGE,
    NU_CHOICES,
    BCType,
    Equation,
    SystemParams,
    sample_system,
    solve_burgers,
    solve_heat,
)
from pdetext.pde.fdsolve import FD_DT_INTERNAL, cell_centers, default_initial_condition


def test_sampler_heat_has_no_advection():
    for seed in range(20):
        p = sample_system(Equation.HEAT, seed)
        assert p.alpha_x == 0.0 and p.alpha_y == 0.0
        assert BETA_RANGE[0] <= p.beta <= BETA_RANGE[1]


def test_sampler_navier_stokes_uses_discrete_inventories():
    for seed in range(30):
        p = sample_system(Equation.NAVIER_STOKES, seed)
        assert p.nu in NU_CHOICES
        assert p.amplitude in AMPLITUDE_CHOICES
        assert p.bc_type is BCType.PERIODIC


def test_sampler_burgers_ranges_and_bc_values():
    for seed in range(30):
        p = sample_system(Equation.BURGERS, seed)
        assert ALPHA_RANGE[0] <= p.alpha_x <= ALPHA_RANGE[1]
        assert ALPHA_RANGE[0] <= p.alpha_y <= ALPHA_RANGE[1]
        if p.bc_type is BCType.PERIODIC:
            assert p.bc_value == 0.0
        else:
            assert BC_VALUE_RANGE[0] <= p.bc_value <= BC_VALUE_RANGE[1]


def test_sampler_is_deterministic():
    assert sample_system(Equation.BURGERS, 123) == sample_system(Equation.BURGERS, 123)


def test_sampler_rejects_shallow_water():
    with pytest.raises(ConfigError):
        sample_system(Equation.SHALLOW_WATER, 0)


def test_heat_periodic_sinusoid_matches_closed_form_decay():
    """u0 = sin(2 pi x) decays as exp(-beta (2 pi)^2 t) under periodic walls."""
    beta = 0.005
    p = SystemParams(equation=Equation.HEAT, bc_type=BCType.PERIODIC, beta=beta, seed=0)
    xs = cell_centers(64)
    u0 = np.tile(np.sin(2 * np.pi * xs), (64, 1))
    traj = solve_heat(p, u0=u0)
    exact = np.exp(-beta * (2 * np.pi) ** 2) * u0
    got = traj.frames[-1].astype(np.float64)
    rel = np.linalg.norm(got - exact) / np.linalg.norm(exact)
    assert rel < 1e-3


def test_heat_neumann_zero_gradient_constant_steady_state():
    p = SystemParams(equation=Equation.HEAT, bc_type=BCType.NEUMANN, bc_value=0.0, beta=0.008, seed=0)
    traj = solve_heat(p, u0=np.full((64, 64), 0.37))
    assert np.abs(traj.frames - np.float32(0.37)).max() == 0.0


def test_heat_periodic_conserves_spatial_mean():
    p = SystemParams(equation=Equation.HEAT, bc_type=BCType.PERIODIC, beta=0.009, seed=0)
    traj = solve_heat(p)
    means = traj.frames.astype(np.float64).mean(axis=(1, 2))
    assert np.abs(means - means[0]).max() < 1e-6


def test_dirichlet_boundary_cells_exact_in_every_frame():
    p = SystemParams(
        equation=Equation.HEAT, bc_type=BCType.DIRICHLET, bc_value=0.05, beta=0.004, seed=0
    )
    traj = solve_heat(p)
    v = np.float32(0.05)
    for edge in (traj.frames[:, 0, :], traj.frames[:, -1, :], traj.frames[:, :, 0], traj.frames[:, :, -1]):
        assert np.all(edge == v)


def test_burgers_zero_advection_equals_heat():
    for bc, bcv in [(BCType.PERIODIC, 0.0), (BCType.NEUMANN, 0.03), (BCType.DIRICHLET, -0.02)]:
        ph = SystemParams(equation=Equation.HEAT, bc_type=bc, bc_value=bcv, beta=0.006, seed=0)
        pb = SystemParams(
            equation=Equation.BURGERS, bc_type=bc, bc_value=bcv, beta=0.006,
            alpha_x=0.0, alpha_y=0.0, seed=0,
        )
        diff = np.abs(solve_heat(ph).frames - solve_burgers(pb).frames).max()
        assert diff <= 1e-10


def test_burgers_output_contract():
    p = sample_system(Equation.BURGERS, 7)
    traj = solve_burgers(p)
    assert traj.frames.shape == (101, 64, 64)
    assert np.isfinite(traj.frames).all()
    assert traj.dt_out == 0.01
    assert traj.domain == ((-0.5, 0.5), (-0.5, 0.5))


def test_frame_zero_is_the_prescribed_initial_condition():
    p = SystemParams(equation=Equation.HEAT, bc_type=BCType.PERIODIC, beta=0.002, seed=0)
    traj = solve_heat(p)
    np.testing.assert_array_equal(
        traj.frames[0], default_initial_condition(64).astype(np.float32)
    )


def test_initial_condition_is_diagonal_ridge():
    u0 = default_initial_condition(64)
    xs = cell_centers(64)
    expected = np.exp(-100.0 * (xs[None, :] + xs[:, None]) ** 2)
    np.testing.assert_allclose(u0, expected, rtol=1e-12)
    assert u0.max() <= 1.0


def test_solvers_are_deterministic_functions_of_params():
    p = sample_system(Equation.BURGERS, 42)
    a = solve_burgers(p).frames
    b = solve_burgers(p).frames
    assert np.array_equal(a, b)


def test_divergence_raises_with_step_name():
    p = SystemParams(equation=Equation.HEAT, bc_type=BCType.PERIODIC, beta=50.0, seed=0)
    with pytest.raises(SolverDivergenceError, match="frame"):
        solve_heat(p)


def test_diffusion_cfl_headroom_for_all_sampled_betas():
    dx = 1.0 / 64
    for seed in range(50):
        beta = sample_system(Equation.HEAT, seed).beta
        assert beta * FD_DT_INTERNAL / dx**2 <= 0.25


def test_wrong_equation_rejected():
    p = sample_system(Equation.HEAT, 0)
    with pytest.raises(ConfigError):
        solve_burgers(p)


def test_burgers_small_grid_matches_fine_euler_reference():
    """Independent oracle: explicit Euler at dt = 1e-5 on the same 16x16
    periodic grid, straightforward roll-based stencils."""
    p = SystemParams(
        equation=Equation.BURGERS, bc_type=BCType.PERIODIC, beta=0.004,
        alpha_x=0.7, alpha_y=-0.4, seed=0,
    )
    n = 16
    traj = solve_burgers(p, grid=n)
    got = traj.frames[-1].astype(np.float64)

    dx = 1.0 / n
    u = default_initial_condition(n).astype(np.float64)
    dt = 1e-5
    for _ in range(int(round(1.0 / dt))):
        lap = (
            np.roll(u, 1, 1) + np.roll(u, -1, 1) + np.roll(u, 1, 0) + np.roll(u, -1, 0) - 4 * u
        ) / dx**2
        sx = p.alpha_x * u
        ddx = np.where(sx > 0, (u - np.roll(u, 1, 1)) / dx, (np.roll(u, -1, 1) - u) / dx)
        sy = p.alpha_y * u
        ddy = np.where(sy > 0, (u - np.roll(u, 1, 0)) / dx, (np.roll(u, -1, 0) - u) / dx)
        u = u + dt * (p.beta * lap - sx * ddx - sy * ddy)
    rel = np.linalg.norm(got - u) / np.linalg.norm(u)
    assert rel < 1e-2
