"""Trajectory generation: embarrassingly parallel over seeds.

Workers each own their solver state; results are kept in seed order so the
output is deterministic regardless of worker count. ``PDE_SIM_THREADS``
caps the pool.
"""

import os
from concurrent.futures import ProcessPoolExecutor

from .fdsolve import solve_burgers, solve_heat
from .params import Equation, sample_system
from .spectral import solve_navier_stokes


def _solve_one(args):
    params, grid = args
    if params.equation is Equation.HEAT:
        return solve_heat(params, grid=grid)
    if params.equation is Equation.BURGERS:
        return solve_burgers(params, grid=grid)
    return solve_navier_stokes(params, grid=grid)


def worker_count(requested=None):
    cap = os.environ.get("PDE_SIM_THREADS")
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap is not None:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def generate_trajectories(equation, count, base_seed, grid=64, workers=None):
    """`count` trajectories with seeds base_seed..base_seed+count-1.

    ``grid`` is the solver resolution for the vorticity runs (output stays
    64x64); the finite-difference runs always solve on 64x64.
    """
    equation = Equation(equation)
    fd_grid = 64 if equation is not Equation.NAVIER_STOKES else grid
    jobs = [(sample_system(equation, base_seed + i), fd_grid) for i in range(count)]
    n_workers = worker_count(workers)
    if n_workers <= 1 or count <= 1:
        return [_solve_one(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(_solve_one, jobs, chunksize=max(1, count // (4 * n_workers))))
