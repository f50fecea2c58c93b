"""Autoregressive rollout evaluation.

Feed the model its own prediction for ``steps`` steps starting from the
initial condition; per-step error against ground truth is MSE, and the
accumulated error is the sum of the per-step values. The text embedding is
resolved once per trajectory and held fixed across steps.
"""

import numpy as np

from ..tensor import no_grad
from .data import LoadedData
from .training import _conditioning

ROLLOUT_STEPS = 40


def rollout_curve(predict, frames, steps=ROLLOUT_STEPS):
    """predict: (g, g) field -> (g, g) field. Returns per-step MSE (steps,)."""
    field = np.asarray(frames[0], dtype=np.float64)
    curve = np.empty(steps, dtype=np.float64)
    for t in range(1, steps + 1):
        field = np.asarray(predict(field), dtype=np.float64)
        diff = field - frames[t]
        curve[t - 1] = float((diff * diff).mean())
    return curve


def model_rollout(model, data: LoadedData, traj_indices, steps=ROLLOUT_STEPS):
    """Batched rollout over a set of trajectories; returns the mean per-step
    MSE curve across trajectories."""
    traj_indices = np.asarray(traj_indices)
    fields = data.frames[traj_indices, 0].astype(np.float64)
    total = np.zeros(steps, dtype=np.float64)
    with no_grad():
        emb = _conditioning(model, data, traj_indices)
        for t in range(1, steps + 1):
            fields = model.forward(fields.astype(np.float32), emb).data.astype(np.float64)
            diff = fields - data.frames[traj_indices, t]
            total[t - 1] = (diff * diff).mean(axis=(1, 2)).mean()
    return total


def accumulated_error(curve):
    return float(np.sum(curve))
