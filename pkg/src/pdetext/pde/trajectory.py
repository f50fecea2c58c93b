"""Trajectory record shared by all solvers and the dataset file."""

from dataclasses import dataclass

import numpy as np

from .params import SystemParams

FRAME_COUNT = 101
GRID = 64


@dataclass
class Trajectory:
    """One simulated solution: 101 frames plus the physics that produced it.

    Frames are float32 (solvers integrate in float64 and truncate here);
    ``domain`` is ((xmin, xmax), (ymin, ymax)); ``dt_out`` is the spacing of
    the stored frames in seconds.
    """

    params: SystemParams
    frames: np.ndarray
    domain: tuple
    dt_out: float

    def __post_init__(self):
        if self.frames.shape[0] != FRAME_COUNT:
            raise ValueError(f"expected {FRAME_COUNT} frames, got {self.frames.shape[0]}")
        if not np.isfinite(self.frames).all():
            raise ValueError("trajectory contains non-finite values")

    @property
    def grid(self):
        return self.frames.shape[1]
