"""Experiment data assembly.

Loads trajectory datasets, renders the per-trajectory description once,
resolves it through the chosen text provider, and builds (input frame ->
target frame) pair indices for the two prediction tasks. Splits are at
trajectory level so no frame of a test trajectory can leak into training.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from ..embed import load_store, lookup, tokenize
from ..errors import ConfigError
from ..pde import read_dataset
from ..pde.trajectory import FRAME_COUNT
from ..text import DescriptionFlags, render_description

PROVIDERS = ("tokenizer", "sentence_store", "word_store")


@dataclass
class LoadedData:
    dataset_names: list
    traj_dataset: np.ndarray  # (n,) index into dataset_names
    frames: np.ndarray  # (n, 101, g, g) float32
    params: list
    texts: list
    vectors: np.ndarray = None  # (n, dim) for store providers
    bags: list = field(default_factory=list)  # token-id arrays for the tokenizer
    provider: str = None

    @property
    def n_traj(self):
        return self.frames.shape[0]

    @property
    def grid(self):
        return self.frames.shape[2]


def dataset_name(path):
    return os.path.splitext(os.path.basename(path))[0]


def load_experiment_data(paths, flags: DescriptionFlags, provider=None, store_path=None):
    """Read datasets and attach conditioning; provider None skips text."""
    names = []
    frames = []
    params = []
    owner = []
    for di, path in enumerate(paths):
        trajs = read_dataset(path)
        names.append(dataset_name(path))
        for t in trajs:
            frames.append(t.frames)
            params.append(t.params)
            owner.append(di)
    data = LoadedData(
        dataset_names=names,
        traj_dataset=np.asarray(owner, dtype=np.int64),
        frames=np.stack(frames),
        params=params,
        texts=[render_description(p, flags).text for p in params],
        provider=provider,
    )
    if provider is None:
        return data
    if provider not in PROVIDERS:
        raise ConfigError(f"unknown text provider {provider!r}")
    if provider == "tokenizer":
        data.bags = [np.asarray(tokenize(t), dtype=np.intp) for t in data.texts]
    else:
        if store_path is None:
            raise ConfigError(f"provider {provider!r} needs an embedding store file")
        store = load_store(store_path)
        data.vectors = np.stack([lookup(store, t).values for t in data.texts])
    return data


def split_indices(n, seed, fractions=(0.8, 0.1, 0.1)):
    """Deterministic trajectory-level shuffle split."""
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ConfigError(f"split fractions must sum to 1, got {fractions}")
    rng = np.random.Generator(np.random.Philox([seed, 0x5EED]))
    order = rng.permutation(n)
    n_train = int(n * fractions[0])
    n_val = int(n * fractions[1])
    return (
        np.sort(order[:n_train]),
        np.sort(order[n_train : n_train + n_val]),
        np.sort(order[n_train + n_val :]),
    )


def split_by_dataset(data: LoadedData, seed, fractions=(0.8, 0.1, 0.1)):
    """Split each source dataset separately, then merge the pieces."""
    train, val, test = [], [], []
    for di in range(len(data.dataset_names)):
        local = np.flatnonzero(data.traj_dataset == di)
        tr, va, te = split_indices(local.size, seed, fractions)
        train.append(local[tr])
        val.append(local[va])
        test.append(local[te])
    return np.concatenate(train), np.concatenate(val), np.concatenate(test)


def make_pairs(task, traj_indices):
    """(traj, t_in, t_out) rows: every transition for next-step, the
    initial-to-final pair for fixed-future."""
    if task == "next_step":
        t_in = np.arange(FRAME_COUNT - 1)
        traj = np.repeat(traj_indices, t_in.size)
        tin = np.tile(t_in, traj_indices.size)
        return np.column_stack([traj, tin, tin + 1]).astype(np.int64)
    if task == "fixed_future":
        z = np.zeros(traj_indices.size, dtype=np.int64)
        return np.column_stack([traj_indices, z, z + FRAME_COUNT - 1]).astype(np.int64)
    raise ConfigError(f"unknown task {task!r}")
