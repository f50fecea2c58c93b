from .ablation import FLAG_ORDER, run_ablation
from .data import (
    LoadedData,
    load_experiment_data,
    make_pairs,
    split_by_dataset,
    split_indices,
)
from .experiment import ExperimentConfig
from .report import MetricsReport, pooled_std, seed_stats
from .rollout import ROLLOUT_STEPS, accumulated_error, model_rollout, rollout_curve
from .training import (
    SeedOutcome,
    build_model,
    evaluate_pairs,
    load_data_for,
    materialize_model,
    run_seeds,
    train_experiment,
    train_one_seed,
)
from .transfer import run_transfer, state_digest

__all__ = [
    "FLAG_ORDER",
    "run_ablation",
    "LoadedData",
    "load_experiment_data",
    "make_pairs",
    "split_by_dataset",
    "split_indices",
    "ExperimentConfig",
    "MetricsReport",
    "pooled_std",
    "seed_stats",
    "ROLLOUT_STEPS",
    "accumulated_error",
    "model_rollout",
    "rollout_curve",
    "SeedOutcome",
    "build_model",
    "evaluate_pairs",
    "load_data_for",
    "materialize_model",
    "run_seeds",
    "train_experiment",
    "train_one_seed",
    "run_transfer",
    "state_digest",
]
