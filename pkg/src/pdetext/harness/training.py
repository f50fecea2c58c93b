"""Training loops for the next-step and fixed-future tasks.

One seed = one fully independent run: its own trajectory-level split, its
own deterministic init, per-epoch shuffled batches from a seed-keyed counter
RNG, Adam on the relative-L2 loss, best-validation parameter retention.
Comparisons between model variants pair up on the seed (same seed, same
split). Seeds run in parallel worker processes when asked; each worker pins
its BLAS pool so workers do not fight over cores.
"""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..embed import VOCAB_SIZE
from ..errors import TrainingDivergedError
from ..model import Surrogate
from ..tensor import Adam, Tensor, bag_mean, no_grad, relative_l2
from .data import LoadedData, load_experiment_data, make_pairs, split_by_dataset
from .experiment import ExperimentConfig
from .report import MetricsReport


@dataclass
class SeedOutcome:
    seed: int
    best_epoch: int
    val: float
    test: float
    test_by_dataset: dict
    val_history: list
    state: dict = field(repr=False, default=None)


def _conditioning(model, data, traj_rows):
    if not model.config.multimodal:
        return None
    if data.provider == "tokenizer":
        return bag_mean(model.token_table, [data.bags[i] for i in traj_rows])
    return Tensor(data.vectors[traj_rows])


def _per_sample_relative_l2(pred, target):
    b = pred.shape[0]
    d = (pred - target).reshape(b, -1)
    t = target.reshape(b, -1)
    return np.sqrt((d * d).sum(axis=1)) / np.sqrt((t * t).sum(axis=1))


def evaluate_pairs(model, data: LoadedData, pairs, batch_size):
    """Per-sample relative L2, aggregated overall and per source dataset."""
    errs = np.empty(pairs.shape[0], dtype=np.float64)
    with no_grad():
        for lo in range(0, pairs.shape[0], batch_size):
            rows = pairs[lo : lo + batch_size]
            inputs = data.frames[rows[:, 0], rows[:, 1]]
            targets = data.frames[rows[:, 0], rows[:, 2]]
            emb = _conditioning(model, data, rows[:, 0])
            pred = model.forward(inputs, emb).data.astype(np.float64)
            errs[lo : lo + rows.shape[0]] = _per_sample_relative_l2(
                pred, targets.astype(np.float64)
            )
    owner = data.traj_dataset[pairs[:, 0]]
    by_dataset = {
        name: float(errs[owner == di].mean())
        for di, name in enumerate(data.dataset_names)
        if np.any(owner == di)
    }
    return float(errs.mean()), by_dataset


def build_model(cfg: ExperimentConfig, data: LoadedData, seed) -> Surrogate:
    vocab = VOCAB_SIZE if (cfg.multimodal and data.provider == "tokenizer") else None
    return Surrogate(cfg.arch_config(), seed, token_vocab=vocab)


def train_one_seed(
    data: LoadedData,
    cfg: ExperimentConfig,
    seed,
    initial_state=None,
    batch_callback=None,
) -> SeedOutcome:
    train_idx, val_idx, test_idx = split_by_dataset(data, seed, cfg.split)
    model = build_model(cfg, data, seed)
    if initial_state is not None:
        model.load_state_arrays(initial_state)
    opt = Adam(model.params(), lr=cfg.lr, weight_decay=cfg.weight_decay)

    train_pairs = make_pairs(cfg.task, train_idx)
    val_pairs = make_pairs(cfg.task, val_idx)
    test_pairs = make_pairs(cfg.task, test_idx)

    rng = np.random.Generator(np.random.Philox([seed, 0xBA7C]))
    best = (np.inf, 0, model.state_arrays())
    history = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(train_pairs.shape[0])
        for lo in range(0, order.size, cfg.batch_size):
            rows = train_pairs[order[lo : lo + cfg.batch_size]]
            if batch_callback is not None:
                batch_callback(rows)
            inputs = data.frames[rows[:, 0], rows[:, 1]]
            targets = Tensor(data.frames[rows[:, 0], rows[:, 2]])
            emb = _conditioning(model, data, rows[:, 0])
            loss = relative_l2(model.forward(inputs, emb), targets)
            if not np.isfinite(loss.data):
                raise TrainingDivergedError(
                    f"seed {seed}: loss became non-finite at epoch {epoch}, "
                    f"batch {lo // cfg.batch_size}"
                )
            opt.zero_grad()
            loss.backward()
            opt.step()
        if val_pairs.size:
            val, _ = evaluate_pairs(model, data, val_pairs, cfg.batch_size)
        else:
            val = -np.inf  # no val split: keep the last epoch
        history.append(val)
        if val < best[0] or not np.isfinite(val):
            best = (val, epoch, model.state_arrays())

    if cfg.epochs == 0 and val_pairs.size:
        val, _ = evaluate_pairs(model, data, val_pairs, cfg.batch_size)
        best = (val, 0, best[2])
    model.load_state_arrays(best[2])
    test, by_dataset = evaluate_pairs(model, data, test_pairs, cfg.batch_size)
    return SeedOutcome(
        seed=seed,
        best_epoch=best[1],
        val=float(best[0]),
        test=test,
        test_by_dataset=by_dataset,
        val_history=history,
        state=best[2],
    )


# Fork-shared context for seed-parallel workers (set right before the pool
# is created; children inherit it through fork).
_WORKER_CTX = None


def _parallel_workers(cfg):
    return cfg.parallel if cfg.parallel > 0 else min(len(cfg.seeds), os.cpu_count() or 1)


def _limit_blas_threads(n):
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(n)
    except ImportError:
        pass


def _seed_worker(seed):
    data, cfg, initial_state = _WORKER_CTX
    _limit_blas_threads(max(1, (os.cpu_count() or 1) // _parallel_workers(cfg)))
    return train_one_seed(data, cfg, seed, initial_state=initial_state)


def run_seeds(data, cfg: ExperimentConfig, initial_state=None):
    """Train every seed, in parallel processes when cfg allows."""
    global _WORKER_CTX
    workers = min(_parallel_workers(cfg), len(cfg.seeds))
    if workers <= 1:
        return [train_one_seed(data, cfg, s, initial_state=initial_state) for s in cfg.seeds]
    _WORKER_CTX = (data, cfg, initial_state)
    try:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_seed_worker, cfg.seeds))
    finally:
        _WORKER_CTX = None


def load_data_for(cfg: ExperimentConfig, paths=None):
    provider = cfg.provider if cfg.multimodal else None
    return load_experiment_data(
        paths if paths is not None else cfg.datasets,
        cfg.description_flags,
        provider,
        cfg.store,
    )


def train_experiment(cfg: ExperimentConfig, data: LoadedData = None):
    """Full experiment: load, train seeds, aggregate.

    Returns (MetricsReport, list[SeedOutcome]).
    """
    if data is None:
        data = load_data_for(cfg)
    outcomes = run_seeds(data, cfg)
    report = MetricsReport(task=cfg.task)
    report.meta = {
        "flags": str(cfg.description_flags),
        "provider": cfg.provider if cfg.multimodal else None,
        "multimodal": cfg.multimodal,
        "datasets": list(cfg.datasets),
        "seeds": list(cfg.seeds),
        "epochs": cfg.epochs,
        "batch_size": cfg.batch_size,
        "lr": cfg.lr,
        "weight_decay": cfg.weight_decay,
        "best_epochs": {str(o.seed): o.best_epoch for o in outcomes},
    }
    report.add_row("combined", {o.seed: o.test for o in outcomes})
    for name in data.dataset_names:
        per_seed = {o.seed: o.test_by_dataset[name] for o in outcomes if name in o.test_by_dataset}
        if per_seed:
            report.add_row(name, per_seed)
    return report, outcomes


def materialize_model(cfg: ExperimentConfig, data: LoadedData, outcome: SeedOutcome) -> Surrogate:
    model = build_model(cfg, data, outcome.seed)
    model.load_state_arrays(outcome.state)
    return model
