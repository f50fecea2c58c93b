"""Transfer learning: pretrain on a combined mix, then finetune per dataset.

The dam-break data may appear only at the finetune stage; putting it in the
pretrain mix is a configuration error.
"""

import hashlib
from dataclasses import replace

import numpy as np

from ..errors import ConfigError
from ..pde.params import Equation
from .data import LoadedData
from .report import MetricsReport
from .training import load_data_for, run_seeds, train_experiment


def state_digest(state):
    h = hashlib.sha256()
    for name in sorted(state):
        h.update(name.encode())
        h.update(np.ascontiguousarray(state[name], dtype="<f4").tobytes())
    return h.hexdigest()


def _guard_no_shallow_water(data: LoadedData, stage):
    for p in data.params:
        if p.equation is Equation.SHALLOW_WATER:
            raise ConfigError(f"shallow-water trajectories are not allowed in the {stage} mix")


def run_transfer(cfg):
    """cfg.transfer: {"pretrain": [paths], "finetune": path, "epochs": n}.

    Returns (MetricsReport, finetune outcomes). The report carries pretrain
    rows, finetune rows, and the checkpoint lineage digests.
    """
    spec = cfg.transfer or {}
    if not spec.get("pretrain") or not spec.get("finetune"):
        raise ConfigError("transfer needs both a pretrain dataset list and a finetune dataset")

    pre_cfg = replace(cfg, datasets=list(spec["pretrain"]), transfer=None)
    pre_data = load_data_for(pre_cfg)
    _guard_no_shallow_water(pre_data, "pretrain")
    pre_report, pre_outcomes = train_experiment(pre_cfg, data=pre_data)

    ft_cfg = replace(
        cfg,
        datasets=[spec["finetune"]],
        epochs=int(spec.get("epochs", cfg.epochs)),
        transfer=None,
    )
    ft_data = load_data_for(ft_cfg)
    by_seed = {o.seed: o for o in pre_outcomes}
    ft_outcomes = []
    for seed in cfg.seeds:
        ft_outcomes += run_seeds(
            ft_data, replace(ft_cfg, seeds=(seed,)), initial_state=by_seed[seed].state
        )

    report = MetricsReport(task=cfg.task)
    report.meta = {
        "pretrain": pre_report.meta,
        "finetune_dataset": spec["finetune"],
        "finetune_epochs": ft_cfg.epochs,
        "lineage": {
            str(o.seed): {
                "pretrain_state": state_digest(by_seed[o.seed].state),
                "finetune_state": state_digest(o.state),
            }
            for o in ft_outcomes
        },
    }
    for label, row in pre_report.rows.items():
        report.rows[f"pretrain:{label}"] = row
    report.add_row("finetune", {o.seed: o.test for o in ft_outcomes})
    return report, ft_outcomes
