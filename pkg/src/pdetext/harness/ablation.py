"""Text-detail ablation: train the same setup under all 8 flag combinations."""

from dataclasses import replace

from .report import MetricsReport
from .training import train_experiment

FLAG_ORDER = ("none", "b", "c", "q", "bc", "bq", "cq", "bcq")


def run_ablation(cfg):
    """One row per flag combination, identical seeds throughout.

    Returns (MetricsReport keyed by flag set, {flags: outcomes}).
    """
    report = MetricsReport(task=cfg.task)
    report.meta = {
        "datasets": list(cfg.datasets),
        "seeds": list(cfg.seeds),
        "provider": cfg.provider,
        "epochs": cfg.epochs,
        "rows_are": "description flag sets",
    }
    all_outcomes = {}
    for flags in FLAG_ORDER:
        row_report, outcomes = train_experiment(replace(cfg, flags=flags))
        report.add_row(flags, {o.seed: o.test for o in outcomes})
        all_outcomes[flags] = outcomes
    return report, all_outcomes
