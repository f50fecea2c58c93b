"""Experiment configuration (JSON-mirrorable)."""

import json
from dataclasses import asdict, dataclass, field

from ..errors import ConfigError
from ..model import fixed_future_config, next_step_config
from ..text import DescriptionFlags

TASKS = ("next_step", "fixed_future")


@dataclass
class ExperimentConfig:
    task: str = "next_step"
    datasets: list = field(default_factory=list)
    flags: str = "bcq"
    provider: str = "tokenizer"
    store: str = None
    multimodal: bool = True
    seeds: tuple = (0, 1, 2)
    split: tuple = (0.8, 0.1, 0.1)
    epochs: int = 20
    batch_size: int = 16
    lr: float = 1e-3
    weight_decay: float = 0.0
    normalize: bool = False
    parallel: int = 0  # 0 = auto (one worker per seed, capped by cores)
    arch: dict = field(default_factory=dict)
    transfer: dict = None  # {"pretrain": [...], "finetune": path, "epochs": n}

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        self.seeds = tuple(int(s) for s in self.seeds)
        self.split = tuple(float(f) for f in self.split)
        if abs(sum(self.split) - 1.0) > 1e-9:
            raise ConfigError("split fractions must sum to 1")

    @property
    def description_flags(self):
        return DescriptionFlags.parse(self.flags)

    def arch_config(self):
        llm_dim = self.arch.get("llm_dim")
        overrides = dict(self.arch)
        if self.multimodal and llm_dim is None:
            overrides["llm_dim"] = 4096 if self.provider == "word_store" else 384
        if self.task == "fixed_future":
            return fixed_future_config(self.multimodal, **overrides)
        return next_step_config(self.multimodal, **overrides)

    def to_json(self):
        d = asdict(self)
        d["seeds"] = list(self.seeds)
        d["split"] = list(self.split)
        return json.dumps(d, indent=2)

    @classmethod
    def from_json_file(cls, path):
        with open(path) as f:
            d = json.load(f)
        return cls(**d)
