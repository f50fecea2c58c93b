"""Metrics aggregation across seeds."""

import json
import math
from dataclasses import dataclass, field


def seed_stats(values):
    """Mean and sample std (ddof=1; zero for a single seed)."""
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def pooled_std(stds):
    return math.sqrt(sum(s * s for s in stds) / len(stds))


@dataclass
class MetricsReport:
    task: str
    rows: dict = field(default_factory=dict)  # label -> {per_seed, mean, std}
    curves: dict = field(default_factory=dict)  # label -> {per_step: [...], accumulated: float}
    meta: dict = field(default_factory=dict)

    def add_row(self, label, per_seed):
        values = [per_seed[s] for s in sorted(per_seed)]
        mean, std = seed_stats(values)
        self.rows[label] = {
            "per_seed": {str(s): per_seed[s] for s in sorted(per_seed)},
            "mean": mean,
            "std": std,
        }

    def add_curve(self, label, per_step):
        per_step = [float(v) for v in per_step]
        self.curves[label] = {"per_step": per_step, "accumulated": sum(per_step)}

    def to_dict(self):
        return {"task": self.task, "rows": self.rows, "curves": self.curves, "meta": self.meta}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self):
        seeds = []
        for row in self.rows.values():
            for s in row["per_seed"]:
                if s not in seeds:
                    seeds.append(s)
        lines = ["label,mean,std," + ",".join(f"seed_{s}" for s in seeds)]
        for label, row in self.rows.items():
            cells = [label, repr(row["mean"]), repr(row["std"])]
            cells += [repr(row["per_seed"].get(s, "")) for s in seeds]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def curves_csv(self):
        if not self.curves:
            return ""
        labels = list(self.curves)
        steps = len(next(iter(self.curves.values()))["per_step"])
        lines = ["step," + ",".join(labels)]
        for i in range(steps):
            lines.append(
                ",".join([str(i + 1)] + [repr(self.curves[l]["per_step"][i]) for l in labels])
            )
        return "\n".join(lines) + "\n"

    def save(self, prefix):
        with open(f"{prefix}.json", "w") as f:
            f.write(self.to_json())
        with open(f"{prefix}.csv", "w") as f:
            f.write(self.to_csv())
        if self.curves:
            with open(f"{prefix}_curves.csv", "w") as f:
                f.write(self.curves_csv())

    @classmethod
    def load_json(cls, path):
        with open(path) as f:
            d = json.load(f)
        return cls(task=d["task"], rows=d["rows"], curves=d.get("curves", {}), meta=d.get("meta", {}))
