"""Architecture configuration for the surrogate operator."""

from dataclasses import asdict, dataclass

from ..errors import ConfigError


@dataclass(frozen=True)
class ArchConfig:
    """Backbone and conditioning hyperparameters.

    ``head_dim``/``heads`` apply both to the axial attention and to the
    cross-attention conditioning block. ``llm_dim`` is the incoming text
    embedding width (384 sentence-level, 4096 word-level, 384 for the
    trainable token table).
    """

    depth: int = 1
    hidden_dim: int = 32
    head_dim: int = 4
    heads: int = 4
    kernel_multiplier: int = 2
    latent_multiplier: int = 2
    patch_kernel: int = 8
    patch_stride: int = 4
    llm_dim: int = 384
    multimodal: bool = False
    grid: int = 64

    def __post_init__(self):
        if (self.grid - self.patch_kernel) % self.patch_stride:
            raise ConfigError(
                f"grid {self.grid} is not patchable with kernel {self.patch_kernel} "
                f"stride {self.patch_stride}"
            )
        if (self.latent_multiplier * self.hidden_dim) % self.heads:
            raise ConfigError("latent width must divide evenly across heads")

    @property
    def patch_side(self):
        return (self.grid - self.patch_kernel) // self.patch_stride + 1

    @property
    def patch_count(self):
        return self.patch_side**2

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def next_step_config(multimodal, **overrides):
    """Next-step defaults: baseline 1/32/4/4/2/2, conditioned 1/32/1/1/2/2."""
    base = dict(depth=1, hidden_dim=32, head_dim=4, heads=4, kernel_multiplier=2, latent_multiplier=2)
    if multimodal:
        base.update(head_dim=1, heads=1)
    base["multimodal"] = multimodal
    base.update(overrides)
    return ArchConfig(**base)


def fixed_future_config(multimodal, **overrides):
    """Fixed-future defaults: baseline 1/64/4/4/2/2, conditioned 1/32/4/4/2/2."""
    base = dict(depth=1, hidden_dim=64, head_dim=4, heads=4, kernel_multiplier=2, latent_multiplier=2)
    if multimodal:
        base.update(hidden_dim=32)
    base["multimodal"] = multimodal
    base.update(overrides)
    return ArchConfig(**base)
