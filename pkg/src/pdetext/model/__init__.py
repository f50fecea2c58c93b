from .config import ArchConfig, fixed_future_config, next_step_config
from .network import Surrogate

__all__ = ["ArchConfig", "fixed_future_config", "next_step_config", "Surrogate"]
