"""Exception types shared across the toolkit."""


class PdeTextError(Exception):
    """Base class for all toolkit errors."""


class ShapeError(PdeTextError):
    """Tensor extents are inconsistent with an operation's contract."""


class NonFiniteError(PdeTextError):
    """An op produced NaN or Inf from finite inputs; silent propagation is forbidden."""


class ConfigError(PdeTextError):
    """Invalid or inconsistent configuration."""


class FormatError(PdeTextError):
    """A binary file failed validation. ``offset`` is the byte position of the fault."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class SolverDivergenceError(PdeTextError):
    """A time integration blew up; the message names the failing step."""


class DegenerateTargetError(PdeTextError):
    """Relative error against an all-zero target is undefined."""


class DegenerateInputError(PdeTextError):
    """An input is empty where a nonempty one is required."""


class StoreMissError(PdeTextError):
    """An embedding lookup missed. Carries the absent key so drift fails loudly."""

    def __init__(self, digest_hex):
        super().__init__(f"embedding store has no entry for sentence hash {digest_hex}")
        self.digest_hex = digest_hex


class TrainingDivergedError(PdeTextError):
    """Loss became non-finite during optimization."""
