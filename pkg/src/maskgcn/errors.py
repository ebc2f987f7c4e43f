"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of the operation."""


class ConfigError(ValueError):
    """A configuration value or combination is invalid."""


class DataError(ValueError):
    """A dataset file could not be ingested."""


class TrainingDivergedError(RuntimeError):
    """The loss became non-finite during optimization."""

    def __init__(self, epoch: int, fold: int | None = None):
        self.epoch = epoch
        self.fold = fold
        where = f"fold {fold}, " if fold is not None else ""
        super().__init__(f"loss became non-finite at {where}epoch {epoch}")
