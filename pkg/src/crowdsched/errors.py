"""Exception types shared across the package."""


class CrowdschedError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(CrowdschedError):
    """A dataset is missing a required column."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"missing required column: {column!r}")


class UnknownTaskError(CrowdschedError):
    """A task id was referenced that does not exist in the catalog."""


class CycleError(CrowdschedError):
    """The dependency graph contains a cycle."""

    def __init__(self, cycle: list[str]):
        self.cycle = list(cycle)
        path = " -> ".join(self.cycle + self.cycle[:1])
        super().__init__(f"dependency cycle: {path}")


class ConfigError(CrowdschedError):
    """An invalid configuration value."""


class TrainingDivergedError(CrowdschedError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int):
        self.epoch = epoch
        super().__init__(f"non-finite training loss at epoch {epoch}")


class ModelFormatError(CrowdschedError):
    """A model file does not match the expected versioned format."""


class InfeasibleProjectError(CrowdschedError):
    """No schedule satisfies the dependency constraints within the horizon."""


class EnumerationGuardError(CrowdschedError):
    """An instance is too large for exhaustive enumeration."""

    def __init__(self, message: str, estimate: float):
        self.estimate = estimate
        super().__init__(message)


class ComparisonError(CrowdschedError):
    """Two Pareto fronts cannot be compared."""
