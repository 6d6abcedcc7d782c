"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An operation was called outside its precondition."""


class ConstructionError(ValueError):
    """A local matrix could not be built from the given edges."""


class CapacityError(ValueError):
    """A requested graph does not fit the 64-bit id space."""


class EdgeListParseError(ValueError):
    def __init__(self, path, line, message):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class ConfigurationError(ValueError):
    """Invalid experiment, grid or cost-model configuration."""


class DeadlockError(RuntimeError):
    """The simulated ranks can no longer make progress."""

    def __init__(self, message, blocked=()):
        self.blocked = tuple(blocked)
        super().__init__(message)


class ValidationFailure(RuntimeError):
    """A BFS tree failed validation; carries the verdict."""

    def __init__(self, verdict, source=None):
        self.verdict = verdict
        self.source = source
        super().__init__(f"source {source}: {verdict}")
