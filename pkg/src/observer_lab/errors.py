class ObserverLabError(Exception):
    """Base class for errors raised by observer_lab."""


class IntegrationError(ObserverLabError):
    """An ODE integration produced non-finite values."""

    def __init__(self, message, t=None, index=None):
        super().__init__(message)
        self.t = t
        self.index = index


class ConfigError(ObserverLabError, ValueError):
    """Invalid scenario configuration; ``field`` is a dotted path."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class StageError(ObserverLabError):
    """A pipeline stage failed inside ``run_scenario``."""

    def __init__(self, stage, cause, index=None):
        where = f" at sample {index}" if index is not None else ""
        super().__init__(f"stage '{stage}' failed{where}: {cause}")
        self.stage = stage
        self.index = index
