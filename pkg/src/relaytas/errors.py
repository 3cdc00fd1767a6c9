"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all relaytas errors."""


class ConfigError(ToolkitError):
    """Bad or inconsistent run configuration (invalid grid, missing artifact)."""


class DataFormatError(ToolkitError):
    """Malformed dataset or results file."""

    def __init__(self, path, message, line=None):
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = str(path)
        self.line = line


class ModelFormatError(ToolkitError):
    """Model file unreadable, truncated, or incompatible with the task."""


class TrainingDivergedError(ToolkitError):
    """Loss became non-finite during training."""
