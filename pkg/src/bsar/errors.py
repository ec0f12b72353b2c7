"""Exception hierarchy shared by the toolkit.

Each error class carries the process exit status used by the CLI, so the
command layer can map failures without a lookup table.
"""


class BsarError(Exception):
    """Base class for all toolkit errors."""

    exit_status = 1
    kind = "error"


class ParameterError(BsarError):
    """Invalid argument, configuration or file content outside format issues."""

    exit_status = 2
    kind = "parameter"


class ConfigurationError(ParameterError):
    """A simulation configuration that cannot produce a valid scene."""

    kind = "configuration"


class DegenerateFitError(ParameterError):
    """Least-squares phase fit has rank-deficient normal equations."""

    kind = "degenerate-fit"

    def __init__(self, message, model=None):
        super().__init__(message)
        self.model = model


class NoTargetError(ParameterError):
    """No point target found in the analysis window."""

    kind = "no-target"


class FormatError(BsarError):
    """Malformed file on disk. `offset` is the first offending byte offset."""

    exit_status = 3
    kind = "format"

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class UnsuitableSceneError(BsarError):
    """Scene does not satisfy the dominant point-scatterer precondition."""

    exit_status = 4
    kind = "unsuitable-scene"


class ConvergenceError(BsarError):
    """Iterative decomposition failed to converge; carries the last iterate."""

    exit_status = 5
    kind = "convergence"

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class TrackingError(ConvergenceError):
    """Too few usable peaks to fit a migration trajectory."""

    kind = "tracking"
