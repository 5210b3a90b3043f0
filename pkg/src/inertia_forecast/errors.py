"""Exception hierarchy shared across the package."""


class InertiaError(Exception):
    """Base class for all package errors."""


class DataError(InertiaError):
    """Problem with input data (maps to CLI exit code 2)."""


class ParseError(DataError):
    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class IntegrityError(DataError):
    pass


class SchemaError(DataError):
    pass


class ResampleError(DataError):
    pass


class MissingSeriesError(DataError):
    pass


class SplitError(InertiaError):
    pass


class EmptyDesignError(InertiaError):
    pass


class NumericError(InertiaError):
    pass


class FitError(InertiaError):
    pass


class MetricError(InertiaError):
    pass


class ConfigError(InertiaError):
    """Invalid experiment configuration (maps to CLI exit code 1)."""


class ExperimentError(InertiaError):
    def __init__(self, experiment_id, stage, cause):
        self.experiment_id = experiment_id
        self.stage = stage
        self.cause = cause
        super().__init__(f"experiment {experiment_id!r} failed at stage {stage!r}: {cause}")
