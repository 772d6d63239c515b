"""Exception hierarchy for icrar."""


class IcrError(Exception):
    """Base class for all icrar errors."""


class ParameterError(IcrError, ValueError):
    """A parameter or input lies outside its admissible domain."""


class SingularDesignError(IcrError):
    """The regression design is numerically rank deficient."""


class DegenerateVarianceError(IcrError):
    """The sandwich variance collapsed to zero (exactly fitting series)."""


class ConfigError(IcrError, ValueError):
    """A scenario configuration file is malformed or inconsistent."""


class TableFormatError(IcrError, ValueError):
    """A quantile-table file is malformed or violates its invariants."""
