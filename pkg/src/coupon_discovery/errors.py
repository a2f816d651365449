"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`DiscoveryError`, which is itself a :class:`ValueError`, so callers
can catch either.
"""


class DiscoveryError(ValueError):
    pass


class ValidationError(DiscoveryError):
    """Malformed input: wrong shape, bad sum, negative entry, bad reference."""


class ParameterDomainError(DiscoveryError):
    """A scalar parameter lies outside the domain where the model is defined."""


class UnsupportedRangeError(DiscoveryError):
    pass


class InsufficientDataError(DiscoveryError):
    pass


class DegenerateSeriesError(DiscoveryError):
    pass


class UnsupportedModelError(DiscoveryError):
    pass


class DomainError(DiscoveryError):
    """Numerical domain violation, e.g. the log of a non-positive residual."""
