"""Exception hierarchy shared by all herzlab modules."""


class HerzlabError(Exception):
    """Base class for all toolkit errors."""


class InputDomainError(HerzlabError, ValueError):
    """Input data outside the operation's domain (non-finite samples, t < 0, ...)."""


class StateError(HerzlabError, RuntimeError):
    """Object is missing a representation or history the operation needs."""


class ResolutionError(HerzlabError, ValueError):
    """Requested scale cannot be represented on the grid."""


class ParameterError(HerzlabError, ValueError):
    """Exponent tuple violates a validity range or a structural hypothesis."""


class CompositionError(HerzlabError, ValueError):
    """Objects built on different grids were combined."""


class CapabilityError(HerzlabError, RuntimeError):
    """Operation needs a capability the object does not provide."""
