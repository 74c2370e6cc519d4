"""Exception types shared by all boxdim modules."""


class BoxdimError(Exception):
    """Base class for everything this package raises on purpose."""


class InputError(BoxdimError, ValueError):
    """Malformed arguments: bad vertex ids, ell < 2, inconsistent sizes."""


class FormatError(BoxdimError, ValueError):
    """Unparseable file content; message carries the line number."""


class DomainError(BoxdimError, ValueError):
    """Structurally valid input outside an operation's domain
    (disconnected graph for a diameter, witness pair too close, ...)."""


class PreconditionError(BoxdimError, ValueError):
    """A construction was asked for outside the regime where it applies."""


class RegimeError(BoxdimError, ValueError):
    """Parameter regime not supported (p != 1 boxing, subcritical offspring, ...)."""


class ResourceError(BoxdimError, RuntimeError):
    """A size budget was exceeded. Carries whatever partial results exist."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
