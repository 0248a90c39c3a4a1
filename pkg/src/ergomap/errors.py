"""Exception hierarchy shared by all ergomap modules."""


class ErgomapError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ErgomapError, ValueError):
    """A point or probability lies outside the valid domain."""


class KindError(ErgomapError, TypeError):
    """An operation was applied to a density of the wrong kind/dimension."""


class ParameterError(ErgomapError, ValueError):
    """A constructor parameter is out of range or malformed."""


class CapabilityError(ErgomapError, NotImplementedError):
    """The requested operation is not defined for this object's structure."""


class ParseError(ErgomapError, ValueError):
    """Malformed textual input (map spec, PGM stream, CSV, JSON bundle).

    ``position`` is a character offset for inline specs, or a line number
    for file-based formats (``line`` is then set too).
    """

    def __init__(self, message, position=None, line=None, source=None):
        self.position = position
        self.line = line
        self.source = source
        loc = ""
        if source is not None:
            loc += f"{source}:"
        if line is not None:
            loc += f"{line}:"
        elif position is not None:
            loc += f"col {position}:"
        super().__init__(f"{loc} {message}" if loc else message)


class NormalizationError(ErgomapError, ValueError):
    """A density cannot be normalized (e.g. zero total mass)."""
