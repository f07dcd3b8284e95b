"""Exception types shared across the package."""


class ContractError(ValueError):
    """Raised when arguments violate a shape or domain precondition."""


class ConfigError(ValueError):
    """Invalid optimizer or experiment configuration."""


class DisjointnessError(ValueError):
    """Requested a test set disjoint from forbidden challenges that cannot exist."""


class FormatError(ValueError):
    """Malformed instance, CRP or record file.

    ``offset`` is the byte (or line, for text files) position where parsing failed.
    """

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)


class VersionError(FormatError):
    """File written by an unsupported format version."""
