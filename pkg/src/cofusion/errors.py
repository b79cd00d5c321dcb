"""Exception types shared across the library and CLI exit-code mapping."""


class CofusionError(Exception):
    """Base class for all library failures."""


class UnsupportedFormatError(CofusionError):
    """Image file extension or encoding is not handled."""


class CorruptImageError(CofusionError):
    """File exists but its contents cannot be decoded."""


class ConfigError(CofusionError):
    """Configuration file is invalid (unknown key, bad range, missing path)."""


class NumericError(CofusionError):
    """A numeric routine failed (degenerate geometry, non-finite input, ...)."""


# CLI exit codes
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
