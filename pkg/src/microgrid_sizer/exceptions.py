class MicrogridError(Exception):
    """Base class for data and configuration errors raised by this package."""


class TraceError(MicrogridError, ValueError):
    """A trace file or time series violates its contract (gaps, bad values, coverage)."""


class ConfigError(MicrogridError, ValueError):
    """A scenario configuration is malformed, out of range or references missing files."""
