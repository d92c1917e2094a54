"""Exception types shared across the package."""


class LeagueRateError(Exception):
    """Base class for all package errors."""


class DataError(LeagueRateError):
    """The match data itself is faulty (malformed rows, conflicting memberships)."""


class ConfigurationError(LeagueRateError):
    """Inputs that configure a run are inconsistent or incomplete."""
