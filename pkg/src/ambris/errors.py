"""Exception types shared across the package."""


class AmbrisError(Exception):
    """Base class for every error raised deliberately by ambris."""


class DomainError(AmbrisError, ValueError):
    """An input lies outside the domain of a formula (zero distance, undefined argument...)."""


class ContractError(AmbrisError, ValueError):
    """Inputs are individually valid but inconsistent with each other."""


class ConfigError(AmbrisError, ValueError):
    """A run configuration failed to parse or validate."""
