"""Exception types shared across the toolkit."""


class PbOptError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(PbOptError):
    """Invalid configuration: bad sizes, unknown names, rejected keys."""


class InputError(PbOptError):
    """Runtime argument with the wrong shape, length or range."""


class DomainError(PbOptError):
    """Mathematical argument outside its valid domain (angles, scales)."""


class NumericalError(PbOptError):
    """Numerical failure: non-finite values, factorization breakdown."""


class IntegrationError(NumericalError):
    """Trajectory integration diverged."""


class EvaluationError(PbOptError):
    """A candidate evaluation failed; carries run/generation context."""


class AggregationError(PbOptError):
    """Run logs cannot be aggregated (ragged or empty)."""
