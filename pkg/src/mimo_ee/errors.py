"""Exception hierarchy shared by all modules."""


class MimoEeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidConfig(MimoEeError):
    """A system configuration violates its constraints."""


class DimensionMismatch(MimoEeError):
    """Matrix operands have incompatible shapes."""


class NotPositiveDefinite(MimoEeError):
    """A matrix expected to be Hermitian positive definite is (near-)singular."""


class BetaOutOfRange(MimoEeError):
    """Receive/transmit antenna ratio outside (1, inf)."""


class InfeasibleInterval(MimoEeError):
    """A line-search interval is empty."""


class BracketingFailure(MimoEeError):
    """Could not bracket an interior maximum (degenerate power model)."""


class EmptyFeasibleSet(MimoEeError):
    """No lattice point satisfies the optimization constraints."""


class ConfigError(MimoEeError):
    """A run configuration file or override could not be parsed."""
