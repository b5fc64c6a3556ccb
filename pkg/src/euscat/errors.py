"""Exception types shared across the package.

Every raise in the library uses one of these four classes (or a plain
ValueError/TypeError for programmer errors caught at the boundary), so
callers and the command line tool can map failures to exit codes without
string matching.
"""


class ConfigError(Exception):
    """Malformed or contradictory run configuration."""


class DomainError(Exception):
    """An input lies outside the mathematical domain of the operation."""


class PreconditionError(Exception):
    """A stated precondition on inputs or state does not hold."""


class AccuracyError(Exception):
    """A requested tolerance could not be met within resource limits."""
