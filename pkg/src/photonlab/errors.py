"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: configuration/input problems exit 2,
violated domain invariants exit 3.
"""


class ConfigError(ValueError):
    """Invalid configuration value or unparseable/ill-formed input file."""


class InvariantError(RuntimeError):
    """A domain invariant that should hold by construction was violated."""


class NormalizationError(InvariantError):
    """g2 normalization is undefined (a channel has zero rate or duration)."""


class InsufficientDataError(InvariantError):
    """Not enough data to run an analysis (e.g. a trace spanning < 3 fringes)."""
