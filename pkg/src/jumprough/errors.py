"""Error taxonomy.

Argument errors are plain ``ValueError`` (CLI exit code 2). Regime and
numerics failures get their own classes (CLI exit code 3).
"""


class RegimeError(Exception):
    """Parameters outside the regime where the method is valid.

    Examples: Young integration with 1/p + 1/q <= 1, rough integration
    with p outside [2, 3).
    """


class NumericsError(Exception):
    """Runtime numerical failure: blowup, non-convergence, size caps."""


class UnsupportedFeatureError(ValueError):
    """A requested combination is recognized but deliberately not handled."""
