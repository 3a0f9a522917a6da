"""Error taxonomy shared across the package.

The CLI maps these onto exit codes: UsageError -> 1, ConfigError -> 2,
anything else -> 3.
"""


class UsageError(ValueError):
    """An operation was called with arguments violating its preconditions."""


class ConfigError(ValueError):
    """A configuration value or input file is malformed or inconsistent."""


class NoExcessError(ConfigError):
    """No measurement effect clears the requested excess-probability margin.

    Raised when a selection plan cannot be built because the margin is larger
    than the maximal excess the preparation exhibits over the uniform outcome
    probability within the examined horizon.
    """
