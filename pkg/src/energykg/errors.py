"""Exception hierarchy shared across the package.

Anything raised for bad user input derives from EnergyKgError so the CLI
can translate it into exit code 1.
"""


class EnergyKgError(Exception):
    """Base class for input, parse and configuration errors."""
