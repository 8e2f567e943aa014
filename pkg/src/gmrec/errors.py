"""Exception hierarchy shared across the package.

CLI exit codes: ConfigError -> 2, NumericalError -> 3, SizeGuardError -> 4.
"""


class GmrecError(Exception):
    """Base class for all package errors."""


class ConfigError(GmrecError):
    """Invalid user input: bad flags, malformed files, inconsistent shapes."""


class NumericalError(GmrecError):
    """A numerical procedure failed (singular system, degenerate constant)."""


class SingularMatrixError(NumericalError):
    """Square solve refused: condition estimate above the singularity cutoff."""


class InfeasibleError(NumericalError):
    """Constraint set of an optimization problem is empty."""


class DegenerateRICError(NumericalError):
    """Restricted isometry constant >= 1; the error bound formula is vacuous."""


class SizeGuardError(GmrecError):
    """A combinatorial routine was called above its enumeration budget."""
