"""Exception hierarchy.

Every error carries the process exit code the command-line front end should
use: 1 for usage and configuration problems, 2 for numerical failures.
"""

from __future__ import annotations


class GlimmWedgeError(Exception):
    """Base class for all package errors."""

    exit_code = 2


class UsageError(GlimmWedgeError):
    """Bad input supplied by the caller (flags, config, preconditions)."""

    exit_code = 1


class NumericalError(GlimmWedgeError):
    """A computation left its domain of validity or failed to converge."""

    exit_code = 2


class ConfigError(UsageError):
    pass


class DegenerateScaling(UsageError):
    pass


class UnsortedFamily(UsageError):
    pass


class UnsupportedTau(UsageError):
    pass


class DomainMismatch(UsageError):
    pass


class SonicDefectExceeded(NumericalError):
    """The state left the supersonic region where the x-marching is hyperbolic."""


class VacuumReached(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class RangeExceeded(NumericalError):
    pass


class InconsistentRH(NumericalError):
    pass


class CFLViolation(NumericalError):
    pass


class OutOfDomain(NumericalError):
    pass
