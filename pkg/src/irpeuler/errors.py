"""Exception types shared across the package.

The hierarchy mirrors how failures propagate: state/domain problems,
inversion problems, solver step problems, and configuration problems.
All library errors derive from IrpEulerError so callers can catch one
type at the application boundary.
"""


class IrpEulerError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(IrpEulerError):
    """A thermodynamic or conserved state lies outside the valid domain."""


class NonphysicalState(IrpEulerError):
    """A derived quantity violates physics (for example pressure <= 0)."""


class NonhyperbolicState(IrpEulerError):
    """Sound speed is undefined because the stiffness d^2F/dv^2 is <= 0."""


class InversionFailure(IrpEulerError):
    """An entropy or pressure inversion did not converge."""


class NoPhysicalRoot(InversionFailure):
    """An algebraic inversion has no root with positive temperature."""


class AverageOutsideRegion(IrpEulerError):
    """A cell average violates the invariant region, so the limiter
    has no admissible reference state.  Signals a broken scheme
    precondition; the solver reacts by halving the time step."""


class InadmissibleInitialData(IrpEulerError):
    """Initial data evaluates to an inadmissible state somewhere."""


class StepFailure(IrpEulerError):
    """A time step kept violating the invariant region after the
    maximum number of step-size halvings."""


class MaxStepsExceeded(IrpEulerError):
    """The step budget was exhausted before reaching the final time.

    Carries the partial run report (if available) as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class VacuumFormation(IrpEulerError):
    """The exact Riemann solver detected vacuum generation."""


class ConfigError(IrpEulerError):
    """A run configuration is invalid.  Remembers the offending
    section and key so the CLI can emit a machine-parsable line."""

    def __init__(self, section, key, message):
        super().__init__(f"{section}.{key}: {message}")
        self.section = section
        self.key = key
