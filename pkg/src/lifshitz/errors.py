"""Exception hierarchy for the lifshitz package."""


class LifshitzError(Exception):
    """Base class for all package errors."""


class ValidationError(LifshitzError):
    """Bad input that violates a documented precondition."""


class DomainError(ValidationError):
    """Evaluation requested at an excluded point (e.g. a pole of a formula)."""


class ModelMismatch(ValidationError):
    """Operation called with a dispersion model it does not support."""


class DegenerateModel(ValidationError):
    """Drude parameters outside the underdamped regime gamma < omega_p."""


class NonHermitianObservable(ValidationError):
    """Positivity requested for a spectral density that is not of A-Adagger type."""


class OnPole(ValidationError):
    """Real-axis Green function evaluation exactly on a spectral line."""


class ZeroFrequencyLine(LifshitzError):
    """Spectral weight sits exactly at omega = 0 where the coth kernel is singular."""


class IntegratorDivergence(LifshitzError):
    """Time integration failed step control."""


class NonlinearRegime(LifshitzError):
    """Linear-response error does not scale quadratically with the drive amplitude."""


class BranchPointError(DomainError):
    """Transverse wavevector requested exactly at a branch point."""


class DenominatorZero(DomainError):
    """Reflection amplitude evaluated at a pole of its defining ratio."""


class UnresolvedRoot(LifshitzError):
    """Bracketing grid missed a root that the argument-principle count requires."""


class UnwrapError(LifshitzError):
    """Phase changes too fast for the sampling grid even after refinement."""


class ContourTooClose(LifshitzError):
    """Winding-number quadrature could not resolve an integer."""


class NonPositiveD(LifshitzError):
    """Dispersion function non-positive on the imaginary axis (branch error)."""


class DivergentFreeEnergy(LifshitzError):
    """Oscillator free energy at omega = 0 and T > 0 is -infinity."""


class StepUnderflow(LifshitzError):
    """Numerical differentiation step hit the quadrature noise floor."""


class OscillatoryDivergence(LifshitzError):
    """Partial sums of an oscillatory series fail their tail estimate."""


class NoConvergence(LifshitzError):
    """Adaptive quadrature exhausted its evaluation budget."""


class NoSignChange(ValidationError):
    """Root bracketing endpoints do not straddle a sign change."""
