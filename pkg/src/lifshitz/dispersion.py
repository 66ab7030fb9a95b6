"""Plasma and Drude dielectric permittivities on the complex frequency plane.

The plasma model eps(w) = 1 - omega_p^2 / w^2 is real for real and for purely
imaginary frequencies; the Drude model eps(w) = 1 - omega_p^2 / (w (w + 2i*gamma))
stores the dissipation parameter as gamma and applies the factor 2 in the
evaluator, so that gamma -> 0 reduces exactly to the plasma formula.
"""

from dataclasses import dataclass

from .errors import DomainError, ValidationError

PLASMA = "plasma"
DRUDE = "drude"


@dataclass(frozen=True)
class DispersionModel:
    """Dielectric model parameters.

    kind is "plasma" or "drude"; omega_p > 0 is the plasma frequency in the
    chosen frequency unit; gamma >= 0 is the dissipation parameter (ignored
    and stored as 0 for the plasma model).
    """

    kind: str
    omega_p: float
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in (PLASMA, DRUDE):
            raise ValidationError(f"unknown model kind {self.kind!r}")
        if not self.omega_p > 0:
            raise ValidationError("omega_p must be positive")
        if self.gamma < 0:
            raise ValidationError("gamma must be non-negative")
        if self.kind == PLASMA and self.gamma != 0.0:
            object.__setattr__(self, "gamma", 0.0)

    @property
    def dissipative(self):
        return self.kind == DRUDE and self.gamma > 0


def eval_permittivity(model, omega):
    """Permittivity at a (complex) frequency.

    Raises DomainError exactly at the poles of the formulas: omega = 0 for
    both models and omega = -2i*gamma for the Drude model.
    """
    w = complex(omega)
    if w == 0:
        raise DomainError("permittivity formula has a pole at omega = 0")
    if model.kind == PLASMA:
        return 1.0 - model.omega_p ** 2 / (w * w)
    if w == complex(0.0, -2.0 * model.gamma):
        raise DomainError("Drude permittivity has a pole at omega = -2i*gamma")
    return 1.0 - model.omega_p ** 2 / (w * (w + 2j * model.gamma))


def zeta2_eps_imag_axis(model, zeta):
    """zeta^2 * eps(i*zeta) as a real number, regular down to zeta = 0.

    For the plasma model this is zeta^2 + omega_p^2; for Drude it is
    zeta^2 + omega_p^2 * zeta / (zeta + 2*gamma).  The combination is what
    the transverse wavevectors need, and writing it this way avoids the
    0/0 of eps itself at the origin.
    """
    if zeta < 0:
        raise DomainError("zeta must be non-negative on the imaginary axis")
    if model.kind == PLASMA or model.gamma == 0.0:
        return zeta * zeta + model.omega_p ** 2
    return zeta * zeta + model.omega_p ** 2 * zeta / (zeta + 2.0 * model.gamma)


def zeta2_eps_neg_imag_axis(model, zeta):
    """zeta^2 * eps(-i*zeta) for zeta > 0; real, but not positive-definite.

    Probes the omega -> -omega asymmetry of the model: for the plasma model
    it coincides with the +i*zeta value, for Drude it does not.
    """
    if zeta <= 0:
        raise DomainError("zeta must be positive")
    if model.kind == PLASMA or model.gamma == 0.0:
        return zeta * zeta + model.omega_p ** 2
    if zeta == 2.0 * model.gamma:
        raise DomainError("eps(-i*zeta) has a pole at zeta = 2*gamma")
    return zeta * zeta + model.omega_p ** 2 * zeta / (zeta - 2.0 * model.gamma)


@dataclass(frozen=True)
class SymmetryReport:
    even_in_omega: bool
    real_on_imaginary_axis: bool
    max_violation: float
    tolerance: float
    even_violation: float = 0.0
    imag_axis_violation: float = 0.0


def symmetry_report(model, probe_frequencies, tol=1e-12):
    """Check eps(omega) = eps(-omega) and Im eps(i*zeta) = 0 over probes.

    Probes must avoid the formula poles.  Imaginary-axis realness is tested
    at zeta = |probe| for every probe.  Violations are reported relative to
    max |eps| over the probe set.
    """
    probes = [complex(p) for p in probe_frequencies]
    if not probes:
        raise ValidationError("probe list must be non-empty")
    even_v = 0.0
    axis_v = 0.0
    scale = 0.0
    for w in probes:
        e1 = eval_permittivity(model, w)
        e2 = eval_permittivity(model, -w)
        even_v = max(even_v, abs(e1 - e2))
        scale = max(scale, abs(e1))
        zeta = abs(w)
        ez = eval_permittivity(model, 1j * zeta)
        axis_v = max(axis_v, abs(ez.imag))
    scale = max(scale, 1.0)
    return SymmetryReport(
        even_in_omega=even_v < tol * scale,
        real_on_imaginary_axis=axis_v < tol * scale,
        max_violation=max(even_v, axis_v),
        tolerance=tol,
        even_violation=even_v,
        imag_axis_violation=axis_v,
    )
