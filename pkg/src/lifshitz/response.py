"""Toy retarded Green functions G(w) = g / (w^2 eps(w)) and their pole structure.

For the plasma model the imaginary part is an exact real delta comb and the
thermal correlator spectrum is positive, so the Callen-Welton relation is
usable as-is.  For the Drude model the poles move off the real axis and a
pole with an imaginary coefficient appears at the origin, which is what the
compatibility verdict records.
"""

import math
from dataclasses import dataclass

from .dispersion import DRUDE, PLASMA, eval_permittivity
from .errors import DegenerateModel, DomainError, ModelMismatch, ValidationError
from .spectra import LineSpectrum
from .units import HBAR

REAL_AXIS_LIMIT = "RealAxisLimit"
LOWER_HALF_PLANE = "LowerHalfPlane"
ORIGIN = "Origin"


@dataclass(frozen=True)
class ToyGreenModel:
    g: float
    dispersion: object  # DispersionModel

    def __post_init__(self):
        if not self.g > 0:
            raise ValidationError("coupling g must be positive")


@dataclass(frozen=True)
class Pole:
    location: complex
    residue: complex
    kind: str
    bypass: str = ""


@dataclass(frozen=True)
class PoleCatalog:
    poles: tuple

    def locations(self):
        return tuple(p.location for p in self.poles)

    def __len__(self):
        return len(self.poles)


def _require(model, kind):
    if model.dispersion.kind != kind:
        raise ModelMismatch(
            f"operation requires the {kind} model, got {model.dispersion.kind}")


def green_plasma_lines(model):
    """Delta-comb imaginary part and pole catalog of the plasma Green function.

    Im G(w) = (pi g / 2 omega_p) [delta(w + omega_p) - delta(w - omega_p)];
    the two real-axis poles carry the retarded bypass w -> w + i0.
    """
    _require(model, PLASMA)
    g, wp = model.g, model.dispersion.omega_p
    coeff = math.pi * g / (2.0 * wp)
    im_part = LineSpectrum((-wp, wp), (coeff, -coeff))
    catalog = PoleCatalog((
        Pole(-wp, -g / (2.0 * wp), REAL_AXIS_LIMIT, bypass="omega -> omega + i0"),
        Pole(+wp, +g / (2.0 * wp), REAL_AXIS_LIMIT, bypass="omega -> omega + i0"),
    ))
    return im_part, catalog


def plasma_correlator_spectrum(model, beta):
    """Thermal correlator spectral density of the plasma Green function.

    Two strictly positive lines at -+omega_p with Bose weights; their ratio
    is the detailed-balance factor exp(-beta hbar omega_p).
    """
    _require(model, PLASMA)
    if not beta > 0:
        raise ValidationError("beta must be positive")
    g, wp = model.g, model.dispersion.omega_p
    x = beta * HBAR * wp
    pref = math.pi * g * HBAR / wp
    w_minus = pref / math.expm1(x)         # 1/(e^x - 1)
    w_plus = pref / (-math.expm1(-x))      # 1/(1 - e^-x)
    return LineSpectrum((-wp, wp), (w_minus, w_plus), positive=True)


@dataclass(frozen=True)
class DrudeDecomposition:
    resonant: complex       # the pair of shifted poles, -> plasma term as gamma -> 0
    dissipative: complex    # origin pole plus its counterweights, -> 0 as gamma -> 0
    total: complex
    catalog: PoleCatalog


def drude_pole_catalog(model):
    """Poles of the Drude Green function: two in the lower half-plane, one at 0."""
    _require(model, DRUDE)
    g = model.g
    wp, gam = model.dispersion.omega_p, model.dispersion.gamma
    if gam >= wp:
        raise DegenerateModel(
            "decomposition assumes underdamping gamma < omega_p")
    if gam == 0:
        raise ModelMismatch("gamma must be positive for the Drude catalog")
    wt = math.sqrt(wp * wp - gam * gam)
    res_plus = g * (wt + 1j * gam) / (2.0 * wt * (wt - 1j * gam))
    res_minus = g * (-wt + 1j * gam) / (2.0 * wt * (wt + 1j * gam))
    return PoleCatalog((
        Pole(complex(-wt, -gam), res_minus, LOWER_HALF_PLANE),
        Pole(complex(0.0, 0.0), -2j * gam * g / (wp * wp), ORIGIN,
             bypass="omega -> omega + i0"),
        Pole(complex(+wt, -gam), res_plus, LOWER_HALF_PLANE),
    ))


def drude_decomposition(model, omega):
    """Split the Drude Green function into its resonant and dissipative parts.

    The resonant part reduces to the plasma Green function as gamma -> 0 and
    the dissipative part (which carries the origin pole) vanishes; their sum
    is g / (w^2 eps_D(w)) identically.
    """
    catalog = drude_pole_catalog(model)
    g = model.g
    wp, gam = model.dispersion.omega_p, model.dispersion.gamma
    wt = math.sqrt(wp * wp - gam * gam)
    w = complex(omega)
    for p in catalog.poles:
        if w == p.location:
            raise DomainError(f"evaluation at pole {p.location}")
    g1 = g / (2.0 * wt) * (1.0 / (w - wt + 1j * gam) - 1.0 / (w + wt + 1j * gam))
    g2 = (-2j * gam * g / (wp * wp)) / w \
        + (1j * gam * g / (wt * (wt + 1j * gam))) / (w + wt + 1j * gam) \
        + (1j * gam * g / (wt * (wt - 1j * gam))) / (w - wt + 1j * gam)
    total = g1 + g2
    return DrudeDecomposition(g1, g2, total, catalog)


def green_direct(model, omega):
    """g / (w^2 eps(w)) evaluated straight from the permittivity."""
    w = complex(omega)
    eps = eval_permittivity(model.dispersion, w)
    den = w * w * eps
    if den == 0:
        raise DomainError("w^2 eps(w) vanishes")
    return model.g / den


COMPATIBLE = "Compatible"
INCOMPATIBLE = "Incompatible"


@dataclass(frozen=True)
class FdtCompatibilityReport:
    im_part_real_comb: bool
    positive_spectrum_constructible: bool
    verdict: str
    reasons: tuple


def fdt_compatibility_report(model, beta):
    """Can this Green function be fed to the fluctuation-dissipation relation?

    Plasma (and Drude with gamma = 0): yes -- the imaginary part is a real
    delta comb on the real axis and the correlator spectrum it generates is
    positive.  Drude with gamma > 0: no, for any gamma, however small.
    """
    if not beta > 0:
        raise ValidationError("beta must be positive")
    if not model.dispersion.dissipative:
        return FdtCompatibilityReport(
            im_part_real_comb=True,
            positive_spectrum_constructible=True,
            verdict=COMPATIBLE,
            reasons=("all poles on the real axis with retarded bypass",
                     "correlator spectrum is a positive delta comb"),
        )
    return FdtCompatibilityReport(
        im_part_real_comb=False,
        positive_spectrum_constructible=False,
        verdict=INCOMPATIBLE,
        reasons=(
            "poles at +-sqrt(omega_p^2-gamma^2) - i*gamma lie off the real "
            "axis, so the principal-value/delta splitting of 1/(x + i0) "
            "does not apply to them",
            "the origin pole has the imaginary coefficient -2i*gamma*g/omega_p^2 "
            "and contributes to the real part of the Green function, not to "
            "its imaginary part, for arbitrarily small gamma",
        ),
    )
