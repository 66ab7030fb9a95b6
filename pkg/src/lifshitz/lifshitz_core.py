"""Spectral machinery for two parallel plates separated by a vacuum gap.

The excitation spectrum at fixed transverse wavenumber k and polarization
sigma is encoded in the dispersion function

    D_sigma(w, k, a) = 1 - r_sigma(w)^2 exp(4 i a k2(w)),

whose real roots below the continuum edge are surface and waveguide modes and
whose phase along the continuum edge gives the spectral density shift.  The
plate medium fills both half-spaces (eps_2 = mu_1 = mu_2 = 1 in the gap and
magnetically trivial walls).

Branch choice: the transverse wavevectors k1, k2 are the square roots with
non-negative imaginary part.  This realization is analytic in the open upper
half-plane, takes real positive values on the upper edge of the continuum cut
and purely imaginary values (argument pi/2) below the branch points, is even
under w -> -w whenever the permittivity is, and makes |exp(4 i a k2)| <= 1
everywhere, so nothing overflows.  A generic principal square root would
break the evenness and the sign of the evanescent decay.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .dispersion import (eval_permittivity, zeta2_eps_imag_axis,
                         zeta2_eps_neg_imag_axis)
from .errors import (BranchPointError, ContourTooClose, DenominatorZero,
                     ModelMismatch, NonPositiveD, UnresolvedRoot, UnwrapError,
                     ValidationError)
from .quad_engine import differentiate_richardson, find_root_bracketed
from .units import C

TE = "TE"
TM = "TM"
POLARIZATIONS = (TE, TM)

# fixed media constants: vacuum gap, non-magnetic walls
EPS2 = 1.0
MU1 = 1.0
MU2 = 1.0

MODE_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class CavityConfig:
    """Gap half-width a (gap width 2a), wall dielectric model, polarization.

    sigma may be None for operations that sum over both polarizations.
    """

    half_gap: float
    model: object  # DispersionModel
    sigma: str = None

    def __post_init__(self):
        if not self.half_gap > 0:
            raise ValidationError("half_gap must be positive")
        if self.sigma is not None and self.sigma not in POLARIZATIONS:
            raise ValidationError(f"sigma must be one of {POLARIZATIONS}")

    def require_sigma(self):
        if self.sigma is None:
            raise ValidationError("this operation needs a definite polarization")
        return self.sigma


@dataclass(frozen=True)
class KPoint:
    """Transverse wavenumber with the two branch points it induces."""

    k: float
    omega_minus: float
    omega_plus: float

    @classmethod
    def for_omega_p(cls, k, omega_p):
        if k < 0:
            raise ValidationError("k must be non-negative")
        return cls(k=float(k), omega_minus=C * k,
                   omega_plus=math.hypot(omega_p, C * k))

    @classmethod
    def for_model(cls, k, model):
        return cls.for_omega_p(k, model.omega_p)


@dataclass
class ModeSpectrum:
    kpoint: KPoint
    sigma: str
    surface_modes: list
    waveguide_modes: list
    phase_grid: np.ndarray = field(default=None, repr=False)
    phase_curve: np.ndarray = field(default=None, repr=False)

    @property
    def modes(self):
        return list(self.surface_modes) + list(self.waveguide_modes)


def _sqrt_im_nonneg(w):
    """Square root with Im >= 0; the branch realization described above."""
    s = cmath.sqrt(w)
    return -s if s.imag < 0 else s


def transverse_wavevectors(omega, kpoint, model=None):
    """Wall and gap transverse wavevectors (k1, k2) at complex frequency.

    k1^2 = eps1(w) w^2/c^2 - k^2 (wall side; reduces to (w^2 - w_+^2)/c^2 for
    the plasma model), k2^2 = w^2/c^2 - k^2 (vacuum gap).  Real inputs are
    evaluated as upper-edge boundary values w + i0.  Raises BranchPointError
    exactly at w in {+-w_-, +-w_+}.
    """
    w = complex(omega)
    if abs(w) in (kpoint.omega_minus, kpoint.omega_plus) and w.imag == 0:
        raise BranchPointError(f"omega = {omega} is a branch point")
    w2_gap = (w * w - kpoint.omega_minus ** 2) / (C * C)
    if model is None:
        w2_wall = (w * w - kpoint.omega_plus ** 2) / (C * C)
    else:
        eps1 = eval_permittivity(model, w)
        w2_wall = (eps1 * w * w) / (C * C) - kpoint.k ** 2
    if w2_wall == 0 or w2_gap == 0:
        raise BranchPointError(f"omega = {omega} is a branch point")
    return _sqrt_im_nonneg(w2_wall), _sqrt_im_nonneg(w2_gap)


def reflection_amplitude(omega, kpoint, sigma, model=None, eps1=None):
    """Single-interface reflection amplitude r_sigma at the gap/wall boundary.

    r_TE = (mu2 k1 - mu1 k2)/(mu2 k1 + mu1 k2) and
    r_TM = (eps2 k1 - eps1 k2)/(eps2 k1 + eps1 k2), with the trivial media
    constants substituted.  Raises DenominatorZero at poles of the ratio
    (surface-plasmon poles for TM); their positions do not depend on the gap
    width, so mode bookkeeping catalogues rather than bypasses them.
    """
    if sigma not in POLARIZATIONS:
        raise ValidationError(f"sigma must be one of {POLARIZATIONS}")
    k1, k2 = transverse_wavevectors(omega, kpoint, model=model)
    if sigma == TE:
        num, den = MU2 * k1 - MU1 * k2, MU2 * k1 + MU1 * k2
    else:
        if eps1 is None:
            if model is None:
                raise ValidationError("TM amplitude needs the wall model")
            eps1 = eval_permittivity(model, complex(omega))
        num, den = EPS2 * k1 - eps1 * k2, EPS2 * k1 + eps1 * k2
    if den == 0:
        raise DenominatorZero(f"reflection amplitude pole at omega = {omega}")
    return num / den


def dispersion_function(omega, config, kpoint):
    """D_sigma(w, k, a) = 1 - r_sigma^2 exp(4 i a k2)."""
    sigma = config.require_sigma()
    r = reflection_amplitude(omega, kpoint, sigma, model=config.model)
    _, k2 = transverse_wavevectors(omega, kpoint, model=config.model)
    return 1.0 - r * r * cmath.exp(4j * config.half_gap * k2)


def mode_residual(omega, config, kpoint):
    """(|D(omega)|, noise_floor) at a candidate root.

    Evaluating D = 1 - r^2 e^{4iak2} at a root adjacent to the
    surface-plasmon pole of r_TM is ill-conditioned: the reflection
    denominator is a near-cancellation, so |D| cannot be computed below
    roughly eps * |r| however accurate omega is.  The floor returned here
    lets callers distinguish genuine bracketing failures from that
    irreducible roundoff.
    """
    sigma = config.require_sigma()
    r = reflection_amplitude(omega, kpoint, sigma, model=config.model)
    _, k2 = transverse_wavevectors(omega, kpoint, model=config.model)
    term = r * r * cmath.exp(4j * config.half_gap * k2)
    floor = 64.0 * 2.22e-16 * (1.0 + abs(r))
    return abs(1.0 - term), floor


# ------------------------------------------------------ imaginary axis

def gap_wavenumbers_imag(zeta, k, model):
    """(q1, q2) with k_j = i q_j on the imaginary axis; both real positive."""
    q2 = math.hypot(zeta, C * k) / C
    q1sq = k * k + zeta2_eps_imag_axis(model, zeta) / (C * C)
    return math.sqrt(q1sq), q2


def log_dispersion_imag(zeta, k, sigma, model, half_gap):
    """ln D_sigma(i zeta, k) as a pure float; regular down to zeta = 0.

    On the imaginary axis D is real and lies in (0, 1], so the logarithm is
    well defined and non-positive.  Raises NonPositiveD if a branch error
    ever produced D <= 0.
    """
    q1, q2 = gap_wavenumbers_imag(zeta, k, model)
    if sigma == TE:
        r = (q1 - q2) / (q1 + q2)
    else:
        # eps * zeta^2 packaged to stay regular at zeta = 0
        z2e = zeta2_eps_imag_axis(model, zeta)
        num = q1 * zeta * zeta - z2e * q2
        den = q1 * zeta * zeta + z2e * q2
        if den == 0.0:
            # zeta = 0 limit of r_TM is -1 for both models
            r = -1.0
        else:
            r = num / den
    d = 1.0 - r * r * math.exp(-4.0 * half_gap * q2)
    if d <= 0.0:
        raise NonPositiveD(f"D(i {zeta}, {k}) = {d}")
    return math.log(d)


def log_dispersion_neg_imag(zeta, k, sigma, model, half_gap):
    """(ln|D|, arg D) of the formula continued to omega = -i zeta, zeta > 0.

    Uses the same decaying-exponential convention as the +i zeta side, with
    the permittivity evaluated at -i zeta; for the plasma model the two sides
    coincide identically.  In the Drude overdamped window zeta < 2 gamma the
    wall wavevector can turn imaginary and D acquires a branch-dependent
    phase; the modulus is branch-independent, which is why callers integrate
    ln|D| and report the phase as an ambiguity diagnostic.
    """
    q2 = math.hypot(zeta, C * k) / C
    z2e = zeta2_eps_neg_imag_axis(model, zeta)
    w1 = k * k + z2e / (C * C)
    e = math.exp(-4.0 * half_gap * q2)
    if w1 >= 0.0:
        q1 = math.sqrt(w1)
        num = q1 * zeta * zeta - z2e * q2 if sigma == TM else q1 - q2
        den = q1 * zeta * zeta + z2e * q2 if sigma == TM else q1 + q2
        if den == 0.0:
            raise DenominatorZero("reflection pole on the -i zeta axis")
        r2 = (num / den) ** 2
        d = 1.0 - r2 * e
        return math.log(abs(d)), (0.0 if d > 0 else math.pi)
    q1 = 1j * math.sqrt(-w1)
    num = q1 * zeta * zeta - z2e * q2 if sigma == TM else q1 - q2
    den = q1 * zeta * zeta + z2e * q2 if sigma == TM else q1 + q2
    d = 1.0 - (num / den) ** 2 * e
    return math.log(abs(d)), cmath.phase(d)


def log_dispersion_both_imag(zeta, k, model, half_gap):
    """(ln D_TE, ln D_TM) sharing the wavevector work; hot path of the energies."""
    q1, q2 = gap_wavenumbers_imag(zeta, k, model)
    e = math.exp(-4.0 * half_gap * q2)
    rte = (q1 - q2) / (q1 + q2)
    z2e = zeta2_eps_imag_axis(model, zeta)
    den = q1 * zeta * zeta + z2e * q2
    rtm = (q1 * zeta * zeta - z2e * q2) / den if den != 0.0 else -1.0
    dte = 1.0 - rte * rte * e
    dtm = 1.0 - rtm * rtm * e
    if dte <= 0.0 or dtm <= 0.0:
        raise NonPositiveD(f"D(i {zeta}, {k}) <= 0")
    return math.log(dte), math.log(dtm)


# ----------------------------------------------------- real-axis bands

def _band_quantities(w, kpoint, model, sigma):
    """(|k1|, k2, r) in the waveguide band w_- < w < w_+ (plasma model)."""
    kk2 = math.sqrt(w * w - kpoint.omega_minus ** 2) / C
    a1 = math.sqrt(kpoint.omega_plus ** 2 - w * w) / C
    e1 = eval_permittivity(model, w).real if sigma == TM else 1.0
    r = complex(-e1 * kk2, a1) / complex(e1 * kk2, a1)
    return a1, kk2, r


def band_phase(w, kpoint, model, sigma, half_gap):
    """phi(w) = 4 a k2 + 2 arg r on the waveguide band (principal arg, not unwrapped)."""
    a1, kk2, r = _band_quantities(w, kpoint, model, sigma)
    return 4.0 * half_gap * kk2 + 2.0 * cmath.phase(r)


def band_phase_derivative(w, kpoint, model, sigma, half_gap):
    """d phi / d w on the waveguide band, analytic (no differencing)."""
    kk2 = math.sqrt(w * w - kpoint.omega_minus ** 2) / C
    a1 = math.sqrt(kpoint.omega_plus ** 2 - w * w) / C
    dkk2 = w / (C * C * kk2)
    da1 = -w / (C * C * a1)
    if sigma == TM:
        e1 = eval_permittivity(model, w).real
        de1 = 2.0 * model.omega_p ** 2 / w ** 3
        x, dx = e1 * kk2, de1 * kk2 + e1 * dkk2
    else:
        x, dx = kk2, dkk2
    norm = x * x + a1 * a1
    d_arg_num = (da1 * (-x) + dx * a1) / norm
    d_arg_den = (da1 * x - dx * a1) / norm
    return 4.0 * half_gap * dkk2 + 2.0 * (d_arg_num - d_arg_den)


def _surface_rootfn(kpoint, model, sigma, half_gap):
    """Pole-free real function on (0, w_-) whose roots are the surface modes.

    N(w) = (|k1| + eps1 |k2|)^2 - (|k1| - eps1 |k2|)^2 exp(-4 a |k2|) is D
    times the squared reflection denominator; it shares D's roots but stays
    finite through the surface-plasmon pole of r_TM.
    """
    wm, wpl = kpoint.omega_minus, kpoint.omega_plus

    def n(w):
        a1 = math.sqrt(wpl * wpl - w * w) / C
        a2 = math.sqrt(wm * wm - w * w) / C
        e1 = eval_permittivity(model, w).real if sigma == TM else 1.0
        return (a1 + e1 * a2) ** 2 - (a1 - e1 * a2) ** 2 * \
            math.exp(-4.0 * half_gap * a2)

    return n


def surface_plasmon_frequency(kpoint, model, sigma):
    """Single-interface surface-mode frequency (TM pole of r); None for TE."""
    if sigma == TE:
        return None
    wm, wpl = kpoint.omega_minus, kpoint.omega_plus

    def h(w):
        a1 = math.sqrt(wpl * wpl - w * w) / C
        a2 = math.sqrt(wm * wm - w * w) / C
        return a1 + eval_permittivity(model, w).real * a2

    lo, hi = wm * 1e-9, wm * (1.0 - 1e-12)
    if h(lo) * h(hi) > 0:
        return None
    return find_root_bracketed(h, lo, hi, tol=1e-15)


def _band_analytic_dispersion(w, kpoint, model, sigma, half_gap):
    """D continued analytically across the waveguide band (w_-, w_+).

    The Im >= 0 wavevector realization has its cut along (w_-, inf), so a
    contour straddling the band needs the factor-anchored branch instead:
    k2 = sqrt(w - w_-) sqrt(w + w_-)/c (cut only on (-inf, w_-]) and
    k1 = i sqrt(w_+ - w) sqrt(w_+ + w)/c (cut off the band).  Below the real
    axis this is the quasi-normal-mode sheet on which |exp(4 i a k2)| > 1.
    """
    wm, wpl = kpoint.omega_minus, kpoint.omega_plus
    w = complex(w)
    k2 = cmath.sqrt(w - wm) * cmath.sqrt(w + wm) / C
    k1 = 1j * cmath.sqrt(wpl - w) * cmath.sqrt(wpl + w) / C
    e1 = eval_permittivity(model, w) if sigma == TM else 1.0
    x = e1 * k2 if sigma == TM else k2
    r = (k1 - x) / (k1 + x)
    return 1.0 - r * r * cmath.exp(4j * half_gap * k2)


def _winding_closed(f, vertices, n0=64, max_depth=14):
    """Winding number of f around 0 along the closed polygon `vertices`.

    Adaptive phase tracking: each edge is sampled until adjacent phase steps
    stay below pi/2, then the increments are summed.  Exact for continuous
    nonvanishing f; raises UnwrapError if refinement is exhausted.
    """
    total = 0.0
    pts = list(vertices) + [vertices[0]]
    for z0, z1 in zip(pts[:-1], pts[1:]):
        n = n0
        for _ in range(max_depth):
            ts = np.linspace(0.0, 1.0, n + 1)
            vals = np.array([f(z0 + (z1 - z0) * t) for t in ts])
            if np.any(vals == 0):
                raise UnresolvedRoot("zero of f directly on the contour")
            args = np.angle(vals)
            steps = np.diff(args)
            steps = (steps + math.pi) % (2.0 * math.pi) - math.pi
            if np.max(np.abs(steps)) < 0.5 * math.pi:
                total += float(np.sum(steps))
                break
            n *= 2
        else:
            raise UnwrapError("phase varies too fast along the contour edge")
    return total / (2.0 * math.pi)


def find_modes(config, kpoint, grid_points=600, check_counts=True):
    """Locate all real modes of D_sigma at fixed (sigma, k) for the plasma model.

    Surface modes on (0, w_-) come from sign changes of the pole-free form of
    D; waveguide modes on (w_-, w_+) from the unwrapped phase phi crossing
    multiples of 2 pi.  Every root is polished to |D| < 1e-9 and the counts
    are cross-checked against the argument principle on thin rectangles
    hugging each band (UnresolvedRoot on mismatch).
    """
    if config.model.dissipative:
        raise ModelMismatch("real mode spectra exist only without dissipation")
    if not kpoint.k > 0:
        raise ValidationError("mode finding needs k > 0")
    sigma = config.require_sigma()
    model, a = config.model, config.half_gap
    wm, wpl = kpoint.omega_minus, kpoint.omega_plus

    # --- surface band
    nfun = _surface_rootfn(kpoint, model, sigma, a)
    surface = []
    wsp = surface_plasmon_frequency(kpoint, model, sigma)
    if wsp is not None:
        # N is strictly negative at the single-interface root, so the two
        # coupled modes (when present) straddle it; bisect each side.  This
        # resolves the exponentially close pair at large k a that any
        # uniform grid would step over.
        lo = wm * 1e-9
        if nfun(lo) > 0:
            surface.append(find_root_bracketed(nfun, lo, wsp, tol=1e-15))
        hi = wm * (1.0 - 1e-12)
        if nfun(hi) > 0:
            surface.append(find_root_bracketed(nfun, wsp, hi, tol=1e-15))
        else:
            # scan for a possible positive excursion between wsp and the edge
            tail = np.linspace(wsp, hi, grid_points)
            vals = [nfun(w) for w in tail]
            for i in range(len(tail) - 1):
                if vals[i] * vals[i + 1] < 0:
                    surface.append(find_root_bracketed(
                        nfun, float(tail[i]), float(tail[i + 1]), tol=1e-15))
    else:
        grid = np.linspace(wm * 1e-6, wm * (1.0 - 1e-9), grid_points)
        vals = [nfun(w) for w in grid]
        for i in range(len(grid) - 1):
            if vals[i] == 0.0:
                surface.append(float(grid[i]))
            elif vals[i] * vals[i + 1] < 0:
                surface.append(find_root_bracketed(nfun, grid[i], grid[i + 1],
                                                   tol=1e-15))
    surface = sorted(surface)

    # --- waveguide band: unwrap phi with a pi/2 jump guard; the initial
    # grid count resolves the dominant 4 a k2 rate by construction
    n_min = int(4.0 * a * (model.omega_p / C) / (0.4 * math.pi)) + 2
    n = max(grid_points, 200, n_min)
    lo, hi = wm * (1.0 + 1e-9), wpl * (1.0 - 1e-9)
    for _ in range(12):
        ws = np.linspace(lo, hi, n)
        raw = np.array([band_phase(w, kpoint, model, sigma, a) for w in ws])
        phi = np.unwrap(raw)
        if np.max(np.abs(np.diff(phi))) < 0.5 * math.pi:
            break
        n *= 2
    else:
        raise UnwrapError("waveguide phase grid refinement exhausted")
    waveguide = []
    n_lo = math.floor(phi.min() / (2.0 * math.pi))
    n_hi = math.ceil(phi.max() / (2.0 * math.pi))
    for m in range(n_lo, n_hi + 1):
        target = 2.0 * math.pi * m
        crossings = np.where(np.diff(np.sign(phi - target)) != 0)[0]
        for i in crossings:
            base = phi[i]

            def g(w, base=base, target=target):
                p = band_phase(w, kpoint, model, sigma, a)
                p += 2.0 * math.pi * round((base - p) / (2.0 * math.pi))
                return p - target

            root = find_root_bracketed(g, float(ws[i]), float(ws[i + 1]),
                                       tol=1e-15)
            if wm * (1 + 1e-7) < root < wpl * (1 - 1e-7):
                waveguide.append(root)
    waveguide = sorted(waveguide)

    # --- polish check (|D| with the near-pole roundoff floor; see mode_residual)
    for w in surface + waveguide:
        res, floor = mode_residual(w, config, kpoint)
        if res > max(MODE_RESIDUAL_TOL, floor):
            raise UnresolvedRoot(f"residual {res:.2e} at omega = {w}")

    # --- argument-principle cross-check on thin rectangles
    if check_counts:
        eta = 1e-3 * wpl

        def nfun_c(w):
            # pole-free analytic continuation of the surface-band root form;
            # the Im >= 0 wavevectors are continuous across (0, w_-)
            k1, k2 = transverse_wavevectors(w, kpoint, model=model)
            e1 = eval_permittivity(model, w) if sigma == TM else 1.0
            return (k1 + e1 * k2) ** 2 - (k1 - e1 * k2) ** 2 * \
                cmath.exp(4j * a * k2)

        def dfun_band(w):
            return _band_analytic_dispersion(w, kpoint, model, sigma, a)

        rect_sm = [complex(wm * 1e-4, -eta), complex(wm * (1 - 1e-6), -eta),
                   complex(wm * (1 - 1e-6), eta), complex(wm * 1e-4, eta)]
        w_sm = round(_winding_closed(nfun_c, rect_sm))
        rect_wg = [complex(wm * (1 + 1e-6), -eta), complex(wpl * (1 - 1e-6), -eta),
                   complex(wpl * (1 - 1e-6), eta), complex(wm * (1 + 1e-6), eta)]
        w_wg = round(_winding_closed(dfun_band, rect_wg))
        if w_sm != len(surface) or w_wg != len(waveguide):
            raise UnresolvedRoot(
                f"bracketing found {len(surface)}+{len(waveguide)} roots, "
                f"argument principle counts {w_sm}+{w_wg}")

    return ModeSpectrum(kpoint=kpoint, sigma=sigma, surface_modes=surface,
                        waveguide_modes=waveguide)


# ------------------------------------------------ continuum diagnostics

def continuum_log_derivative(w, config, kpoint):
    """D'/D on the upper edge of the continuum cut (w > w_+), analytic."""
    sigma = config.require_sigma()
    model, a = config.model, config.half_gap
    wm, wpl = kpoint.omega_minus, kpoint.omega_plus
    kk1 = math.sqrt(w * w - wpl * wpl) / C
    kk2 = math.sqrt(w * w - wm * wm) / C
    dk1 = w / (C * C * kk1)
    dk2 = w / (C * C * kk2)
    if sigma == TM:
        e1 = eval_permittivity(model, w).real
        de1 = 2.0 * model.omega_p ** 2 / w ** 3
        x, dx = e1 * kk2, de1 * kk2 + e1 * dk2
    else:
        x, dx = kk2, dk2
    r = (kk1 - x) / (kk1 + x)
    rp = ((dk1 - dx) * (kk1 + x) - (kk1 - x) * (dk1 + dx)) / (kk1 + x) ** 2
    e = cmath.exp(4j * a * kk2)
    d = 1.0 - r * r * e
    dp = -(2.0 * r * rp + 4j * a * dk2 * r * r) * e
    return dp / d


def spectral_density_shift(config, kpoint, omega):
    """Change of the continuum mode density, (1/pi) d delta / d omega.

    delta(w) = -arg D(w + i0) on the continuum edge; the derivative is taken
    by Richardson differentiation of D and equals -Im(D'/D)/pi, which is the
    same as the boundary-value form (1/2 pi i) d/dw ln(Dbar/D) because Dbar
    is the complex conjugate of D there.
    """
    if omega <= kpoint.omega_plus:
        raise ValidationError("spectral density shift lives on (w_+, inf)")

    def dfun(w):
        return dispersion_function(w, config, kpoint)

    d = dfun(omega)
    # stay inside the continuum and below a quarter of the 4 a k2 period
    k2 = math.sqrt(omega ** 2 - kpoint.omega_minus ** 2) / C
    quarter_period = math.pi * C * C * k2 / (8.0 * config.half_gap * omega)
    h0 = min(0.05 * (omega - kpoint.omega_plus), quarter_period)
    dp, _ = differentiate_richardson(dfun, omega, h0=h0)
    return float(-(complex(dp) / d).imag / math.pi)


def sample_phase_curve(config, kpoint, omega_hi, n0=256, max_depth=12,
                       n_cap=1 << 21):
    """Unwrapped continuum phase delta(w) sampled on (w_+, omega_hi).

    The dominant oscillation rate is the 4 a k2 factor, so samples are
    placed uniformly in k2 with a step below pi/2 of that phase -- a
    deterministic anti-aliasing bound that a uniform omega grid lacks near
    the band edge.  The slower reflection phase is covered by the pi/2 jump
    guard with grid-doubling refinement; UnwrapError when the budget or the
    sample cap is exhausted.
    """
    lo = kpoint.omega_plus * (1.0 + 1e-9)
    if omega_hi <= lo:
        raise ValidationError("omega_hi must exceed the continuum edge")

    def k2_of(w):
        return math.sqrt(w * w - kpoint.omega_minus ** 2) / C

    span_k2 = k2_of(omega_hi) - k2_of(lo)
    n_min = int(4.0 * config.half_gap * span_k2 / (0.4 * math.pi)) + 2
    n = max(n0, n_min)
    if n > n_cap:
        raise UnwrapError(
            f"{n} samples needed to resolve the phase; cap is {n_cap}")
    k2lo = k2_of(lo)
    for _ in range(max_depth):
        ks = np.linspace(k2lo, k2lo + span_k2, n)
        ws = np.sqrt((C * ks) ** 2 + kpoint.omega_minus ** 2)
        args = np.array([-cmath.phase(dispersion_function(w, config, kpoint))
                         for w in ws])
        delta = np.unwrap(args)
        if np.max(np.abs(np.diff(delta))) < 0.5 * math.pi:
            return ws, delta - delta[0]
        n *= 2
        if n > n_cap:
            break
    raise UnwrapError("phase grid too coarse for the requested span")


def uhp_winding_number(config, kpoint, rectangle):
    """Zeros-minus-poles count of D_sigma inside an upper-half-plane rectangle.

    rectangle = (re_lo, re_hi, im_lo, im_hi), im_lo > 0 so the contour stays
    clear of the real-axis cuts; reflection-amplitude poles sit on the real
    axis and are excluded by construction.  Returns (winding, quality) where
    quality is the distance of the raw phase sum from an integer; raises
    ContourTooClose above 0.2.
    """
    re_lo, re_hi, im_lo, im_hi = rectangle
    if not (im_lo > 0 and im_hi > im_lo and re_hi > re_lo):
        raise ValidationError("rectangle must lie in the open upper half-plane")
    verts = [complex(re_lo, im_lo), complex(re_hi, im_lo),
             complex(re_hi, im_hi), complex(re_lo, im_hi)]

    def dfun(w):
        return dispersion_function(w, config, kpoint)

    raw = _winding_closed(dfun, verts)
    winding = round(raw)
    quality = abs(raw - winding)
    if quality > 0.2:
        raise ContourTooClose(f"winding {raw} too far from an integer")
    return winding, quality
