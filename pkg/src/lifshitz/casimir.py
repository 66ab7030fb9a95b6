"""Casimir energy and free energy of the plate pair, three independent ways.

Routes:
  * imaginary axis:  E = (hbar/2pi) sum_sigma int k dk/2pi int_0^inf dzeta ln D(i zeta, k)
  * real axis, per (sigma, k):  half the mode sum plus the phase-weighted
    continuum, which the contour-rotation argument equates to the
    imaginary-axis integral;
  * Matsubara sum:   F = k_B T sum_sigma int k dk/2pi sum'_m ln D(i zeta_m, k)
    with the m = 0 term halved.

Energies are per unit plate area in units of hbar omega_p^3/c^2.  The module
also evaluates the extra pure-imaginary free-energy term that appears when
the Drude permittivity breaks the omega -> -omega symmetry of D.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .dispersion import zeta2_eps_neg_imag_axis
from .errors import (DivergentFreeEnergy, NoConvergence,
                     OscillatoryDivergence, StepUnderflow, ValidationError)
from .lifshitz_core import (TE, TM, CavityConfig, band_phase_derivative,
                            continuum_log_derivative, find_modes,
                            log_dispersion_imag, log_dispersion_neg_imag,
                            surface_plasmon_frequency)
from .quad_engine import (accelerated_alternating_sum,
                          differentiate_richardson, integrate_adaptive,
                          integrate_semi_infinite)
from .units import C, HBAR, K_B

ROUTE_MODE_SUM = "ModeSumRealAxis"
ROUTE_IMAGINARY_AXIS = "ImaginaryAxis"
ROUTE_MATSUBARA = "Matsubara"


@dataclass(frozen=True)
class EnergyResult:
    value: float
    route: str
    truncation_report: dict


@dataclass(frozen=True)
class MatsubaraGrid:
    """Matsubara frequencies zeta_m = 2 pi m k_B T / hbar, m = 0..m_max.

    The m = 0 term enters every sum with weight 1/2.  m_max = None lets the
    summation pick its own truncation from the requested tolerance.
    """

    temperature: float
    m_max: int = None

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValidationError("temperature must be positive")

    def zeta(self, m):
        return 2.0 * math.pi * m * K_B * self.temperature / HBAR


def _sigmas(config):
    return (config.sigma,) if config.sigma is not None else (TE, TM)


def _k_integral_of_logdisp(zeta, config, sigma, tol, abs_floor=0.0):
    """int_0^inf k dk ln D_sigma(i zeta, k), with its error estimate.

    The integrand is single-signed, so the tolerance is relative with
    abs_floor as the allowance for exponentially small tail values (the
    zeta -> inf members of an outer quadrature are denormal-scale and can
    never satisfy a purely relative criterion).
    """
    a = config.half_gap

    def f(k):
        return k * log_dispersion_imag(zeta, k, sigma, config.model, a)

    res = integrate_semi_infinite(f, 0.0, 1.0 / (4.0 * a), tol=tol,
                                  abs_tol=abs_floor)
    return res.value, res.error_estimate


def energy_imaginary_axis(config, tol=1e-9):
    """Zero-temperature interaction energy from the rotated-contour integral.

    E = (hbar/2pi) sum_sigma int_0^inf (k dk / 2pi) int_0^inf dzeta
    ln D_sigma(i zeta, k); D lies in (0, 1] on the axis, so the result is
    negative (attraction).
    """
    a = config.half_gap
    report = {"tolerance": tol}
    total = 0.0
    err = 0.0
    for sigma in _sigmas(config):
        # anchor the tail allowance to the peak of the outer integrand;
        # probe an interior zeta too (the Drude TE term vanishes at zero)
        peak = max(abs(_k_integral_of_logdisp(z, config, sigma, tol)[0])
                   for z in (0.0, C / (4.0 * a), config.model.omega_p))
        floor = 0.01 * tol * peak
        inner_err = [0.0]

        def f(zeta, sigma=sigma, inner_err=inner_err, floor=floor):
            v, e = _k_integral_of_logdisp(zeta, config, sigma, tol * 0.1,
                                          abs_floor=floor)
            inner_err[0] = max(inner_err[0], e)
            return v

        res = integrate_semi_infinite(f, 0.0, C / (4.0 * a), tol=tol,
                                      abs_tol=0.0)
        total += res.value
        err += res.error_estimate + inner_err[0]
        report[f"zeta_quadrature_error_{sigma}"] = res.error_estimate
        report[f"k_quadrature_error_max_{sigma}"] = inner_err[0]
    value = HBAR / (2.0 * math.pi) ** 2 * total
    report["combined_estimate"] = err / (2.0 * math.pi) ** 2
    return EnergyResult(value=value, route=ROUTE_IMAGINARY_AXIS,
                        truncation_report=report)


# ------------------------------------------------- real-axis route per k

def _sqrt_endpoint_quad(f, lo, hi, singular_at, tol=1e-10):
    """Integrate f on [lo, hi] with a 1/sqrt singularity at one endpoint.

    Substituting t = sqrt(w - lo) (or sqrt(hi - w)) makes the integrand
    regular, keeping QUADPACK budgets small next to band edges.
    """
    span = hi - lo
    if singular_at == "lo":
        def g(t):
            return 2.0 * t * f(lo + t * t)
    else:
        def g(t):
            return 2.0 * t * f(hi - t * t)
    return integrate_adaptive(g, 0.0, math.sqrt(span), tol=tol)


@dataclass(frozen=True)
class RouteComparison:
    mode_sum_part: float
    continuum_part: float
    imaginary_axis_part: float
    mismatch: float
    bound: float
    details: dict = field(default=None, repr=False)

    @property
    def passed(self):
        return self.mismatch <= self.bound


def energy_real_axis_per_k(config, kpoint, omega_cut=None, tol=1e-9,
                           accel_panels=12):
    """Spectral sum at fixed (sigma, k) against the imaginary-axis integral.

    The real-axis bracket is assembled by the argument principle along the
    upper edge of the real axis:

      * each discrete mode contributes its frequency (a pi phase jump),
      * the TM reflection pole contributes -2 omega_sp -- exactly the
        gap -> infinity limit of the surface-mode pair, which is how the
        large-gap reference enters the discrete part,
      * the branch point at omega_- carries a half jump, +omega_-/2,
      * the waveguide band adds its smooth phase drift (the built-in bulk
        subtraction) and the continuum its oscillatory phase integral,
        Euler-accelerated beyond omega_cut.

    Half of that total must equal (1/2pi) int_0^inf ln D(i zeta) d zeta
    within truncation bounds; the report carries both sides, the mismatch
    and the bound.
    """
    sigma = config.require_sigma()
    model, a = config.model, config.half_gap
    wm, wpl = kpoint.omega_minus, kpoint.omega_plus
    details = {}

    # discrete spectrum and the pole reference
    spectrum = find_modes(config, kpoint)
    mode_sum = sum(spectrum.modes)
    wsp = surface_plasmon_frequency(kpoint, model, sigma)
    pole_term = -2.0 * wsp if wsp is not None else 0.0
    details["modes"] = spectrum.modes
    details["surface_plasmon"] = wsp

    # smooth waveguide phase: -(1/2pi) int w phi'(w) dw, endpoint-regularized
    def wg_integrand(w):
        return w * band_phase_derivative(w, kpoint, model, sigma, a)

    mid = math.sqrt(0.5 * (wm * wm + wpl * wpl))
    left = _sqrt_endpoint_quad(wg_integrand, wm, mid, "lo", tol=tol)
    right = _sqrt_endpoint_quad(wg_integrand, mid, wpl, "hi", tol=tol)
    s_wg = -(left.value + right.value) / (2.0 * math.pi)
    err_wg = (left.error_estimate + right.error_estimate) / (2.0 * math.pi)

    # continuum phase integral, panelled at the zeros of the 4 a k2 phase
    def cont_integrand(w):
        return w * (-(continuum_log_derivative(w, config, kpoint)).imag) / math.pi

    omega_cut = omega_cut or max(4.0 * wpl, wpl + 8.0 * math.pi * C / (4.0 * a))
    boundaries = []
    n = 1
    while True:
        w_n = math.hypot(n * math.pi * C / (4.0 * a), wm)
        if w_n > wpl * (1.0 + 1e-9):
            boundaries.append(w_n)
            if w_n > omega_cut and len(boundaries) > accel_panels + 2:
                break
        n += 1
        if n > 500000:
            raise NoConvergence("panel generation ran away")
    n_head = len(boundaries) - accel_panels - 1
    first = _sqrt_endpoint_quad(cont_integrand, wpl, boundaries[0], "lo", tol=tol)
    s_cont = first.value
    err_cont = first.error_estimate
    for lo, hi in zip(boundaries[:n_head - 1], boundaries[1:n_head]):
        r = integrate_adaptive(cont_integrand, lo, hi, tol=tol)
        s_cont += r.value
        err_cont += r.error_estimate
    panels = []
    for lo, hi in zip(boundaries[n_head - 1:-1], boundaries[n_head:]):
        r = integrate_adaptive(cont_integrand, lo, hi, tol=tol)
        panels.append(r.value)
        err_cont += r.error_estimate
    tail_value, tail_spread = accelerated_alternating_sum(panels)
    s_cont += tail_value
    details["continuum_tail_spread"] = tail_spread

    bracket = mode_sum + pole_term + 0.5 * wm + s_wg + s_cont
    mode_sum_part = 0.5 * (mode_sum + pole_term + 0.5 * wm + s_wg)
    continuum_part = 0.5 * s_cont

    # imaginary-axis side with matched tail handling; the absolute floor is
    # the roundoff of accumulating O(1) log values in the quadrature
    def f_imag(zeta):
        return log_dispersion_imag(zeta, kpoint.k, sigma, model, a)

    res = integrate_semi_infinite(f_imag, 0.0, C / (4.0 * a), tol=tol,
                                  abs_tol=1e-15)
    imag_part = res.value / (2.0 * math.pi)

    mismatch = abs(0.5 * bracket - imag_part)
    bound = max(1e-3 * abs(imag_part),
                0.5 * (err_wg + err_cont + tail_spread)
                + res.error_estimate / (2.0 * math.pi))
    details["quadrature_errors"] = {"waveguide": err_wg, "continuum": err_cont,
                                    "imag_axis": res.error_estimate}
    return RouteComparison(mode_sum_part=mode_sum_part,
                           continuum_part=continuum_part,
                           imaginary_axis_part=imag_part,
                           mismatch=mismatch, bound=bound, details=details)


# ------------------------------------------------------- thermal route

def oscillator_free_energy(omega, temperature):
    """Free energy of one quantum oscillator: hbar w/2 + k_B T ln(1 - e^{-hbar w/k_B T})."""
    if omega < 0:
        raise ValidationError("omega must be non-negative")
    if temperature == 0:
        return 0.5 * HBAR * omega
    if temperature < 0:
        raise ValidationError("temperature must be non-negative")
    if omega == 0:
        raise DivergentFreeEnergy("free energy diverges to -inf at omega = 0, T > 0")
    x = HBAR * omega / (K_B * temperature)
    return 0.5 * HBAR * omega + K_B * temperature * math.log(-math.expm1(-x))


def oscillator_free_energy_series(omega, temperature, terms=50):
    """Series form hbar w/2 - k_B T sum_m e^{-m hbar w/k_B T}/m, truncated."""
    if not temperature > 0:
        raise ValidationError("series form needs T > 0")
    x = HBAR * omega / (K_B * temperature)
    s = sum(math.exp(-m * x) / m for m in range(1, terms + 1))
    return 0.5 * HBAR * omega - K_B * temperature * s


def free_energy_matsubara(config, grid, tol=1e-9, max_terms=200000):
    """Finite-temperature free energy as a primed Matsubara sum.

    The m = 0 term is the zeta -> 0+ limit, taken by step-halving
    extrapolation at zeta ~ 1e-8 omega_p rather than by an assumed value
    (the Drude TE term genuinely vanishes in that limit, the plasma one does
    not).  Terms are added until a geometric tail bound drops below tol.
    """
    a = config.half_gap
    t = grid.temperature
    scale = max(abs(_k_integral_of_logdisp(z, config, s, tol)[0])
                for s in _sigmas(config)
                for z in (0.0, C / (4.0 * a), config.model.omega_p))
    floor = 0.01 * tol * scale

    def term(zeta):
        total = 0.0
        for sigma in _sigmas(config):
            v, _ = _k_integral_of_logdisp(zeta, config, sigma, tol * 0.1,
                                          abs_floor=floor)
            total += v
        return total / (2.0 * math.pi)

    h = 1e-8 * config.model.omega_p
    i0 = 2.0 * term(0.5 * h) - term(h)   # first-order step-halving limit
    total = 0.5 * i0
    report = {"tolerance": tol, "m0_term": 0.5 * K_B * t * i0}
    m = 1
    prev = None
    last = 0.0
    m_cap = grid.m_max if grid.m_max is not None else max_terms
    tail = math.inf
    while m <= m_cap:
        i_m = term(grid.zeta(m))
        total += i_m
        last = abs(i_m)
        if last <= max(floor, 1e-300):
            tail = last
            break
        if prev is not None and abs(prev) > 0:
            ratio = min(last / abs(prev), 0.95)
            tail = last * ratio / (1.0 - ratio)
            if tail < tol * max(abs(total), 1e-30):
                break
        prev = i_m
        m += 1
    else:
        if grid.m_max is None:
            raise NoConvergence("Matsubara sum did not meet its tail bound")
    report["terms_used"] = min(m, m_cap)
    report["tail_bound"] = tail if tail is not math.inf else last
    return EnergyResult(value=K_B * t * total, route=ROUTE_MATSUBARA,
                        truncation_report=report)


def casimir_pressure(config, thermal=None, tol=1e-8, rel_step=0.03):
    """-dE/d(2a) (or -dF/d(2a)): negative values mean attraction.

    Central Richardson differentiation of the gap-width dependence; if the
    step hits the quadrature noise floor the step is widened once and then
    StepUnderflow is raised.
    """
    gap = 2.0 * config.half_gap

    def energy_of_gap(width):
        c = CavityConfig(half_gap=0.5 * width, model=config.model,
                         sigma=config.sigma)
        if thermal is None:
            return energy_imaginary_axis(c, tol=tol).value
        return free_energy_matsubara(c, thermal, tol=tol).value

    for step in (rel_step * gap, 4.0 * rel_step * gap):
        deriv, err = differentiate_richardson(energy_of_gap, gap, h0=step)
        value = -float(np.real(deriv))
        if err <= max(1e-3 * abs(value), 10.0 * tol):
            return value
    raise StepUnderflow(
        f"derivative error estimate {err:.2e} stuck at the noise floor")


def classic_lifshitz_integrand(config, m, p, grid):
    """The Matsubara k-integrand rewritten in the classic p variable.

    With k^2 = (zeta_m^2/c^2)(p^2 - 1) and k dk = (zeta_m^2/c^2) p dp the
    term int_0^inf (k dk/2pi) ln D becomes int_1^inf dp of this function;
    the p > 1 ray maps one-to-one onto k > 0.
    """
    if m < 1:
        raise ValidationError("the p form applies to m >= 1")
    if not p > 1.0:
        raise ValidationError("p must exceed 1")
    zeta = grid.zeta(m)
    k = zeta * math.sqrt(p * p - 1.0) / C
    total = 0.0
    for sigma in _sigmas(config):
        total += log_dispersion_imag(zeta, k, sigma, config.model,
                                     config.half_gap)
    return (zeta * zeta / (C * C)) * p / (2.0 * math.pi) * total


# ------------------------------------------------------- Drude anomaly

@dataclass(frozen=True)
class AnomalyResult:
    value: complex
    per_m: tuple
    tail_estimate: float
    branch_ambiguity: float
    noise_floor: float
    converged: bool


def _anomaly_profile(config, tol):
    """A(zeta) = sum_sigma int k dk/(2pi)^2 [ln D(i zeta) - ln|D(-i zeta)|].

    Returns cubic splines of A on (0, 2 gamma) and (2 gamma, zeta_max) (the
    permittivity has a pole at zeta = 2 gamma on the -i side, so A has a kink
    there) plus the largest |arg D(-i zeta, k)| met, which measures how much
    the overdamped-window branch ambiguity could move the dropped imaginary
    part.
    """
    model, a = config.model, config.half_gap
    gam = model.gamma
    ambig = [0.0]

    def profile(zeta):
        # the wall wavevector at -i zeta changes character at
        # k_kink = sqrt(-zeta^2 eps(-i zeta))/c inside the overdamped window;
        # splitting there keeps the quadrature clean
        z2e = zeta2_eps_neg_imag_axis(model, zeta) if gam > 0 else 1.0
        kink = math.sqrt(-z2e) / C if z2e < 0 else None
        total = 0.0
        for sigma in _sigmas(config):
            def f(k, sigma=sigma):
                lp = log_dispersion_imag(zeta, k, sigma, model, a)
                lm, arg = log_dispersion_neg_imag(zeta, k, sigma, model, a)
                ambig[0] = max(ambig[0], abs(arg))
                return k * (lp - lm)

            if kink is not None:
                total += integrate_adaptive(f, 0.0, kink, tol=tol).value
                total += integrate_semi_infinite(f, kink, 1.0 / (4.0 * a),
                                                 tol=tol).value
            else:
                total += integrate_semi_infinite(f, 0.0, 1.0 / (4.0 * a),
                                                 tol=tol).value
        return total / (2.0 * math.pi) ** 2

    omega_p = model.omega_p
    zeta_max = max(6.0 * omega_p, 12.0 * C / (4.0 * a))
    splines = []
    segments = []
    if gam > 0 and 2.0 * gam < zeta_max:
        segments.append((1e-9 * omega_p, 2.0 * gam * (1.0 - 1e-9), 160))
        segments.append((2.0 * gam * (1.0 + 1e-9), zeta_max, 420))
    else:
        segments.append((1e-9 * omega_p, zeta_max, 480))
    for lo, hi, n in segments:
        zs = np.linspace(lo, hi, n)
        vals = np.array([profile(z) for z in zs])
        splines.append(CubicSpline(zs, vals))
    return splines, segments, ambig[0]


def drude_anomaly(config, temperature, m_max=20, tol=1e-8):
    """The extra pure-imaginary free-energy term of the Drude dispersion function.

    Delta F = -i hbar sum_sigma int k dk/(2pi)^2 int_0^inf dzeta
    sum_m sin(m hbar zeta / k_B T) ln[D(i zeta)/D(-i zeta)].

    The log-ratio is evaluated through its modulus, the branch-independent
    part of the logarithm: on the +i axis D is real positive for both
    models, and on the -i axis the modulus is insensitive to the branch of
    the wall wavevector that becomes ambiguous in the overdamped window
    zeta < 2 gamma.  The phase that a particular branch choice would add is
    reported as branch_ambiguity.  The result vanishes identically whenever
    the permittivity is even in omega (plasma, or Drude with gamma = 0), and
    the m sum is returned as a partial sum with an oscillatory tail estimate.
    """
    if not temperature > 0:
        raise ValidationError("temperature must be positive")
    if m_max < 1:
        raise ValidationError("m_max must be at least 1")
    model = config.model
    if not model.dissipative:
        return AnomalyResult(value=0.0 + 0.0j, per_m=(0.0,) * m_max,
                             tail_estimate=0.0, branch_ambiguity=0.0,
                             noise_floor=0.0, converged=True)
    splines, segments, ambiguity = _anomaly_profile(config, tol)

    beta_h = HBAR / (K_B * temperature)
    per_m = []
    noise = 0.0
    for m in range(1, m_max + 1):
        freq = m * beta_h
        c_m = 0.0
        for spline, (lo, hi, _) in zip(splines, segments):
            period = math.pi / freq
            edges = list(np.arange(lo, hi, period)) + [hi]
            for p_lo, p_hi in zip(edges[:-1], edges[1:]):
                r = integrate_adaptive(
                    lambda z: math.sin(freq * z) * float(spline(z)),
                    p_lo, p_hi, tol=tol)
                c_m += r.value
                noise = max(noise, r.error_estimate)
        per_m.append(c_m)
    partial = sum(per_m)
    # oscillatory tail: partial sums of sum_m c_m wobble by about |c_M|
    tail = abs(per_m[-1])
    recent = [abs(c) for c in per_m[-5:]]
    older = [abs(c) for c in per_m[:5]]
    converged = len(per_m) < 10 or (max(recent) <= max(older) + 10 * noise)
    if not converged and tail > 10.0 * max(abs(partial), noise):
        raise OscillatoryDivergence(
            f"partial sums fail the tail estimate: last term {tail:.3e}")
    return AnomalyResult(value=-1j * HBAR * partial, per_m=tuple(per_m),
                         tail_estimate=HBAR * tail,
                         branch_ambiguity=ambiguity, noise_floor=noise,
                         converged=converged)
