"""Exact thermal correlation machinery for finite Hermitian systems.

Everything here is a finite sum over eigenpairs: two-time correlators become
exact line spectra, the KMS/detailed-balance relation and the
Callen-Welton relation hold to machine precision, and driven linear response
can be checked against direct integration of the density-matrix equation of
motion.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (IntegratorDivergence, NonHermitianObservable,
                     NonlinearRegime, OnPole, ValidationError,
                     ZeroFrequencyLine)
from .spectra import merge_lines
from .units import HBAR

HERMITICITY_TOL = 1e-12
EIGEN_RESIDUAL_TOL = 1e-10
DEGENERACY_MERGE_TOL = 1e-12


def _require_hermitian(m, name):
    m = np.asarray(m, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(m)))
    if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL * scale:
        raise ValidationError(f"{name} is not Hermitian to {HERMITICITY_TOL}")
    return m


class QuantumSystem:
    """Finite Hermitian Hamiltonian with named observables at inverse temperature beta.

    The eigenbasis, Gibbs populations (built from shifted exponentials to
    avoid overflow at large beta) and eigenbasis-transformed observables are
    computed once and reused by every operation.  Instances are immutable
    after construction and safe to share across threads.
    """

    def __init__(self, hamiltonian, observables, beta, hbar=HBAR):
        h = _require_hermitian(hamiltonian, "hamiltonian")
        if h.shape[0] < 2:
            raise ValidationError("dimension must be at least 2")
        if not beta > 0:
            raise ValidationError("beta must be positive")
        self.dim = h.shape[0]
        self.hamiltonian = h
        self.beta = float(beta)
        self.hbar = float(hbar)
        energies, vectors = np.linalg.eigh(h)
        resid = np.max(np.abs(h @ vectors - vectors * energies))
        scale = max(1.0, float(np.max(np.abs(energies))))
        if resid > EIGEN_RESIDUAL_TOL * scale:
            raise ValidationError(f"eigen-decomposition residual {resid:.2e}")
        self.energies = energies
        self.vectors = vectors
        shifted = np.exp(-self.beta * (energies - energies.min()))
        self.populations = shifted / shifted.sum()
        self.observables = {}
        self._eig_obs = {}
        for name, a in observables.items():
            a = _require_hermitian(a, f"observable {name!r}")
            if a.shape != h.shape:
                raise ValidationError(f"observable {name!r} has wrong shape")
            self.observables[name] = a
            self._eig_obs[name] = vectors.conj().T @ a @ vectors

    def observable_in_eigenbasis(self, name):
        return self._eig_obs[name]

    def thermal_average(self, name):
        a = self._eig_obs[name]
        return float(np.real(np.sum(self.populations * np.diag(a))))


def correlator_line_spectrum(sys, i, j, positive=None):
    """Spectral density of <A_i(t) A_j(0)> as an exact line spectrum.

    Lines sit at (E_mu - E_nu)/hbar with weights
    2 pi pop_nu (A_i)_{nu mu} (A_j)_{mu nu}; degenerate frequencies are merged.
    For i == j the weights are |matrix element|^2-positive and the spectrum
    is flagged positive.
    """
    ai = sys.observable_in_eigenbasis(i)
    aj = sys.observable_in_eigenbasis(j)
    if positive is None:
        positive = i == j
    if positive and i != j:
        raise NonHermitianObservable(
            "positivity holds only for the A, A-dagger pairing (i == j)")
    n = sys.dim
    pairs = []
    for nu in range(n):
        p = sys.populations[nu]
        if p == 0.0:
            continue
        for mu in range(n):
            w = 2.0 * math.pi * p * ai[nu, mu] * aj[mu, nu]
            if w != 0:
                freq = (sys.energies[mu] - sys.energies[nu]) / sys.hbar
                pairs.append((freq, w))
    # keep every nonzero line: weights tiny relative to the maximum still
    # carry O(1) detailed-balance factors exp(beta hbar |omega|)
    return merge_lines(pairs, merge_tol=DEGENERACY_MERGE_TOL,
                       positive=positive)


def transposed_correlator_spectrum(sys, i, j):
    """Spectral density of <A_j(0) A_i(t)> on the same frequency axis.

    This is the mirrored spectrum of the (j, i) correlator; the KMS relation
    compares it line-by-line with the (i, j) spectrum.
    """
    return correlator_line_spectrum(sys, j, i).mirrored()


@dataclass(frozen=True)
class KmsReport:
    max_ratio_error: float
    lines_checked: int


def kms_check(sys, i, j):
    """Detailed balance: J_ji(w) = exp(-beta hbar w) J_ij(w) line-by-line."""
    jij = correlator_line_spectrum(sys, i, j)
    jji = transposed_correlator_spectrum(sys, i, j)
    scale = max((abs(w) for w in jij.weights), default=1.0)
    worst = 0.0
    n = 0
    freqs = sorted(set(jij.frequencies) | set(jji.frequencies))
    for f in freqs:
        lhs = jji.weight_at(f, tol=1e-12)
        rhs = math.exp(-sys.beta * sys.hbar * f) * jij.weight_at(f, tol=1e-12)
        worst = max(worst, abs(lhs - rhs) / scale)
        n += 1
    return KmsReport(max_ratio_error=worst, lines_checked=n)


def symmetrized_spectrum(sys, i, j):
    """Spectral density of the symmetrized correlator: (1/2) J_ij (1 + e^{-beta hbar w})."""
    jij = correlator_line_spectrum(sys, i, j)
    return jij.scaled(lambda f: 0.5 * (1.0 + math.exp(-sys.beta * sys.hbar * f)))


def commutator_spectrum(sys, i, j):
    """Spectral density of <[A_i(t), A_j(0)]>: J_ij (1 - e^{-beta hbar w})."""
    jij = correlator_line_spectrum(sys, i, j)
    return jij.scaled(lambda f: -math.expm1(-sys.beta * sys.hbar * f))


def retarded_green_eval(sys, i, j, omega, kind="r"):
    """Thermal Green function from the line spectrum.

    G(w) = (1/2 pi hbar) sum_l w_l (e^{-beta hbar w_l} - 1) / (w_l - w -+ i0),
    upper sign for the retarded function.  Off the real axis the i0 is
    irrelevant; on the real axis the sum is the principal-value part and the
    delta term vanishes away from the lines.  Raises OnPole when a real
    omega coincides with a line.
    """
    if kind not in ("r", "a"):
        raise ValidationError("kind must be 'r' or 'a'")
    w = complex(omega)
    if kind == "r" and w.imag < 0:
        raise ValidationError("retarded function lives in Im omega >= 0")
    if kind == "a" and w.imag > 0:
        raise ValidationError("advanced function lives in Im omega <= 0")
    jij = correlator_line_spectrum(sys, i, j)
    scale = max((abs(f) for f in jij.frequencies), default=1.0)
    total = 0.0 + 0.0j
    for f, wt in jij.items():
        d = f - w
        if d == 0 or (w.imag == 0 and abs(d) < 1e-13 * max(scale, 1.0)):
            raise OnPole(f"omega = {omega} sits on the line at {f}")
        total += wt * math.expm1(-sys.beta * sys.hbar * f) / d
    return total / (2.0 * math.pi * sys.hbar)


def green_time_kernel(sys, i, j, t, kind="r"):
    """Time-domain Green kernel from the commutator spectrum.

    Retarded: theta(t) (1/i hbar) <[A_i(t), A_j]>; advanced carries -theta(-t).
    Real for Hermitian observables.
    """
    if kind == "r" and t < 0:
        return 0.0
    if kind == "a" and t > 0:
        return 0.0
    comm = commutator_spectrum(sys, i, j)
    acc = 0.0 + 0.0j
    for f, w in comm.items():
        acc += w * np.exp(-1j * f * t)
    val = acc / (2.0 * math.pi) / (1j * sys.hbar)
    return val if kind == "r" else -val


@dataclass(frozen=True)
class FdtReport:
    lhs: float
    rhs: float
    abs_error: float


def fdt_verify(sys, observable, zero_line_tol=1e-12):
    """Check the Callen-Welton relation for a Hermitian observable.

    lhs is the equal-time symmetrized correlator <A^2> = Tr(rho A^2); rhs is
    -(hbar/2 pi) integral of coth(beta hbar w / 2) Im G^r_AA(w), evaluated
    exactly over the spectral lines.

    Lines at exactly zero frequency carry the factor (e^0 - 1) = 0 in
    Im G^r, so they drop from the rhs while the lhs keeps them; the relation
    is then ill-posed (coth singularity at w = 0) and ZeroFrequencyLine is
    raised instead of silently regularizing.
    """
    jaa = correlator_line_spectrum(sys, observable, observable)
    scale = max((abs(w) for w in jaa.weights), default=1.0)
    fscale = max((abs(f) for f in jaa.frequencies), default=1.0)
    w0 = jaa.weight_at(0.0, tol=zero_line_tol)
    if abs(w0) > zero_line_tol * scale:
        raise ZeroFrequencyLine(
            "observable has spectral weight at omega = 0 (conserved "
            "component); the coth-weighted integral does not reproduce it")
    a2 = sys.observable_in_eigenbasis(observable)
    a2 = a2 @ a2
    lhs = float(np.real(np.sum(sys.populations * np.diag(a2))))
    rhs = 0.0
    for f, w in jaa.items():
        if abs(f) <= zero_line_tol * max(1.0, fscale):
            continue  # inside the guard window: weight certified negligible
        x = sys.beta * sys.hbar * f
        im_g = (1.0 / (2.0 * sys.hbar)) * complex(w).real * math.expm1(-x)
        rhs += -(sys.hbar / (2.0 * math.pi)) * (1.0 / math.tanh(0.5 * x)) * im_g
    return FdtReport(lhs=lhs, rhs=rhs, abs_error=abs(lhs - rhs))


@dataclass(frozen=True)
class DrivingProtocol:
    """Adiabatically switched cosine drive F(t) = F0 exp(eps t) cos(Omega t).

    The force couples to the observable named `driven` through the
    perturbation -A F(t); switch_rate eps > 0 guarantees F -> 0 in the
    remote past.
    """

    driven: str
    amplitude: float
    switch_rate: float
    frequency: float

    def __post_init__(self):
        if not self.switch_rate > 0:
            raise ValidationError("switch_rate must be positive")

    def force(self, t):
        return self.amplitude * math.exp(self.switch_rate * t) * \
            math.cos(self.frequency * t)


@dataclass(frozen=True)
class LinearResponseReport:
    times: np.ndarray
    delta_A_direct: np.ndarray
    delta_A_convolution: np.ndarray
    max_error: float
    trace_drift: float


def convolution_response(sys, drive, observe, times):
    """Linear response from the retarded kernel, exact for the cosine drive.

    Delta A(t) = -int_-inf^t G(t - tau) F(tau) d tau; with
    G(s) = sum_l g_l e^{-i w_l s} the tau integral is elementary, so the
    result carries no quadrature error.
    """
    comm = commutator_spectrum(sys, observe, drive.driven)
    eps, om, f0 = drive.switch_rate, drive.frequency, drive.amplitude
    t = np.asarray(times, dtype=float)
    acc = np.zeros_like(t, dtype=complex)
    for f, w in comm.items():
        g = w / (2.0 * math.pi) / (1j * sys.hbar)
        for sgn in (+1.0, -1.0):
            z = eps + 1j * (f + sgn * om)
            acc += g * np.exp((eps + 1j * sgn * om) * t) / z
    vals = -0.5 * f0 * acc
    if np.max(np.abs(vals.imag)) > 1e-10 * max(1.0, np.max(np.abs(vals.real))):
        raise ValidationError("convolution response is not real; "
                              "observables must be Hermitian")
    return vals.real


def linear_response_sim(sys, drive, horizon, observe=None, n_samples=161,
                        rtol=1e-11, atol=1e-13, start_decay=1e-10):
    """Driven response: density-matrix integration vs retarded convolution.

    The interaction-picture deviation delta(t) = rho'(t) - rho obeys
    i hbar d delta/dt = [rho + delta, A(t)] F(t) with delta(-inf) = 0; this
    is the exact unitary transform of the Schroedinger-picture equation of
    motion and keeps the fast free phases analytic.  Integration starts
    where exp(eps t) = start_decay.  max_error is the sup difference over
    [0, horizon] and scales as O(F0^2).
    """
    if observe is None:
        observe = drive.driven
    t0 = math.log(start_decay) / drive.switch_rate
    times = np.linspace(0.0, float(horizon), n_samples)
    energies = sys.energies
    a_drive = sys.observable_in_eigenbasis(drive.driven)
    a_obs = sys.observable_in_eigenbasis(observe)
    rho = np.diag(sys.populations.astype(complex))
    n = sys.dim
    delta_mu = (energies[:, None] - energies[None, :]) / sys.hbar

    def rhs(t, y):
        delta = y.reshape(n, n)
        at = a_drive * np.exp(1j * delta_mu * t)
        c = (rho + delta) @ at - at @ (rho + delta)
        return (c * (drive.force(t) / (1j * sys.hbar))).ravel()

    sol = solve_ivp(rhs, (t0, float(horizon)), np.zeros(n * n, dtype=complex),
                    method="DOP853", t_eval=times, rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegratorDivergence(sol.message)
    direct = np.empty_like(times)
    trace_drift = 0.0
    for idx, t in enumerate(times):
        delta = sol.y[:, idx].reshape(n, n)
        at = a_obs * np.exp(1j * delta_mu * t)
        direct[idx] = float(np.real(np.trace(delta @ at)))
        trace_drift = max(trace_drift, abs(complex(np.trace(delta))))
    conv = convolution_response(sys, drive, observe, times)
    return LinearResponseReport(
        times=times,
        delta_A_direct=direct,
        delta_A_convolution=conv,
        max_error=float(np.max(np.abs(direct - conv))),
        trace_drift=float(trace_drift),
    )


def response_scaling_check(sys, drive, horizon, halvings=2, min_ratio=3.5,
                           **sim_kwargs):
    """Halve the amplitude `halvings` times; the error must drop >= min_ratio each time.

    Raises NonlinearRegime when the quadratic scaling fails, which signals
    either a too-large amplitude or integrator error contaminating the signal.
    """
    errors = []
    amp = drive.amplitude
    for _ in range(halvings + 1):
        d = DrivingProtocol(drive.driven, amp, drive.switch_rate,
                            drive.frequency)
        errors.append(linear_response_sim(sys, d, horizon, **sim_kwargs).max_error)
        amp *= 0.5
    ratios = [errors[k] / errors[k + 1] for k in range(halvings)]
    if min(ratios) < min_ratio:
        raise NonlinearRegime(f"error ratios {ratios} below {min_ratio}")
    return {"errors": errors, "ratios": ratios}


# ---------------------------------------------------------------- presets

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def two_level_system(beta, omega0=1.0, hbar=HBAR):
    """H = (hbar omega0 / 2) sigma_z with the Pauli matrices as observables."""
    h = 0.5 * hbar * omega0 * SIGMA_Z
    return QuantumSystem(h, {"sx": SIGMA_X, "sy": SIGMA_Y, "sz": SIGMA_Z},
                         beta, hbar=hbar)


def truncated_oscillator(beta, dim=40, omega0=1.0, mass=1.0, hbar=HBAR):
    """Harmonic oscillator truncated to `dim` levels, with the position operator."""
    n = np.arange(dim)
    h = np.diag(hbar * omega0 * (n + 0.5)).astype(complex)
    x = np.zeros((dim, dim), dtype=complex)
    s = math.sqrt(hbar / (2.0 * mass * omega0))
    for m in range(dim - 1):
        x[m, m + 1] = x[m + 1, m] = s * math.sqrt(m + 1)
    return QuantumSystem(h, {"x": x, "n": np.diag(n).astype(complex)},
                         beta, hbar=hbar)


def oscillator_position_variance(beta, omega0=1.0, mass=1.0, hbar=HBAR):
    """Closed-form <x^2> of the untruncated oscillator (the independent oracle)."""
    return hbar / (2.0 * mass * omega0) / math.tanh(0.5 * beta * hbar * omega0)


def oscillator_truncation_bound(beta, dim=40, omega0=1.0, mass=1.0, hbar=HBAR):
    """Bound on |<x^2>_truncated - <x^2>_exact| for the preset above.

    Both the truncated and the untruncated variances have closed geometric
    forms: the exact one is s^2 (1+x)/(1-x) with x = exp(-beta hbar omega0);
    truncation drops the levels n >= dim and the coupling of the top retained
    level to level dim.  The analytic difference (with a 1.5 safety factor)
    is the irreducible floor of the dim-level oracle comparison.
    """
    s2 = hbar / (2.0 * mass * omega0)
    x = math.exp(-beta * hbar * omega0)
    exact = s2 * (1.0 + x) / (1.0 - x)
    # sum_{n<dim} (2n+1) x^n, geometric
    full = (1.0 + x) / (1.0 - x) ** 2
    tail = x ** dim * ((2 * dim + 1) / (1.0 - x) + 2.0 * x / (1.0 - x) ** 2)
    q_t = (1.0 - x ** dim) / (1.0 - x)
    truncated = s2 * ((full - tail) - dim * x ** (dim - 1)) / q_t
    return 1.5 * abs(exact - truncated) + 1e-12
