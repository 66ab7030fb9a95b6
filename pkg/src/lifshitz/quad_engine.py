"""Shared numerical kernels.

Adaptive quadrature on finite and semi-infinite intervals (QUADPACK via
scipy), a bisection-only bracketed root finder, and Ridders-style Richardson
differentiation with noise-floor detection.  All kernels are stateless and
deterministic: identical inputs give bit-identical outputs.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NoConvergence, NoSignChange


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


def integrate_adaptive(f, lo, hi, tol=1e-10, limit=200, abs_tol=None):
    """Integrate f on [lo, hi] to tolerance tol.

    tol acts as both relative and absolute target unless abs_tol overrides
    the absolute part (abs_tol=0 gives a purely relative criterion, the
    right choice for single-signed integrands whose magnitude is not known
    in advance).  Returns a QuadratureResult whose error_estimate bounds
    |value - true|; raises NoConvergence if the estimate cannot be brought
    below tolerance within the subdivision budget.
    """
    if not lo < hi:
        raise NoSignChange(f"empty interval [{lo}, {hi}]")
    epsabs = tol if abs_tol is None else abs_tol
    out = integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=tol,
                         limit=limit, full_output=1)
    value, abserr, info = out[0], out[1], out[2]
    # QUADPACK warnings are tolerated as long as the error bound itself is met
    if abserr > 10.0 * max(epsabs, tol * abs(value)):
        raise NoConvergence(
            f"quadrature on [{lo}, {hi}] stalled: estimate {abserr:.3e}")
    return QuadratureResult(value, abserr, int(info["neval"]))


def integrate_semi_infinite(f, lo, decay_scale, tol=1e-10, limit=400,
                            abs_tol=None):
    """Integrate f on [lo, inf) for integrands with exponential-type decay.

    Uses the substitution x = lo + decay_scale * t / (1 - t), which maps
    [lo, inf) onto [0, 1); the full tail is therefore inside the quadrature
    and its contribution is part of error_estimate.  abs_tol as in
    integrate_adaptive.
    """
    if decay_scale <= 0:
        raise NoSignChange("decay_scale must be positive")
    s = float(decay_scale)

    def g(t):
        u = 1.0 - t
        return f(lo + s * t / u) * (s / (u * u))

    epsabs = tol if abs_tol is None else abs_tol
    out = integrate.quad(g, 0.0, 1.0, epsabs=epsabs, epsrel=tol,
                         limit=limit, full_output=1)
    value, abserr, info = out[0], out[1], out[2]
    if abserr > 10.0 * max(epsabs, tol * abs(value)):
        raise NoConvergence(
            f"semi-infinite quadrature from {lo} stalled: estimate {abserr:.3e}")
    return QuadratureResult(value, abserr, int(info["neval"]))


def find_root_bracketed(f, lo, hi, tol=1e-14, max_iter=200):
    """Bisection root of f on [lo, hi]; requires a sign change.

    Pure bisection: robust next to branch points where secant-type updates
    misbehave.  Iterates until the bracket width drops below
    tol * max(1, |x|) or f lands exactly on zero.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise NoSignChange(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, abs(mid)):
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def differentiate_richardson(f, x, h0=None, con=1.4, ntab=12, safe=2.0):
    """Derivative of f at x by Ridders' polynomial extrapolation.

    Central differences with the step shrunk by `con` per row; extrapolation
    stops at the noise floor (when the error starts growing by more than
    `safe`).  Returns (value, error_estimate).  Works for complex-valued f.
    """
    h = abs(x) * 0.05 + 0.01 if h0 is None else float(h0)
    tab = np.zeros((ntab, ntab), dtype=complex)
    tab[0, 0] = (f(x + h) - f(x - h)) / (2.0 * h)
    best = tab[0, 0]
    err = math.inf
    for i in range(1, ntab):
        h /= con
        tab[i, 0] = (f(x + h) - f(x - h)) / (2.0 * h)
        fac = con * con
        for j in range(1, i + 1):
            tab[i, j] = (tab[i, j - 1] * fac - tab[i - 1, j - 1]) / (fac - 1.0)
            fac *= con * con
            errt = max(abs(tab[i, j] - tab[i, j - 1]),
                       abs(tab[i, j] - tab[i - 1, j - 1]))
            if errt <= err:
                err = errt
                best = tab[i, j]
        if abs(tab[i, i] - tab[i - 1, i - 1]) >= safe * err:
            break  # noise floor reached
    value = complex(best)
    if value.imag == 0.0:
        value = value.real
    return value, float(err)


def accelerated_alternating_sum(partials):
    """Limit estimate of an alternating-panel partial-sum sequence.

    Repeated averaging of the cumulative sums (Euler-style); returns
    (estimate, spread) where spread bounds the residual oscillation.  Used
    for the slowly decaying oscillatory tails of continuum phase integrals.
    """
    P = np.cumsum(np.asarray(partials, dtype=float))
    if P.size == 0:
        return 0.0, 0.0
    if P.size == 1:
        return float(P[0]), abs(float(P[0]))
    A = P.copy()
    spread = float(A.max() - A.min())
    while A.size > 2:
        A = 0.5 * (A[:-1] + A[1:])
        spread = float(A.max() - A.min())
    est = float(A.mean())
    return est, max(spread, abs(float(partials[-1])))
