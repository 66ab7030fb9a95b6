"""Exact delta-comb spectra: finite sets of (frequency, weight) lines.

Finite Hamiltonian systems and the toy Green functions have purely discrete
spectral functions; representing them as exact line lists (instead of
broadened arrays) is what makes 1e-10 tolerances honest.
"""

from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class LineSpectrum:
    """weights[i] * delta(omega - frequencies[i]), frequencies strictly increasing."""

    frequencies: tuple
    weights: tuple
    positive: bool = False

    def __post_init__(self):
        f = self.frequencies
        if any(f[i] >= f[i + 1] for i in range(len(f) - 1)):
            raise ValidationError("frequencies must be strictly increasing")
        if len(f) != len(self.weights):
            raise ValidationError("frequencies and weights must align")
        if self.positive:
            # tolerance relative to the largest weight: weights tiny compared
            # to it may be roundoff ghosts of merged +- cancellations, and
            # dropping them instead would break detailed-balance sums
            scale = max((abs(complex(w)) for w in self.weights), default=1.0)
            for w in self.weights:
                wc = complex(w)
                if wc.real <= -1e-12 * scale or abs(wc.imag) > 1e-12 * scale:
                    raise ValidationError(
                        "spectrum flagged positive has a non-positive weight")

    def __len__(self):
        return len(self.frequencies)

    def items(self):
        return zip(self.frequencies, self.weights)

    def weight_at(self, omega, tol=1e-9):
        """Total weight of lines within tol * scale of omega (0 if none)."""
        scale = max(1.0, max((abs(f) for f in self.frequencies), default=1.0))
        total = 0.0 + 0.0j
        for f, w in self.items():
            if abs(f - omega) <= tol * scale:
                total += w
        return total

    def mirrored(self):
        """The spectrum with omega -> -omega (weights carried along)."""
        pairs = sorted((-f, w) for f, w in self.items())
        return LineSpectrum(tuple(p[0] for p in pairs),
                            tuple(p[1] for p in pairs))

    def scaled(self, factors):
        """New spectrum with weights multiplied by factors(omega) per line."""
        return LineSpectrum(self.frequencies,
                            tuple(w * factors(f) for f, w in self.items()))


def merge_lines(pairs, merge_tol=1e-12, drop_tol=0.0, positive=False):
    """Build a LineSpectrum from raw (frequency, weight) pairs.

    Frequencies closer than merge_tol * spread are treated as one line
    (degenerate level differences below eigensolver accuracy) and their
    weights added.  Lines with |weight| <= drop_tol * max|weight| are
    discarded after merging.
    """
    pairs = sorted(((float(f), complex(w)) for f, w in pairs),
                   key=lambda p: p[0])
    if not pairs:
        return LineSpectrum((), (), positive=positive)
    spread = max(abs(pairs[0][0]), abs(pairs[-1][0]), 1.0)
    tol = merge_tol * spread
    freqs, wts = [pairs[0][0]], [pairs[0][1]]
    for f, w in pairs[1:]:
        if f - freqs[-1] <= tol:
            wts[-1] += w
        else:
            freqs.append(f)
            wts.append(w)
    wmax = max((abs(w) for w in wts), default=0.0)
    cut = drop_tol * wmax
    keep = [i for i, w in enumerate(wts) if abs(w) > cut and w != 0]
    freqs = [freqs[i] for i in keep]
    wts = [wts[i] for i in keep]
    wts = [w.real if w.imag == 0 else w for w in wts]
    return LineSpectrum(tuple(freqs), tuple(wts), positive=positive)
