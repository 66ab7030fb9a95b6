"""Internal unit system.

Everything is computed with hbar = c = k_B = 1.  Frequencies are measured in
units of the plasma frequency omega_p, lengths in units of c/omega_p and
temperatures in units of hbar*omega_p/k_B, so all exponentials stay O(1) at
desk scale.  The conversion factors live here so that a different scaling can
be bolted on without touching the numerics.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class UnitSystem:
    hbar: float = 1.0
    c: float = 1.0
    k_B: float = 1.0


UNITS = UnitSystem()

HBAR = UNITS.hbar
C = UNITS.c
K_B = UNITS.k_B
