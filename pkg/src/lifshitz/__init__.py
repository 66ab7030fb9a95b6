"""Lifshitz-formula machinery for parallel plates, with exact
fluctuation-dissipation checks on finite Hamiltonian systems.

Subpackages by theme: dielectric models (dispersion), toy response functions
and their pole structure (response), exact thermal correlators and driven
linear response for finite systems (fdt_lab), the plate-pair dispersion
function, modes and phase diagnostics (lifshitz_core), energies via mode sum,
imaginary-axis integral and Matsubara sum plus the Drude anomaly (casimir),
shared numerical kernels (quad_engine), and the command-line front end (cli).
"""

from .dispersion import DRUDE, PLASMA, DispersionModel, eval_permittivity
from .casimir import (EnergyResult, MatsubaraGrid, casimir_pressure,
                      drude_anomaly, energy_imaginary_axis,
                      energy_real_axis_per_k, free_energy_matsubara,
                      oscillator_free_energy)
from .fdt_lab import (DrivingProtocol, QuantumSystem, correlator_line_spectrum,
                      fdt_verify, kms_check, linear_response_sim,
                      retarded_green_eval, truncated_oscillator,
                      two_level_system)
from .lifshitz_core import (TE, TM, CavityConfig, KPoint, dispersion_function,
                            find_modes, reflection_amplitude,
                            spectral_density_shift, transverse_wavevectors,
                            uhp_winding_number)
from .response import (ToyGreenModel, drude_decomposition,
                       fdt_compatibility_report, green_plasma_lines,
                       plasma_correlator_spectrum)
from .spectra import LineSpectrum
from .units import UnitSystem

__version__ = "0.1.0"
