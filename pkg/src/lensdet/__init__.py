"""Spectral determinants, zeta values and thermodynamics on spherical space forms."""

from .contour import (ContourLine, NonConvergenceError, PoleCollisionError, QuadratureError,
                      QuadratureResult, default_line, integrate_semi_infinite)
from .detcore import (CONVENTION, Coupling, SpectralResult, minimal_logdet, small_tau_bracket,
                      subtracted_resolvent, subtracted_zprime0, z1_closed_form_even, z_at_1,
                      zprime0)
from .kernels import (CharacterConventionError, CylinderKernel, DegeneracyKernel,
                      GeneralLensSpec, HigherLensSpec, LensSpec, PoleProximityError,
                      cylinder_kernel, degeneracies_oracle, degeneracy_kernel, general_k,
                      higher_k, homogeneous_h, homogeneous_k, pole_gap)
from .polyhedral import CyclicDecomposition, PolyhedralGroup, RepLabel, decompose, evaluate
from .thermo import (ThermoState, casimir_energy, entropy, free_energy, high_temp_asymptotics,
                     internal_energy)

__version__ = "0.1.0"
