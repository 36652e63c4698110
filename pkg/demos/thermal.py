"""
Finite temperature on a lens space
==================================

The free energy of a conformally coupled scalar on S^1 x L(q) follows from
the cylinder kernel by a sum over thermal images.
"""

import math

from lensdet import Coupling, LensSpec, zprime0
from lensdet.thermo import ThermoState, casimir_energy, high_temp_asymptotics, thermodynamics

print("Casimir energies of a complex field, q = 1..4:")
for q in range(1, 5):
    print("  ", q, casimir_energy(q, 0.5, exact=True))

spec = LensSpec(3)
for T in (0.1, 0.5, 1.0, 2.0, 5.0):
    t = thermodynamics(spec, ThermoState(1 / T, field_factor=2))
    print(f"T={T:4}  F={t['F']: .6e}  E={t['E']: .6e}  S={t['S']: .6e}")

# At high temperature the Stefan-Boltzmann term dominates and the
# zeta-function determinant gives the next correction.
zp = zprime0(spec, Coupling.conformal4()).value
beta = 0.2
exact = thermodynamics(spec, ThermoState(beta))["F"]
approx = high_temp_asymptotics(spec, beta, zp)["F"]
print("high-T free energy", exact, "asymptote", approx, "ratio", exact / approx)
print("leading term alone", -math.pi ** 4 / (45 * 3 * beta ** 4))
