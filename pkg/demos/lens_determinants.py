"""
Determinants on the three-sphere and its lens quotients
=======================================================

Start from the round three-sphere, where the conformally coupled operator
has a closed-form log-determinant, then quotient by cyclic groups.
"""

import math

from lensdet import Coupling, LensSpec, zprime0

# On S^3 the conformal-in-four operator has eigenvalues l^2 with
# degeneracy l^2, and ln det = zeta(3)/(2 pi^2).
res = zprime0(LensSpec(1), Coupling.conformal4())
print("S^3   computed", -res.value, "+/-", res.abs_error_estimate)
print("S^3   closed form", 1.2020569031595942 / (2 * math.pi ** 2))

# Quotienting by Z_q keeps about one mode in q, so the determinant drifts
# as q grows.  q = 2 is real projective space.
for q in range(1, 9):
    c4 = zprime0(LensSpec(q), Coupling.conformal4())
    c3 = zprime0(LensSpec(q), Coupling.conformal3())
    print(f"q={q}  logdet(conf4)={-c4.value: .9f}  logdet(conf3)={-c3.value: .9f}")

# q need not be an integer for the closed-form kernel.  Such values have
# no quotient-space meaning, but the curve through them is smooth.
for q in (1.5, 2.5, 3.5):
    print(f"q={q}  logdet(conf4)={-zprime0(LensSpec(q), Coupling.conformal4()).value: .9f}")

# A large imaginary mass sets the bulk behaviour pi m^3/(3q).
m = 10
r = zprime0(LensSpec(2), Coupling.imaginary_mass(m))
print("Weyl ratio at m=10, q=2:", r.value * 3 * 2 / (math.pi * m ** 3))
