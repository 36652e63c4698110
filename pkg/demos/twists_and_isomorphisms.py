"""
Twisted bundles and lens-space isomorphisms
===========================================

A U(1) twist r shifts which modes survive the quotient.  Two-sided lens
spaces L(q; 1, nu) depend on nu only up to the known isomorphisms.
"""

import numpy as np

from lensdet import Coupling, GeneralLensSpec, LensSpec, zprime0

c3 = Coupling.conformal3()
for r in np.arange(0, 4, 0.5):
    print(f"L(4) twist r={r:.1f}  -(1/2) logdet = {0.5 * zprime0(LensSpec(4, r), c3).value: .8f}")

c4 = Coupling.conformal4()
vals = {nu: zprime0(GeneralLensSpec(29, 1, nu), c4).value for nu in range(1, 29)}
for nu in (2, 3, 12):
    inv = pow(nu, -1, 29)
    print(f"nu={nu:2d}  {vals[nu]: .10f}  29-nu: {vals[29 - nu]: .10f}  inverse {inv:2d}: {vals[inv]: .10f}")
