"""
Binary polyhedral quotients
===========================

Polyhedral groups are not cyclic, but each of their spectral functions is
a rational combination of cyclic ones.  Here we look at the blocks and the
determinants they produce.
"""

from lensdet import Coupling
from lensdet.polyhedral import GROUPS, decompose, evaluate

for name, group in GROUPS.items():
    print(name, group.order, "elements, axis orders", group.generator_orders)
    for b in decompose(group, "1"):
        print("   ", b.coefficient, "x L(", b.order, ";", b.twist, ")")

c3, c4 = Coupling.conformal3(), Coupling.conformal4()
for name in GROUPS:
    print(name, "det(1) conf3 =", evaluate(name, "1", "zprime0", c3).det,
          " conf4 =", evaluate(name, "1", "zprime0", c4).det)

# Flat U(3) bundles over the icosahedral space.  Direct sums multiply.
for rep in ("1+1+1", "1+2s", "1+2sp", "3", "3p"):
    r = evaluate("I", rep, "zprime0", c4)
    print(f"I {rep:6s} det = {r.det:.6f}")

one = evaluate("I", "1", "zprime0", c4).det
spinor = evaluate("I", "2s", "zprime0", c4).det
print("det(1)*det(2s) =", one * spinor)
