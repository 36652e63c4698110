"""Binary polyhedral quotients S^3/G' as signed sums of twisted cyclic blocks.

A spectral quantity S (anything additive over a disjoint union of spectra,
such as Z'(0) or a free energy) on S^3/G' in the flat bundle defined by a
representation rho of G' is a rational combination of twisted cyclic
quantities S(r; gamma), one lens space S^3/<gamma> of order ord(gamma) with
U(1) twist r, for gamma among the generators R, S, T and the central
element RST.  The relations used are the published ones:

    1     : 1/2 [S(0;R) + S(0;S) + S(0;T) - S(0;RST)]
    2_s   : 1/2 [S(1;R) + S(1;S) + S(1;T) - S(1;RST)]
    2_s'  : S(1;S) - 1/2 S(5;T) - S(1;T)                (icosahedral only)
    3'    : 1/2 S(2;R) - S(2;T)                         (icosahedral only)
    3     : 1/2 S(2;R) - S(4;T)                         (icosahedral only)
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .detcore import Coupling, SpectralResult, zprime0, z_at_1
from .kernels import LensSpec

__all__ = [
    "PolyhedralGroup",
    "RepLabel",
    "Block",
    "CyclicDecomposition",
    "decompose",
    "evaluate",
    "GROUPS",
]

_NAMES = {3: "T", 4: "O", 5: "I"}


@dataclass(frozen=True)
class PolyhedralGroup:
    """Binary polyhedral group with symbol (2, 3, n)."""

    n: int

    def __post_init__(self):
        if self.n not in _NAMES:
            raise ValueError("n must be 3, 4 or 5 (tetrahedral, octahedral, icosahedral)")

    @property
    def name(self) -> str:
        return _NAMES[self.n]

    @property
    def symbol(self) -> tuple:
        return (2, 3, self.n)

    @property
    def order(self) -> int:
        return {3: 24, 4: 48, 5: 120}[self.n]

    @property
    def generator_orders(self) -> dict:
        return {"R": 4, "S": 6, "T": 2 * self.n, "RST": 2}

    @classmethod
    def from_name(cls, name: str) -> "PolyhedralGroup":
        key = name.strip().upper().rstrip("'")
        for n, nm in _NAMES.items():
            if nm == key:
                return cls(n)
        raise ValueError(f"unknown polyhedral group {name!r}")


GROUPS = {nm: PolyhedralGroup(n) for n, nm in _NAMES.items()}

_IRREP_DIMS = {"1": 1, "2s": 2, "2s'": 2, "3": 3, "3'": 3}
_ALIASES = {"2sp": "2s'", "3p": "3'", "2_s": "2s", "2_s'": "2s'"}


@dataclass(frozen=True)
class RepLabel:
    """A representation given as a direct sum of named irreps, e.g. ``1+2s``."""

    components: tuple

    def __post_init__(self):
        comps = tuple(_ALIASES.get(c, c) for c in self.components)
        for c in comps:
            if c not in _IRREP_DIMS:
                raise ValueError(f"unknown irrep {c!r}; expected one of {sorted(_IRREP_DIMS)}")
        if not comps:
            raise ValueError("empty representation")
        object.__setattr__(self, "components", comps)

    @classmethod
    def parse(cls, text: str) -> "RepLabel":
        parts = [p for p in re.split(r"\s*(?:\+|⊕)\s*", text.strip()) if p]
        return cls(tuple(parts))

    @property
    def dimension(self) -> int:
        return sum(_IRREP_DIMS[c] for c in self.components)

    @property
    def name(self) -> str:
        return "+".join(self.components)


@dataclass(frozen=True)
class Block:
    coefficient: Fraction
    order: int
    twist: int

    def spec(self) -> LensSpec:
        return LensSpec(self.order, self.twist)


@dataclass(frozen=True)
class CyclicDecomposition:
    blocks: tuple

    def __iter__(self):
        return iter(self.blocks)

    def combine(self, quantity):
        """sum of coefficient * quantity(LensSpec(order, twist))."""
        return sum(float(b.coefficient) * quantity(b.spec()) for b in self.blocks)


def _irrep_blocks(group: PolyhedralGroup, irrep: str) -> list:
    half = Fraction(1, 2)
    o = group.generator_orders
    if irrep in ("1", "2s"):
        r = 0 if irrep == "1" else 1
        return [Block(half, o["R"], r), Block(half, o["S"], r), Block(half, o["T"], r),
                Block(-half, o["RST"], r)]
    if group.n != 5:
        raise ValueError(f"irrep {irrep} is only catalogued for the icosahedral group")
    t = o["T"]
    if irrep == "2s'":
        return [Block(Fraction(1), o["S"], 1), Block(-half, t, 5), Block(Fraction(-1), t, 1)]
    if irrep == "3'":
        return [Block(half, o["R"], 2), Block(Fraction(-1), t, 2)]
    if irrep == "3":
        return [Block(half, o["R"], 2), Block(Fraction(-1), t, 4)]
    raise ValueError(f"unsupported irrep {irrep!r}")


def decompose(group: PolyhedralGroup, rep) -> CyclicDecomposition:
    if isinstance(rep, str):
        rep = RepLabel.parse(rep)
    blocks = []
    for comp in rep.components:
        blocks.extend(_irrep_blocks(group, comp))
    return CyclicDecomposition(tuple(blocks))


def evaluate(group, rep, quantity: str = "zprime0", coupling: Coupling | None = None,
             *, twist_scale: float = 1.0, **kwargs) -> SpectralResult:
    """Combine cyclic-block values of ``quantity`` for the flat bundle ``rep``.

    ``quantity`` is one of ``"zprime0"``, ``"z1"`` or ``"free_energy"`` (the
    latter needs ``state=ThermoState``).  ``twist_scale`` multiplies every
    block with non-zero twist; it exists only to probe normalisation
    conventions and should be left at 1.
    """
    if isinstance(group, str):
        group = PolyhedralGroup.from_name(group)
    if isinstance(rep, str):
        rep = RepLabel.parse(rep)
    coupling = coupling or Coupling.conformal4()
    decomposition = decompose(group, rep)
    value = 0.0
    err = 0.0
    parts = []
    for b in decomposition:
        weight = float(b.coefficient) * (twist_scale if b.twist else 1.0)
        if quantity == "zprime0":
            r = zprime0(b.spec(), coupling, kwargs.get("line_for", lambda s: None)(b.spec()))
            v, e = r.value, r.abs_error_estimate
        elif quantity == "z1":
            r = z_at_1(b.spec(), coupling)
            v, e = r.value, r.abs_error_estimate
        elif quantity == "free_energy":
            from .thermo import free_energy_with_error

            v, e = free_energy_with_error(b.spec(), kwargs["state"])
        else:
            raise ValueError(f"unknown quantity {quantity!r}")
        parts.append(weight * v)
        value_err = abs(weight) * e
        err += value_err
    value = math.fsum(parts)
    meta = {"group": group.name, "rep": rep.name, "blocks": len(decomposition.blocks)}
    if twist_scale != 1.0:
        meta["twist_scale"] = twist_scale
    return SpectralResult(value, err, quantity, None, coupling, meta=meta)
