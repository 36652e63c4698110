"""Casimir energy and finite-temperature thermodynamics on lens spaces.

For a real scalar with cylinder kernel K the thermal sum over images gives

    F(beta) = E0 - (1/beta) sum_{m>=1} K(m beta)/m
    E(beta) = d(beta F)/d beta = E0 - sum_m K'(m beta)
    S(beta) = beta^2 dF/d beta = sum_m K(m beta)/m - beta sum_m K'(m beta)

which is the statistical sum over states sum_l D_l log(1 - exp(-beta l))/beta
rewritten with K = sum_l D_l exp(-l tau).  A complex field doubles all three.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .kernels import GeneralLensSpec, LensSpec

__all__ = [
    "ThermoState",
    "SlowConvergenceError",
    "casimir_energy",
    "real_casimir_energy",
    "free_energy",
    "internal_energy",
    "entropy",
    "free_energy_with_error",
    "thermodynamics",
    "high_temp_asymptotics",
]

# beyond this m*beta every image term is below exp(-600)
_FAR = 600.0


class SlowConvergenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ThermoState:
    beta: float
    field_factor: int = 1
    series_tol: float = 1e-12
    max_terms: int = 1_000_000
    beta_min: float = 1e-2

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.field_factor not in (1, 2):
            raise ValueError("field_factor is 1 (real) or 2 (complex)")
        if not self.series_tol > 0:
            raise ValueError("series_tol must be positive")

    @property
    def temperature(self) -> float:
        return 1.0 / self.beta


def casimir_energy(q, delta, exact: bool = False):
    """Complex-field Casimir energy on the twisted lens space of order q.

    [(7 - 120 d^2 + 240 d^4) q^4 + 40 (1 - 12 d^2) q^2 + 112] / (2880 q)

    With ``exact=True`` the arithmetic is done in Fractions (floats are
    converted exactly) and a Fraction is returned.
    """
    if exact:
        q, d = Fraction(q), Fraction(delta)
    else:
        q, d = float(q), float(delta)
    d2 = d * d
    q2 = q * q
    num = (7 - 120 * d2 + 240 * d2 * d2) * q2 * q2 + 40 * (1 - 12 * d2) * q2 + 112
    return num / (2880 * q)


def real_casimir_energy(spec: LensSpec) -> float:
    """Per real scalar: half the complex-field value."""
    return 0.5 * casimir_energy(spec.q, spec.delta)


def _kernel_pair(spec):
    if isinstance(spec, LensSpec):
        def k(t):
            return kernels._homogeneous_k(spec.q, spec.r, t.astype(complex)).real

        def dk(t):
            return kernels.homogeneous_dk(spec, t.astype(complex)).real

        return k, dk
    if isinstance(spec, GeneralLensSpec):
        return (lambda t: kernels.general_k(spec, t.astype(complex)).real,
                lambda t: kernels.general_dk(spec, t.astype(complex)).real)
    raise TypeError("thermodynamics is implemented for homogeneous and two-sided lens spaces")


def _image_sums(spec, state: ThermoState, scale: float):
    """Sums A = sum K(m b)/m and B = sum K'(m b) plus a bound on the dropped tail.

    Terms are bounded by a geometric sequence of ratio exp(-beta) once the
    kernel is in its exponential regime, and decay faster before it, so the
    remainder after term M is at most |term_M| r/(1-r).
    """
    beta = state.beta
    if beta < state.beta_min:
        raise SlowConvergenceError(
            f"beta={beta:g} is below beta_min={state.beta_min:g}; the image sum needs "
            f"about {int(30 / beta)} terms. Lower beta_min and raise max_terms to proceed.")
    k, dk = _kernel_pair(spec)
    ratio = math.exp(-beta)
    geom = ratio / -math.expm1(-beta)
    a_parts, b_parts = [], []
    m0 = 1
    chunk = 64
    tail = math.inf
    while True:
        m = np.arange(m0, m0 + chunk, dtype=float)
        ka = k(m * beta) / m
        kb = dk(m * beta)
        a_parts.extend(ka.tolist())
        b_parts.extend(kb.tolist())
        a, b = math.fsum(a_parts), math.fsum(b_parts)
        last = float(max(abs(ka[-1]), abs(beta * kb[-1])))
        tail = last * geom
        size = max(abs(a), abs(beta * b), scale)
        if tail <= state.series_tol * size or m[-1] * beta > _FAR:
            break
        m0 += chunk
        if m0 > state.max_terms:
            raise SlowConvergenceError(
                f"image sum not converged after {state.max_terms} terms (tail {tail:.3g})")
        chunk = min(2 * chunk, 65536)
    if m[-1] * beta > _FAR:
        tail = min(tail, math.exp(-_FAR))
    return a, b, tail


def _e0(spec, e0):
    if e0 is not None:
        return float(e0)
    if isinstance(spec, LensSpec):
        return real_casimir_energy(spec)
    raise ValueError("no closed-form Casimir energy for this quotient; pass e0 (real-scalar value)")


def thermodynamics(spec, state: ThermoState, e0: float | None = None) -> dict:
    """F, E, S (scaled by field_factor) and the truncation bound of the image sums.

    ``e0`` overrides the real-scalar Casimir energy; it is required for
    two-sided lens spaces.
    """
    e0 = _e0(spec, e0)
    beta = state.beta
    a, b, tail = _image_sums(spec, state, abs(e0) * beta)
    ff = state.field_factor
    return {
        "F": ff * (e0 - a / beta),
        "E": ff * (e0 - b),
        "S": ff * (a - beta * b),
        "error": ff * tail * max(1.0, 1.0 / beta),
        "E0": ff * e0,
        "beta": beta,
        "field_factor": ff,
    }


def free_energy(spec, state: ThermoState, e0: float | None = None) -> float:
    return thermodynamics(spec, state, e0)["F"]


def internal_energy(spec, state: ThermoState, e0: float | None = None) -> float:
    return thermodynamics(spec, state, e0)["E"]


def entropy(spec, state: ThermoState, e0: float | None = None) -> float:
    return thermodynamics(spec, state, e0)["S"]


def free_energy_with_error(spec, state: ThermoState, e0: float | None = None):
    out = thermodynamics(spec, state, e0)
    return out["F"], out["error"]


def high_temp_asymptotics(spec_or_order, beta: float, zprime0_value: float) -> dict:
    """Leading high-temperature forms for a real scalar; Z'(0) at alpha = 0.

    The order of the deck group is taken from ``spec.q`` or given directly.
    """
    order = getattr(spec_or_order, "q", spec_or_order)
    order = float(order)
    if not beta > 0:
        raise ValueError("beta must be positive")
    p4 = math.pi ** 4
    return {
        "F": -p4 / (45 * order) / beta ** 4 - 0.5 * zprime0_value / beta,
        "E": p4 / (15 * order) / beta ** 4,
        "S": 4 * p4 / (45 * order) / beta ** 3 + 0.5 * zprime0_value,
    }
