"""Zeta-function continuations: Z'(0), Z(1) and the minimally coupled determinant.

Conventions
-----------
Eigenvalues are l^2 - alpha^2 with total degeneracy D_l, and
Z(s) = sum_l D_l (l^2 - alpha^2)^{-s}.  Every result is for a single real
scalar field.  With K the cylinder kernel (odd in tau) the derivative at the
origin is taken from the shifted line tau = x + i*Delta,

    Z'(0) = int_0^inf dx Re[ 2 K(tau) cosh(alpha tau) / tau ],

which is the one normalisation used for all quotient families.  logdet is
-Z'(0) and det = exp(-Z'(0)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .contour import ContourLine, default_line, integrate_semi_infinite
from .kernels import GeneralLensSpec, HigherLensSpec, LensSpec

__all__ = [
    "Coupling",
    "SpectralResult",
    "CONVENTION",
    "zprime0",
    "z_at_1",
    "z1_closed_form_even",
    "subtracted_zprime0",
    "minimal_logdet",
    "subtracted_resolvent",
    "small_tau_bracket",
]

CONVENTION = {"field": "real-scalar", "normalization": "canonical"}


@dataclass(frozen=True)
class Coupling:
    """Eigenvalue shift: the operator has eigenvalues l^2 - alpha_sq."""

    alpha_sq: float

    @classmethod
    def conformal4(cls):
        return cls(0.0)

    @classmethod
    def conformal3(cls):
        return cls(0.25)

    @classmethod
    def minimal(cls):
        return cls(1.0)

    @classmethod
    def mass(cls, mu):
        """alpha^2 = 1/4 - mu^2."""
        return cls(0.25 - mu * mu)

    @classmethod
    def imaginary_mass(cls, m):
        return cls(-m * m)

    @property
    def alpha(self) -> complex:
        a2 = float(self.alpha_sq)
        return complex(math.sqrt(a2), 0.0) if a2 >= 0 else complex(0.0, math.sqrt(-a2))

    @property
    def mu(self) -> float | None:
        v = 0.25 - self.alpha_sq
        return math.sqrt(v) if v >= 0 else None

    def describe(self) -> dict:
        return {"alpha_sq": float(self.alpha_sq)}


@dataclass(frozen=True)
class SpectralResult:
    value: float
    abs_error_estimate: float
    quantity: str
    spec: object = None
    coupling: Coupling | None = None
    convention: dict = field(default_factory=lambda: dict(CONVENTION))
    meta: dict = field(default_factory=dict)

    @property
    def logdet(self) -> float:
        if self.quantity not in ("zprime0", "zbar_prime0"):
            raise AttributeError(f"logdet undefined for quantity {self.quantity!r}")
        return -self.value

    @property
    def det(self) -> float:
        return math.exp(self.logdet)

    def to_dict(self) -> dict:
        out = {
            "quantity": self.quantity,
            "value": self.value,
            "abs_error_estimate": self.abs_error_estimate,
            "convention": dict(self.convention),
        }
        if self.spec is not None and hasattr(self.spec, "describe"):
            out["spec"] = self.spec.describe()
        if self.coupling is not None:
            out["coupling"] = self.coupling.describe()
        out.update(self.meta)
        return out


def _check_coupling(coupling):
    if coupling.alpha_sq >= 1:
        raise ValueError("alpha^2 >= 1 has zero or negative modes; minimal coupling goes through minimal_logdet")


def _scaled_kernel(spec, tau, shift):
    """K(tau) * exp(shift*tau), overflow-free for large Re(tau)."""
    if isinstance(spec, LensSpec):
        return kernels._homogeneous_k(spec.q, spec.r, tau, shift)
    if isinstance(spec, GeneralLensSpec):
        return kernels._cyclic_k_scaled(spec.q, spec.nus, tau, shift)
    if isinstance(spec, HigherLensSpec):
        return kernels._cyclic_k_scaled(spec.q, spec.nu, tau, shift)
    raise TypeError(f"unsupported spec {spec!r}")


def _weighted(spec, tau, coupling, parity_kernel):
    """kernel(tau) * cosh(alpha tau), computed without overflow."""
    a2 = float(coupling.alpha_sq)
    if a2 > 0:
        al = math.sqrt(a2)
        return 0.5 * (parity_kernel(spec, tau, al) + parity_kernel(spec, tau, -al))
    val = parity_kernel(spec, tau, 0.0)
    if a2 < 0:
        val = val * np.cos(math.sqrt(-a2) * tau)
    return val


def _metadata(spec, line):
    meta = {"delta": line.delta}
    if isinstance(spec, LensSpec):
        if spec.formula_extended:
            meta["formula_extended"] = True
        if not kernels._is_integer(spec.q):
            meta["non_integer_q"] = True
    return meta


def zprime0(spec, coupling: Coupling, line: ContourLine | None = None) -> SpectralResult:
    """Z'(0) = -logdet for a real scalar on any supported quotient, alpha^2 < 1."""
    _check_coupling(coupling)
    if line is None:
        line = default_line(spec, coupling)
    return _zprime0_cached(spec, coupling, line)


@lru_cache(maxsize=4096)
def _zprime0_cached(spec, coupling, line):
    kernels._check_poles(np.asarray(1j * line.delta), _pole_lattice(spec))
    if line.delta <= 0:
        raise ValueError("Z'(0) needs a contour offset Delta > 0 (tau = 0 is a pole)")

    def integrand(x):
        tau = x + 1j * line.delta
        return (2 * _weighted(spec, tau, coupling, _scaled_kernel) / tau).real

    res = integrate_semi_infinite(integrand, line)
    return SpectralResult(res.value, res.abs_error_estimate, "zprime0", spec, coupling,
                          meta=_metadata(spec, line))


def _pole_lattice(spec):
    if isinstance(spec, LensSpec):
        return kernels._homogeneous_poles(spec.q)
    nus = spec.nus if isinstance(spec, GeneralLensSpec) else spec.nu
    return kernels._cyclic_poles(int(spec.q), nus)


def _scaled_h(spec, tau, shift):
    h, _, _, _ = kernels._homogeneous_parts(spec.q, spec.r, tau, shift)
    return h


def z_at_1(spec: LensSpec, coupling: Coupling, line: ContourLine | None = None) -> SpectralResult:
    """Z(1) = int_0^inf dx Re[ H(tau) cosh(alpha tau) ] on a homogeneous lens space."""
    if not isinstance(spec, LensSpec):
        raise TypeError("Z(1) is implemented for homogeneous lens spaces")
    _check_coupling(coupling)
    if line is None:
        line = default_line(spec, coupling)
    return _z1_cached(spec, coupling, line)


@lru_cache(maxsize=1024)
def _z1_cached(spec, coupling, line):
    kernels._check_poles(np.asarray(1j * line.delta), _pole_lattice(spec))

    def integrand(x):
        tau = x + 1j * line.delta
        return _weighted(spec, tau, coupling, _scaled_h).real

    res = integrate_semi_infinite(integrand, line)
    return SpectralResult(res.value, res.abs_error_estimate, "z1", spec, coupling,
                          meta=_metadata(spec, line))


def z1_closed_form_even(two_q: int) -> float:
    """Z(1) at alpha = 0 on the lens space of even order 2q:
    (pi/4q) sum_{p=1}^{q-1} cosec(pi p/q)."""
    if int(two_q) != two_q or two_q < 2 or two_q % 2:
        raise ValueError(f"order must be a positive even integer, got {two_q!r}")
    q = int(two_q) // 2
    return math.pi / (4 * q) * math.fsum(1 / math.sin(math.pi * p / q) for p in range(1, q))


# -- minimal coupling by back-integration in alpha^2 -------------------------


def small_tau_bracket(alpha, tau):
    """2 y sinh y - 2 cosh y + 2 - y^2 with y = alpha*tau, without cancellation.

    Below |y| = 1 the series sum_{n>=2} 2(2n-1) y^{2n}/(2n)! is used.
    """
    y = np.asarray(alpha * np.asarray(tau, dtype=float), dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    out = np.empty_like(y)
    small = np.abs(y) < 1.0
    ys = y[small]
    y2 = ys * ys
    term = y2 * y2 / 24.0  # y^4/4!
    acc = np.zeros_like(ys)
    for n in range(2, 14):
        acc += 2 * (2 * n - 1) * term
        term = term * y2 / ((2 * n + 1) * (2 * n + 2))
    out[small] = acc
    yl = y[~small]
    out[~small] = 2 * yl * np.sinh(yl) - 2 * np.cosh(yl) + 2 - yl * yl
    return float(out[0]) if scalar else out


def _subtracted_h(spec, tau):
    """H(tau) - exp(-tau) on the real axis, tau > 0."""
    h, _, _, _ = kernels._homogeneous_parts(spec.q, spec.r, tau)
    return h.real - np.exp(-tau)


def _require_zero_mode(spec):
    if not isinstance(spec, LensSpec) or spec.r != 0:
        raise ValueError("the zero-mode subtraction applies to untwisted homogeneous lens spaces only")


def _real_line(decay, abs_tol, rel_tol):
    return ContourLine(delta=0.0, decay_rate=decay, abs_tol=abs_tol, rel_tol=rel_tol)


def subtracted_zprime0(spec: LensSpec, alpha: float, abs_tol=1e-11, rel_tol=1e-10) -> SpectralResult:
    """Zbar'(0, alpha), the l = 1 mode removed, for 0 <= alpha <= 1.

        int_0^inf dtau/tau^2 Hbar(tau) (2 a tau sinh a tau - 2 cosh a tau + 2 - a^2 tau^2)
            + alpha^2 (Z(1, alpha=0) - 1) + Z'(0, alpha=0)
    """
    _require_zero_mode(spec)
    alpha = float(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    line = _real_line(2.0 - alpha, abs_tol, rel_tol)

    def integrand(t):
        t = np.maximum(t, 1e-300)
        return _subtracted_h(spec, t) * small_tau_bracket(alpha, t) / (t * t)

    body = integrate_semi_infinite(integrand, line)
    zp = zprime0(spec, Coupling.conformal4())
    value = body.value
    err = body.abs_error_estimate + zp.abs_error_estimate
    if alpha:
        z1 = z_at_1(spec, Coupling.conformal4())
        value += alpha * alpha * (z1.value - 1.0)
        err += alpha * alpha * z1.abs_error_estimate
    value += zp.value
    meta = {"reference_alpha": 0.0}
    if spec.formula_extended:
        meta["formula_extended"] = True
    return SpectralResult(value, err, "zbar_prime0", spec, Coupling(alpha * alpha), meta=meta)


def minimal_logdet(spec: LensSpec, **tolerances) -> SpectralResult:
    """Zbar'(0) for minimal coupling (alpha = 1) on an untwisted lens space."""
    return subtracted_zprime0(spec, 1.0, **tolerances)


def subtracted_resolvent(spec: LensSpec, alpha: float, abs_tol=1e-12, rel_tol=1e-11) -> SpectralResult:
    """(d/d alpha^2)^2 Zbar'(0) = sum_{l>=2} D_l/(l^2 - alpha^2)^2, from the integral

        1/2 int_0^inf dtau tau Hbar(tau) sinh(alpha tau)/alpha.
    """
    _require_zero_mode(spec)
    alpha = float(alpha)
    if not 0 <= alpha < 2:
        raise ValueError("alpha must lie in [0, 2)")

    def integrand(t):
        s = np.sinh(alpha * t) / alpha if alpha else t
        return 0.5 * t * _subtracted_h(spec, np.maximum(t, 1e-300)) * s

    res = integrate_semi_infinite(integrand, _real_line(2.0 - alpha, abs_tol, rel_tol))
    return SpectralResult(res.value, res.abs_error_estimate, "resolvent2", spec, Coupling(alpha * alpha))
