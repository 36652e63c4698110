"""Degeneracy generating functions and cylinder kernels.

Every quotient handled here is S^{2e-1}/Z_q with a cyclic deck group, possibly
with a U(1) twist.  The spectrum of the conformally coupled scalar is indexed by
the integer l >= 1 (eigenvalue l^2 - alpha^2), and two generating functions are
used throughout:

    H(tau) = sum_l d_l exp(-l tau)      (right degeneracies, homogeneous case)
    K(tau) = sum_l D_l exp(-l tau)      (total degeneracies, the cylinder kernel)

with K = -dH/dtau and D_l = l d_l on homogeneous spaces.

All evaluators accept complex tau (scalar or array) and are written so that the
large-Re(tau) tail neither overflows nor loses relative accuracy; the small-tau
region is handled by factorised forms that avoid the cosh(tau) - cos(beta)
cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

__all__ = [
    "POLE_TOLERANCE",
    "PoleProximityError",
    "CharacterConventionError",
    "LensSpec",
    "GeneralLensSpec",
    "HigherLensSpec",
    "DegeneracyKernel",
    "CylinderKernel",
    "homogeneous_h",
    "homogeneous_k",
    "homogeneous_dk",
    "general_k",
    "general_dk",
    "higher_k",
    "degeneracy_kernel",
    "cylinder_kernel",
    "degeneracies_oracle",
    "harmonic_degeneracies",
    "pole_gap",
    "series_coefficients",
]

POLE_TOLERANCE = 1e-8

# beyond this |Re tau| the hyperbolic forms overflow; switch to exp-scaled forms
_HYPERBOLIC_LIMIT = 300.0


class PoleProximityError(ValueError):
    """A kernel was evaluated within POLE_TOLERANCE of one of its poles."""


class CharacterConventionError(ArithmeticError):
    """A character-sum degeneracy failed to come out integral."""


def _is_integer(x) -> bool:
    return float(x) == math.floor(float(x))


@dataclass(frozen=True)
class LensSpec:
    """Homogeneous lens space S^3/Z_q carrying a U(1) twist r.

    ``q`` may be non-integral; the closed-form kernels are then simply
    continued in q (useful for plotting), but such a q names no manifold.
    ``r`` may likewise be real, with 0 <= r < q.
    """

    q: float = 1
    r: float = 0

    def __post_init__(self):
        if not (np.isfinite(self.q) and self.q >= 1):
            raise ValueError(f"lens order q must be >= 1, got {self.q!r}")
        if not (0 <= self.r < self.q):
            raise ValueError(f"twist r must satisfy 0 <= r < q, got r={self.r!r}, q={self.q!r}")

    @property
    def delta(self) -> float:
        return self.r / self.q - 0.5

    @property
    def integral(self) -> bool:
        return _is_integer(self.q) and _is_integer(self.r)

    @property
    def formula_extended(self) -> bool:
        # the binary-lift derivation needs even q; odd q uses the same formula
        return _is_integer(self.q) and int(self.q) % 2 == 1 and self.q > 1

    @property
    def untwisted(self) -> bool:
        return self.r == 0

    def describe(self) -> dict:
        out = {"family": "homogeneous", "q": _num(self.q), "r": _num(self.r)}
        if not _is_integer(self.q):
            out["non_integer_q"] = True
        if self.formula_extended:
            out["formula_extended"] = True
        return out


@dataclass(frozen=True)
class GeneralLensSpec:
    """Two-sided lens space L(q; nu1, nu2)."""

    q: int
    nu1: int = 1
    nu2: int = 1

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 1:
            raise ValueError(f"q must be a positive integer, got {self.q!r}")
        for nu in (self.nu1, self.nu2):
            if int(nu) != nu or math.gcd(int(nu), int(self.q)) != 1:
                raise ValueError(f"nu={nu!r} is not an integer coprime to q={self.q}")

    @property
    def nus(self) -> tuple:
        return (int(self.nu1), int(self.nu2))

    @property
    def lambda1(self) -> int:
        return pow(int(self.nu1), -1, int(self.q)) if self.q > 1 else 0

    @property
    def lambda2(self) -> int:
        return pow(int(self.nu2), -1, int(self.q)) if self.q > 1 else 0

    def angles(self) -> np.ndarray:
        """beta_i(p) = 2 pi p nu_i / q as an array of shape (q, 2)."""
        return _angle_table(self.q, self.nus)

    def normalize(self) -> "GeneralLensSpec":
        """Equivalent spec with nu1 = 1."""
        if self.q == 1:
            return GeneralLensSpec(1, 1, 1)
        return GeneralLensSpec(self.q, 1, (self.nu2 * self.lambda1) % self.q)

    def describe(self) -> dict:
        return {"family": "general", "q": int(self.q), "nu": list(self.nus)}


@dataclass(frozen=True)
class HigherLensSpec:
    """Lens space S^{2e-1}/Z_q with rotation integers nu = (nu_1, ..., nu_e)."""

    q: int
    nu: tuple

    def __post_init__(self):
        object.__setattr__(self, "nu", tuple(int(v) for v in self.nu))
        if int(self.q) != self.q or self.q < 1:
            raise ValueError(f"q must be a positive integer, got {self.q!r}")
        if len(self.nu) < 2:
            raise ValueError("HigherLensSpec needs e >= 2 rotation integers")
        for v in self.nu:
            if math.gcd(v, int(self.q)) != 1:
                raise ValueError(f"nu={v} is not coprime to q={self.q}")

    @property
    def e(self) -> int:
        return len(self.nu)

    def angles(self) -> np.ndarray:
        return _angle_table(self.q, self.nu)

    def describe(self) -> dict:
        return {"family": "higher", "q": int(self.q), "e": self.e, "nu": list(self.nu)}


AnySpec = Union[LensSpec, GeneralLensSpec, HigherLensSpec]


def _num(x):
    return int(x) if _is_integer(x) else float(x)


def _angle_table(q, nus) -> np.ndarray:
    p = np.arange(int(q))[:, None]
    residues = (p * np.asarray(nus)[None, :]) % int(q)
    return 2 * np.pi * residues / q


def _as_tau(tau):
    arr = np.asarray(tau, dtype=complex)
    return arr, arr.ndim == 0


def _out(val, scalar):
    return complex(val) if scalar else val


def _check_poles(tau, imag_poles):
    """Raise if tau is within POLE_TOLERANCE of i*y for y in the lattice(s).

    ``imag_poles`` is a list of (offset, spacing) pairs describing the pole
    sets i*(offset + k*spacing), k integer.
    """
    y = tau.imag
    for offset, spacing in imag_poles:
        k = np.round((y - offset) / spacing)
        d = np.abs(tau - 1j * (offset + k * spacing))
        if np.any(d < POLE_TOLERANCE):
            where = complex(np.ravel(tau)[np.argmin(np.ravel(d))])
            raise PoleProximityError(f"kernel evaluated within {POLE_TOLERANCE:g} of a pole near tau={where}")


def _coth(z):
    return -(1 + np.exp(-2 * z)) / np.expm1(-2 * z)


def _csch2(z):
    return 4 * np.exp(-2 * z) / np.expm1(-2 * z) ** 2


def _sech2(w):
    w = np.where(w.real < 0, -w, w)
    e = np.exp(-2 * w)
    return 4 * e / (1 + e) ** 2


# -- homogeneous lens spaces -------------------------------------------------


def _homogeneous_parts(q, r, tau, shift=0.0):
    """H(tau) * exp(shift*tau), and the log-derivative pieces of H."""
    q = float(q)
    a = float(r) - q / 2  # q*delta
    b = q / 2
    aa = abs(a)
    h = np.exp((aa - 1 - b + shift) * tau) * (1 + np.exp(-2 * aa * tau))
    h = h / (np.expm1(-2 * tau) * np.expm1(-q * tau))
    dlog = a * np.tanh(a * tau) - _coth(tau) - b * _coth(b * tau)
    return h, dlog, a, b


def _homogeneous_poles(q):
    return [(0.0, np.pi), (0.0, 2 * np.pi / float(q))]


def homogeneous_h(spec: LensSpec, tau):
    """Degeneracy kernel cosh(q tau delta) / (2 sinh tau sinh(q tau/2)).

    At r = 0 this is coth(q tau/2)/(2 sinh tau).
    """
    tau, scalar = _as_tau(tau)
    _check_poles(tau, _homogeneous_poles(spec.q))
    h, _, _, _ = _homogeneous_parts(spec.q, spec.r, tau)
    return _out(h, scalar)


def _homogeneous_k(q, r, tau, shift=0.0):
    h, dlog, _, _ = _homogeneous_parts(q, r, tau, shift)
    return -h * dlog


def homogeneous_k(spec: LensSpec, tau):
    """Cylinder kernel K = -dH/dtau of the twisted homogeneous lens space.

    Uses the hand-differentiated form K = -H * (d log H / d tau) with
    d log H/d tau = a tanh(a tau) - coth(tau) - b coth(b tau), a = q delta, b = q/2.
    """
    tau, scalar = _as_tau(tau)
    _check_poles(tau, _homogeneous_poles(spec.q))
    return _out(_homogeneous_k(spec.q, spec.r, tau), scalar)


def homogeneous_dk(spec: LensSpec, tau):
    """dK/dtau = -H * ((log H)'^2 + (log H)'')."""
    tau, scalar = _as_tau(tau)
    _check_poles(tau, _homogeneous_poles(spec.q))
    h, dlog, a, b = _homogeneous_parts(spec.q, spec.r, tau)
    d2log = a * a * _sech2(a * tau) + _csch2(tau) + b * b * _csch2(b * tau)
    return _out(-h * (dlog * dlog + d2log), scalar)


# -- cyclic quotients with general rotation angles ---------------------------


def _cyclic_poles(q, nus):
    offsets = sorted({(2 * np.pi * ((p * nu) % q) / q) for p in range(q) for nu in nus})
    return [(off, 2 * np.pi) for off in offsets]


def _cyclic_k_scaled(q, nus, tau, shift=0.0):
    """exp(shift*tau) * t^{e-1} (1-t^2)/q * sum_p prod_i 1/|1 - t e^{i beta_i}|^2.

    This is the Molien form with t = exp(-tau); it is the exact cylinder kernel
    of S^{2e-1}/Z_q for the operator conformal in 2e dimensions.
    """
    e = len(nus)
    beta = _angle_table(q, nus)  # (q, e)
    ts = tau[..., None, None]
    fac = np.expm1(-ts + 1j * beta) * np.expm1(-ts - 1j * beta)
    group = np.sum(1.0 / np.prod(fac, axis=-1), axis=-1)
    pref = np.exp((shift - e + 1) * tau) * (-np.expm1(-2 * tau)) / q
    return pref * group


def _hyperbolic_terms(q, nus, tau):
    beta = _angle_table(q, nus)
    ts = tau[..., None, None]
    # cosh(tau) - cos(beta) = 2 sinh((tau + i beta)/2) sinh((tau - i beta)/2)
    c = 2 * np.sinh((ts + 1j * beta) / 2) * np.sinh((ts - 1j * beta) / 2)
    return c


def general_k(spec: GeneralLensSpec, tau):
    """Cylinder kernel of L(q; nu1, nu2),

        K = sinh(tau)/(2q) * sum_p 1/((cosh tau - cos beta_1)(cosh tau - cos beta_2)).
    """
    tau, scalar = _as_tau(tau)
    _check_poles(tau, _cyclic_poles(spec.q, spec.nus))
    big = np.abs(tau.real) > _HYPERBOLIC_LIMIT
    safe = np.where(big, 1.0, tau)
    c = _hyperbolic_terms(spec.q, spec.nus, safe)
    val = np.sinh(safe) / (2 * spec.q) * np.sum(1.0 / np.prod(c, axis=-1), axis=-1)
    if np.any(big):
        val = np.where(big, _cyclic_k_scaled(spec.q, spec.nus, np.where(big, tau, 1.0)), val)
    return _out(val, scalar)


def general_dk(spec: GeneralLensSpec, tau):
    """dK/dtau for the two-sided lens space kernel."""
    tau, scalar = _as_tau(tau)
    _check_poles(tau, _cyclic_poles(spec.q, spec.nus))
    c = _hyperbolic_terms(spec.q, spec.nus, tau)
    inv = 1.0 / np.prod(c, axis=-1)
    s = np.sinh(tau)[..., None]
    bracket = np.cosh(tau)[..., None] - s * s * np.sum(1.0 / c, axis=-1)
    return _out(np.sum(inv * bracket, axis=-1) / (2 * spec.q), scalar)


def higher_k(spec: HigherLensSpec, tau):
    """Cylinder kernel of S^{2e-1}/Z_q for the operator conformal in 2e dimensions.

    Equal to sinh(tau)/(2q) * sum_p prod_i 1/(cosh tau - cos beta_i) times
    2^{2-e}; the power of two makes the expansion coefficients the true
    harmonic multiplicities (checked against harmonic_degeneracies).
    """
    tau, scalar = _as_tau(tau)
    _check_poles(tau, _cyclic_poles(spec.q, spec.nu))
    return _out(_cyclic_k_scaled(spec.q, spec.nu, tau), scalar)


# -- kernel objects ----------------------------------------------------------


@dataclass(frozen=True)
class DegeneracyKernel:
    """H(tau) = G(exp(-tau)); ``leading_order`` is the tau^-2 coefficient."""

    evaluator: Callable
    pole_gap: float
    leading_order: float

    def __call__(self, tau):
        return self.evaluator(tau)


@dataclass(frozen=True)
class CylinderKernel:
    """K(tau) = sum_l D_l exp(-l tau), odd in tau."""

    evaluator: Callable
    pole_gap: float
    odd: bool = True
    derivative: Callable | None = None

    def __call__(self, tau):
        return self.evaluator(tau)


def degeneracy_kernel(spec: LensSpec) -> DegeneracyKernel:
    if not isinstance(spec, LensSpec):
        raise TypeError("closed-form H is only available for homogeneous lens spaces")
    return DegeneracyKernel(lambda t: homogeneous_h(spec, t), pole_gap(spec), 1.0 / spec.q)


def cylinder_kernel(spec: AnySpec) -> CylinderKernel:
    if isinstance(spec, LensSpec):
        return CylinderKernel(lambda t: homogeneous_k(spec, t), pole_gap(spec),
                              derivative=lambda t: homogeneous_dk(spec, t))
    if isinstance(spec, GeneralLensSpec):
        return CylinderKernel(lambda t: general_k(spec, t), pole_gap(spec),
                              derivative=lambda t: general_dk(spec, t))
    if isinstance(spec, HigherLensSpec):
        return CylinderKernel(lambda t: higher_k(spec, t), pole_gap(spec))
    raise TypeError(f"unsupported spec {spec!r}")


def pole_gap(spec: AnySpec) -> float:
    """Distance from the real axis to the nearest non-real kernel pole."""
    if isinstance(spec, LensSpec):
        return min(np.pi, 2 * np.pi / spec.q)
    nus = spec.nus if isinstance(spec, GeneralLensSpec) else spec.nu
    q = int(spec.q)
    residues = [(p * nu) % q for p in range(q) for nu in nus]
    return min(2 * np.pi * (k if k else q) / q for k in residues)


# -- brute-force degeneracies ------------------------------------------------


def _round_checked(values, what):
    out = []
    for l, v in enumerate(values, start=1):
        if abs(v.imag) > 1e-6 or abs(v.real - round(v.real)) > 1e-6:
            raise CharacterConventionError(f"{what}: non-integral degeneracy {v} at l={l}")
        out.append(int(round(v.real)))
    return out


def _su2_character(l, num, q):
    """sin(l theta)/sin(theta) at theta = 2 pi num/q, with exact limits."""
    twice = (2 * num) % q
    if twice == 0:
        # theta = 0 or pi
        return l if num % q == 0 else l * (-1) ** (l - 1)
    theta = 2 * np.pi * num / q
    return np.sin(l * theta) / np.sin(theta)


def _rotation_character(l, p, nus, q):
    """(cos l b1 - cos l b2)/(cos b1 - cos b2) with b_i = 2 pi p nu_i / q."""
    k1, k2 = (p * nus[0]) % q, (p * nus[1]) % q
    if k1 == k2 or (k1 + k2) % q == 0:
        # cos b1 == cos b2: limit l sin(l b)/sin(b)
        return l * _su2_character(l, k1, q)
    b1, b2 = 2 * np.pi * k1 / q, 2 * np.pi * k2 / q
    return (np.cos(l * b1) - np.cos(l * b2)) / (np.cos(b1) - np.cos(b2))


def degeneracies_oracle(spec, l_max: int) -> list:
    """Degeneracies for l = 1..l_max from explicit group-averaged character sums.

    Homogeneous specs give the right degeneracies d_l(q, r); two-sided specs
    give the total degeneracies D_l.  Higher-dimensional specs are delegated
    to :func:`harmonic_degeneracies`.
    """
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    if isinstance(spec, HigherLensSpec):
        return harmonic_degeneracies(spec, l_max)
    if isinstance(spec, LensSpec):
        if not spec.integral:
            raise ValueError("degeneracies need integer q and r")
        q, r = int(spec.q), int(spec.r)
        vals = []
        for l in range(1, l_max + 1):
            acc = 0j
            for p in range(q):
                acc += _su2_character(l, p, q) * np.exp(-2j * np.pi * p * r / q)
            vals.append(acc / q)
        return _round_checked(vals, f"lens q={q} r={r}")
    if isinstance(spec, GeneralLensSpec):
        q = int(spec.q)
        vals = [complex(sum(_rotation_character(l, p, spec.nus, q) for p in range(q)) / q)
                for l in range(1, l_max + 1)]
        return _round_checked(vals, f"L({q};{spec.nu1},{spec.nu2})")
    raise TypeError(f"unsupported spec {spec!r}")


def harmonic_degeneracies(spec, l_max: int) -> list:
    """Total degeneracies D_l by counting invariant harmonic polynomials.

    Monomials z^a zbar^b on C^e are counted by degree and Z_q-charge
    sum_i nu_i (a_i - b_i) mod q; invariant harmonics of degree n number
    P_n - P_{n-2}, and degree n sits at level l = n + e - 1.
    """
    if isinstance(spec, GeneralLensSpec):
        q, weights, e = int(spec.q), spec.nus, 2
    else:
        q, weights, e = int(spec.q), spec.nu, spec.e
    n_max = l_max - e + 1
    counts = np.zeros((max(n_max, 0) + 1, q), dtype=np.int64)
    if n_max >= 0:
        counts[0, 0] = 1
        for w in [v % q for v in weights] + [(-v) % q for v in weights]:
            # multiply by 1/(1 - x t), x of charge w
            for n in range(1, n_max + 1):
                counts[n] += np.roll(counts[n - 1], w)
    invariant = counts[:, 0]
    out = []
    for l in range(1, l_max + 1):
        n = l - e + 1
        if n < 0:
            out.append(0)
        else:
            out.append(int(invariant[n] - (invariant[n - 2] if n >= 2 else 0)))
    return out


def series_coefficients(evaluator, l_max: int, radius: float = 0.7, points: int = 1024) -> np.ndarray:
    """Taylor coefficients c_1..c_lmax of f(t) given f as a function of tau = -log t.

    Cauchy integral on |t| = radius, evaluated by FFT.
    """
    k = np.arange(points)
    t = radius * np.exp(2j * np.pi * k / points)
    vals = np.asarray(evaluator(-np.log(t)), dtype=complex)
    coeffs = np.fft.fft(vals) / points
    return (coeffs[1:l_max + 1] / radius ** np.arange(1, l_max + 1)).real
