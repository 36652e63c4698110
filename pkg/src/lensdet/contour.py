"""Semi-infinite quadrature along the real axis or a shifted line tau = x + i*Delta.

The integral over [0, X] is done by globally adaptive 7/15-point Gauss-Kronrod
subdivision (vectorised over all active panels); the remainder over [X, inf)
is not integrated at all but bounded analytically by C exp(-rho X)/rho, where
rho is a caller-supplied decay rate and C is estimated from samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import LensSpec, pole_gap

__all__ = [
    "ContourLine",
    "QuadratureResult",
    "QuadratureError",
    "NonConvergenceError",
    "PoleCollisionError",
    "integrate_semi_infinite",
    "default_line",
]

# Kronrod abscissae (positive half, last is the centre) and weights; Gauss
# 7-point nodes are the odd-indexed Kronrod nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # 15 nodes in [-1, 1]
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[[9, 11, 13]] = _WG[2::-1]
_GW[7] = _WG[3]

_EPS = np.finfo(float).eps


class QuadratureError(ArithmeticError):
    pass


class NonConvergenceError(QuadratureError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class PoleCollisionError(QuadratureError):
    """Integrand returned NaN or inf; usually the contour offset is too close to a pole."""


@dataclass(frozen=True)
class ContourLine:
    """Integration line tau = x + i*delta, x >= 0, and quadrature settings."""

    delta: float = 0.0
    decay_rate: float = 1.0
    abs_tol: float = 1e-11
    rel_tol: float = 1e-10
    max_evals: int = 1_000_000

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("contour offset must be non-negative")
        if not self.decay_rate > 0:
            raise ValueError("decay rate must be positive")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")

    def point(self, x):
        return x + 1j * self.delta


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int
    converged: bool = True
    cutoff: float = math.inf
    tail_bound: float = 0.0


def _panel_rules(f, a, b):
    """Kronrod value, error estimate, and |f| integral on each panel [a_i, b_i]."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x), dtype=float)
    if fx.shape != x.shape:
        fx = np.broadcast_to(fx, x.shape)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)][0]
        raise PoleCollisionError(f"integrand is not finite at x={bad:.6g}")
    k = fx @ _KW * half
    g = fx @ _GW * half
    resabs = np.abs(fx) @ _KW * np.abs(half)
    kmean = k / np.where(half == 0, 1.0, 2 * half)
    resasc = np.abs(fx - kmean[:, None]) @ _KW * np.abs(half)
    err = np.abs(k - g)
    # QUADPACK's scaling of |K - G|, plus a floor for rounding in the panel sum
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(resasc > 0, np.minimum(1.0, (200 * err / resasc) ** 1.5), 1.0)
    err = np.where(resasc > 0, resasc * scale, err)
    floor = 50 * _EPS * resabs
    return k, np.maximum(err, floor), floor


def _tail_cutoff(f, rho, abs_tol, start=1.0):
    """Choose X with C exp(-rho X)/rho < abs_tol/20, C from sampled |f| e^{rho x}.

    The dropped tail is a bias, not noise, so it gets a small slice of the budget.
    """
    span = 40.0 / rho
    xs = start + span * np.linspace(0.0, 1.0, 401)
    fx = np.asarray(f(xs), dtype=float)
    if not np.all(np.isfinite(fx)):
        raise PoleCollisionError("integrand is not finite while sampling the tail")
    with np.errstate(over="ignore"):
        c = float(np.max(np.abs(fx) * np.exp(rho * (xs - start))))
    # sampled maximum can miss peaks between samples
    c = 4.0 * c * math.exp(rho * start)
    if c == 0.0:
        return start, 0.0, 0.0
    cutoff = max(start, math.log(20 * c / (rho * abs_tol)) / rho)
    return cutoff, c, c * math.exp(-rho * cutoff) / rho


def integrate_semi_infinite(integrand, line: ContourLine) -> QuadratureResult:
    """Integrate a real-valued, vectorised ``integrand(x)`` over x in [0, inf).

    The caller has already taken real parts and applied the contour shift; the
    integrand must satisfy |f(x)| <= C exp(-rho x) with rho = line.decay_rate.

    Raises NonConvergenceError (carrying the best result) when the tolerance
    max(abs_tol, rel_tol*|I|) is not met within line.max_evals evaluations.
    """
    rho = line.decay_rate
    cutoff, _, tail = _tail_cutoff(integrand, rho, line.abs_tol)
    evals = 401

    n0 = int(min(512, max(16, math.ceil(cutoff))))
    edges = np.linspace(0.0, cutoff, n0 + 1)
    a, b = edges[:-1], edges[1:]
    val, err, floor = _panel_rules(integrand, a, b)
    evals += 15 * len(a)

    while True:
        total = math.fsum(val)
        total_err = math.fsum(err) + tail
        target = max(line.abs_tol, line.rel_tol * abs(total))
        if total_err <= target:
            converged = True
            break
        if evals >= line.max_evals:
            converged = False
            break
        budget = (target - tail) * (b - a) / cutoff
        split = (err > budget) & (err > 1.000001 * floor) & ((b - a) > 64 * _EPS * np.abs(b) + 1e-250)
        if not np.any(split):
            converged = False
            break
        # never exceed the evaluation budget
        room = max(1, (line.max_evals - evals) // 30)
        if np.count_nonzero(split) > room:
            idx = np.flatnonzero(split)
            worst = idx[np.argsort(-err[idx], kind="stable")[:room]]
            split = np.zeros_like(split)
            split[worst] = True
        am, bm = a[split], b[split]
        mid = 0.5 * (am + bm)
        na = np.concatenate([am, mid])
        nb = np.concatenate([mid, bm])
        nv, ne, nf = _panel_rules(integrand, na, nb)
        evals += 15 * len(na)
        keep = ~split
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
        floor = np.concatenate([floor[keep], nf])
        order = np.argsort(a, kind="stable")
        a, b, val, err, floor = a[order], b[order], val[order], err[order], floor[order]

    result = QuadratureResult(
        value=total,
        abs_error_estimate=total_err,
        evaluations=evals,
        converged=converged,
        cutoff=cutoff,
        tail_bound=tail,
    )
    if not converged:
        raise NonConvergenceError(
            f"quadrature tolerance {target:.3g} not met: error estimate {total_err:.3g} "
            f"after {evals} evaluations",
            result,
        )
    return result


def default_line(spec, coupling, **overrides) -> ContourLine:
    """Contour placed halfway to the first kernel pole, with the matching decay rate.

    For an imaginary mass m the offset is additionally capped at 4/m: the
    factor cos(m tau) grows like exp(m*Delta) off the axis, and rounding in
    the oscillatory sum grows with it.
    """
    a2 = float(coupling.alpha_sq)
    if a2 >= 1:
        raise ValueError("contour continuation needs alpha^2 < 1; use minimal_logdet for minimal coupling")
    delta = 0.5 * pole_gap(spec)
    if a2 >= 0:
        rho = 1.0 - math.sqrt(a2)
    else:
        rho = 1.0
        delta = min(delta, 4.0 / math.sqrt(-a2))
    params = {"delta": delta, "decay_rate": rho}
    params.update({k: v for k, v in overrides.items() if v is not None})
    return ContourLine(**params)
