"""Data grids behind the seven plotted quantities.

Each figure is a list of grid points plus a per-point evaluator; evaluation is
pure, so points can be farmed out to worker processes and reassembled in grid
order without changing a single bit of the output.

    1  logdet vs continuous q, alpha^2 in {0, 1/4}          q in [1, 8] step 0.1
    2  logdet vs mass parameter mu, q in {1, 2, 3}           mu in [0, 6] step 0.1
    3  Z'(0) = -logdet (real) vs continuous twist, q = 4     r in [0, 4) step 0.02
    4  complex-field free energy vs T, q in {1, 2, 3}        T in (0, 2] step 0.02
    5  complex-field free energy vs T, q = 4, r = 0..3       T in (0, 2] step 0.02
    6  logdet on L(29; 1, nu), conformal in four             nu = 1..28
    7  Zbar'(0) minimal vs Z'(0) conformal-in-four           q in [1, 8] step 0.25
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .detcore import Coupling, minimal_logdet, zprime0
from .kernels import GeneralLensSpec, LensSpec
from .thermo import ThermoState, thermodynamics

__all__ = ["FIGURES", "grid", "figure_rows", "parse_range"]


def parse_range(text: str, inclusive: bool = True) -> np.ndarray:
    """'a:b:step' (or 'a:b' with step 1) as an array, end point included."""
    parts = [float(p) for p in text.split(":")]
    if len(parts) == 2:
        parts.append(1.0)
    if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
        raise ValueError(f"bad range {text!r}; expected start:stop[:step] with step > 0")
    start, stop, step = parts
    n = int(np.floor((stop - start) / step + 1e-9))
    vals = start + step * np.arange(n + 1)
    if not inclusive:
        vals = vals[vals < stop - 1e-12]
    # round away representation noise from accumulating the step
    return np.round(vals, 12)


def _temperatures(main):
    return main if main is not None else np.round(0.02 * np.arange(1, 101), 12)


def grid(n: int, main=None, qs=None) -> tuple:
    """Column names and grid points for figure ``n``.

    ``main`` replaces the default values of the swept variable and ``qs`` the
    default lens orders.
    """
    if n == 1:
        vals = main if main is not None else parse_range("1:8:0.1")
        pts = [(float(q), a2) for a2 in (0.0, 0.25) for q in vals]
        return ("q", "alpha_sq"), pts
    if n == 2:
        vals = main if main is not None else parse_range("0:6:0.1")
        return ("q", "mu"), [(q, float(mu)) for q in (qs or (1, 2, 3)) for mu in vals]
    if n == 3:
        q = (qs or (4,))[0]
        vals = main if main is not None else parse_range(f"0:{q}:0.02", inclusive=False)
        return ("q", "r"), [(q, float(r)) for r in vals]
    if n == 4:
        return ("q", "T"), [(q, float(t)) for q in (qs or (1, 2, 3)) for t in _temperatures(main)]
    if n == 5:
        q = int((qs or (4,))[0])
        return ("q", "r", "T"), [(q, r, float(t)) for r in range(q) for t in _temperatures(main)]
    if n == 6:
        q = int((qs or (29,))[0])
        vals = main if main is not None else range(1, q)
        return ("q", "nu"), [(q, int(nu)) for nu in vals if np.gcd(int(nu), q) == 1]
    if n == 7:
        vals = main if main is not None else parse_range("1:8:0.25")
        return ("q", "coupling"), [(float(q), c) for c in ("minimal", "conformal4") for q in vals]
    raise ValueError(f"figure number must be 1..7, got {n}")


def _logdet(spec, coupling):
    r = zprime0(spec, coupling)
    return -r.value, r.abs_error_estimate


def _point(n, p):
    if n == 1:
        return _logdet(LensSpec(p[0]), Coupling(p[1]))
    if n == 2:
        return _logdet(LensSpec(p[0]), Coupling.mass(p[1]))
    if n == 3:
        r = zprime0(LensSpec(p[0], p[1]), Coupling.conformal3())
        return r.value, r.abs_error_estimate
    if n in (4, 5):
        spec = LensSpec(p[0], p[1] if n == 5 else 0)
        t = thermodynamics(spec, ThermoState(1.0 / p[-1], field_factor=2))
        return t["F"], t["error"]
    if n == 6:
        return _logdet(GeneralLensSpec(p[0], 1, p[1]), Coupling.conformal4())
    if n == 7:
        if p[1] == "minimal":
            r = minimal_logdet(LensSpec(p[0]))
        else:
            r = zprime0(LensSpec(p[0]), Coupling.conformal4())
        return r.value, r.abs_error_estimate
    raise ValueError(n)


FIGURES = {
    1: "logdet vs q (alpha^2 = 0 and 1/4)",
    2: "logdet vs mu",
    3: "Z'(0) (effective action, real scalar) vs twist, conformal in three",
    4: "complex-field free energy vs temperature",
    5: "complex-field free energy vs temperature, twisted q=4",
    6: "logdet on L(29;1,nu), conformal in four",
    7: "Zbar'(0) minimal and Z'(0) conformal-in-four vs q",
}


def _evaluate(args):
    return _point(*args)


def figure_rows(n: int, main=None, qs=None, jobs: int = 1) -> tuple:
    """(header, rows) with each row = grid values + (value, error)."""
    cols, pts = grid(n, main, qs)
    tasks = [(n, p) for p in pts]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            vals = list(ex.map(_evaluate, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        vals = [_evaluate(t) for t in tasks]
    rows = [tuple(p) + tuple(v) for p, v in zip(pts, vals)]
    return cols + ("value", "error"), rows
