"""Command line: ``lensdet det``, ``lensdet figure`` and ``lensdet verify``.

Exit status is 0 on success, 1 when a computation does not converge or a
verification criterion fails, and 2 on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

from . import figures, polyhedral, verify
from .contour import QuadratureError, default_line
from .detcore import CONVENTION, Coupling, minimal_logdet, zprime0
from .kernels import GeneralLensSpec, HigherLensSpec, LensSpec, PoleProximityError
from .thermo import SlowConvergenceError

SCHEMA_VERSION = 1


class UsageError(ValueError):
    pass


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_common(p):
    g = p.add_argument_group("quotient")
    g.add_argument("--q", type=float, help="cyclic order (non-integer allowed for homogeneous kernels)")
    g.add_argument("--twist", type=float, default=0.0, help="U(1) twist r, 0 <= r < q")
    g.add_argument("--nu", type=_int_list, help="rotation labels, e.g. 1,7 (or e of them)")
    g.add_argument("--e", type=int, help="half-dimension of the sphere S^(2e-1)")
    g.add_argument("--poly", choices=["T", "O", "I"], help="binary polyhedral group")
    g.add_argument("--rep", help="representation, e.g. 1, 2s, 2sp, 3p, 1+2s")
    c = p.add_mutually_exclusive_group()
    c.add_argument("--coupling", choices=["conformal3", "conformal4", "minimal"])
    c.add_argument("--alpha2", type=float, help="eigenvalue shift alpha^2")
    c.add_argument("--mass", type=float, help="mass parameter mu, alpha^2 = 1/4 - mu^2")
    p.add_argument("--field", choices=["real", "complex"], default="real")
    t = p.add_argument_group("quadrature")
    t.add_argument("--delta", type=float, help="contour offset")
    t.add_argument("--abs-tol", type=float)
    t.add_argument("--rel-tol", type=float)
    o = p.add_argument_group("output")
    o.add_argument("--format", choices=["json", "csv"], default="json")
    o.add_argument("--out", help="write to this file instead of stdout")
    o.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lensdet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    det = sub.add_parser("det", help="log-determinant of one quotient, or a sweep")
    _add_common(det)
    det.add_argument("--quantity", choices=["logdet", "det", "zprime0"], default="logdet",
                     help="what the 'value' field holds")
    det.add_argument("--sweep", help="q=a:b:step, twist=a:b:step or nu=a:b; emits CSV")

    fig = sub.add_parser("figure", help="emit the data grid of figure N as CSV")
    fig.add_argument("n", type=int, choices=range(1, 8), metavar="N")
    fig.add_argument("--grid", help="override the swept variable, a:b:step")
    fig.add_argument("--qs", type=_int_list, help="override the lens orders, e.g. 1,2,3")
    fig.add_argument("--out")
    fig.add_argument("--jobs", type=int, default=1)

    ver = sub.add_parser("verify", help="run the acceptance criteria")
    _add_common(ver)
    ver.add_argument("--only", action="append", help="criterion id, e.g. A3 (repeatable)")
    return parser


def _coupling(args) -> Coupling:
    if args.alpha2 is not None:
        return Coupling(args.alpha2)
    if args.mass is not None:
        return Coupling.mass(args.mass)
    return getattr(Coupling, args.coupling or "conformal4")()


def _spec(args, q=None, twist=None, nu=None):
    q = args.q if q is None else q
    twist = args.twist if twist is None else twist
    nu = args.nu if nu is None else nu
    if q is None:
        raise UsageError("--q is required unless --poly is given")
    if nu is not None or args.e is not None:
        if q != int(q):
            raise UsageError("--nu/--e need an integer --q")
        if twist:
            raise UsageError("--twist applies to homogeneous lens spaces only")
        e = args.e or (len(nu) if nu is not None else 2)
        labels = tuple(nu) if nu is not None else (1,) * e
        if len(labels) == 1:
            labels = (1, labels[0])
        if len(labels) != e:
            raise UsageError(f"--nu has {len(labels)} entries but --e is {e}")
        if e == 2:
            return GeneralLensSpec(int(q), *labels)
        return HigherLensSpec(int(q), labels)
    return LensSpec(q, twist % q if twist >= q else twist)


def _line_overrides(args):
    return {"delta": args.delta, "abs_tol": args.abs_tol, "rel_tol": args.rel_tol}


def _compute(args, q=None, twist=None, nu=None) -> dict:
    """One determinant as a JSON-ready record (real-scalar core, field factor applied here)."""
    coupling = _coupling(args)
    ff = 2 if args.field == "complex" else 1
    if args.poly:
        if args.rep is None:
            raise UsageError("--poly needs --rep")
        if coupling.alpha_sq >= 1:
            raise UsageError("minimal coupling is only available for untwisted lens spaces")

        def line_for(spec):
            return default_line(spec, coupling, **_line_overrides(args))

        res = polyhedral.evaluate(args.poly, args.rep, "zprime0", coupling, line_for=line_for)
        quantity = "zprime0"
    elif coupling.alpha_sq == 1:
        spec = _spec(args, q, twist, nu)
        if not isinstance(spec, LensSpec) or spec.r != 0:
            raise UsageError("minimal coupling needs an untwisted homogeneous lens space")
        tol = {k: v for k, v in (("abs_tol", args.abs_tol), ("rel_tol", args.rel_tol)) if v is not None}
        res = minimal_logdet(spec, **tol)
        quantity = "zbar_prime0"
    else:
        spec = _spec(args, q, twist, nu)
        if coupling.alpha_sq > 1:
            raise UsageError("alpha^2 > 1 has negative modes")
        line = default_line(spec, coupling, **_line_overrides(args))
        if line.delta >= _gap(spec):
            raise UsageError("--delta must be below the kernel pole gap")
        res = zprime0(spec, coupling, line)
        quantity = "zprime0"
    zp = ff * res.value
    err = ff * res.abs_error_estimate
    record = {
        "schema_version": SCHEMA_VERSION,
        "convention": dict(CONVENTION, field=f"{args.field}-scalar"),
        "quantity": quantity,
        "zprime0": zp,
        "logdet": -zp,
        "det": math.exp(-zp),
        "abs_error_estimate": err,
    }
    record.update({k: v for k, v in res.to_dict().items()
                   if k not in ("value", "abs_error_estimate", "convention", "quantity")})
    choice = getattr(args, "quantity", "logdet")
    record["value"] = record[choice]
    record["value_error"] = err * record["det"] if choice == "det" else err
    return record


def _gap(spec):
    from .kernels import pole_gap

    return pole_gap(spec)


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.12e}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _sweep_point(payload):
    args, key, v = payload
    kw = {"q": v} if key == "q" else {"twist": v} if key == "twist" else {"nu": (1, int(v))}
    rec = _compute(args, **kw)
    return rec["value"], rec["value_error"]


def _sweep(args):
    key, _, rng = args.sweep.partition("=")
    key = key.strip()
    if key not in ("q", "twist", "nu") or not rng:
        raise UsageError("--sweep takes q=a:b:step, twist=a:b:step or nu=a:b")
    if args.poly:
        raise UsageError("--sweep does not apply to polyhedral quotients")
    values = [float(v) for v in figures.parse_range(rng)]
    if key == "nu":
        values = [v for v in values if math.gcd(int(v), int(args.q or 0)) == 1]
    tasks = [(args, key, v) for v in values]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            out = list(ex.map(_sweep_point, tasks))
    else:
        out = [_sweep_point(t) for t in tasks]
    rows = [(v, float(a), float(b)) for v, (a, b) in zip(values, out)]
    return _csv(("param", "value", "error"), rows)


def cmd_det(args) -> int:
    if args.sweep:
        _emit(_sweep(args), args.out)
        return 0
    rec = _compute(args)
    if args.format == "csv":
        text = _csv(("quantity", "value", "error"), [(args.quantity, float(rec["value"]),
                                                      float(rec["value_error"]))])
    else:
        text = json.dumps(rec, indent=2) + "\n"
    _emit(text, args.out)
    return 0


def cmd_figure(args) -> int:
    main = figures.parse_range(args.grid) if args.grid else None
    header, rows = figures.figure_rows(args.n, main, args.qs, jobs=args.jobs)
    rows = [tuple(float(v) if not isinstance(v, str) else v for v in r) for r in rows]
    _emit(_csv(header, rows), args.out)
    return 0


def cmd_verify(args) -> int:
    if args.field == "complex":
        raise UsageError("verify fixes its own field conventions; --field complex is not allowed")
    only = None
    if args.only:
        only = [c.strip() for item in args.only for c in item.split(",") if c.strip()]
    try:
        results = verify.run(only)
    except KeyError as exc:
        raise UsageError(str(exc))
    if args.format == "csv":
        text = _csv(("id", "passed", "detail"), [(r.id, r.passed, r.detail) for r in results])
    else:
        payload = {"schema_version": SCHEMA_VERSION, "convention": dict(CONVENTION),
                   "all_passed": all(r.passed for r in results),
                   "criteria": [r.to_dict() for r in results]}
        text = json.dumps(payload, indent=2, default=str) + "\n"
    _emit(text, args.out)
    for line in verify.report_lines(results):
        print(line, file=sys.stderr)
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"det": cmd_det, "figure": cmd_figure, "verify": cmd_verify}[args.command]
    try:
        return handler(args)
    except (QuadratureError, SlowConvergenceError) as exc:
        print(f"lensdet: not converged: {exc}", file=sys.stderr)
        return 1
    except (UsageError, PoleProximityError, ValueError, TypeError) as exc:
        print(f"lensdet: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
