"""Command-line interface: one subcommand per laboratory activity.

    thetalab theta --t 0 --order 1
    thetalab transform --kernel theta --x 28.27
    thetalab zeros --kernel theta --range 0,60 --grid 1500
    thetalab laguerre --kernel theta --n 1 --range 0,4 --grid 41
    thetalab assoc --kernel gausspoly:15,0,1,0,1 --n 1 --t-range 0,3 --grid 25
    thetalab pd --kernel gausspoly:15,0,1,0,1 --n 2 --method transform --xmax 20
    thetalab moments --kernel theta --kmax 20 --digits 40
    thetalab example312
    thetalab probe open47 --range 0,100 --grid 2000
    thetalab selftest

Every subcommand honors --digits, --tol and --jobs; reports are written as
JSON (and CSV where there is grid data) under --out.  Identical argument
vectors produce byte-identical reports: numbers are rendered at a fixed
digit count and nothing time- or host-dependent is emitted.

Exit codes: 0 success, 1 usage error, 2 precision failure (a margin was
required but the error bounds swallowed it).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional

import mpmath
from mpmath import mp, mpf

from . import assoc, kernels, laguerre, moments, theta, transform
from .errors import (DomainViolation, InvalidDecayBound, NonConvergence,
                     PrecisionExhausted, PrecisionLoss, TailDominated,
                     ThetaLabError, UsageError)
from .numerics import (EstimatedValue, ExplicitRadius, QuadratureConfig,
                       to_mpf, working_dps)
from .parallel import parallel_map
from .reports import ev_payload, fmt, write_csv, write_json, zero_report_payload

PROBE_TARGETS = ("open47", "open413", "open414", "open410", "open411", "heatflow")

_PRECISION_ERRORS = (PrecisionLoss, PrecisionExhausted, NonConvergence,
                     TailDominated, InvalidDecayBound, DomainViolation)


@dataclass(frozen=True)
class RunConfig:
    precision_digits: int = 30
    rel_tol: Optional[float] = None
    abs_tol: Optional[float] = None
    max_panels: int = 4000
    parallelism: int = 1
    output_dir: str = "reports"
    output_formats: tuple = ("json", "csv")

    def __post_init__(self):
        if self.parallelism < 1:
            raise UsageError("parallelism must be >= 1")
        if (self.rel_tol is not None and self.rel_tol <= 0) or \
                (self.abs_tol is not None and self.abs_tol <= 0):
            raise UsageError("tolerances must be positive")

    def quad(self) -> QuadratureConfig:
        d = self.precision_digits
        return QuadratureConfig(
            rel_tol=self.rel_tol if self.rel_tol is not None else 10.0 ** (-(d - 10)),
            abs_tol=self.abs_tol if self.abs_tol is not None else 10.0 ** (-(d - 6)),
            max_panels=self.max_panels,
            truncation_policy=ExplicitRadius(16.0),
            precision_digits=d)

    def payload(self) -> dict:
        q = self.quad()
        return {
            "precision_digits": self.precision_digits,
            "rel_tol": fmt(to_mpf(q.rel_tol), 3),
            "abs_tol": fmt(to_mpf(q.abs_tol), 3),
            "max_panels": self.max_panels,
            "parallelism": self.parallelism,
        }


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------

def _common_flags(p: argparse.ArgumentParser):
    p.add_argument("--digits", type=int, default=None,
                   help="working precision in significant digits (default 30)")
    p.add_argument("--tol", type=float, default=None,
                   help="absolute quadrature tolerance (default 1e-(digits-6))")
    p.add_argument("--rel-tol", type=float, default=None,
                   help="relative quadrature tolerance (default 1e-(digits-10))")
    p.add_argument("--max-panels", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes for grid scans (default 1)")
    p.add_argument("--out", type=str, default=None,
                   help="report directory (default ./reports)")
    p.add_argument("--format", type=str, default=None,
                   help="comma list of output formats: json,csv")
    p.add_argument("--config", type=str, default=None,
                   help="JSON config file (env THETALAB_CONFIG)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _common_flags(common)

    p = argparse.ArgumentParser(
        prog="thetalab",
        description="numerical laboratory for even positive kernels, cosine "
                    "transforms, Laguerre expressions and Turan inequalities")
    sub = p.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("theta", parents=[common],
                        help="evaluate the theta kernel or a derivative")
    sp.add_argument("--t", type=str, required=True)
    sp.add_argument("--order", type=int, default=0)

    sp = sub.add_parser("transform", parents=[common],
                        help="cosine transform of a kernel at a point")
    sp.add_argument("--kernel", type=str, required=True)
    sp.add_argument("--x", type=str, required=True)
    sp.add_argument("--order", type=int, default=0)
    sp.add_argument("--lambda", dest="heat_lambda", type=str, default="0")
    sp.add_argument("--m", type=int, default=0)

    sp = sub.add_parser("zeros", parents=[common],
                        help="real-zero scan of a transform")
    sp.add_argument("--kernel", type=str, required=True)
    sp.add_argument("--range", type=str, default="0,60")
    sp.add_argument("--grid", type=int, default=1500)
    sp.add_argument("--lambda", dest="heat_lambda", type=str, default="0")
    sp.add_argument("--m", type=int, default=0)

    sp = sub.add_parser("laguerre", parents=[common],
                        help="Laguerre expression profile over a grid")
    sp.add_argument("--kernel", type=str, required=True)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--range", type=str, default="0,4")
    sp.add_argument("--grid", type=int, default=41)
    sp.add_argument("--route", type=str, default="deriv",
                    choices=("deriv", "kernel"))

    sp = sub.add_parser("assoc", parents=[common],
                        help="associated kernel values and admissibility")
    sp.add_argument("--kernel", type=str, required=True)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--t-range", dest="t_range", type=str, default="0,3")
    sp.add_argument("--grid", type=int, default=25)
    sp.add_argument("--m", type=int, default=0,
                    help="separation weight exponent")

    sp = sub.add_parser("pd", parents=[common],
                        help="positive definiteness evidence checks")
    sp.add_argument("--kernel", type=str, required=True)
    sp.add_argument("--n", type=int, default=None,
                    help="check the associated kernel of this order")
    sp.add_argument("--method", type=str, required=True,
                    choices=("transform", "gram", "sine"))
    sp.add_argument("--xmax", type=str, default="20")
    sp.add_argument("--grid", type=int, default=400)
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--x", type=str, default="1",
                    help="frequency for the sine method")
    sp.add_argument("--points", type=int, default=48,
                    help="Gram matrix size")

    sp = sub.add_parser("moments", parents=[common],
                        help="moment table and Turan margins")
    sp.add_argument("--kernel", type=str, default="theta")
    sp.add_argument("--kmax", type=int, default=20)

    sub.add_parser("example312", parents=[common],
                   help="run the worked Gaussian-polynomial example pipeline")

    sp = sub.add_parser("probe", parents=[common],
                        help="desk-scale probes of the open questions")
    sp.add_argument("target", type=str, choices=PROBE_TARGETS)
    sp.add_argument("--range", type=str, default=None)
    sp.add_argument("--grid", type=int, default=None)
    sp.add_argument("--lambda", dest="heat_lambda", type=str, default=None)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--nmax", type=int, default=None)

    sub.add_parser("selftest", parents=[common],
                   help="run the deterministic invariant battery")
    return p


def _load_config(args) -> RunConfig:
    file_values = {}
    path = args.config or os.environ.get("THETALAB_CONFIG")
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            file_values = json.load(fh)
    def pick(name, flag, default):
        if flag is not None:
            return flag
        if name in file_values:
            return file_values[name]
        return default
    formats = pick("output_formats", args.format, "json,csv")
    if isinstance(formats, str):
        formats = tuple(s.strip() for s in formats.split(",") if s.strip())
    return RunConfig(
        precision_digits=int(pick("precision_digits", args.digits, 30)),
        rel_tol=pick("rel_tol", args.rel_tol, None),
        abs_tol=pick("abs_tol", args.tol, None),
        max_panels=int(pick("max_panels", args.max_panels, 4000)),
        parallelism=int(pick("parallelism", args.jobs, 1)),
        output_dir=str(pick("output_dir", args.out, "reports")),
        output_formats=tuple(formats))


def _parse_range(text: str) -> tuple:
    try:
        a, b = text.split(",")
        return mpf(a), mpf(b)
    except Exception as exc:
        raise UsageError("bad range %r (expected a,b)" % text) from exc


def _emit(rc: RunConfig, name: str, payload: dict,
          csv: Optional[tuple] = None) -> None:
    if "json" in rc.output_formats:
        write_json(os.path.join(rc.output_dir, name + ".json"), payload)
    if csv is not None and "csv" in rc.output_formats:
        header, rows = csv
        write_csv(os.path.join(rc.output_dir, name + ".csv"), header, rows)


def _grid_csv(points, values, digits) -> tuple:
    rows = []
    for x, v in zip(points, values):
        rows.append((fmt(x, digits), fmt(v.value, digits),
                     fmt(v.value - v.abs_error_bound, digits),
                     fmt(v.value + v.abs_error_bound, digits)))
    return ("x", "value", "lower", "upper"), rows


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def cmd_theta(args, rc: RunConfig) -> int:
    d = rc.precision_digits
    ev = theta.theta_eval(mpf(args.t), args.order, d)
    payload = {
        "subcommand": "theta",
        "config": rc.payload(),
        "inputs": {"t": args.t, "order": args.order},
        "results": {"derivative": ev_payload(ev, d)},
    }
    _emit(rc, "theta", payload)
    print("theta order=%d at t=%s: %s (bound %s)"
          % (args.order, args.t, fmt(ev.value, d), fmt(ev.abs_error_bound, 4)))
    return 0


def _spec_from_args(args) -> transform.TransformSpec:
    kernel = kernels.parse_kernel(args.kernel)
    return transform.make_spec(kernel, getattr(args, "heat_lambda", "0") or "0",
                               getattr(args, "m", 0))


def cmd_transform(args, rc: RunConfig) -> int:
    d = rc.precision_digits
    spec = _spec_from_args(args)
    ev = transform.transform_eval(spec, mpf(args.x), args.order, rc.quad())
    payload = {
        "subcommand": "transform",
        "config": rc.payload(),
        "inputs": {"kernel": spec.label(), "x": args.x, "order": args.order},
        "results": {"transform": ev_payload(ev, d)},
    }
    _emit(rc, "transform", payload)
    print("transform[%s] order=%d at x=%s: %s (bound %s)"
          % (spec.label(), args.order, args.x, fmt(ev.value, d),
             fmt(ev.abs_error_bound, 4)))
    return 0


def cmd_zeros(args, rc: RunConfig) -> int:
    d = rc.precision_digits
    spec = _spec_from_args(args)
    interval = _parse_range(args.range)
    rep = transform.real_zero_scan(spec, interval, args.grid, rc.quad())
    payload = {
        "subcommand": "zeros",
        "config": rc.payload(),
        "inputs": {"kernel": spec.label(), "range": args.range, "grid": args.grid},
        "results": zero_report_payload(rep, d),
    }
    rows = [(fmt(z.refined, d), fmt(z.bracket[0], d), fmt(z.bracket[1], d),
             z.simple) for z in rep.zeros]
    _emit(rc, "zeros", payload, (("refined", "bracket_lo", "bracket_hi", "simple"), rows))
    print("zeros[%s] on %s: %d sign changes, all simple: %s"
          % (spec.label(), args.range, rep.sign_change_count,
             all(z.simple for z in rep.zeros)))
    return 0


def cmd_laguerre(args, rc: RunConfig) -> int:
    d = rc.precision_digits
    kernel = kernels.parse_kernel(args.kernel)
    spec = transform.make_spec(kernel)
    route = "derivative" if args.route == "deriv" else "kernel"
    prof = laguerre.laguerre_profile(spec, args.n, _parse_range(args.range),
                                     args.grid, route, rc.quad())
    payload = {
        "subcommand": "laguerre",
        "config": rc.payload(),
        "inputs": {"kernel": spec.label(), "n": args.n, "route": route,
                   "range": args.range, "grid": args.grid},
        "results": {
            "min_value": fmt(prof.min_value, d),
            "argmin": fmt(prof.argmin, d),
            "min_margin": fmt(prof.min_margin(), d),
        },
    }
    _emit(rc, "laguerre", payload, _grid_csv(prof.grid, prof.values, d))
    print("laguerre n=%d route=%s: min %s at x=%s"
          % (args.n, route, fmt(prof.min_value, 8), fmt(prof.argmin, 8)))
    return 0


def cmd_assoc(args, rc: RunConfig) -> int:
    d = rc.precision_digits
    kernel = kernels.parse_kernel(args.kernel)
    cfg = rc.quad()
    a, b = _parse_range(args.t_range)
    pts = [a + (b - a) * i / (args.grid - 1) for i in range(args.grid)]
    values = [assoc.assoc_kernel_eval(kernel, args.n, t, cfg, args.m)
              for t in pts]
    report, spots = assoc.assoc_admissibility(kernel, args.n, b, min(args.grid, 24), cfg)
    payload = {
        "subcommand": "assoc",
        "config": rc.payload(),
        "inputs": {"kernel": kernel.label, "n": args.n, "t_range": args.t_range,
                   "grid": args.grid, "weight_m": args.m},
        "results": {
            "admissibility": _admissibility_payload(report, d),
            "log_slope_inequality_spots": [
                {"t": fmt(s["t"], 6), "s": fmt(s["s"], 6),
                 "holds_certified": s["holds_certified"]} for s in spots
            ],
        },
    }
    _emit(rc, "assoc", payload, _grid_csv(pts, values, d))
    print("assoc n=%d of %s: positivity=%s monotone=%s decay=%s"
          % (args.n, kernel.label, report.positivity.passed,
             report.monotone_decreasing.passed, report.decay_condition.status))
    return 0


def _admissibility_payload(rep: kernels.AdmissibilityReport, d: int) -> dict:
    def clause(c):
        out = {"passed": c.passed}
        if not c.passed:
            out["witness_t"] = fmt(c.witness_t, d)
            out["witness_value"] = fmt(c.witness_value, d)
        return out
    return {
        "kernel": rep.kernel,
        "positivity": clause(rep.positivity),
        "evenness": clause(rep.evenness),
        "monotone_decreasing": clause(rep.monotone_decreasing),
        "smoothness_probe": fmt(rep.smoothness_probe, 4),
        "decay_condition": {
            "status": rep.decay_condition.status,
            "fitted_exponent": fmt(rep.decay_condition.fitted_exponent, 6),
            "window": [fmt(w, 6) for w in rep.decay_condition.window],
        },
        "grid": rep.grid,
    }


def _pd_payload(rep: assoc.PDReport, d: int) -> dict:
    out = {
        "method": rep.method,
        "kernel": rep.kernel,
        "verdict": rep.verdict,
        "x_max": fmt(rep.x_max, 8),
        "n_grid": rep.n_grid,
        "min_value": ev_payload(rep.min_value, d),
        "argmin": fmt(rep.argmin, d),
        "min_certified_positive": rep.min_certified_positive,
        "tail_note": rep.tail_note,
    }
    if rep.witness_x is not None:
        out["witness_x"] = fmt(rep.witness_x, d)
        out["witness_value"] = ev_payload(rep.witness_value, d)
    return out


def cmd_pd(args, rc: RunConfig) -> int:
    d = rc.precision_digits
    kernel = kernels.parse_kernel(args.kernel)
    cfg = rc.quad()
    x_max = mpf(args.xmax)
    if args.method == "transform":
        n = args.n if args.n is not None else 0
        rep = assoc.pd_check_transform(kernel, n, x_max, args.grid, cfg, args.m)
        payload = {
            "subcommand": "pd",
            "config": rc.payload(),
            "inputs": {"kernel": kernel.label, "n": n, "method": "transform",
                       "x_max": args.xmax, "grid": args.grid, "weight_m": args.m},
            "results": _pd_payload(rep, d),
        }
        _emit(rc, "pd", payload)
        print("pd transform n=%d: %s" % (n, rep.verdict))
        return 2 if rep.verdict == "inconclusive" else 0
    if args.method == "gram":
        if args.n is not None:
            table = assoc.kernel_value_table(kernel, (args.n,), cfg, args.m)[args.n]
            k_func = lambda u: float(table.interpolate(u).value)
            label = "assoc[n=%d]%s" % (args.n, kernel.label)
        else:
            k_func = lambda u: float(kernels.kernel_value_fast(kernel, mpf(u), d))
            label = kernel.label
        pts = [float(x_max) * i / (args.points - 1) for i in range(args.points)]
        rep = assoc.pd_check_gram(k_func, pts)
        payload = {
            "subcommand": "pd",
            "config": rc.payload(),
            "inputs": {"kernel": label, "method": "gram", "points": args.points,
                       "span": args.xmax},
            "results": {"min_eigenvalue": repr(rep.min_eigenvalue),
                        "matrix_dim": rep.matrix_dim},
        }
        _emit(rc, "pd", payload)
        print("pd gram [%s]: min eigenvalue %.3e (dim %d)"
              % (label, rep.min_eigenvalue, rep.matrix_dim))
        return 0
    rep = assoc.sine_criterion(kernel, mpf(args.x), cfg)
    payload = {
        "subcommand": "pd",
        "config": rc.payload(),
        "inputs": {"kernel": kernel.label, "method": "sine", "x": args.x},
        "results": {
            "lhs_sine_integral": ev_payload(rep.lhs, d),
            "A": ev_payload(rep.a_value, d),
            "cosine_direct": ev_payload(rep.cosine_direct, d),
            "identity_residual": fmt(rep.identity_residual, 6),
            "identity_within_bounds": rep.identity_within_bounds,
            "printed_form_holds": rep.printed_form_holds,
            "derivation_form_holds": rep.derivation_form_holds,
        },
    }
    _emit(rc, "pd", payload)
    print("pd sine at x=%s: identity residual %s (within bounds: %s)"
          % (args.x, fmt(rep.identity_residual, 4), rep.identity_within_bounds))
    return 0 if rep.identity_within_bounds else 2


def cmd_moments(args, rc: RunConfig) -> int:
    d = rc.precision_digits
    kernel = kernels.parse_kernel(args.kernel)
    table = moments.moment_table(kernel, args.kmax, d)
    margins = moments.turan_margin_report(table)
    rows = []
    for row in table.rows:
        rows.append((
            row.k, fmt(row.b.value, d), fmt(row.b.abs_error_bound, 4),
            fmt(row.gamma.value, d),
            fmt(row.turan.value, d) if row.turan else "",
            fmt(row.turan.abs_error_bound, 4) if row.turan else "",
            fmt(row.double_turan.value, d) if row.double_turan else "",
            fmt(row.double_turan.abs_error_bound, 4) if row.double_turan else "",
        ))
    payload = {
        "subcommand": "moments",
        "config": rc.payload(),
        "inputs": {"kernel": kernel.label, "k_max": args.kmax},
        "results": {
            "min_turan_margin": fmt(margins.min_turan_margin, 8),
            "argmin_turan": margins.argmin_turan,
            "min_double_turan_margin": fmt(margins.min_double_margin, 8)
            if margins.min_double_margin is not None else None,
            "argmin_double_turan": margins.argmin_double,
            "first_uncertified_k": margins.first_uncertified_k,
            "classical_sign_agreement": margins.classical_sign_agreement,
        },
    }
    _emit(rc, "moments", payload,
          (("k", "b", "b_bound", "gamma", "turan", "turan_bound",
            "double_turan", "double_turan_bound"), rows))
    print("moments k_max=%d: min Turan margin %s at k=%d%s"
          % (args.kmax, fmt(margins.min_turan_margin, 4), margins.argmin_turan,
             "" if margins.first_uncertified_k is None
             else "; first uncertified k=%d" % margins.first_uncertified_k))
    return 0 if margins.first_uncertified_k is None else 2


def cmd_example312(args, rc: RunConfig) -> int:
    """Full pipeline of the worked Gaussian-polynomial example.

    The kernel exp(-t^2)(15+t^2+t^4) has a strictly positive transform, its
    first associated kernel passes every positivity scan and its second has a
    certified negative transform value, so positive definiteness is lost
    between the two; the shapes of all three transforms are pinned against
    the known closed-form polynomials.
    """
    d = rc.precision_digits
    cfg = rc.quad()
    kernel = kernels.gaussian_poly([15, 0, 1, 0, 1])
    spec = transform.make_spec(kernel)
    with working_dps(d):
        f0 = transform.transform_eval(spec, 0, 0, cfg)
        scale = f0.value / 260
        fit = []
        worst = mpf(0)
        for xs in ("0.5", "1", "2", "5", "8"):
            x = mpf(xs)
            predicted = scale * mpmath.exp(-x * x / 4) * (260 - 16 * x ** 2 + x ** 4)
            got = transform.transform_eval(spec, x, 0, cfg)
            rel = abs(got.value / predicted - 1)
            worst = max(worst, rel)
            fit.append({"x": xs, "relative_residual": fmt(rel, 4)})
        assoc.prepare_scan_nodes(kernel, (1, 2), 24, cfg)
        k1 = assoc.pd_check_transform(kernel, 1, 20, 400, cfg)
        k2 = assoc.pd_check_transform(kernel, 2, 20, 400, cfg)
        zr = assoc.assoc_real_zero_scan(kernel, 2, (0, 20), 500, cfg)
    ok = (worst < mpf("1e-8")
          and k1.verdict == "no_negativity_found" and k1.min_certified_positive
          and k2.verdict == "negativity_witness"
          and zr.sign_change_count == 2
          and all(z.simple for z in zr.zeros))
    payload = {
        "subcommand": "example312",
        "config": rc.payload(),
        "inputs": {"kernel": kernel.label},
        "results": {
            "transform_shape_fit": fit,
            "transform_shape_worst_residual": fmt(worst, 4),
            "assoc_1": _pd_payload(k1, d),
            "assoc_2": _pd_payload(k2, d),
            "assoc_2_zeros": zero_report_payload(zr, d),
            "expected_outcomes_hold": ok,
        },
    }
    _emit(rc, "example312", payload)
    print("example312: shape residual %s; assoc-1 %s; assoc-2 %s with %d "
          "simple positive transform zeros; expected outcomes hold: %s"
          % (fmt(worst, 3), k1.verdict, k2.verdict, zr.sign_change_count, ok))
    return 0 if ok else 2


# ---------------------------------------------------------------------------
# Probes
# ---------------------------------------------------------------------------

def _laguerre_margin_rows(rng, grid, digits, cfg):
    spec = transform.make_spec(kernels.theta_kernel())
    table = transform.CosineScanTable.from_spec(spec, rng[1], cfg, orders=(0, 1, 2))
    a, b = rng
    out = []
    for i in range(grid):
        x = a + (b - a) * i / (grid - 1)
        evs = table.eval_orders(x)
        l1 = evs[1] * evs[1] - evs[0] * evs[2]
        out.append((x, l1))
    return out


def _open47_chunk(payload):
    a, b, grid, digits, rel_tol, abs_tol, max_panels = payload
    cfg = QuadratureConfig(rel_tol=rel_tol, abs_tol=abs_tol,
                           max_panels=max_panels, precision_digits=digits)
    return [(fmt(x, digits), fmt(v.value, digits),
             fmt(v.value - v.abs_error_bound, digits),
             fmt(v.value + v.abs_error_bound, digits),
             v.certainly_positive())
            for (x, v) in _laguerre_margin_rows((mpf(a), mpf(b)), grid, digits, cfg)]


def cmd_probe(args, rc: RunConfig) -> int:
    handler = {
        "open47": _probe_open47,
        "open413": _probe_open413,
        "open414": _probe_open414,
        "open410": _probe_open410,
        "open411": _probe_open411,
        "heatflow": _probe_heatflow,
    }[args.target]
    return handler(args, rc)


def _probe_open47(args, rc: RunConfig) -> int:
    """Positivity scan of the first Laguerre expression of the theta
    transform; certified positivity on the scanned window is recorded."""
    d = rc.precision_digits
    cfg = rc.quad()
    rng = _parse_range(args.range or "0,100")
    grid = args.grid or 2000
    jobs = rc.parallelism
    if jobs > 1:
        bounds = []
        step = (rng[1] - rng[0]) / jobs
        for i in range(jobs):
            a = rng[0] + step * i
            b = rng[0] + step * (i + 1)
            n = grid // jobs + (1 if i < grid % jobs else 0)
            bounds.append((str(a), str(b), n, d, cfg.rel_tol, cfg.abs_tol,
                           cfg.max_panels))
        chunks = parallel_map(_open47_chunk, bounds, jobs)
        rows = [r for chunk in chunks for r in chunk]
        all_pos = all(r[4] for r in rows)
        min_lower = min(mpf(r[2]) for r in rows)
        rows = [r[:4] for r in rows]
    else:
        pairs = _laguerre_margin_rows(rng, grid, d, cfg)
        rows = [(fmt(x, d), fmt(v.value, d),
                 fmt(v.value - v.abs_error_bound, d),
                 fmt(v.value + v.abs_error_bound, d)) for (x, v) in pairs]
        all_pos = all(v.certainly_positive() for (_, v) in pairs)
        min_lower = min(v.value - v.abs_error_bound for (_, v) in pairs)
    payload = {
        "subcommand": "probe",
        "target": "open47",
        "config": rc.payload(),
        "inputs": {"range": [fmt(rng[0], 8), fmt(rng[1], 8)], "grid": grid},
        "results": {
            "quantity": "first Laguerre expression of the theta-kernel transform",
            "positive_certified": all_pos,
            "min_lower_bound": fmt(min_lower, 8),
        },
    }
    _emit(rc, "probe_open47", payload, (("x", "value", "lower", "upper"), rows))
    print("probe open47 on [%s, %s], %d points: positivity certified: %s "
          "(min lower bound %s)" % (fmt(rng[0], 6), fmt(rng[1], 6), grid,
                                    all_pos, fmt(min_lower, 4)))
    return 0 if all_pos else 2


def _probe_report_payload(rep: theta.GridProbeReport, d: int) -> dict:
    return {
        "name": rep.name,
        "interval": [fmt(rep.interval[0], 8), fmt(rep.interval[1], 8)],
        "n_grid": rep.n_grid,
        "min_value": ev_payload(rep.min_value, d),
        "argmin": fmt(rep.argmin, d),
        "max_value": ev_payload(rep.max_value, d),
        "argmax": fmt(rep.argmax, d),
        "positive_certified": rep.positive_certified,
        "negative_certified": rep.negative_certified,
    }


def _probe_open413(args, rc: RunConfig) -> int:
    """Log-concavity of kernel derivatives: sign scan of the consecutive
    derivative differences; outcomes recorded with margins, never asserted."""
    d = rc.precision_digits
    rng = _parse_range(args.range or "0,2")
    grid = args.grid or 120
    n_max = args.nmax or 7
    reports = theta.derivative_log_concavity_probe(n_max, rng, grid, d)
    rows = []
    for n, rep in sorted(reports.items()):
        for t, v in zip(rep.points, rep.values):
            rows.append((n, fmt(t, d), fmt(v.value, d),
                         fmt(v.value - v.abs_error_bound, d),
                         fmt(v.value + v.abs_error_bound, d)))
    payload = {
        "subcommand": "probe",
        "target": "open413",
        "config": rc.payload(),
        "inputs": {"range": args.range or "0,2", "grid": grid, "n_max": n_max},
        "results": {str(n): _probe_report_payload(rep, d)
                    for n, rep in sorted(reports.items())},
    }
    _emit(rc, "probe_open413", payload,
          (("n", "t", "value", "lower", "upper"), rows))
    summary = ", ".join("n=%d:%s" % (n, "+" if rep.positive_certified else "?")
                        for n, rep in sorted(reports.items()))
    print("probe open413 margins: %s" % summary)
    return 0


def _probe_open414(args, rc: RunConfig) -> int:
    """Second log-derivative of the sqrt-argument Laguerre expression of the
    theta kernel; conjectured negative, recorded with margins."""
    d = rc.precision_digits
    rng = _parse_range(args.range or "0.1,4")
    grid = args.grid or 100
    rep = theta.sqrt_laguerre_logconcavity_probe(rng, grid, d)
    payload = {
        "subcommand": "probe",
        "target": "open414",
        "config": rc.payload(),
        "inputs": {"range": args.range or "0.1,4", "grid": grid},
        "results": _probe_report_payload(rep, d),
    }
    _emit(rc, "probe_open414", payload, _grid_csv(rep.points, rep.values, d))
    print("probe open414: min %s max %s negative certified: %s"
          % (fmt(rep.min_value.value, 6), fmt(rep.max_value.value, 6),
             rep.negative_certified))
    return 0


def _probe_open410(args, rc: RunConfig) -> int:
    """Positive-definiteness scans of associated kernels of the shrunken
    (negative-exponent) heat deformation of the theta kernel."""
    d = rc.precision_digits
    cfg = rc.quad()
    lam = args.heat_lambda or "-0.05"
    if to_mpf(lam) >= 0:
        raise UsageError("this probe deforms with a negative exponent; "
                         "pass --lambda < 0")
    n_max = args.nmax if args.nmax is not None else 2
    kernel = kernels.modified_theta(lam, 0)
    rng = _parse_range(args.range or "0,24")
    grid = args.grid or 300
    assoc.prepare_scan_nodes(kernel, tuple(range(n_max + 1)), rng[1], cfg)
    results = {}
    verdicts = []
    for n in range(n_max + 1):
        rep = assoc.pd_check_transform(kernel, n, rng[1], grid, cfg)
        results[str(n)] = _pd_payload(rep, d)
        verdicts.append((n, rep.verdict))
    payload = {
        "subcommand": "probe",
        "target": "open410",
        "config": rc.payload(),
        "inputs": {"lambda": lam, "n_max": n_max, "x_max": fmt(rng[1], 8),
                   "grid": grid},
        "results": results,
    }
    _emit(rc, "probe_open410", payload)
    print("probe open410 (lambda=%s): %s"
          % (lam, ", ".join("n=%d:%s" % v for v in verdicts)))
    return 0


def _probe_open411(args, rc: RunConfig) -> int:
    """Positive-definiteness scan of the separation-weighted first
    associated kernel of the expanded (positive-exponent) deformation."""
    d = rc.precision_digits
    cfg = rc.quad()
    lam = args.heat_lambda or "0.1"
    kernel = kernels.modified_theta(lam, 0)
    rng = _parse_range(args.range or "0,24")
    grid = args.grid or 300
    rep = assoc.pd_check_transform(kernel, 1, rng[1], grid, cfg,
                                   weight_m=args.m)
    payload = {
        "subcommand": "probe",
        "target": "open411",
        "config": rc.payload(),
        "inputs": {"lambda": lam, "weight_m": args.m, "x_max": fmt(rng[1], 8),
                   "grid": grid},
        "results": _pd_payload(rep, d),
    }
    _emit(rc, "probe_open411", payload)
    print("probe open411 (lambda=%s, m=%d): %s" % (lam, args.m, rep.verdict))
    return 0


def _probe_heatflow(args, rc: RunConfig) -> int:
    """Backward-heat-equation residuals of the deformed transform and a
    zero-simplicity scan in the regime where reality of zeros is classical."""
    d = rc.precision_digits
    cfg = rc.quad()
    kernel = kernels.theta_kernel()
    residuals = []
    for (lam, x) in (("0.1", "0"), ("0.1", "5")):
        hr = transform.heat_equation_residual(kernel, lam, x, cfg)
        residuals.append({
            "lambda": lam, "x": x,
            "relative_residual": fmt(hr.relative_residual, 6),
        })
    lam = args.heat_lambda or "0.6"
    rng = _parse_range(args.range or "0,60")
    grid = args.grid or 1200
    spec = transform.make_spec(kernel, lam)
    zr = transform.real_zero_scan(spec, rng, grid, cfg)
    payload = {
        "subcommand": "probe",
        "target": "heatflow",
        "config": rc.payload(),
        "inputs": {"lambda": lam, "range": args.range or "0,60", "grid": grid},
        "results": {
            "backward_heat_residuals": residuals,
            "zero_scan": zero_report_payload(zr, d),
            "all_zeros_simple": all(z.simple for z in zr.zeros),
        },
    }
    _emit(rc, "probe_heatflow", payload)
    print("probe heatflow: residuals %s; lambda=%s zeros %d all simple %s"
          % (", ".join(r["relative_residual"] for r in residuals), lam,
             zr.sign_change_count, all(z.simple for z in zr.zeros)))
    return 0


# ---------------------------------------------------------------------------
# Self test
# ---------------------------------------------------------------------------

_PHI0_REFERENCE = "0.446696900467123444086984667055"
_H0_REFERENCE = "0.0621400972735392637390967174607"
_FIRST_ZERO_WINDOW = ("28.269450283", "28.269450284")


def cmd_selftest(args, rc: RunConfig) -> int:
    """Deterministic invariant battery; byte-identical output per config."""
    d = rc.precision_digits
    cfg = rc.quad()
    checks = []

    def check(name, passed, margin):
        checks.append({"name": name, "passed": bool(passed),
                       "margin": fmt(margin, 6)})

    with working_dps(d):
        from .numerics import integrate_half_line, finite_difference
        ev = integrate_half_line(lambda t: mpmath.exp(-t * t), cfg)
        gauss_exact = mpmath.sqrt(mp.pi) / 2
        check("quadrature_gaussian", abs(ev.value - gauss_exact) < mpf("1e-12"),
              abs(ev.value - gauss_exact))

        fd = finite_difference(mpmath.exp, 0, 1, precision_digits=d)
        check("finite_difference_exp", abs(fd.value - 1) < mpf("1e-9"),
              abs(fd.value - 1))

        phi0 = theta.theta_eval(0, 0, d)
        check("theta_value", abs(phi0.value - mpf(_PHI0_REFERENCE)) < mpf("1e-28"),
              abs(phi0.value - mpf(_PHI0_REFERENCE)))

        tb3 = theta.theta_tail_bound(0, 3)
        tb4 = theta.theta_tail_bound(0, 4)
        check("theta_tail_monotone", tb4 <= tb3, tb3 - tb4)

        d1 = theta.theta_eval(1, 1, d)
        check("theta_derivative_negative", d1.certainly_negative(),
              -(d1.value + d1.abs_error_bound))

        even_gap = abs(theta.raw_series_value(mpf("-0.25"))
                       - theta.raw_series_value(mpf("0.25")))
        check("theta_even_extension", even_gap < mpf("1e-25"), even_gap)

        spec = transform.make_spec(kernels.theta_kernel())
        h0 = transform.transform_eval(spec, 0, 0, cfg)
        check("transform_at_zero", abs(h0.value - mpf(_H0_REFERENCE)) < mpf("1e-25"),
              abs(h0.value - mpf(_H0_REFERENCE)))

        fpos = transform.transform_eval(spec, mpf("1.5"), 0, cfg)
        fneg = transform.transform_eval(spec, mpf("-1.5"), 0, cfg)
        check("transform_even", abs(fpos.value - fneg.value)
              <= fpos.abs_error_bound + fneg.abs_error_bound,
              abs(fpos.value - fneg.value))

        zr = transform.real_zero_scan(spec, (28, 29), 40, cfg)
        got = zr.zeros[0].refined if zr.zeros else mpf(0)
        in_window = (zr.sign_change_count == 1
                     and mpf(_FIRST_ZERO_WINDOW[0]) < got < mpf(_FIRST_ZERO_WINDOW[1])
                     and zr.zeros[0].simple)
        check("first_transform_zero", in_window,
              abs(got - mpf("28.2694502834")))

        ex = kernels.gaussian_poly([15, 0, 1, 0, 1])
        exspec = transform.make_spec(ex)
        f0 = transform.transform_eval(exspec, 0, 0, cfg)
        f1 = transform.transform_eval(exspec, 1, 0, cfg)
        predicted = f0.value / 260 * mpmath.exp(-mpf(1) / 4) * (260 - 16 + 1)
        check("gausspoly_shape", abs(f1.value / predicted - 1) < mpf("1e-8"),
              abs(f1.value / predicted - 1))

        fixture = laguerre.GaussPolyFunction([1, 0, 1])
        l1 = laguerre.laguerre_Ln_derivative_route(fixture, 1, 1, cfg)
        expected = 2 * mpmath.exp(-2) * 1 * (3 + 1)
        check("laguerre_fixture", abs(l1.value - expected) < mpf("1e-10"),
              abs(l1.value - expected))

        g1 = kernels.gaussian_poly([1])
        da = laguerre.laguerre_Ln_derivative_route(transform.make_spec(g1), 1, 1, cfg)
        ka = assoc.laguerre_kernel_route(g1, 1, 1, cfg)
        check("laguerre_route_agreement",
              abs(da.value / ka.value - 1) < mpf("1e-6"),
              abs(da.value / ka.value - 1))

        k0 = assoc.assoc_kernel_eval(g1, 0, 1, cfg)
        k0_exact = mpmath.sqrt(mp.pi / 2) * mpmath.exp(-2)
        check("autocorrelation_gaussian", abs(k0.value - k0_exact)
              <= k0.abs_error_bound, abs(k0.value - k0_exact))

        gram = assoc.pd_check_gram(lambda u: math.cos(u), [0.0, 1.0, 2.0, 3.0])
        check("gram_cosine", gram.min_eigenvalue >= -1e-12,
              mpf(repr(gram.min_eigenvalue)))

        table = moments.moment_table(kernels.theta_kernel(), 5, d)
        margins = moments.turan_margin_report(table)
        check("turan_margins_small", margins.first_uncertified_k is None
              and margins.min_turan_margin > 0, margins.min_turan_margin)

    all_pass = all(c["passed"] for c in checks)
    payload = {
        "subcommand": "selftest",
        "config": rc.payload(),
        "results": {"checks": checks, "all_passed": all_pass},
    }
    _emit(rc, "selftest", payload)
    for c in checks:
        print("%s %s (margin %s)" % ("PASS" if c["passed"] else "FAIL",
                                     c["name"], c["margin"]))
    print("selftest: %d/%d passed" % (sum(c["passed"] for c in checks),
                                      len(checks)))
    return 0 if all_pass else 2


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

_HANDLERS = {
    "theta": cmd_theta,
    "transform": cmd_transform,
    "zeros": cmd_zeros,
    "laguerre": cmd_laguerre,
    "assoc": cmd_assoc,
    "pd": cmd_pd,
    "moments": cmd_moments,
    "example312": cmd_example312,
    "probe": cmd_probe,
    "selftest": cmd_selftest,
}


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        rc = _load_config(args)
        return _HANDLERS[args.subcommand](args, rc)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except _PRECISION_ERRORS as exc:
        rc = None
        try:
            rc = _load_config(args)
        except Exception:
            pass
        payload = {
            "subcommand": args.subcommand,
            "error": {"code": exc.code, "message": str(exc)},
        }
        if rc is not None:
            write_json(os.path.join(rc.output_dir, args.subcommand + ".json"),
                       payload)
        print("precision failure [%s]: %s" % (exc.code, exc), file=sys.stderr)
        return 2
    except ThetaLabError as exc:
        print("error [%s]: %s" % (exc.code, exc), file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
