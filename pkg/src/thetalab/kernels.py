"""Kernel families: evaluation, derivatives, decay metadata, admissibility.

Four families are registered:

* ``gausspoly`` -- exp(-t^2) p(t) with p an even, strictly positive
  polynomial; derivatives are exact (polynomial recurrence), which makes this
  family the oracle for every numerical route.
* ``theta``     -- the Jacobi theta kernel (module :mod:`thetalab.theta`).
* ``modtheta``  -- t^(2m) exp(lam t^2) Phi(t), the heat-deformed variants.
* ``thetasqrt`` -- Phi(sqrt(|t|)), even extension; derivative data at 0 uses
  one-sided limits.

Kernels are addressable by CLI strings such as ``theta``,
``gausspoly:15,0,1,0,1`` (ascending coefficients), ``modtheta:lambda=0.1,m=1``
and ``thetasqrt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import mpmath
from mpmath import mp, mpf

from . import polyexp, theta
from .errors import PrecisionLoss, UnsupportedDerivativeOrder, UsageError
from .numerics import (EstimatedValue, Real, ev_div, finite_difference,
                       round_ulp, to_mpf, working_dps)

GAUSSPOLY = "gausspoly"
THETA = "theta"
MODTHETA = "modtheta"
THETASQRT = "thetasqrt"


@dataclass(frozen=True)
class KernelDescriptor:
    """Immutable symbolic description of an even positive kernel."""

    family: str
    coeffs: tuple = ()
    lam: str = "0"
    power: int = 0
    label: str = ""

    def __post_init__(self):
        if self.family not in (GAUSSPOLY, THETA, MODTHETA, THETASQRT):
            raise UsageError("unknown kernel family %r" % self.family)
        if self.family == GAUSSPOLY:
            if not self.coeffs:
                raise UsageError("gausspoly kernel needs polynomial coefficients")
            _validate_even_positive(self.coeffs)
        if self.power < 0:
            raise UsageError("power must be >= 0")
        if not self.label:
            object.__setattr__(self, "label", canonical_label(self))

    def key(self) -> tuple:
        return (self.family, self.coeffs, self.lam, self.power)


def canonical_label(k: KernelDescriptor) -> str:
    if k.family == GAUSSPOLY:
        return "gausspoly:" + ",".join(str(c) for c in k.coeffs)
    if k.family == MODTHETA:
        return "modtheta:lambda=%s,m=%d" % (k.lam, k.power)
    return k.family


def _validate_even_positive(coeffs: tuple):
    p = polyexp.poly(coeffs)
    if not polyexp.is_even_poly(p):
        raise UsageError("gausspoly polynomial must be even (odd coefficients zero)")
    if p[-1] <= 0:
        raise UsageError("gausspoly polynomial must have positive leading coefficient")
    bound = 1 + max(abs(c) for c in p) / abs(p[-1])
    for i in range(257):
        t = bound * i / 256
        if polyexp.p_eval(p, t) <= 0:
            raise UsageError("gausspoly polynomial must be strictly positive "
                             "(non-positive near t=%s)" % t)


# -- constructors ------------------------------------------------------------

def gaussian_poly(coeffs, label: str = "") -> KernelDescriptor:
    return KernelDescriptor(GAUSSPOLY, coeffs=tuple(str(c) for c in coeffs), label=label)


def theta_kernel() -> KernelDescriptor:
    return KernelDescriptor(THETA)


def modified_theta(lam: Real, power: int) -> KernelDescriptor:
    return KernelDescriptor(MODTHETA, lam=str(lam), power=int(power))


def theta_sqrt_arg() -> KernelDescriptor:
    return KernelDescriptor(THETASQRT)


def parse_kernel(text: str) -> KernelDescriptor:
    """Parse the CLI kernel syntax."""
    text = text.strip()
    if text == THETA:
        return theta_kernel()
    if text == THETASQRT:
        return theta_sqrt_arg()
    if text.startswith(GAUSSPOLY + ":"):
        body = text[len(GAUSSPOLY) + 1:]
        try:
            coeffs = [s.strip() for s in body.split(",") if s.strip()]
            [mpf(c) for c in coeffs]
        except Exception as exc:
            raise UsageError("bad gausspoly coefficients %r" % body) from exc
        return gaussian_poly(coeffs)
    if text.startswith(MODTHETA + ":"):
        lam, power = "0", 0
        for part in text[len(MODTHETA) + 1:].split(","):
            if not part.strip():
                continue
            key, _, val = part.partition("=")
            key = key.strip()
            if key == "lambda":
                lam = val.strip()
            elif key == "m":
                power = int(val)
            else:
                raise UsageError("unknown modtheta parameter %r" % key)
        try:
            mpf(lam)
        except Exception as exc:
            raise UsageError("bad modtheta lambda %r" % lam) from exc
        return modified_theta(lam, power)
    raise UsageError("cannot parse kernel %r (expected theta | thetasqrt | "
                     "gausspoly:c0,c1,... | modtheta:lambda=L,m=M)" % text)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

MAX_THETA_ORDER = theta.MAX_DERIV_ORDER


def kernel_eval(k: KernelDescriptor, t: Real, deriv_order: int = 0,
                precision_digits: int = 30) -> EstimatedValue:
    """Value of the deriv_order-th derivative of the kernel at t."""
    if deriv_order < 0:
        raise ValueError("deriv_order must be >= 0")
    with working_dps(precision_digits):
        t = to_mpf(t)
        if k.family == GAUSSPOLY:
            return _gausspoly_eval(k, t, deriv_order, precision_digits)
        if k.family == THETA:
            return theta.theta_eval(t, deriv_order, precision_digits)
        if k.family == MODTHETA:
            return _modtheta_eval(k, t, deriv_order, precision_digits)
        return _thetasqrt_eval(t, deriv_order, precision_digits)


def kernel_value_fast(k: KernelDescriptor, t: Real, precision_digits: int = 30) -> mpf:
    """Plain kernel value without a bound object, for quadrature inner loops.

    Evaluation error stays below ~1e-(digits+4) relative to unit kernel
    scale; call sites charge it as an aggregate slack on the integral.
    """
    t = to_mpf(t)
    if k.family == GAUSSPOLY:
        q = polyexp.gausspoly_deriv_poly(k.coeffs, "-1", 0)
        return mpmath.exp(-t * t) * polyexp.p_eval(q, t)
    if k.family == THETA:
        return theta.theta_raw_value(t, precision_digits)
    if k.family == MODTHETA:
        v = theta.theta_raw_value(t, precision_digits) * mpmath.exp(
            to_mpf(k.lam) * t * t)
        return v * t ** (2 * k.power) if k.power else v
    return theta.theta_raw_value(mpmath.sqrt(abs(t)), precision_digits)


def _gausspoly_eval(k, t, order, digits) -> EstimatedValue:
    q = polyexp.gausspoly_deriv_poly(k.coeffs, "-1", order)
    value = mpmath.exp(-t * t) * polyexp.p_eval(q, t)
    scale = mpmath.exp(-t * t) * polyexp.p_eval(polyexp.p_abs(q), abs(t))
    return EstimatedValue(value, (scale + abs(value)) * len(q) * round_ulp(digits))


def _modtheta_eval(k, t, order, digits) -> EstimatedValue:
    if order > MAX_THETA_ORDER:
        raise UnsupportedDerivativeOrder("modtheta derivative order %d > %d"
                                         % (order, MAX_THETA_ORDER))
    lam = to_mpf(k.lam)
    base = tuple([mpf(0)] * (2 * k.power) + [mpf(1)])  # t^(2m)
    base_key = tuple(str(c) for c in base)
    growth = mpmath.exp(lam * t * t)
    total = EstimatedValue(mpf(0), mpf(0))
    for i in range(order + 1):
        r = polyexp.gausspoly_deriv_poly(base_key, k.lam, i)
        a_val = growth * polyexp.p_eval(r, t)
        a_scale = growth * polyexp.p_eval(polyexp.p_abs(r), abs(t))
        a = EstimatedValue(a_val, (a_scale + abs(a_val)) * len(r) * round_ulp(digits))
        total = total + (a * theta.theta_eval(t, order - i, digits)).scaled(
            math.comb(order, i))
    return total


def _thetasqrt_eval(t, order, digits) -> EstimatedValue:
    if order > 2:
        raise UnsupportedDerivativeOrder(
            "thetasqrt supports derivative orders 0..2 (got %d)" % order)
    at = abs(t)
    if at == 0:
        # Even extension: one-sided limits from the even power series of Phi.
        if order == 0:
            return theta.theta_eval(0, 0, digits)
        if order == 1:
            return theta.theta_eval(0, 2, digits).scaled(mpf(1) / 2)
        return theta.theta_eval(0, 4, digits).scaled(mpf(1) / 12)
    derivs = theta.sqrt_arg_derivatives(at, order, digits)
    out = derivs[order]
    if order == 1 and t < 0:
        out = -out
    return out


# ---------------------------------------------------------------------------
# Decay metadata (used for truncation radii)
# ---------------------------------------------------------------------------

def kernel_majorant(k: KernelDescriptor, t: mpf, precision_digits: int = 30) -> mpf:
    """Cheap upper bound for |k(t)|, valid for t >= 0."""
    if k.family == GAUSSPOLY:
        q = polyexp.poly([mpf(c) for c in k.coeffs])
        return mpmath.exp(-t * t) * polyexp.p_eval(polyexp.p_abs(q), abs(t))
    if k.family == THETA:
        ev = theta.theta_eval(t, 0, precision_digits)
        return abs(ev.value) + ev.abs_error_bound
    if k.family == MODTHETA:
        ev = theta.theta_eval(t, 0, precision_digits)
        return (abs(ev.value) + ev.abs_error_bound) * mpmath.exp(
            to_mpf(k.lam) * t * t) * t ** (2 * k.power)
    ev = theta.theta_eval(mpmath.sqrt(abs(t)), 0, precision_digits)
    return abs(ev.value) + ev.abs_error_bound


def log_decay_rate(k: KernelDescriptor, t: mpf) -> mpf:
    """Lower bound on -d/dt log k(t) for kernel arguments past t (t >= 1).

    For the theta families the dominant factor exp(-pi e^(4t)) gives the rate
    4 pi e^(4t) minus the polynomial/exponential prefactor corrections; for
    Gaussian-polynomial kernels the rate is 2t minus the degree correction.
    """
    if k.family == GAUSSPOLY:
        deg = len(k.coeffs) - 1
        return 2 * t - to_mpf(deg) / t
    if k.family == THETA:
        return 4 * mp.pi * mpmath.exp(4 * t) - 9
    if k.family == MODTHETA:
        return (4 * mp.pi * mpmath.exp(4 * t) - 9
                - 2 * abs(to_mpf(k.lam)) * t - 2 * k.power / t)
    u = mpmath.sqrt(t)
    return (4 * mp.pi * mpmath.exp(4 * u) - 9) / (2 * u)


# ---------------------------------------------------------------------------
# Admissibility reporting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClauseCheck:
    passed: bool
    witness_t: Optional[mpf] = None
    witness_value: Optional[mpf] = None


@dataclass(frozen=True)
class DecayFit:
    status: str          # "satisfied" | "borderline" | "violated"
    fitted_exponent: float
    window: tuple


@dataclass(frozen=True)
class AdmissibilityReport:
    kernel: str
    positivity: ClauseCheck
    evenness: ClauseCheck
    monotone_decreasing: ClauseCheck
    smoothness_probe: mpf
    decay_condition: DecayFit
    grid: str

    def all_core_passed(self) -> bool:
        return (self.positivity.passed and self.evenness.passed
                and self.monotone_decreasing.passed)


def admissibility_report(k: KernelDescriptor, t_max: Real, n_grid: int,
                         precision_digits: int = 30,
                         eval_fn: Optional[Callable] = None,
                         label: Optional[str] = None,
                         decay_eval_fn: Optional[Callable] = None,
                         decay_window: Optional[tuple] = None) -> AdmissibilityReport:
    """Check the admissibility clauses on a grid over (0, t_max].

    ``eval_fn(t, order) -> EstimatedValue`` may replace the registry
    evaluator (used to run the same report against an associated kernel);
    ``decay_eval_fn`` may supply a cheaper evaluator for the far-tail decay
    regression, which needs only a few significant digits, and
    ``decay_window`` moves that regression's t-window (default far tail).
    Failures are report entries with witnesses, never exceptions.
    """
    if to_mpf(t_max) <= 0:
        raise ValueError("t_max must be positive")
    with working_dps(precision_digits):
        t_max = to_mpf(t_max)
        ev = eval_fn if eval_fn is not None else (
            lambda t, order: kernel_eval(k, t, order, precision_digits))
        pts = [t_max * i / n_grid for i in range(1, n_grid + 1)]

        positivity = ClauseCheck(True)
        for t in pts:
            v = ev(t, 0)
            if not v.certainly_positive():
                positivity = ClauseCheck(False, t, v.value)
                break

        evenness = ClauseCheck(True)
        for t in pts[:: max(1, n_grid // 7)]:
            a, b = ev(t, 0), ev(-t, 0)
            if abs(a.value - b.value) > a.abs_error_bound + b.abs_error_bound + \
                    (abs(a.value) + 1) * round_ulp(precision_digits):
                evenness = ClauseCheck(False, t, a.value - b.value)
                break

        monotone = ClauseCheck(True)
        for t in pts:
            d = ev(t, 1)
            if not d.certainly_negative():
                monotone = ClauseCheck(False, t, d.value)
                break

        probe_pts = pts[:: max(1, n_grid // 3)][:3]
        irregularity = mpf(0)
        for t in probe_pts:
            direct = ev(t, 1)
            fd = finite_difference(lambda u: ev(u, 0).value, t, 1,
                                   h0=min(mpf("0.125"), t / 2),
                                   precision_digits=precision_digits)
            gap = abs(direct.value - fd.value)
            slack = direct.abs_error_bound + fd.abs_error_bound
            irregularity = max(irregularity, max(gap - slack, mpf(0)))

        decay = _decay_fit(decay_eval_fn or ev, t_max, precision_digits,
                           decay_window)
        grid_desc = "uniform (0, %s], %d points" % (mpmath.nstr(t_max, 8), n_grid)
        return AdmissibilityReport(
            kernel=label or k.label, positivity=positivity, evenness=evenness,
            monotone_decreasing=monotone, smoothness_probe=irregularity,
            decay_condition=decay, grid=grid_desc)


def _decay_fit(ev, t_max, digits, window=None) -> DecayFit:
    # Regress log(-log k(t)) on log t over a far-tail window; compare the
    # slope against the super-Gaussian threshold exponent 2.
    if window is not None:
        lo, hi = to_mpf(window[0]), to_mpf(window[1])
    else:
        lo = max(to_mpf(t_max), mpf(20))
        hi = lo + 10
    pts = [lo + (hi - lo) * i / 11 for i in range(12)]
    xs, ys = [], []
    for t in pts:
        v = ev(t, 0)
        val = v.value
        if val <= 0 or val >= 1:
            continue
        xs.append(float(mpmath.log(t)))
        ys.append(float(mpmath.log(-mpmath.log(val))))
    if len(xs) < 3:
        return DecayFit("violated", float("nan"), (float(lo), float(hi)))
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    if abs(slope - 2.0) <= 0.05:
        status = "borderline"
    elif slope > 2.0:
        status = "satisfied"
    else:
        status = "violated"
    return DecayFit(status, slope, (float(lo), float(hi)))


# ---------------------------------------------------------------------------
# Log-concavity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LogConcavityReport:
    kernel: str
    arg_map: str
    interval: tuple
    n_grid: int
    min_neg_second_derivative: EstimatedValue
    argmin: mpf
    passed: bool
    witness_t: Optional[mpf] = None


def log_concavity_check(k: KernelDescriptor, arg_map: str, interval: tuple,
                        n_grid: int, precision_digits: int = 30,
                        eval_fn: Optional[Callable] = None) -> LogConcavityReport:
    """Check strict concavity of log k(arg_map(t)) on a grid.

    ``arg_map`` is ``identity`` or ``sqrt``.  The second derivative comes
    from the closed-form chain rule in terms of kernel derivatives; the check
    passes when it is negative with margin at every grid point, and raises
    PrecisionLoss when a bound swallows the margin somewhere.
    """
    if arg_map not in ("identity", "sqrt"):
        raise UsageError("arg_map must be identity or sqrt")
    with working_dps(precision_digits):
        a, b = to_mpf(interval[0]), to_mpf(interval[1])
        ev = eval_fn if eval_fn is not None else (
            lambda t, order: kernel_eval(k, t, order, precision_digits))
        pts = [a + (b - a) * i / (n_grid - 1) for i in range(n_grid)]
        best = None
        best_t = None
        witness = None
        for t in pts:
            if t <= 0:
                continue
            u = t if arg_map == "identity" else mpmath.sqrt(t)
            k0 = ev(u, 0)
            k1 = ev(u, 1)
            k2 = ev(u, 2)
            if not k0.certainly_positive():
                raise PrecisionLoss("kernel positivity not certified at t=%s"
                                    % mpmath.nstr(t, 8))
            if arg_map == "identity":
                neg_second = ev_div(k1 * k1 - k0 * k2, k0 * k0)
            else:
                g = (k1 * k1 - k0 * k2).scaled(u) + k0 * k1
                neg_second = ev_div(g, (k0 * k0).scaled(4 * u ** 3))
            sign = neg_second.certified_sign()
            if sign == 0:
                raise PrecisionLoss(
                    "log-concavity margin below error bound at t=%s"
                    % mpmath.nstr(t, 8))
            if sign < 0 and witness is None:
                witness = t
            if best is None or neg_second.value < best.value:
                best, best_t = neg_second, t
        if best is None:
            raise ValueError("no positive grid points in interval")
        return LogConcavityReport(
            kernel=k.label, arg_map=arg_map, interval=(a, b), n_grid=n_grid,
            min_neg_second_derivative=best, argmin=best_t,
            passed=witness is None, witness_t=witness)
