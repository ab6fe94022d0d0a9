"""Even moments of a kernel, Turan-type differences, and their section F_c.

For an even positive kernel K the moments b_k = integral_0^oo t^(2k) K(t) dt
are the (alternating) Taylor data of the cosine transform:

    F(x) = sum_k (-1)^k b_k x^(2k) / (2k)!.

With gamma_k = k! b_k / (2k)!, real-rootedness of the associated section
forces the Turan inequalities T_k = gamma_k^2 - gamma_{k-1} gamma_{k+1} >= 0,
and the double differences E_k = T_k^2 - T_{k-1} T_{k+1} are the next layer
of necessary conditions.  Both are catastrophically cancelling, so the table
carries per-entry error bounds and a precision ladder.

The section F_c(u) = sum_k gamma_k u^k / k! equals the transform under
u = -x^2 and equals integral_0^oo K(t) cosh(t sqrt(u)) dt for u >= 0; both
routes are computed and compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import mpmath
from mpmath import mp, mpf

from .errors import PrecisionExhausted, UsageError
from .kernels import KernelDescriptor, log_decay_rate
from .numerics import (EstimatedValue, ExplicitRadius, QuadratureConfig, Real,
                       integrate_half_line, to_mpf, working_dps)
from .transform import make_spec, transform_complex, transform_eval, truncation


@dataclass(frozen=True)
class MomentRow:
    k: int
    b: EstimatedValue
    gamma: EstimatedValue
    turan: Optional[EstimatedValue]          # k >= 1
    double_turan: Optional[EstimatedValue]   # k >= 2
    classical: Optional[EstimatedValue]      # b_k^2 - (2k-1)/(2k+1) b_{k-1} b_{k+1}


@dataclass(frozen=True)
class MomentTable:
    kernel: str
    precision_digits: int
    k_max: int
    rows: tuple

    def row(self, k: int) -> MomentRow:
        return self.rows[k]


def default_moment_digits(k_max: int) -> int:
    """Precision ladder: cancellation in the differences grows with k."""
    if k_max <= 10:
        return 30
    if k_max <= 25:
        return 50
    return 80


def _moment_quad_config(digits: int) -> QuadratureConfig:
    return QuadratureConfig.for_digits(digits, max_panels=4000)


def _peak_location(kernel: KernelDescriptor, k: int, radius: mpf) -> mpf:
    """Solve 2k = t * rate(t) for the integrand peak of t^(2k) K(t)."""
    if k == 0:
        return mpf(0)
    lo, hi = mpf("1e-3"), radius
    for _ in range(60):
        mid = (lo + hi) / 2
        if mid * log_decay_rate(kernel, mid) < 2 * k:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def kernel_moment(kernel: KernelDescriptor, k: int,
                  precision_digits: int = 40) -> EstimatedValue:
    """b_k = integral_0^oo t^(2k) K(t) dt with panels seeded at the peak."""
    cfg = _moment_quad_config(precision_digits)
    with working_dps(precision_digits):
        spec = make_spec(kernel)
        radius, tail = truncation(spec, 2 * k, 0, cfg)
        digits = precision_digits
        peak = _peak_location(kernel, k, radius)
        seeds = [s for s in (peak / 2, peak * 3 / 4, peak, peak * 5 / 4,
                             peak * 3 / 2, peak * 2) if 0 < s < radius]

        from .transform import integrand_value

        def f(t):
            v = integrand_value(spec, t, digits)
            return v * t ** (2 * k) if k else v

        ev = integrate_half_line(f, cfg.with_policy(ExplicitRadius(radius, tail)),
                                 breakpoints=seeds)
        return ev.widened((radius ** (2 * k) + 1) * mpf(10) ** (-(digits + 4)))


def moment_table(kernel: KernelDescriptor, k_max: int,
                 precision_digits: Optional[int] = None,
                 strict: bool = False) -> MomentTable:
    """Moments b_k, normalized gamma_k, and Turan-type differences.

    ``strict=True`` raises PrecisionExhausted as soon as a difference's sign
    is not certified by its propagated bound; the default records every row
    and leaves the margin summary to :func:`turan_margin_report`.
    """
    if k_max > 40:
        raise UsageError("k_max capped at 40")
    digits = precision_digits or default_moment_digits(k_max)
    if k_max > 10 and digits < 30:
        raise UsageError("precision_digits must be >= 30 for k_max > 10")
    with working_dps(digits):
        bs = [kernel_moment(kernel, k, digits) for k in range(k_max + 2)]
        gammas = [b.scaled(mpf(math.factorial(k)) / math.factorial(2 * k))
                  for k, b in enumerate(bs)]
        turans: list = [None] * (k_max + 2)
        for k in range(1, k_max + 1):
            turans[k] = gammas[k] * gammas[k] - gammas[k - 1] * gammas[k + 1]
        rows = []
        for k in range(k_max + 1):
            classical = None
            if 1 <= k <= k_max:
                c = mpf(2 * k - 1) / (2 * k + 1)
                classical = bs[k] * bs[k] - (bs[k - 1] * bs[k + 1]).scaled(c)
            double = None
            if 2 <= k <= k_max - 1:
                double = turans[k] * turans[k] - turans[k - 1] * turans[k + 1]
            if strict:
                for label, ev in (("T", turans[k] if 1 <= k <= k_max else None),
                                  ("E", double)):
                    if ev is not None and ev.certified_sign() == 0:
                        raise PrecisionExhausted(
                            "%s_%d margin %s below bound %s at %d digits"
                            % (label, k, mpmath.nstr(ev.value, 5),
                               mpmath.nstr(ev.abs_error_bound, 5), digits))
            rows.append(MomentRow(k=k, b=bs[k], gamma=gammas[k],
                                  turan=turans[k] if 1 <= k <= k_max else None,
                                  double_turan=double, classical=classical))
        return MomentTable(kernel=kernel.label, precision_digits=digits,
                           k_max=k_max, rows=tuple(rows))


# ---------------------------------------------------------------------------
# Margin summary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TuranMarginReport:
    kernel: str
    precision_digits: int
    min_turan_margin: mpf
    argmin_turan: int
    min_double_margin: Optional[mpf]
    argmin_double: Optional[int]
    first_uncertified_k: Optional[int]
    classical_sign_agreement: bool


def turan_margin_report(table: MomentTable) -> TuranMarginReport:
    """Summarize certified margins of the difference columns."""
    min_t, arg_t = None, None
    min_e, arg_e = None, None
    first_fail = None
    classical_ok = True
    for row in table.rows:
        if row.turan is not None:
            margin = row.turan.value - row.turan.abs_error_bound
            if min_t is None or margin < min_t:
                min_t, arg_t = margin, row.k
            if row.turan.certified_sign() == 0 and first_fail is None:
                first_fail = row.k
            if row.classical is not None:
                same = (row.turan.value >= 0) == (row.classical.value >= 0)
                classical_ok = classical_ok and same
        if row.double_turan is not None:
            margin = row.double_turan.value - row.double_turan.abs_error_bound
            if min_e is None or margin < min_e:
                min_e, arg_e = margin, row.k
            if row.double_turan.certified_sign() == 0 and first_fail is None:
                first_fail = row.k
    if min_t is None:
        raise UsageError("table has no Turan rows")
    return TuranMarginReport(
        kernel=table.kernel, precision_digits=table.precision_digits,
        min_turan_margin=min_t, argmin_turan=arg_t,
        min_double_margin=min_e, argmin_double=arg_e,
        first_uncertified_k=first_fail,
        classical_sign_agreement=classical_ok)


# ---------------------------------------------------------------------------
# The section F_c
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FcReport:
    u: float
    k_max: int
    series: EstimatedValue
    direct: EstimatedValue
    residual: mpf
    agree_within_bounds: bool
    series_diverging: bool


def fc_eval(kernel: KernelDescriptor, u: Real, k_max: int,
            precision_digits: int = 40,
            table: Optional[MomentTable] = None) -> FcReport:
    """Two routes to F_c(u): the gamma_k series and direct quadrature.

    For u >= 0 the direct route integrates K(t) cosh(t sqrt(u)); for u < 0 it
    is the cosine transform at sqrt(-u).  The series tail is estimated by the
    last-term ratio; a growing ratio sets the divergence flag instead of
    raising.
    """
    cfg = _moment_quad_config(precision_digits)
    with working_dps(precision_digits):
        u = to_mpf(u)
        if table is None or table.k_max < k_max:
            table = moment_table(kernel, k_max, precision_digits)
        value = EstimatedValue(mpf(0), mpf(0))
        prev_mag = None
        ratio = mpf(0)
        last = mpf(0)
        for k in range(k_max + 1):
            term = table.row(k).gamma.scaled(u ** k / math.factorial(k))
            value = value + term
            mag = abs(term.value)
            if prev_mag is not None and prev_mag > 0:
                ratio = mag / prev_mag
            prev_mag = mag
            last = mag
        diverging = bool(ratio > 1 and last > to_mpf(cfg.abs_tol))
        tail_est = last * ratio / (1 - ratio) if ratio < mpf("0.9") else last * 10
        series = value.widened(tail_est)

        spec = make_spec(kernel)
        if u >= 0:
            y = mpmath.sqrt(u)
            if y == 0:
                direct = transform_eval(spec, 0, 0, cfg)
            else:
                direct, _ = transform_complex(spec, 0, y, 0, cfg)
        else:
            direct = transform_eval(spec, mpmath.sqrt(-u), 0, cfg)
        residual = abs(series.value - direct.value)
        return FcReport(
            u=float(u), k_max=k_max, series=series, direct=direct,
            residual=residual,
            agree_within_bounds=bool(residual <= series.abs_error_bound
                                     + direct.abs_error_bound),
            series_diverging=diverging)


def taylor_partial_transform(kernel: KernelDescriptor, x: Real, k_terms: int,
                             precision_digits: int = 40,
                             table: Optional[MomentTable] = None) -> tuple:
    """Partial alternating Taylor sum of the transform and its next-term bound.

    Returns (partial_sum, next_term_magnitude); for an alternating series
    with decreasing terms the truncation error is at most the next term.
    """
    with working_dps(precision_digits):
        x = to_mpf(x)
        if table is None or table.k_max < k_terms + 1:
            table = moment_table(kernel, k_terms + 1, precision_digits)
        total = EstimatedValue(mpf(0), mpf(0))
        for k in range(k_terms + 1):
            c = mpf((-1) ** k) * x ** (2 * k) / math.factorial(2 * k)
            total = total + table.row(k).b.scaled(c)
        nxt = table.row(k_terms + 1).b.value * x ** (2 * (k_terms + 1)) \
            / math.factorial(2 * (k_terms + 1))
        return total, abs(nxt)
