"""Jacobi theta kernel: series evaluation, tail bounds, concavity probes.

The kernel is the even positive function

    Phi(t) = sum_{n>=1} pi n^2 (2 pi n^2 e^(4t) - 3) exp(5t - pi n^2 e^(4t)).

Writing w = e^(4t), every termwise derivative keeps the shape
Q(w) * exp(5t - pi n^2 w) with Q a polynomial; differentiation maps
Q -> 4 w Q' + (5 - 4 pi n^2 w) Q.  Summation is truncated when an explicit
majorant of the tail drops below the accuracy target; the majorant uses the
same recurrence with all signs made positive, so it dominates termwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath
from mpmath import mp, mpf

from . import polyexp
from .errors import DomainViolation, PrecisionExhausted, PrecisionLoss, UnsupportedDerivativeOrder
from .numerics import (EstimatedValue, Real, ev_div, round_ulp, to_mpf,
                       working_dps)

MAX_DERIV_ORDER = 8

_coeff_cache: dict = {}


def _term_poly(n: int, order: int, absolute: bool) -> tuple:
    """w-polynomial of the order-th derivative of term n (or its majorant)."""
    key = (n, order, absolute, mp.prec)
    hit = _coeff_cache.get(key)
    if hit is not None:
        return hit
    nu = mp.pi * n * n
    if order == 0:
        q = (3 * nu, 2 * nu * nu) if absolute else (-3 * nu, 2 * nu * nu)
    else:
        prev = _term_poly(n, order - 1, absolute)
        q = []
        for j in range(len(prev) + 1):
            c = mpf(0)
            if j < len(prev):
                c += (5 + 4 * j) * prev[j]
            if j >= 1:
                c += (4 * nu if absolute else -4 * nu) * prev[j - 1]
            q.append(c)
        q = tuple(q)
    _coeff_cache[key] = q
    return q


def _term_value(n: int, t: mpf, order: int, absolute: bool = False) -> mpf:
    w = mpmath.exp(4 * t)
    q = _term_poly(n, order, absolute)
    return polyexp.p_eval(q, w) * mpmath.exp(5 * t - mp.pi * n * n * w)


def raw_series_value(t: Real, order: int = 0, n_terms: int = 24) -> mpf:
    """Plain partial sum of the termwise-differentiated series, no bounds.

    Converges for every real t; used to cross-check the even extension.
    """
    t = to_mpf(t)
    return sum(_term_value(n, t, order) for n in range(1, n_terms + 1))


# ---------------------------------------------------------------------------
# Tail bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaTermBound:
    n_terms: int
    t: float
    tail_bound: mpf


def theta_tail_bound(t: Real, n_terms: int, deriv_order: int = 0) -> mpf:
    """Upper bound on the magnitude of the series tail past ``n_terms``.

    Majorant terms r_n dominate |a_n^(order)(t)|; their consecutive ratios are
    at most ((n+1)/n)^(2*(order+2)) * exp(-pi (2n+1) e^(4t)), which is
    decreasing in n, so once the ratio falls below 1/2 the remainder is summed
    geometrically.  The bound is monotone decreasing in ``n_terms``.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    if deriv_order > MAX_DERIV_ORDER:
        raise UnsupportedDerivativeOrder("derivative order %d > %d"
                                         % (deriv_order, MAX_DERIV_ORDER))
    t = abs(to_mpf(t))
    w = mpmath.exp(4 * t)
    total = mpf(0)
    n = n_terms + 1
    power = 2 * (deriv_order + 2)
    while True:
        r = _term_value(n, t, deriv_order, absolute=True)
        q = (mpf(n + 1) / n) ** power * mpmath.exp(-mp.pi * (2 * n + 1) * w)
        if q < mpf("0.5"):
            total += r / (1 - q)
            return total
        total += r
        n += 1


def term_bound(t: Real, n_terms: int, deriv_order: int = 0) -> ThetaTermBound:
    return ThetaTermBound(n_terms=n_terms, t=float(t),
                          tail_bound=theta_tail_bound(t, n_terms, deriv_order))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def theta_eval(t: Real, deriv_order: int = 0,
               precision_digits: int = 30) -> EstimatedValue:
    """Value of the order-th derivative of Phi with a tail + rounding bound.

    Negative arguments use the even extension (odd derivatives flip sign),
    so the series is only summed for t >= 0 where its decay is monotone.
    """
    if deriv_order < 0:
        raise ValueError("deriv_order must be >= 0")
    if deriv_order > MAX_DERIV_ORDER:
        raise UnsupportedDerivativeOrder("derivative order %d > %d"
                                         % (deriv_order, MAX_DERIV_ORDER))
    with working_dps(precision_digits):
        t = to_mpf(t)
        sign = 1
        if t < 0:
            t = -t
            sign = (-1) ** deriv_order
        target = mpf(10) ** (-(precision_digits + 5))
        n_terms = 2
        tail = theta_tail_bound(t, n_terms, deriv_order)
        while tail >= target:
            n_terms += 1
            if n_terms > 64:
                raise PrecisionExhausted(
                    "theta tail target %s unreachable at t=%s order=%d"
                    % (mpmath.nstr(target, 3), mpmath.nstr(t, 8), deriv_order))
            tail = theta_tail_bound(t, n_terms, deriv_order)
        value = mpf(0)
        rounding = mpf(0)
        w = mpmath.exp(4 * t)
        ulp = round_ulp(precision_digits)
        for n in range(1, n_terms + 1):
            term = _term_value(n, t, deriv_order)
            value += term
            # exp(5t - pi n^2 w) amplifies argument rounding by |argument|
            arg_scale = 5 * t + mp.pi * n * n * w + n_terms + 8
            rounding += abs(term) * arg_scale * ulp
        return EstimatedValue(sign * value, tail + rounding)


_n_terms_cache: dict = {}


def _fixed_n_terms(precision_digits: int) -> int:
    """Smallest term count whose t=0 tail bound meets the accuracy target.

    The majorant terms decrease in t for t >= 0, so this count is valid on
    the whole half line.
    """
    key = (precision_digits, mp.prec)
    hit = _n_terms_cache.get(key)
    if hit is None:
        target = mpf(10) ** (-(precision_digits + 5))
        hit = 2
        while theta_tail_bound(0, hit, 0) >= target:
            hit += 1
        _n_terms_cache[key] = hit
    return hit


def theta_raw_value(t: Real, precision_digits: int = 30) -> mpf:
    """Fast plain value of Phi(t), no bound object.

    Quadrature call sites use this in inner loops and charge the evaluation
    error (tail below 1e-(digits+5) plus rounding) as an aggregate slack.
    """
    t = to_mpf(t)
    if t < 0:
        t = -t
    n_terms = _fixed_n_terms(precision_digits)
    w = mpmath.exp(4 * t)
    e5 = mpmath.exp(5 * t)
    total = mpf(0)
    pi = mp.pi
    for n in range(1, n_terms + 1):
        nu = pi * n * n
        nuw = nu * w
        total += nu * (2 * nuw - 3) * e5 * mpmath.exp(-nuw)
        if nuw > 40 * precision_digits:
            break
    return total


def sqrt_arg_derivatives(t: Real, up_to: int = 2,
                         precision_digits: int = 30) -> list:
    """Derivatives of s(t) = Phi(sqrt(t)) for t > 0, orders 0..up_to (<= 4).

    Chain rule through u = sqrt(t) in closed form; each output carries the
    propagated bound of the Phi derivatives it consumes.
    """
    if up_to > 4:
        raise UnsupportedDerivativeOrder("sqrt-argument derivatives support order <= 4")
    with working_dps(precision_digits):
        t = to_mpf(t)
        if t <= 0:
            raise DomainViolation("sqrt-argument derivatives need t > 0")
        u = mpmath.sqrt(t)
        phi = [theta_eval(u, j, precision_digits) for j in range(up_to + 1)]
        out = [phi[0]]
        if up_to >= 1:
            out.append(phi[1].scaled(1 / (2 * u)))
        if up_to >= 2:
            out.append(phi[2].scaled(1 / (4 * u ** 2))
                       + phi[1].scaled(-1 / (4 * u ** 3)))
        if up_to >= 3:
            out.append(phi[3].scaled(1 / (8 * u ** 3))
                       + phi[2].scaled(-3 / (8 * u ** 4))
                       + phi[1].scaled(3 / (8 * u ** 5)))
        if up_to >= 4:
            out.append(phi[4].scaled(1 / (16 * u ** 4))
                       + phi[3].scaled(-3 / (8 * u ** 5))
                       + phi[2].scaled(15 / (16 * u ** 6))
                       + phi[1].scaled(-15 / (16 * u ** 7)))
        return out


# ---------------------------------------------------------------------------
# Grid probes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridProbeReport:
    """Grid values of an estimated quantity plus extreme-point summary."""

    name: str
    interval: tuple
    n_grid: int
    points: tuple
    values: tuple
    min_value: EstimatedValue
    argmin: mpf
    max_value: EstimatedValue
    argmax: mpf
    positive_certified: bool
    negative_certified: bool

    @property
    def min_margin(self) -> mpf:
        return self.min_value.value - self.min_value.abs_error_bound


def _grid(interval, n_grid):
    a, b = to_mpf(interval[0]), to_mpf(interval[1])
    return [a + (b - a) * i / (n_grid - 1) for i in range(n_grid)]


def _probe_from_values(name, interval, n_grid, points, values) -> GridProbeReport:
    i_min = min(range(len(values)), key=lambda i: values[i].value)
    i_max = max(range(len(values)), key=lambda i: values[i].value)
    return GridProbeReport(
        name=name, interval=(to_mpf(interval[0]), to_mpf(interval[1])),
        n_grid=n_grid, points=tuple(points), values=tuple(values),
        min_value=values[i_min], argmin=points[i_min],
        max_value=values[i_max], argmax=points[i_max],
        positive_certified=all(v.certainly_positive() for v in values),
        negative_certified=all(v.certainly_negative() for v in values))


def derivative_log_concavity_probe(n_max: int, interval: tuple, n_grid: int,
                                   precision_digits: int = 30) -> dict:
    """Sign scan of (Phi^(n))^2 - Phi^(n-1) Phi^(n+1) for n = 1..n_max.

    These quantities are even in t, so the scan runs on t >= 0 only.  The
    outcome is recorded with margins; it is evidence, not a proof.
    """
    if not 1 <= n_max <= MAX_DERIV_ORDER - 1:
        raise ValueError("n_max must be in 1..%d" % (MAX_DERIV_ORDER - 1))
    if to_mpf(interval[0]) < 0:
        raise ValueError("probe interval must lie in t >= 0")
    with working_dps(precision_digits):
        points = _grid(interval, n_grid)
        derivs = {}
        for j in range(0, n_max + 2):
            derivs[j] = [theta_eval(t, j, precision_digits) for t in points]
        out = {}
        for n in range(1, n_max + 1):
            vals = [derivs[n][i] * derivs[n][i] - derivs[n - 1][i] * derivs[n + 1][i]
                    for i in range(len(points))]
            out[n] = _probe_from_values("deriv_log_concavity_n%d" % n,
                                        interval, n_grid, points, vals)
        return out


def sqrt_laguerre_logconcavity_probe(interval: tuple, n_grid: int,
                                     precision_digits: int = 30) -> GridProbeReport:
    """Grid values of (log f)'' for f = (s')^2 - s s'' with s(t) = Phi(sqrt t).

    f > 0 on t > 0 is guaranteed by the strict convexity/concavity structure
    of the kernel and is re-checked here; a certified non-positive f is
    reported loudly as DomainViolation.  The conjecture under probe is that
    (log f)'' < 0; only margins are recorded.
    """
    with working_dps(precision_digits):
        points = _grid(interval, n_grid)
        values = []
        for t in points:
            s = sqrt_arg_derivatives(t, 4, precision_digits)
            f = s[1] * s[1] - s[0] * s[2]
            if not f.certainly_positive():
                if f.certainly_negative() or f.value <= 0:
                    raise DomainViolation(
                        "f(t) = s'^2 - s s'' not positive at t=%s" % mpmath.nstr(t, 8))
                raise PrecisionLoss(
                    "cannot certify f(t) > 0 at t=%s" % mpmath.nstr(t, 8))
            fp = s[1] * s[2] - s[0] * s[3]
            fpp = s[2] * s[2] - s[0] * s[4]
            values.append(ev_div(fpp * f - fp * fp, f * f))
        return _probe_from_values("sqrt_laguerre_logconcavity",
                                  interval, n_grid, points, values)


def sqrt_arg_convexity_check(interval: tuple, n_grid: int,
                             precision_digits: int = 30) -> GridProbeReport:
    """Margin-checked positivity of d^2/dt^2 Phi(sqrt t) on the interval."""
    with working_dps(precision_digits):
        points = _grid(interval, n_grid)
        values = [sqrt_arg_derivatives(t, 2, precision_digits)[2] for t in points]
        report = _probe_from_values("sqrt_arg_convexity", interval, n_grid,
                                    points, values)
        if not report.positive_certified and report.min_value.certified_sign() == 0:
            raise PrecisionLoss("convexity margin below error bound at t=%s"
                                % mpmath.nstr(report.argmin, 8))
        return report


def sqrt_log_concavity_strength(interval: tuple, n_grid: int,
                                precision_digits: int = 30) -> GridProbeReport:
    """Scan of g(t) = t [(Phi')^2 - Phi Phi''] + Phi Phi' on the grid.

    g > 0 is equivalent to strict concavity of log Phi(sqrt t) and is the
    stronger form tested directly.
    """
    with working_dps(precision_digits):
        points = _grid(interval, n_grid)
        values = []
        for t in points:
            p0 = theta_eval(t, 0, precision_digits)
            p1 = theta_eval(t, 1, precision_digits)
            p2 = theta_eval(t, 2, precision_digits)
            values.append((p1 * p1 - p0 * p2).scaled(t) + p0 * p1)
        return _probe_from_values("sqrt_log_concavity_strength",
                                  interval, n_grid, points, values)
