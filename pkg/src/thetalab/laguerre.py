"""Generalized Laguerre expressions and their consistency identities.

For a real entire function f, the degree-2n bilinear expression

    L_n(x) = sum_{j=0}^{2n} (-1)^(j+n)/(2n)! C(2n,j) f^(j)(x) f^(2n-j)(x)

is nonnegative for every n and x exactly when f has only real zeros (within
the relevant factorization class); L_0 = f^2 and L_1 = (f')^2 - f f''.  The
module computes L_n along two independent routes (derivatives of a transform
versus the cosine transform of an associated kernel), checks the power-series
identity |f(x+iy)|^2 = sum_n L_n(x) y^(2n), the complex variant, and the
closed factored-form expression that serves as an oracle.

Derivative data comes from pluggable sources: a TransformSpec (numerical
transforms), or closed-form fixtures exp(sigma x^2) p(x) whose derivatives
are exact.  Fixtures let counterexamples with no admissible-kernel
representation be tested directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import mpmath
from mpmath import mp, mpf

from . import polyexp
from .errors import PoleAtZero, UsageError
from .numerics import (DEFAULT_CONFIG, EstimatedValue, QuadratureConfig, Real,
                       finite_difference, round_ulp, to_mpf, working_dps)
from .transform import CosineScanTable, TransformSpec, transform_complex, transform_eval

MAX_N = 4  # L_n needs derivative order 2n; transforms support order <= 8


# ---------------------------------------------------------------------------
# Derivative sources
# ---------------------------------------------------------------------------

class GaussPolyFunction:
    """Closed-form fixture f(x) = exp(sigma x^2) p(x) with exact derivatives."""

    def __init__(self, coeffs: Sequence[Real], sigma: Real = -1, label: str = ""):
        self.coeffs = tuple(str(c) for c in coeffs)
        self.sigma = str(sigma)
        self.label = label or "gausspolyfn:%s|sigma=%s" % (",".join(self.coeffs), self.sigma)

    def deriv(self, x: Real, order: int, precision_digits: int = 30) -> EstimatedValue:
        with working_dps(precision_digits):
            x = to_mpf(x)
            q = polyexp.gausspoly_deriv_poly(self.coeffs, self.sigma, order)
            growth = mpmath.exp(to_mpf(self.sigma) * x * x)
            value = growth * polyexp.p_eval(q, x)
            scale = growth * polyexp.p_eval(polyexp.p_abs(q), abs(x))
            return EstimatedValue(value, (scale + abs(value)) * len(q)
                                  * round_ulp(precision_digits))


class PolynomialFunction(GaussPolyFunction):
    """Plain polynomial fixture (sigma = 0)."""

    def __init__(self, coeffs: Sequence[Real], label: str = ""):
        super().__init__(coeffs, sigma=0, label=label or "polyfn")


class TransformSource:
    """Derivative data of a cosine transform, optionally table-accelerated."""

    def __init__(self, spec: TransformSpec, cfg: QuadratureConfig = DEFAULT_CONFIG,
                 table: Optional[CosineScanTable] = None):
        self.spec = spec
        self.cfg = cfg
        self.table = table
        self.label = spec.label()

    def with_table(self, x_max: Real, orders: tuple) -> "TransformSource":
        table = CosineScanTable.from_spec(self.spec, x_max, self.cfg, orders)
        return TransformSource(self.spec, self.cfg, table)

    def deriv(self, x: Real, order: int, precision_digits: int = 0) -> EstimatedValue:
        if self.table is not None and abs(to_mpf(x)) <= self.table.x_max \
                and order in self.table.orders:
            return self.table.eval(x, order)
        return transform_eval(self.spec, x, order, self.cfg)


Source = Union[TransformSpec, TransformSource, GaussPolyFunction]


def as_source(obj: Source, cfg: QuadratureConfig = DEFAULT_CONFIG):
    if isinstance(obj, TransformSpec):
        return TransformSource(obj, cfg)
    return obj


# ---------------------------------------------------------------------------
# The expressions
# ---------------------------------------------------------------------------

def laguerre_Ln_derivative_route(source: Source, n: int, x: Real,
                                 cfg: QuadratureConfig = DEFAULT_CONFIG) -> EstimatedValue:
    """L_n(x) from derivatives of the underlying function."""
    if not 0 <= n <= MAX_N:
        raise UsageError("n must be in 0..%d" % MAX_N)
    src = as_source(source, cfg)
    with working_dps(cfg.precision_digits):
        x = to_mpf(x)
        derivs = [src.deriv(x, j, cfg.precision_digits) for j in range(2 * n + 1)]
        fact = mpf(math.factorial(2 * n))
        total = EstimatedValue(mpf(0), mpf(0))
        for j in range(2 * n + 1):
            c = mpf((-1) ** (j + n) * math.comb(2 * n, j)) / fact
            total = total + (derivs[j] * derivs[2 * n - j]).scaled(c)
        return total


def laguerre_Lp_chain(source: Source, p: int, x: Real,
                      cfg: QuadratureConfig = DEFAULT_CONFIG) -> EstimatedValue:
    """Classical chain expression (f^(p))^2 - f^(p-1) f^(p+1) at x."""
    if p < 1 or p + 1 > 8:
        raise UsageError("p must satisfy 1 <= p and p+1 <= 8")
    src = as_source(source, cfg)
    with working_dps(cfg.precision_digits):
        x = to_mpf(x)
        lo = src.deriv(x, p - 1, cfg.precision_digits)
        mid = src.deriv(x, p, cfg.precision_digits)
        hi = src.deriv(x, p + 1, cfg.precision_digits)
        return mid * mid - lo * hi


# ---------------------------------------------------------------------------
# Series identity |F(x+iy)|^2 = sum L_n(x) y^(2n)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeriesIdentityReport:
    x: float
    y: float
    n_max: int
    lhs: EstimatedValue
    partial: EstimatedValue
    residual: mpf
    next_term_heuristic: mpf
    within_heuristic: bool


def series_identity_check(spec: TransformSpec, x: Real, y: Real, n_max: int,
                          cfg: QuadratureConfig = DEFAULT_CONFIG) -> SeriesIdentityReport:
    """Compare |F(x+iy)|^2 with the partial sum of L_n(x) y^(2n).

    The two sides are computed independently (complex-argument quadrature
    versus real derivative products).  The acceptance heuristic for the
    truncation residual is ten times the last included term.
    """
    if n_max > MAX_N:
        raise UsageError("n_max must be <= %d" % MAX_N)
    with working_dps(cfg.precision_digits):
        x, y = to_mpf(x), to_mpf(y)
        re, im = transform_complex(spec, x, y, 0, cfg)
        lhs = re * re + im * im
        terms = [laguerre_Ln_derivative_route(spec, n, x, cfg).scaled(y ** (2 * n))
                 for n in range(n_max + 1)]
        partial = terms[0]
        for t in terms[1:]:
            partial = partial + t
        residual = abs(lhs.value - partial.value)
        heuristic = 10 * abs(terms[-1].value) + lhs.abs_error_bound \
            + partial.abs_error_bound
        return SeriesIdentityReport(
            x=float(x), y=float(y), n_max=n_max, lhs=lhs, partial=partial,
            residual=residual, next_term_heuristic=heuristic,
            within_heuristic=bool(residual <= heuristic))


# ---------------------------------------------------------------------------
# Complex Laguerre inequality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplexLaguerreReport:
    x: float
    y: float
    expression: EstimatedValue      # |F'(z)|^2 - Re(F(z) conj(F''(z)))
    halfwave: EstimatedValue        # (1/2) d^2/dy^2 |F(x+iy)|^2
    agreement_residual: mpf
    agree_within_bounds: bool


def complex_laguerre_check(spec: TransformSpec, x: Real, y: Real,
                           cfg: QuadratureConfig = DEFAULT_CONFIG) -> ComplexLaguerreReport:
    """Evaluate the complex Laguerre expression two independent ways.

    The direct form uses complex-argument transform derivatives; the second
    form differentiates |F(x+iy)|^2 twice in y by finite differences.  Their
    agreement is the identity check; positivity of the expression is the
    inequality under probe.
    """
    with working_dps(cfg.precision_digits):
        x, y = to_mpf(x), to_mpf(y)
        re0, im0 = transform_complex(spec, x, y, 0, cfg)
        re1, im1 = transform_complex(spec, x, y, 1, cfg)
        re2, im2 = transform_complex(spec, x, y, 2, cfg)
        expr = (re1 * re1 + im1 * im1) - (re0 * re2 + im0 * im2)

        def sq_modulus(yy):
            r, i = transform_complex(spec, x, yy, 0, cfg)
            return r.value * r.value + i.value * i.value

        d2 = finite_difference(sq_modulus, y, 2, h0=mpf("0.05"),
                               precision_digits=cfg.precision_digits)
        halfwave = d2.scaled(mpf(1) / 2)
        residual = abs(expr.value - halfwave.value)
        return ComplexLaguerreReport(
            x=float(x), y=float(y), expression=expr, halfwave=halfwave,
            agreement_residual=residual,
            agree_within_bounds=bool(residual <= expr.abs_error_bound
                                     + halfwave.abs_error_bound))


# ---------------------------------------------------------------------------
# Factored-form oracle
# ---------------------------------------------------------------------------

def factored_value(real_zeros: Sequence[Real], complex_pairs: Sequence[tuple],
                   a: Real, scale: Real, x: Real) -> mpf:
    """f(x) = scale * exp(-a x^2) prod (x - x_k) prod ((x-alpha)^2+beta^2)^m."""
    x = to_mpf(x)
    out = to_mpf(scale) * mpmath.exp(-to_mpf(a) * x * x)
    for xk in real_zeros:
        out *= (x - to_mpf(xk))
    for (alpha, beta, m) in _norm_pairs(complex_pairs):
        out *= ((x - alpha) ** 2 + beta ** 2) ** m
    return out


def laguerre_from_zeros(real_zeros: Sequence[Real], complex_pairs: Sequence[tuple],
                        a: Real, scale: Real, x: Real,
                        precision_digits: int = 30) -> EstimatedValue:
    """L_1 of the factored function, from the logarithmic-derivative formula.

    With f = scale * exp(-a x^2) * prod(x - x_k) * prod((x-a_j)^2+b_j^2)^m_j,

        L_1(x) = f(x)^2 [ 2a + sum_k 1/(x-x_k)^2
                          + 2 sum_j m_j ((x-a_j)^2 - b_j^2)
                                      / ((x-a_j)^2 + b_j^2)^2 ].

    Exact up to rounding; the independent oracle for the derivative route.
    """
    with working_dps(precision_digits):
        x = to_mpf(x)
        fx = factored_value(real_zeros, complex_pairs, a, scale, x)
        bracket = 2 * to_mpf(a)
        for xk in real_zeros:
            d = x - to_mpf(xk)
            if d == 0:
                raise PoleAtZero("x=%s coincides with a real zero" % x)
            bracket += 1 / (d * d)
        for (alpha, beta, m) in _norm_pairs(complex_pairs):
            u = (x - alpha) ** 2
            b2 = beta ** 2
            bracket += 2 * m * (u - b2) / (u + b2) ** 2
        value = fx * fx * bracket
        return EstimatedValue(value, (abs(value) + abs(fx * fx) + 1)
                              * 8 * round_ulp(precision_digits))


def _norm_pairs(complex_pairs):
    out = []
    for pair in complex_pairs:
        if len(pair) == 2:
            alpha, beta = pair
            m = 1
        else:
            alpha, beta, m = pair
        out.append((to_mpf(alpha), to_mpf(beta), int(m)))
    return out


def polynomial_from_zeros(real_zeros: Sequence[Real],
                          complex_pairs: Sequence[tuple],
                          scale: Real = 1) -> tuple:
    """Ascending coefficients of the finite product (no Gaussian factor)."""
    p = polyexp.poly([scale])
    for xk in real_zeros:
        p = polyexp.p_mul(p, polyexp.poly([-to_mpf(xk), 1]))
    for (alpha, beta, m) in _norm_pairs(complex_pairs):
        quad = polyexp.poly([alpha ** 2 + beta ** 2, -2 * alpha, 1])
        for _ in range(m):
            p = polyexp.p_mul(p, quad)
    return p


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaguerreProfile:
    source: str
    n: int
    route: str
    grid: tuple
    values: tuple
    min_value: mpf
    argmin: mpf

    def min_margin(self) -> mpf:
        i = min(range(len(self.values)), key=lambda j: self.values[j].value)
        v = self.values[i]
        return v.value - v.abs_error_bound


def laguerre_profile(source: Source, n: int, interval: tuple, n_grid: int,
                     route: str = "derivative",
                     cfg: QuadratureConfig = DEFAULT_CONFIG) -> LaguerreProfile:
    """L_n on a uniform grid, by either route.

    The derivative route pre-builds a scan table over the grid range when the
    source is a transform; the kernel route goes through the associated
    kernel's cosine transform (see :mod:`thetalab.assoc`).
    """
    if route not in ("derivative", "kernel"):
        raise UsageError("route must be derivative or kernel")
    with working_dps(cfg.precision_digits):
        a, b = to_mpf(interval[0]), to_mpf(interval[1])
        pts = tuple(a + (b - a) * i / (n_grid - 1) for i in range(n_grid))
        src = as_source(source, cfg)
        if route == "kernel":
            from . import assoc
            if not isinstance(src, TransformSource) or src.spec.extra_power or \
                    to_mpf(src.spec.heat_lambda) != 0:
                raise UsageError("kernel route needs a plain kernel transform")
            values = tuple(assoc.laguerre_kernel_route(src.spec.kernel, n, x, cfg)
                           for x in pts)
        else:
            if isinstance(src, TransformSource) and src.table is None:
                src = src.with_table(max(abs(a), abs(b)), tuple(range(2 * n + 1)))
            values = tuple(laguerre_Ln_derivative_route(src, n, x, cfg) for x in pts)
        i_min = min(range(len(values)), key=lambda j: values[j].value)
        return LaguerreProfile(source=src.label, n=n, route=route, grid=pts,
                               values=values, min_value=values[i_min].value,
                               argmin=pts[i_min])
