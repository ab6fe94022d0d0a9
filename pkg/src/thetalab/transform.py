"""Half-line Fourier cosine transforms of kernels and their derivatives.

All transforms use the half-line normalization

    F(x) = integral_0^oo K(t) cos(x t) dt,

which is half of the symmetric whole-line transform of an even kernel.
Derivatives in x are computed by differentiation under the integral in
phase-shift form, F^(p)(x) = integral K(t) t^p cos(x t + p pi/2) dt.

The heat-flow family inserts the factor exp(lam t^2) under the integral (the
``lam >= 1/2`` regime is the one with a classical guarantee of real simple
zeros for the theta kernel); ``extra_power`` inserts t^(2m).

For scans over many x values a :class:`CosineScanTable` freezes one composite
Clenshaw-Curtis grid whose panel width resolves the fastest oscillation in
the scan, evaluates the kernel once per node, and then prices each x at a few
thousand multiplications: this is the dominant performance device in the
package.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import mpmath
from mpmath import mp, mpf

from .errors import InvalidDecayBound, TailDominated, UsageError
from .kernels import (GAUSSPOLY, MODTHETA, KernelDescriptor, kernel_eval,
                      kernel_majorant, kernel_value_fast, log_decay_rate)
from .numerics import (DEFAULT_CONFIG, EstimatedValue, ExplicitRadius,
                       QuadratureConfig, Real, ZeroReport, bracket_zeros,
                       cc_rule, finite_difference, integrate_half_line,
                       round_ulp, to_mpf, working_dps)


@dataclass(frozen=True)
class TransformSpec:
    """Kernel plus heat-flow deformation and monomial weight.

    For Gaussian-polynomial kernels the total quadratic exponent must stay
    below 1 or the integrand ceases to decay; theta-family kernels tolerate
    any real ``heat_lambda`` because their decay is doubly exponential.
    """

    kernel: KernelDescriptor
    heat_lambda: str = "0"
    extra_power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "heat_lambda", str(self.heat_lambda))
        if self.extra_power < 0:
            raise UsageError("extra_power must be >= 0")
        if self.kernel.family == GAUSSPOLY and to_mpf(self.heat_lambda) >= 1:
            raise UsageError("heat_lambda must be < 1 for gausspoly kernels")

    def key(self) -> tuple:
        return (self.kernel.key(), self.heat_lambda, self.extra_power)

    def label(self) -> str:
        out = self.kernel.label
        if to_mpf(self.heat_lambda) != 0:
            out += "|lambda=%s" % self.heat_lambda
        if self.extra_power:
            out += "|m=%d" % self.extra_power
        return out


def make_spec(kernel: KernelDescriptor, heat_lambda: Real = 0,
              extra_power: int = 0) -> TransformSpec:
    return TransformSpec(kernel, str(heat_lambda), extra_power)


# ---------------------------------------------------------------------------
# Effective integrand and truncation
# ---------------------------------------------------------------------------

def integrand_value(spec: TransformSpec, t: mpf, precision_digits: int) -> mpf:
    v = kernel_value_fast(spec.kernel, t, precision_digits)
    lam = to_mpf(spec.heat_lambda)
    if lam != 0:
        v *= mpmath.exp(lam * t * t)
    if spec.extra_power:
        v *= t ** (2 * spec.extra_power)
    return v


def _integrand_majorant(spec: TransformSpec, t: mpf, extra_tpow: int,
                        y_abs: mpf, digits: int) -> mpf:
    m = kernel_majorant(spec.kernel, t, digits)
    lam = to_mpf(spec.heat_lambda)
    power = 2 * spec.extra_power + extra_tpow
    return (m * mpmath.exp(lam * t * t + y_abs * t)
            * (t ** power if power else mpf(1)))


def _decay_rate(spec: TransformSpec, t: mpf, extra_tpow: int, y_abs: mpf) -> mpf:
    rate = log_decay_rate(spec.kernel, t)
    lam = to_mpf(spec.heat_lambda)
    power = 2 * spec.extra_power + extra_tpow
    return rate - 2 * abs(lam) * t - to_mpf(power) / t - y_abs


_trunc_cache: dict = {}


def truncation(spec: TransformSpec, deriv_order: int, y_abs: Real,
               cfg: QuadratureConfig) -> tuple:
    """Radius and tail bound for the effective integrand.

    The radius R is pushed out until the integrand majorant satisfies
    ``maj(R) * (1 + R) < abs_tol / 10`` and the local log-decay rate is at
    least 1; the tail is then charged as ``2 * maj(R) / rate(R)``.  Raises
    TailDominated when a cosh/sinh growth factor defeats the kernel decay and
    InvalidDecayBound when no admissible radius exists below the search cap.
    """
    key = (spec.key(), deriv_order, str(y_abs), str(cfg.abs_tol),
           cfg.precision_digits, mp.prec)
    hit = _trunc_cache.get(key)
    if hit is not None:
        return hit
    y_abs = abs(to_mpf(y_abs))
    abs_tol = to_mpf(cfg.abs_tol)
    r = mpf(1)
    while r <= 120:
        rate = _decay_rate(spec, r, deriv_order, y_abs)
        if rate >= 1:
            maj = _integrand_majorant(spec, r, deriv_order, y_abs,
                                      cfg.precision_digits)
            if maj * (1 + r) < abs_tol / 10:
                result = (r, 2 * maj / rate)
                _trunc_cache[key] = result
                return result
        r *= mpf("1.2")
    if y_abs > 0:
        raise TailDominated(
            "growth exp(%s t) defeats kernel decay for %s" % (y_abs, spec.label()))
    raise InvalidDecayBound("no truncation radius below search cap for %s"
                            % spec.label())


# ---------------------------------------------------------------------------
# Point evaluation
# ---------------------------------------------------------------------------

def _kernel_slack(radius: mpf, digits: int) -> mpf:
    # Kernel-evaluation error folded in as an absolute integral-level charge;
    # per-node kernel bounds are ~1e-(digits+4) relative to unit kernel scale.
    return (radius + 1) * mpf(10) ** (-(digits + 4))


def transform_eval(spec: TransformSpec, x: Real, deriv_order: int = 0,
                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> EstimatedValue:
    """p-th derivative of the cosine transform at real x."""
    if deriv_order < 0:
        raise ValueError("deriv_order must be >= 0")
    with working_dps(cfg.precision_digits):
        x = to_mpf(x)
        radius, tail = truncation(spec, deriv_order, 0, cfg)
        phase = deriv_order * mp.pi / 2
        digits = cfg.precision_digits

        def f(t):
            v = integrand_value(spec, t, digits)
            if deriv_order:
                v *= t ** deriv_order
            return v * mpmath.cos(x * t + phase)

        ev = integrate_half_line(f, cfg.with_policy(ExplicitRadius(radius, tail)),
                                 osc_freq=x)
        return ev.widened(_kernel_slack(radius, digits))


def transform_complex(spec: TransformSpec, x: Real, y: Real,
                      deriv_order: int = 0,
                      cfg: QuadratureConfig = DEFAULT_CONFIG) -> tuple:
    """Real and imaginary part of F^(p)(x + i y), each with a bound.

    Uses cos((x+iy)t + phase) = cos(xt+phase) cosh(yt) - i sin(xt+phase)
    sinh(yt); the truncation radius accounts for the exp(|y| t) growth and
    the evaluation fails with TailDominated when that growth wins.
    """
    with working_dps(cfg.precision_digits):
        x, y = to_mpf(x), to_mpf(y)
        digits = cfg.precision_digits
        if y == 0:
            return transform_eval(spec, x, deriv_order, cfg), \
                EstimatedValue(mpf(0), mpf(0))
        radius, tail = truncation(spec, deriv_order, abs(y), cfg)
        phase = deriv_order * mp.pi / 2
        policy = cfg.with_policy(ExplicitRadius(radius, tail))

        def base(t):
            v = integrand_value(spec, t, digits)
            if deriv_order:
                v *= t ** deriv_order
            return v

        re = integrate_half_line(
            lambda t: base(t) * mpmath.cos(x * t + phase) * mpmath.cosh(y * t),
            policy, osc_freq=x)
        im = integrate_half_line(
            lambda t: -base(t) * mpmath.sin(x * t + phase) * mpmath.sinh(y * t),
            policy, osc_freq=x)
        slack = _kernel_slack(radius, digits) * mpmath.cosh(y * radius)
        return re.widened(slack), im.widened(slack)


# ---------------------------------------------------------------------------
# Scan tables
# ---------------------------------------------------------------------------

class CosineScanTable:
    """Fixed composite quadrature grid for many-x cosine transform scans.

    The kernel is evaluated once on a uniform-width composite Clenshaw-Curtis
    grid whose panel width is capped at half the oscillation period of the
    largest scanned frequency; each subsequent x costs one pass of
    multiply-adds plus a handful of trigonometric evaluations (panel phases
    follow a rotation recurrence).  Error accounting keeps the embedded
    coarse-rule difference per panel, the truncation tail, a rounding term
    and a kernel-evaluation slack.
    """

    def __init__(self, values: Sequence[mpf], radius: mpf, tails: dict,
                 x_max: mpf, orders: tuple, cfg: QuadratureConfig,
                 extra_value_bound: mpf = mpf(0)):
        self.cfg = cfg
        self.digits = cfg.precision_digits
        self.orders = tuple(orders)
        self.radius = radius
        self.tails = dict(tails)
        self.x_max = x_max
        nodes, w_fine, w_diff, w_abs = cc_rule()
        self._n_nodes = len(nodes)
        n_panels = self._n_panels_for(radius, x_max)
        self.h = radius / n_panels
        self.n_panels = n_panels
        half = self.h / 2
        self.offsets = [half * (1 + xi) for xi in nodes]
        if len(values) != n_panels * self._n_nodes:
            raise ValueError("value grid size mismatch")
        self._w_fine = [half * w for w in w_fine]
        self._w_diff = [half * w for w in w_diff]
        # Per order: fine and diff weight*value tables, plus a fixed charge
        # covering rounding, node-value error and the truncation tail.
        self.tables = {}
        ulp = round_ulp(self.digits)
        for p in self.orders:
            fine, diff, rounding = [], [], mpf(0)
            for j in range(n_panels):
                a = self.h * j
                row_f, row_d = [], []
                for k in range(self._n_nodes):
                    t = a + self.offsets[k]
                    g = values[j * self._n_nodes + k] * (t ** p if p else mpf(1))
                    row_f.append(self._w_fine[k] * g)
                    row_d.append(self._w_diff[k] * g)
                    rounding += abs(row_f[-1])
                fine.append(row_f)
                diff.append(row_d)
            tail_p = self.tails.get(p, max(self.tails.values()) if self.tails else mpf(0))
            fixed = (rounding * (40 + n_panels) * ulp
                     + tail_p
                     + extra_value_bound * (radius ** (p + 1))
                     + _kernel_slack(radius, self.digits) * radius ** p)
            self.tables[p] = (fine, diff, fixed)

    @staticmethod
    def _n_panels_for(radius: mpf, x_max: mpf) -> int:
        n = 16
        if x_max > 0 and x_max * radius > 50:
            cap = mp.pi / x_max
            n = max(n, int(mpmath.ceil(radius / cap)))
        return n

    # -- construction -------------------------------------------------------

    @classmethod
    def from_spec(cls, spec: TransformSpec, x_max: Real,
                  cfg: QuadratureConfig = DEFAULT_CONFIG,
                  orders: tuple = (0,)) -> "CosineScanTable":
        with working_dps(cfg.precision_digits):
            x_max = to_mpf(x_max)
            radius, _ = truncation(spec, max(orders), 0, cfg)
            tails = {}
            for p in orders:
                rate = _decay_rate(spec, radius, p, mpf(0))
                maj = _integrand_majorant(spec, radius, p, mpf(0),
                                          cfg.precision_digits)
                tails[p] = 2 * maj / rate
            values = cls._grid_values(
                lambda t: integrand_value(spec, t, cfg.precision_digits),
                radius, x_max)
            return cls(values, radius, tails, x_max, orders, cfg)

    @classmethod
    def from_function(cls, g: Callable[[mpf], mpf], radius: Real, tails,
                      x_max: Real, cfg: QuadratureConfig = DEFAULT_CONFIG,
                      orders: tuple = (0,),
                      value_bound: Real = 0) -> "CosineScanTable":
        """Build from an arbitrary even half-line integrand.

        ``tails`` maps derivative order to a tail bound (a scalar applies to
        every requested order); ``value_bound`` is a uniform bound on the
        evaluation error of ``g``, charged per unit length of the grid.
        """
        with working_dps(cfg.precision_digits):
            radius = to_mpf(radius)
            x_max = to_mpf(x_max)
            if not isinstance(tails, dict):
                tails = {p: to_mpf(tails) for p in orders}
            values = cls._grid_values(g, radius, x_max)
            return cls(values, radius, tails, x_max, orders, cfg,
                       extra_value_bound=to_mpf(value_bound))

    @staticmethod
    def _grid_values(g, radius, x_max):
        nodes, _, _, _ = cc_rule()
        n_panels = CosineScanTable._n_panels_for(radius, x_max)
        h = radius / n_panels
        half = h / 2
        out = []
        for j in range(n_panels):
            a = h * j
            for xi in nodes:
                out.append(g(a + half * (1 + xi)))
        return out

    # -- evaluation ----------------------------------------------------------

    def eval_orders(self, x: Real, orders: Optional[tuple] = None) -> dict:
        """Transform derivatives at x for several orders in one trig pass."""
        orders = self.orders if orders is None else tuple(orders)
        with working_dps(self.digits):
            x = to_mpf(x)
            if abs(x) > self.x_max:
                raise UsageError("x=%s outside table range %s"
                                 % (x, self.x_max))
            co = [mpmath.cos(x * o) for o in self.offsets]
            si = [mpmath.sin(x * o) for o in self.offsets]
            ch = mpmath.cos(x * self.h)
            sh = mpmath.sin(x * self.h)
            need_cos = any(p % 2 == 0 for p in orders)
            need_sin = any(p % 2 == 1 for p in orders)
            acc_c = {p: mpf(0) for p in orders}
            acc_s = {p: mpf(0) for p in orders}
            err_c = {p: mpf(0) for p in orders}
            err_s = {p: mpf(0) for p in orders}
            cj, sj = mpf(1), mpf(0)
            n_nodes = self._n_nodes
            for j in range(self.n_panels):
                cos_t = [cj * co[k] - sj * si[k] for k in range(n_nodes)] \
                    if need_cos else None
                sin_t = [sj * co[k] + cj * si[k] for k in range(n_nodes)] \
                    if need_sin else None
                for p in orders:
                    fine, diff, _ = self.tables[p]
                    frow, drow = fine[j], diff[j]
                    trig = cos_t if p % 2 == 0 else sin_t
                    v = mpf(0)
                    d = mpf(0)
                    for k in range(n_nodes):
                        v += frow[k] * trig[k]
                        d += drow[k] * trig[k]
                    if p % 2 == 0:
                        acc_c[p] += v
                        err_c[p] += abs(d)
                    else:
                        acc_s[p] += v
                        err_s[p] += abs(d)
                cj, sj = cj * ch - sj * sh, sj * ch + cj * sh
            out = {}
            for p in orders:
                rem = p % 4
                if rem == 0:
                    v, e = acc_c[p], err_c[p]
                elif rem == 1:
                    v, e = -acc_s[p], err_s[p]
                elif rem == 2:
                    v, e = -acc_c[p], err_c[p]
                else:
                    v, e = acc_s[p], err_s[p]
                out[p] = EstimatedValue(v, e + self.tables[p][2])
            return out

    def eval(self, x: Real, order: int = 0) -> EstimatedValue:
        return self.eval_orders(x, (order,))[order]


# ---------------------------------------------------------------------------
# Zero scans
# ---------------------------------------------------------------------------

def real_zero_scan(spec: TransformSpec, interval: tuple, n_grid: int,
                   cfg: QuadratureConfig = DEFAULT_CONFIG,
                   table: Optional[CosineScanTable] = None) -> ZeroReport:
    """Bracket and refine the real zeros of the transform on the interval.

    Simplicity of each refined zero requires the first derivative of the
    transform there to exceed ten times its own error bound.
    """
    with working_dps(cfg.precision_digits):
        a, b = to_mpf(interval[0]), to_mpf(interval[1])
        if table is None:
            table = CosineScanTable.from_spec(spec, max(abs(a), abs(b)), cfg,
                                              orders=(0, 1))
        return bracket_zeros(
            lambda x: table.eval(x, 0), (a, b), n_grid,
            rel_tol=max(to_mpf(cfg.rel_tol), mpf(10) ** -28),
            abs_tol=max(to_mpf(cfg.abs_tol), mpf(10) ** -28),
            derivative=lambda x: table.eval(x, 1),
            simple_factor=10,
            precision_digits=cfg.precision_digits,
            estimates=True)


# ---------------------------------------------------------------------------
# Averages and heat flow
# ---------------------------------------------------------------------------

def average_positivity(spec: TransformSpec, t: Real,
                       cfg: QuadratureConfig = DEFAULT_CONFIG) -> EstimatedValue:
    """Integral over x >= 0 of K(x) sin(x t)/x (the running mean of the
    transform over [0, t], by Fubini)."""
    if to_mpf(t) <= 0:
        raise ValueError("t must be positive")
    with working_dps(cfg.precision_digits):
        t = to_mpf(t)
        digits = cfg.precision_digits
        radius, tail = truncation(spec, 0, 0, cfg)

        def f(u):
            g = integrand_value(spec, u, digits)
            z = u * t
            if abs(z) < mpf("1e-8"):
                # sin(z)/u = t (1 - z^2/6 + z^4/120 - ...)
                return g * t * (1 - z * z / 6 + z ** 4 / 120)
            return g * mpmath.sin(z) / u

        ev = integrate_half_line(f, cfg.with_policy(ExplicitRadius(radius, tail * t)),
                                 osc_freq=t)
        return ev.widened(_kernel_slack(radius, digits) * (t + 1))


@dataclass(frozen=True)
class HeatResidualReport:
    lam: float
    x: float
    d_lambda: EstimatedValue
    d_xx: EstimatedValue
    residual: mpf
    relative_residual: mpf


def heat_equation_residual(kernel: KernelDescriptor, lam: Real, x: Real,
                           cfg: QuadratureConfig = DEFAULT_CONFIG) -> HeatResidualReport:
    """Finite-difference check that the deformed transform solves the
    backward heat equation: d/dlam H = -d^2/dx^2 H."""
    with working_dps(cfg.precision_digits):
        lam = to_mpf(lam)
        x = to_mpf(x)

        def h_of_lam(l):
            return transform_eval(make_spec(kernel, l), x, 0, cfg).value

        def h_of_x(xx):
            return transform_eval(make_spec(kernel, lam), xx, 0, cfg).value

        d_lam = finite_difference(h_of_lam, lam, 1, h0=mpf("0.05"),
                                  precision_digits=cfg.precision_digits)
        d_xx = finite_difference(h_of_x, x, 2, h0=mpf("0.05"),
                                 precision_digits=cfg.precision_digits)
        resid = abs(d_lam.value + d_xx.value)
        scale = max(abs(d_lam.value), abs(d_xx.value))
        rel = resid / scale if scale > 0 else resid
        return HeatResidualReport(lam=float(lam), x=float(x), d_lambda=d_lam,
                                  d_xx=d_xx, residual=resid,
                                  relative_residual=rel)
