"""Associated kernels, positive-definiteness evidence, and the sine criterion.

Given an even positive kernel phi, the associated kernels are the weighted
autocorrelations

    K_n(t) = integral over s of phi(s+t) phi(s-t) s^(2n) ds,

optionally carrying the extra separation weight (s^2 - t^2)^m.  When phi is
strictly log-concave each K_n is again an admissible kernel, and the cosine
transform of K_n reproduces the generalized Laguerre expression of the
transform of phi up to an explicit constant; that identity is this module's
central cross-check.

Positive definiteness of an even integrable kernel is equivalent to
nonnegativity of its cosine transform, so the checks here scan that
transform (margin-certified), assemble Gram matrices, or test the sine-form
criterion through the primitive G-bar(t) = integral_t^oo K_1.  A finite scan
can refute positive definiteness (a certified negative value) but can only
collect evidence for it; verdicts are worded accordingly.

Performance: the node values of every K_n cosine-transform scan come from
direct inner quadratures, memoized per (kernel, n, weight, frequency bucket)
and shared across all n via vectorized panels.  A uniform t-grid with cubic
interpolation backs the pointwise uses (Gram matrices, admissibility grids,
the G-bar primitive) where its per-point error bound is appropriate.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import mpmath
import numpy as np
from mpmath import mp, mpf

from . import kernels as kmod
from .errors import HypothesisUnverified, UsageError
from .kernels import (KernelDescriptor, kernel_eval, kernel_majorant,
                      kernel_value_fast, log_decay_rate)
from .numerics import (DEFAULT_CONFIG, EstimatedValue, ExplicitRadius,
                       QuadratureConfig, Real, ZeroReport, bracket_zeros,
                       ev_div, integrate_half_line, integrate_half_line_multi,
                       round_ulp, to_mpf, working_dps)
from .transform import CosineScanTable

_build_lock = threading.Lock()


# ---------------------------------------------------------------------------
# Inner quadrature for K_n(t)
# ---------------------------------------------------------------------------

def _inner_truncation(phi: KernelDescriptor, t: mpf, max_power: int,
                      cfg: QuadratureConfig, abs_tol=None) -> tuple:
    """Radius S and tail bound for the s-integral of the autocorrelation.

    S is pushed out until phi(S-t) phi(S+t) S^power is below abs_tol/(10 S)
    and the product's log-decay rate is at least 1.
    """
    abs_tol = to_mpf(cfg.abs_tol) if abs_tol is None else to_mpf(abs_tol)
    digits = cfg.precision_digits
    s = abs(t) + 1
    while s <= abs(t) + 130:
        rate = (log_decay_rate(phi, s - t) + log_decay_rate(phi, s + t)
                - to_mpf(max_power) / s) if s - t >= 1 else mpf(0)
        if rate >= 1:
            maj = (kernel_majorant(phi, s - t, digits)
                   * kernel_majorant(phi, s + t, digits) * s ** max_power)
            if maj * 10 * s < abs_tol:
                return s, 2 * maj / rate
        s *= mpf("1.2")
    raise UsageError("no inner truncation radius for %s at t=%s"
                     % (phi.label, t))


def _local_scale(phi: KernelDescriptor, t: mpf, digits: int,
                 s_power: int = 0) -> mpf:
    """Dimensionless size hint for K_n(t): the integrand's value at s = 0
    relative to the kernel's peak, used to scale absolute tolerances so that
    sign certification survives the kernel's own decay (which can span
    thousands of orders of magnitude; mpf exponents carry it).  For an
    s^power weight the peak at s = 0 is suppressed by the s-width of the
    kernel product, which shrinks like the inverse log-decay rate."""
    sup = _phi_sup(phi, digits)
    ratio = abs(kernel_value_fast(phi, t, digits)) / sup
    if ratio == 0:
        # kernels with a monomial factor vanish at t = 0; a nearby value
        # sets the scale instead
        ratio = abs(kernel_value_fast(phi, t + mpf(1) / 8, digits)) / sup
    scale = ratio * ratio
    if s_power:
        width = 1 / mpmath.sqrt(8 * (1 + abs(log_decay_rate(phi, max(t, mpf(1))))))
        scale *= min(mpf(1), width) ** s_power
    return min(mpf(1), scale)


def _phi_value(phi: KernelDescriptor, u: mpf, digits: int) -> mpf:
    return kernel_value_fast(phi, u, digits)


def assoc_kernel_eval(phi: KernelDescriptor, n: int, t: Real,
                      cfg: QuadratureConfig = DEFAULT_CONFIG,
                      weight_m: int = 0) -> EstimatedValue:
    """K_n(t) by adaptive quadrature (even in both s and t)."""
    if n < 0:
        raise UsageError("n must be >= 0")
    with working_dps(cfg.precision_digits):
        t = abs(to_mpf(t))
        return assoc_kernel_multi(phi, (n,), t, cfg, weight_m)[n]


def assoc_kernel_multi(phi: KernelDescriptor, n_list: Sequence[int], t: mpf,
                       cfg: QuadratureConfig = DEFAULT_CONFIG,
                       weight_m: int = 0) -> dict:
    """K_n(t) for several n, sharing the kernel-product evaluations.

    Tolerances scale with the integrand's own peak so the bounds stay
    proportional to the value even where the kernel has collapsed by
    thousands of orders of magnitude.
    """
    digits = cfg.precision_digits
    n_list = tuple(sorted(set(n_list)))
    max_power = 2 * max(n_list) + 2 * weight_m
    scale = _local_scale(phi, t, digits, max_power)
    local_tol = to_mpf(cfg.abs_tol) * scale
    radius, tail = _inner_truncation(phi, t, max_power, cfg, abs_tol=local_tol)
    local_cfg = QuadratureConfig(cfg.rel_tol, local_tol, cfg.max_panels,
                                 ExplicitRadius(radius, tail),
                                 cfg.precision_digits)
    t2 = t * t

    def f_vec(s):
        prod = _phi_value(phi, s + t, digits) * _phi_value(phi, s - t, digits)
        if weight_m:
            prod *= (s * s - t2) ** weight_m
        s2 = s * s
        out = []
        for n in n_list:
            out.append(prod * s2 ** n if n else prod)
        return out

    evs = integrate_half_line_multi(f_vec, len(n_list), local_cfg,
                                    tails=[tail] * len(n_list))
    out = {}
    for n, ev in zip(n_list, evs):
        slack = (radius + 1) * mpf(10) ** (-(digits + 3)) \
            * (abs(ev.value) + local_tol)
        out[n] = ev.scaled(2).widened(slack)
    return out


def assoc_kernel_derivative(phi: KernelDescriptor, n: int, t: Real,
                            cfg: QuadratureConfig = DEFAULT_CONFIG) -> EstimatedValue:
    """d/dt K_n(t) via the differentiated autocorrelation integrand.

    Independent of the value route: integrates
    2 [phi'(t+s) phi(t-s) + phi(t+s) phi'(t-s)] s^(2n) over s >= 0.
    """
    with working_dps(cfg.precision_digits):
        t = to_mpf(t)
        sign = mpf(1)
        if t < 0:
            t, sign = -t, mpf(-1)
        digits = cfg.precision_digits
        scale = _local_scale(phi, t, digits, 2 * n)
        # the differentiated integrand carries the kernel's log-slope
        rate_at = abs(log_decay_rate(phi, max(t, mpf(1))))
        local_tol = to_mpf(cfg.abs_tol) * scale * (1 + rate_at)
        radius, tail = _inner_truncation(phi, t, 2 * n, cfg, abs_tol=local_tol)
        local_cfg = QuadratureConfig(cfg.rel_tol, local_tol, cfg.max_panels,
                                     ExplicitRadius(radius, 8 * tail * (1 + rate_at)),
                                     cfg.precision_digits)

        def f(s):
            d_plus = kernel_eval(phi, t + s, 1, digits).value
            v_minus = _phi_value(phi, t - s, digits)
            v_plus = _phi_value(phi, t + s, digits)
            d_minus = kernel_eval(phi, t - s, 1, digits).value
            g = d_plus * v_minus + v_plus * d_minus
            return g * s ** (2 * n) if n else g

        ev = integrate_half_line(f, local_cfg)
        slack = (radius + 1) * mpf(10) ** (-(digits + 3)) \
            * (abs(ev.value) + local_tol)
        return ev.scaled(2 * sign).widened(slack)


def log_slope_cross_inequality(phi: KernelDescriptor, t: Real, s: Real,
                               cfg: QuadratureConfig = DEFAULT_CONFIG) -> dict:
    """Spot check phi'(t+s)/phi(t+s) < -phi'(t-s)/phi(t-s) at one (t, s).

    This is the pointwise inequality behind monotone decrease of the
    associated kernels of a log-concave kernel.
    """
    digits = cfg.precision_digits
    with working_dps(digits):
        t, s = to_mpf(t), to_mpf(s)
        lhs = ev_div(kernel_eval(phi, t + s, 1, digits),
                     kernel_eval(phi, t + s, 0, digits))
        rhs = -ev_div(kernel_eval(phi, t - s, 1, digits),
                      kernel_eval(phi, t - s, 0, digits))
        margin = rhs - lhs
        return {"t": t, "s": s, "lhs": lhs, "rhs": rhs,
                "holds_certified": margin.certainly_positive()}


# ---------------------------------------------------------------------------
# Memoized uniform grid with cubic interpolation (pointwise uses)
# ---------------------------------------------------------------------------

class AssocKernelTable:
    """Uniform t-grid of K_n values with cubic interpolation and prefixes.

    Built once per (kernel, n, weight); interpolation error is charged from
    the local fourth difference, node error from the stored bounds.  The
    prefix integrals integrate the cubic interpolant cell by cell, giving
    the primitive needed for G-bar.
    """

    def __init__(self, phi: KernelDescriptor, n: int, weight_m: int,
                 h: mpf, values: list, cfg: QuadratureConfig):
        self.phi = phi
        self.n = n
        self.weight_m = weight_m
        self.h = h
        self.values = values
        self.cfg = cfg
        self.t_end = h * (len(values) - 1)
        self.floor = max(abs(values[-1].value) + values[-1].abs_error_bound,
                         to_mpf(cfg.abs_tol) * mpf(10) ** -8)
        self.tail_mass = 4 * self.floor * max(mpf(1), self.t_end)
        self._d4 = self._fourth_diffs(values)
        self._prefix = self._build_prefix()

    @staticmethod
    def _fourth_diffs(values):
        n = len(values)
        out = [mpf(0)] * n
        for j in range(2, n - 2):
            out[j] = abs(values[j - 2].value - 4 * values[j - 1].value
                         + 6 * values[j].value - 4 * values[j + 1].value
                         + values[j + 2].value)
        for j in (0, 1):
            out[j] = out[2]
        for j in (n - 2, n - 1):
            out[j] = out[n - 3]
        return out

    def _cell_nodes(self, j: int):
        # Four consecutive values around cell [t_j, t_{j+1}], using the even
        # extension at the left edge and zero-extension past the right edge.
        idx = [j - 1, j, j + 1, j + 2]
        vals = []
        for i in idx:
            if i < 0:
                vals.append(self.values[-i])
            elif i < len(self.values):
                vals.append(self.values[i])
            else:
                vals.append(EstimatedValue(mpf(0), self.floor))
        return vals

    def interpolate(self, t: Real) -> EstimatedValue:
        t = abs(to_mpf(t))
        if t >= self.t_end:
            return EstimatedValue(mpf(0), self.floor)
        j = int(t / self.h)
        j = min(j, len(self.values) - 2)
        v = self._cell_nodes(j)
        xi = t / self.h - j            # in [0, 1] across the cell
        c0 = -xi * (xi - 1) * (xi - 2) / 6
        c1 = (xi + 1) * (xi - 1) * (xi - 2) / 2
        c2 = -(xi + 1) * xi * (xi - 2) / 2
        c3 = (xi + 1) * xi * (xi - 1) / 6
        value = (c0 * v[0].value + c1 * v[1].value
                 + c2 * v[2].value + c3 * v[3].value)
        node_bound = max(x.abs_error_bound for x in v)
        d4 = max(self._d4[max(0, j - 1): j + 3] or [mpf(0)])
        interp_err = (mpf(3) / 128) * (d4 + 16 * node_bound)
        return EstimatedValue(value, 2 * node_bound + interp_err)

    def _build_prefix(self):
        # integral over [t_j, t_{j+1}] of the cubic through the 4 surrounding
        # nodes: h (-f_{-1} + 13 f_0 + 13 f_1 - f_2) / 24.
        acc = EstimatedValue(mpf(0), mpf(0))
        out = [acc]
        for j in range(len(self.values) - 1):
            v = self._cell_nodes(j)
            cell = (v[0].scaled(-1) + v[1].scaled(13) + v[2].scaled(13)
                    + v[3].scaled(-1)).scaled(self.h / 24)
            cell = cell.widened((mpf(3) / 128) * self._d4[j] * self.h)
            acc = acc + cell
            out.append(acc)
        return out

    def prefix(self, t: Real) -> EstimatedValue:
        """Integral of the kernel from 0 to t (t clipped to the grid end)."""
        t = abs(to_mpf(t))
        if t >= self.t_end:
            return self._prefix[-1]
        j = min(int(t / self.h), len(self.values) - 2)
        base = self._prefix[j]
        # Integrate the cell cubic from t_j to t; antiderivatives of the
        # Lagrange basis on nodes xi = -1, 0, 1, 2 evaluated at xi in [0,1].
        v = self._cell_nodes(j)
        xi = t / self.h - j
        a0 = -(xi ** 4 / 4 - xi ** 3 + xi ** 2) / 6
        a1 = (xi ** 4 / 4 - 2 * xi ** 3 / 3 - xi ** 2 / 2 + 2 * xi) / 2
        a2 = -(xi ** 4 / 4 - xi ** 3 / 3 - xi ** 2) / 2
        a3 = (xi ** 4 / 4 - xi ** 2 / 2) / 6
        part = (v[0].scaled(a0) + v[1].scaled(a1) + v[2].scaled(a2)
                + v[3].scaled(a3)).scaled(self.h)
        part = part.widened((mpf(3) / 128) * self._d4[j] * self.h)
        return base + part

    def total(self) -> EstimatedValue:
        """Integral of the kernel over [0, oo), tail mass included."""
        return self._prefix[-1].widened(self.tail_mass)


_grid_cache: dict = {}


def kernel_value_table(phi: KernelDescriptor, n_list: Sequence[int],
                       cfg: QuadratureConfig = DEFAULT_CONFIG,
                       weight_m: int = 0) -> dict:
    """Memoized uniform-grid tables of K_n for all requested n."""
    n_list = tuple(sorted(set(n_list)))
    key = (phi.key(), weight_m, cfg.precision_digits, str(cfg.abs_tol))
    with _build_lock:
        store = _grid_cache.setdefault(key, {})
        missing = [n for n in n_list if n not in store]
        if missing:
            with working_dps(cfg.precision_digits):
                h, cols = _build_grid_columns(phi, tuple(missing), weight_m, cfg)
                for n in missing:
                    store[n] = AssocKernelTable(phi, n, weight_m, h, cols[n], cfg)
        return {n: store[n] for n in n_list}


def _grid_step(phi: KernelDescriptor) -> mpf:
    if phi.family == kmod.GAUSSPOLY:
        return mpf(1) / 128
    return mpf(1) / 224


def _build_grid_columns(phi, n_list, weight_m, cfg):
    # The grid extends until the kernel values sink below the quadrature
    # resolution (a few abs_tol), which is also the interpolation floor
    # charged past the grid end.
    digits = cfg.precision_digits
    h = _grid_step(phi)
    floor = None
    cols = {n: [] for n in n_list}
    t = mpf(0)
    chunk = 32
    while True:
        for _ in range(chunk):
            evs = assoc_kernel_multi(phi, n_list, t, cfg, weight_m)
            for n in n_list:
                cols[n].append(evs[n])
            t += h
        if floor is None:
            scale = max(max(abs(v.value) for v in cols[n]) for n in n_list)
            floor = max(scale * mpf(10) ** (-(digits + 6)),
                        4 * to_mpf(cfg.abs_tol))
        tail_now = max(abs(cols[n][-1].value) for n in n_list)
        if tail_now < floor or t > 40:
            break
    return h, cols


# ---------------------------------------------------------------------------
# Scan tables for the cosine transform of K_n
# ---------------------------------------------------------------------------

_X_BUCKETS = (2, 4, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256)

_scan_cache: dict = {}


def _x_bucket(x_max: Real) -> int:
    x = float(abs(to_mpf(x_max)))
    for b in _X_BUCKETS:
        if x <= b:
            return b
    raise UsageError("frequency %s beyond supported scan range" % x_max)


def transform_scan_table(phi: KernelDescriptor, n: int, x_max: Real,
                         cfg: QuadratureConfig = DEFAULT_CONFIG,
                         weight_m: int = 0,
                         orders: tuple = (0,)) -> CosineScanTable:
    """Scan table for x -> integral_0^oo K_n(t) cos(x t) dt.

    Node values of K_n are computed by direct inner quadrature (no
    interpolation enters the transform path) and memoized per frequency
    bucket, shared across n.
    """
    bucket = _x_bucket(x_max)
    key = (phi.key(), weight_m, bucket, cfg.precision_digits, str(cfg.abs_tol))
    okey = key + (n, tuple(orders))
    with _build_lock:
        hit = _scan_cache.get(okey)
        if hit is not None:
            return hit
        node_store = _scan_cache.setdefault(("nodes",) + key, {})
        with working_dps(cfg.precision_digits):
            if n not in node_store:
                _fill_scan_nodes(phi, (n,), weight_m, bucket, cfg, node_store)
            radius, values, bound, tails = node_store[n]
            table = CosineScanTable(values, radius, tails, mpf(bucket),
                                    orders, cfg, extra_value_bound=bound)
        _scan_cache[okey] = table
        return table


def prepare_scan_nodes(phi: KernelDescriptor, n_list: Sequence[int],
                       x_max: Real, cfg: QuadratureConfig = DEFAULT_CONFIG,
                       weight_m: int = 0) -> None:
    """Precompute scan nodes for several n in one shared pass."""
    bucket = _x_bucket(x_max)
    key = (phi.key(), weight_m, bucket, cfg.precision_digits, str(cfg.abs_tol))
    with _build_lock:
        node_store = _scan_cache.setdefault(("nodes",) + key, {})
        missing = tuple(n for n in sorted(set(n_list)) if n not in node_store)
        if missing:
            with working_dps(cfg.precision_digits):
                _fill_scan_nodes(phi, missing, weight_m, bucket, cfg, node_store)


def _fill_scan_nodes(phi, n_list, weight_m, bucket, cfg, node_store):
    radius = _scan_radius(phi, max(n_list), weight_m, cfg)
    # grid of node coordinates (identity integrand shapes the same panels the
    # table will use)
    grid = CosineScanTable._grid_values(lambda t: t, radius, mpf(bucket))
    values = {n: [] for n in n_list}
    bounds = {n: mpf(0) for n in n_list}
    for t in grid:
        evs = assoc_kernel_multi(phi, n_list, t, cfg, weight_m)
        for n in n_list:
            values[n].append(evs[n].value)
            bounds[n] = max(bounds[n], evs[n].abs_error_bound)
    for n in n_list:
        tail0 = _assoc_majorant(phi, n, weight_m, radius, cfg) * 4
        tails = {p: tail0 * (radius + 1) ** p for p in range(0, 9)}
        node_store[n] = (radius, values[n], bounds[n], tails)


_phi_sup_cache: dict = {}


def _phi_sup(phi: KernelDescriptor, digits: int) -> mpf:
    key = (phi.key(), mp.prec)
    hit = _phi_sup_cache.get(key)
    if hit is None:
        hit = 2 * max(kernel_majorant(phi, mpf(i) / 4, digits) for i in range(33))
        _phi_sup_cache[key] = hit
    return hit


def _assoc_majorant(phi, n, weight_m, t, cfg) -> mpf:
    # For any even kernel, max(|s+t|, |s-t|) >= max(|s|, |t|), so the product
    # phi(s+t) phi(s-t) is at most sup(phi) * maj(max(|s|, |t|)); splitting
    # the s-integral at |s| = t bounds K_n(t) by sup(phi) * maj(t) times an
    # explicit polynomial factor in t.
    digits = cfg.precision_digits
    d = 2 * n + 2 * weight_m
    rate = max(log_decay_rate(phi, max(t, mpf(1))), mpf(1))
    poly_factor = (mpf(2) ** weight_m
                   * (2 * (t + 1) ** (d + 1) + 2 * (1 + t) ** d / rate))
    return _phi_sup(phi, digits) * kernel_majorant(phi, t, digits) * poly_factor


def _scan_radius(phi, n_max, weight_m, cfg) -> mpf:
    abs_tol = to_mpf(cfg.abs_tol)
    r = mpf(2)
    while r < 60:
        if log_decay_rate(phi, r) >= 1 and \
                _assoc_majorant(phi, n_max, weight_m, r, cfg) * (1 + r) < abs_tol / 100:
            return r
        r += mpf(1) / 2
    return mpf(60)


def laguerre_kernel_route(phi: KernelDescriptor, n: int, x: Real,
                          cfg: QuadratureConfig = DEFAULT_CONFIG) -> EstimatedValue:
    """L_n of the half-line cosine transform of phi, via the kernel route.

    The classical identity expresses L_n of the whole-line transform as
    (2 * 4^n / (2n)!) times the whole-line cosine transform of K_n at twice
    the argument.  This package normalizes transforms to the half line (half
    the whole-line value for even kernels), which divides the left side by 4
    and halves the integral, leaving

        L_n(x) = (4^n / (2n)!) * integral_0^oo K_n(t) cos(2 x t) dt.
    """
    with working_dps(cfg.precision_digits):
        x = to_mpf(x)
        table = transform_scan_table(phi, n, max(2 * abs(x), mpf(1)), cfg,
                                     orders=(0,))
        ev = table.eval(2 * abs(x), 0)
        return ev.scaled(mpf(4) ** n / math.factorial(2 * n))


# ---------------------------------------------------------------------------
# Admissibility of associated kernels
# ---------------------------------------------------------------------------

def assoc_admissibility(phi: KernelDescriptor, n: int, t_max: Real, n_grid: int,
                        cfg: QuadratureConfig = DEFAULT_CONFIG,
                        log_concavity=None):
    """Admissibility report for K_n, plus log-slope inequality spot checks.

    The hypothesis (strict log-concavity of phi) is verified first unless a
    passing report is supplied; HypothesisUnverified is raised otherwise.
    """
    digits = cfg.precision_digits
    if log_concavity is None:
        log_concavity = kmod.log_concavity_check(
            phi, "identity", (to_mpf(t_max) / 50, min(to_mpf(t_max), mpf(3))),
            32, digits)
    if not log_concavity.passed:
        raise HypothesisUnverified("kernel %s is not certified log-concave"
                                   % phi.label)

    def eval_fn(t, order):
        t = to_mpf(t)
        if order == 0:
            return assoc_kernel_eval(phi, n, t, cfg)
        if order == 1:
            return assoc_kernel_derivative(phi, n, t, cfg)
        raise UsageError("associated kernels expose derivative orders 0 and 1")

    # The decay regression needs only a few significant digits; theta-family
    # arguments past t ~ 8 round away even those (the exp argument exceeds
    # the working precision's absolute resolution), so their window stays
    # near the report interval.
    loose = QuadratureConfig(rel_tol=1e-2, abs_tol=cfg.abs_tol,
                             max_panels=cfg.max_panels,
                             precision_digits=digits)

    def decay_eval(t, order):
        return assoc_kernel_eval(phi, n, to_mpf(t), loose)

    window = None
    if phi.family != kmod.GAUSSPOLY:
        lo = min(max(to_mpf(t_max), mpf(3)), mpf(5))
        window = (lo, lo + 3)
    report = kmod.admissibility_report(phi, t_max, n_grid, digits,
                                       eval_fn=eval_fn,
                                       label="assoc[n=%d]%s" % (n, phi.label),
                                       decay_eval_fn=decay_eval,
                                       decay_window=window)
    spots = [log_slope_cross_inequality(phi, t, s, cfg)
             for (t, s) in ((mpf(1), mpf("0.5")), (mpf("0.5"), mpf("0.25")),
                            (mpf(2), mpf(1)))]
    return report, spots


# ---------------------------------------------------------------------------
# Positive definiteness checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PDReport:
    method: str
    kernel: str
    verdict: str                      # no_negativity_found | negativity_witness | inconclusive
    x_max: float
    n_grid: int
    min_value: EstimatedValue
    argmin: mpf
    witness_x: Optional[mpf]
    witness_value: Optional[EstimatedValue]
    min_certified_positive: bool
    tail_note: str


def pd_check_transform(phi: KernelDescriptor, n: int, x_max: Real, n_grid: int,
                       cfg: QuadratureConfig = DEFAULT_CONFIG,
                       weight_m: int = 0) -> PDReport:
    """Scan the cosine transform of K_n for certified sign information.

    A margin-certified negative value is a witness against positive
    definiteness.  Absence of one is evidence only: the verdict never claims
    positive definiteness outright, since no finite scan can certify the
    infinite condition.
    """
    with working_dps(cfg.precision_digits):
        x_max = to_mpf(x_max)
        table = transform_scan_table(phi, n, x_max, cfg, weight_m, orders=(0,))
        pts = [x_max * i / (n_grid - 1) for i in range(n_grid)]
        values = [table.eval(x, 0) for x in pts]
        return _pd_report_from_scan("transform_nonnegativity",
                                    "assoc[n=%d,m=%d]%s" % (n, weight_m, phi.label),
                                    pts, values, x_max, n_grid)


def pd_check_table_scan(label: str, table: CosineScanTable, x_max: Real,
                        n_grid: int) -> PDReport:
    """Same scan logic over a caller-provided transform table."""
    x_max = to_mpf(x_max)
    pts = [x_max * i / (n_grid - 1) for i in range(n_grid)]
    values = [table.eval(x, 0) for x in pts]
    return _pd_report_from_scan("transform_nonnegativity", label, pts, values,
                                x_max, n_grid)


def _pd_report_from_scan(method, label, pts, values, x_max, n_grid) -> PDReport:
    i_min = min(range(len(values)), key=lambda i: values[i].value)
    min_v = values[i_min]
    witness_i = None
    uncertified_negative = False
    for i, v in enumerate(values):
        if v.certainly_negative():
            witness_i = i
            break
        if v.value < 0:
            uncertified_negative = True
    if witness_i is not None:
        verdict = "negativity_witness"
    elif uncertified_negative:
        verdict = "inconclusive"
    else:
        verdict = "no_negativity_found"
    end_mag = abs(values[-1].value)
    tail_note = ("scan minimum %s at x=%s; |transform| at x_max is %s "
                 "(decay toward zero at high frequency observed: %s)"
                 % (mpmath.nstr(min_v.value, 8), mpmath.nstr(pts[i_min], 8),
                    mpmath.nstr(end_mag, 8),
                    bool(end_mag <= abs(values[0].value))))
    return PDReport(
        method=method, kernel=label, verdict=verdict, x_max=float(x_max),
        n_grid=n_grid, min_value=min_v, argmin=pts[i_min],
        witness_x=pts[witness_i] if witness_i is not None else None,
        witness_value=values[witness_i] if witness_i is not None else None,
        min_certified_positive=bool(min_v.certainly_positive()
                                    and verdict == "no_negativity_found"),
        tail_note=tail_note)


def assoc_real_zero_scan(phi: KernelDescriptor, n: int, interval: tuple,
                         n_grid: int,
                         cfg: QuadratureConfig = DEFAULT_CONFIG) -> ZeroReport:
    """Zero scan of the K_n cosine transform, simplicity via its derivative."""
    with working_dps(cfg.precision_digits):
        a, b = to_mpf(interval[0]), to_mpf(interval[1])
        table = transform_scan_table(phi, n, max(abs(a), abs(b)), cfg,
                                     orders=(0, 1))
        return bracket_zeros(
            lambda x: table.eval(x, 0), (a, b), n_grid,
            rel_tol=mpf(10) ** -24, abs_tol=mpf(10) ** -24,
            derivative=lambda x: table.eval(x, 1),
            simple_factor=10, precision_digits=cfg.precision_digits,
            estimates=True)


# -- Gram route ---------------------------------------------------------------

@dataclass(frozen=True)
class GramReport:
    min_eigenvalue: float
    matrix_dim: int


def pd_check_gram(k_func: Callable[[float], float],
                  points: Sequence[float]) -> GramReport:
    """Smallest eigenvalue of the Gram matrix [k(x_i - x_j)].

    Standard double-precision symmetric eigensolver; evidence for positive
    definiteness when the smallest eigenvalue is nonnegative up to rounding.
    """
    pts = list(points)
    if len(set(pts)) != len(pts):
        raise UsageError("Gram points must be distinct")
    if len(pts) > 200:
        raise UsageError("Gram check capped at 200 points")
    dim = len(pts)
    mat = np.empty((dim, dim), dtype=float)
    for i in range(dim):
        for j in range(i, dim):
            v = float(k_func(abs(pts[i] - pts[j])))
            mat[i, j] = v
            mat[j, i] = v
    eigs = np.linalg.eigvalsh(mat)
    return GramReport(min_eigenvalue=float(eigs[0]), matrix_dim=dim)


def gram_form(k_func: Callable[[float], float], points: Sequence[float],
              rho: Sequence[float]) -> float:
    """Value of the Hermitian form sum_ij k(x_i - x_j) rho_i rho_j."""
    pts = list(points)
    total = 0.0
    for i, xi in enumerate(pts):
        for j, xj in enumerate(pts):
            total += float(k_func(abs(xi - xj))) * rho[i] * rho[j]
    return total


def cosine_probe_vector(points: Sequence[float], frequency: float,
                        tapered: bool = True) -> list:
    """Probe coefficients cos(frequency * x_j), tuned to a transform witness.

    A Hann taper suppresses the lattice boundary term, concentrating the
    Hermitian form near the probed frequency; aim ``frequency`` at the scan
    argmin of a certified-negative transform region and the form goes
    negative once the window spans a few oscillation periods.
    """
    n = len(points)
    out = []
    for j, x in enumerate(points):
        w = math.sin(math.pi * j / (n - 1)) ** 2 if (tapered and n > 1) else 1.0
        out.append(math.cos(frequency * x) * w)
    return out


# -- sine criterion -----------------------------------------------------------

@dataclass(frozen=True)
class GBar:
    t: mpf
    value: EstimatedValue
    A: EstimatedValue


@dataclass(frozen=True)
class SineCriterionReport:
    x: float
    lhs: EstimatedValue               # integral of G-bar(t) sin(x t)
    a_value: EstimatedValue           # A = G-bar(0)
    cosine_direct: EstimatedValue     # integral of K_1(t) cos(x t)
    identity_residual: mpf
    identity_within_bounds: bool
    printed_form_holds: bool          # lhs <= A / x
    derivation_form_holds: bool       # x * lhs <= A


def gbar(phi: KernelDescriptor, t: Real,
         cfg: QuadratureConfig = DEFAULT_CONFIG) -> GBar:
    """G-bar(t) = integral_t^oo K_1(u) du from the memoized grid primitive."""
    with working_dps(cfg.precision_digits):
        t = to_mpf(t)
        table = kernel_value_table(phi, (1,), cfg)[1]
        total = table.total()
        return GBar(t=t, value=total - table.prefix(t), A=total)


def sine_criterion(phi: KernelDescriptor, x: Real,
                   cfg: QuadratureConfig = DEFAULT_CONFIG) -> SineCriterionReport:
    """Evaluate the sine-form positive-definiteness criterion for K_1.

    Integration by parts gives

        integral_0^oo K_1(t) cos(x t) dt = A - x * integral_0^oo G-bar(t) sin(x t) dt,

    so nonnegativity of the left side for every x is equivalent to
    x * integral G-bar sin <= A.  Both that derivation form and the commonly
    printed form (integral G-bar sin <= A / x) are reported, and the identity
    itself is checked numerically.
    """
    if to_mpf(x) == 0:
        raise UsageError("x must be nonzero")
    with working_dps(cfg.precision_digits):
        x = to_mpf(x)
        table = kernel_value_table(phi, (1,), cfg)[1]
        total = table.total()

        def gbar_val(t):
            return total.value - table.prefix(t).value

        lhs = integrate_half_line(
            lambda t: gbar_val(t) * mpmath.sin(x * t),
            cfg.with_policy(ExplicitRadius(table.t_end,
                                           table.tail_mass * (table.t_end + 1))),
            osc_freq=x)
        lhs = lhs.widened(table.t_end * table.total().abs_error_bound)
        ctable = transform_scan_table(phi, 1, max(abs(x), mpf(1)), cfg,
                                      orders=(0,))
        cosine_direct = ctable.eval(abs(x), 0)
        identity_gap = abs(cosine_direct.value - (total.value - x * lhs.value))
        slack = (cosine_direct.abs_error_bound + total.abs_error_bound
                 + abs(x) * lhs.abs_error_bound)
        return SineCriterionReport(
            x=float(x), lhs=lhs, a_value=total, cosine_direct=cosine_direct,
            identity_residual=identity_gap,
            identity_within_bounds=bool(identity_gap <= slack),
            printed_form_holds=bool(lhs.value <= total.value / x),
            derivation_form_holds=bool(x * lhs.value <= total.value))
