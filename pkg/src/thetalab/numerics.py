"""Precision-aware scalars, adaptive half-line quadrature, finite differences
and real-zero bracketing.

Everything here computes with ``mpmath`` reals at a configurable working
precision (default 30 significant digits) and carries an explicit absolute
error bound next to every value.  The bounds are "rigorous-style": quadrature
error is estimated from an embedded Clenshaw-Curtis pair, truncation tails
come from caller-supplied decay envelopes, and rounding is charged at a few
ulps per accumulated term.  They are honest working bounds, not certified
interval arithmetic.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import mpmath
from mpmath import mp, mpf

from .errors import InvalidDecayBound, NonConvergence

# Extra working digits beyond the requested precision; absorbs rounding in
# long accumulations so the charged rounding term stays conservative.
GUARD_DIGITS = 8

Real = Union[int, float, str, mpf]


def to_mpf(x: Real) -> mpf:
    return x if isinstance(x, mpf) else mpf(x)


def working_dps(precision_digits: int):
    """Context manager setting the working precision for a computation."""
    return mp.workdps(precision_digits + GUARD_DIGITS)


def round_ulp(precision_digits: int) -> mpf:
    """Per-term rounding charge at the given (requested) precision."""
    return mpf(10) ** (-(precision_digits + GUARD_DIGITS - 2))


# ---------------------------------------------------------------------------
# Estimated values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EstimatedValue:
    """A computed real number together with an absolute error bound.

    Invariants: ``value`` is finite (NaN/Inf is an error state and is never
    stored) and ``abs_error_bound`` is finite and nonnegative.
    """

    value: mpf
    abs_error_bound: mpf

    def __post_init__(self):
        v = to_mpf(self.value)
        b = to_mpf(self.abs_error_bound)
        if not mpmath.isfinite(v):
            raise ValueError("EstimatedValue.value must be finite, got %r" % (v,))
        if not mpmath.isfinite(b) or b < 0:
            raise ValueError("abs_error_bound must be finite and >= 0, got %r" % (b,))
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "abs_error_bound", b)

    # -- arithmetic with first-order error propagation ---------------------

    def __add__(self, other: "EstimatedValue") -> "EstimatedValue":
        return EstimatedValue(self.value + other.value,
                              self.abs_error_bound + other.abs_error_bound)

    def __sub__(self, other: "EstimatedValue") -> "EstimatedValue":
        return EstimatedValue(self.value - other.value,
                              self.abs_error_bound + other.abs_error_bound)

    def __neg__(self) -> "EstimatedValue":
        return EstimatedValue(-self.value, self.abs_error_bound)

    def __mul__(self, other: "EstimatedValue") -> "EstimatedValue":
        # First-order product rule plus the cross term, which keeps the bound
        # valid (not merely first-order) for products of two estimates.
        b = (abs(self.value) * other.abs_error_bound
             + abs(other.value) * self.abs_error_bound
             + self.abs_error_bound * other.abs_error_bound)
        return EstimatedValue(self.value * other.value, b)

    def scaled(self, c: Real) -> "EstimatedValue":
        c = to_mpf(c)
        return EstimatedValue(c * self.value, abs(c) * self.abs_error_bound)

    def widened(self, extra: Real) -> "EstimatedValue":
        return EstimatedValue(self.value, self.abs_error_bound + abs(to_mpf(extra)))

    # -- sign certification -------------------------------------------------

    def certified_sign(self) -> int:
        """+1 / -1 when the sign is certain given the bound, else 0."""
        if self.value - self.abs_error_bound > 0:
            return 1
        if self.value + self.abs_error_bound < 0:
            return -1
        return 0

    def certainly_positive(self) -> bool:
        return self.certified_sign() > 0

    def certainly_negative(self) -> bool:
        return self.certified_sign() < 0


def ev_div(num: EstimatedValue, den: EstimatedValue) -> EstimatedValue:
    """Quotient with propagated bound; requires a sign-certified denominator."""
    from .errors import PrecisionLoss
    if den.certified_sign() == 0:
        raise PrecisionLoss("division by a quantity not bounded away from zero")
    d = abs(den.value) - den.abs_error_bound
    value = num.value / den.value
    bound = (num.abs_error_bound + abs(value) * den.abs_error_bound) / d
    return EstimatedValue(value, bound)


def ev_sum(items: Sequence[EstimatedValue]) -> EstimatedValue:
    v = mpf(0)
    b = mpf(0)
    for it in items:
        v += it.value
        b += it.abs_error_bound
    return EstimatedValue(v, b)


def exact(value: Real, precision_digits: int = 30) -> EstimatedValue:
    """Wrap a closed-form value, charging only a rounding-level bound."""
    v = to_mpf(value)
    return EstimatedValue(v, (abs(v) + 1) * round_ulp(precision_digits))


# ---------------------------------------------------------------------------
# Truncation policies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExplicitRadius:
    """Truncate at a caller-chosen radius, with a caller-derived tail bound.

    The default ``tail_bound=0`` is appropriate when the caller knows the
    integrand is negligible past ``radius`` at the working tolerance.
    """

    radius: float
    tail_bound: float = 0.0


@dataclass(frozen=True)
class DecayBound:
    """Envelope |f(t)| <= c * exp(-t^(2+eps)); validity is a caller precondition.

    The truncation radius is the smallest R (to ~0.1% ) with
    ``c * exp(-R^(2+eps)) * (1+R) < abs_tol / 10``, and the same quantity is
    charged as the tail bound (it majorizes the exact tail integral of the
    envelope for every R >= 0).
    """

    coefficient: float = 1.0
    eps: float = 1.0
    max_radius: float = 60.0


TruncationPolicy = Union[ExplicitRadius, DecayBound]


def resolve_truncation(policy: TruncationPolicy, abs_tol: Real) -> tuple[mpf, mpf]:
    """Return (radius, tail_bound) for the given policy and tolerance."""
    if isinstance(policy, ExplicitRadius):
        return to_mpf(policy.radius), to_mpf(policy.tail_bound)
    c = to_mpf(policy.coefficient)
    eps = to_mpf(policy.eps)
    target = to_mpf(abs_tol) / 10

    def envelope_tail(r: mpf) -> mpf:
        return c * mpmath.exp(-r ** (2 + eps)) * (1 + r)

    r_max = to_mpf(policy.max_radius)
    if envelope_tail(r_max) >= target:
        raise InvalidDecayBound(
            "decay envelope c=%s eps=%s cannot reach abs_tol=%s within radius %s"
            % (c, eps, abs_tol, policy.max_radius))
    lo, hi = mpf(0), r_max
    while envelope_tail(hi / 2) < target and hi > mpf("0.01"):
        hi = hi / 2
    lo = hi / 2
    for _ in range(40):
        mid = (lo + hi) / 2
        if envelope_tail(mid) < target:
            hi = mid
        else:
            lo = mid
    return hi, envelope_tail(hi)


# ---------------------------------------------------------------------------
# Quadrature configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances, panel budget, truncation policy and working precision."""

    rel_tol: float = 1e-20
    abs_tol: float = 1e-24
    max_panels: int = 4000
    truncation_policy: TruncationPolicy = ExplicitRadius(16.0)
    precision_digits: int = 30

    def __post_init__(self):
        if not (to_mpf(self.rel_tol) > 0 and to_mpf(self.abs_tol) > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_panels < 1:
            raise ValueError("max_panels must be >= 1")
        if self.precision_digits < 15:
            raise ValueError("precision_digits must be >= 15")

    def with_policy(self, policy: TruncationPolicy) -> "QuadratureConfig":
        return QuadratureConfig(self.rel_tol, self.abs_tol, self.max_panels,
                                policy, self.precision_digits)

    @staticmethod
    def for_digits(digits: int, max_panels: int = 4000,
                   policy: TruncationPolicy = ExplicitRadius(16.0)) -> "QuadratureConfig":
        """Tolerance ladder tied to the working precision."""
        return QuadratureConfig(rel_tol=10.0 ** (-(digits - 10)),
                                abs_tol=10.0 ** (-(digits - 6)),
                                max_panels=max_panels,
                                truncation_policy=policy,
                                precision_digits=digits)


DEFAULT_CONFIG = QuadratureConfig()


# ---------------------------------------------------------------------------
# Clenshaw-Curtis panel rule (embedded 16/32 pair)
# ---------------------------------------------------------------------------

_CC_ORDER = 32
_cc_cache: dict = {}


def _cc_weights(n: int) -> list:
    # w_k = (4 c_k / n) * sum''_{j=0}^{n/2} cos(2jk pi/n) / (1 - 4 j^2),
    # where the first and last summands are halved and c_0 = c_n = 1/2.
    ws = []
    for k in range(n + 1):
        s = mpf(0)
        for j in range(n // 2 + 1):
            term = mpmath.cos(2 * j * k * mp.pi / n) / (1 - 4 * j * j)
            if j == 0 or j == n // 2:
                term /= 2
            s += term
        c = mpf("0.5") if k in (0, n) else mpf(1)
        ws.append(4 * c / n * s)
    return ws


def cc_rule():
    """Nodes (ascending on [-1,1]) and weights of the embedded CC pair.

    Returns ``(offsets, w_fine, w_diff, w_abs)`` where ``offsets`` are the 33
    nodes of the 32-segment rule, ``w_fine`` its weights, ``w_diff`` the
    pointwise difference against the embedded 16-segment rule (zero at nodes
    the coarse rule does not use) and ``w_abs`` the absolute fine weights.
    Cached per working precision.
    """
    key = (mp.prec,)
    hit = _cc_cache.get(key)
    if hit is not None:
        return hit
    n = _CC_ORDER
    nodes = [-mpmath.cos(k * mp.pi / n) for k in range(n + 1)]
    w_fine = list(reversed(_cc_weights(n)))
    w_coarse = list(reversed(_cc_weights(n // 2)))
    w_diff = [mpf(0)] * (n + 1)
    for k in range(n // 2 + 1):
        w_diff[2 * k] = w_coarse[k]
    w_diff = [wf - wd for wf, wd in zip(w_fine, w_diff)]
    w_abs = [abs(w) for w in w_fine]
    rule = (nodes, w_fine, w_diff, w_abs)
    _cc_cache[key] = rule
    return rule


class _Panel:
    __slots__ = ("a", "b", "value", "err", "abs_sum")

    def __init__(self, a, b, value, err, abs_sum):
        self.a = a
        self.b = b
        self.value = value
        self.err = err
        self.abs_sum = abs_sum


def _heap_key(err: mpf) -> float:
    # Heap priority from the binary exponent: float(err) would underflow to
    # 0.0 for the astronomically small scales mpf supports, flattening the
    # priority queue into round-robin splitting.
    if err == 0:
        return float("inf")
    return -float(mpmath.mag(err))


def _eval_panel(f: Callable[[mpf], mpf], a: mpf, b: mpf) -> _Panel:
    nodes, w_fine, w_diff, w_abs = cc_rule()
    half = (b - a) / 2
    mid = (a + b) / 2
    v = mpf(0)
    d = mpf(0)
    s = mpf(0)
    for x, wf, wd, wa in zip(nodes, w_fine, w_diff, w_abs):
        fx = f(mid + half * x)
        v += wf * fx
        d += wd * fx
        s += wa * abs(fx)
    return _Panel(a, b, half * v, abs(half * d), half * s)


def _initial_breaks(radius: mpf, osc_freq: Real, seeds: Optional[Sequence[Real]]) -> list:
    breaks = {mpf(0), radius}
    if seeds:
        for t in seeds:
            t = to_mpf(t)
            if 0 < t < radius:
                breaks.add(t)
    pts = sorted(breaks)
    osc = abs(to_mpf(osc_freq)) if osc_freq else mpf(0)
    cap = None
    if osc > 0 and osc * radius > 50:
        cap = mp.pi / osc
    out = []
    for lo, hi in zip(pts, pts[1:]):
        width = hi - lo
        n_sub = 1
        if cap is not None and width > cap:
            n_sub = int(mpmath.ceil(width / cap))
        elif width > radius / 4:
            n_sub = int(mpmath.ceil(width / (radius / 4)))
        for i in range(n_sub):
            out.append(lo + width * i / n_sub)
    out.append(radius)
    return out


def integrate_half_line(f: Callable[[mpf], mpf],
                        cfg: QuadratureConfig = DEFAULT_CONFIG,
                        osc_freq: Real = 0,
                        breakpoints: Optional[Sequence[Real]] = None) -> EstimatedValue:
    """Adaptively integrate ``f`` over [0, oo) truncated per the policy.

    Panels carry an embedded lower/higher-order Clenshaw-Curtis pair; the
    panel with the largest error estimate is split until the summed estimate
    meets ``max(abs_tol, rel_tol * |integral|)``.  When ``osc_freq`` is given
    and ``osc_freq * radius > 50``, panel widths are capped at half the
    oscillation period ``pi / osc_freq`` so the grid cannot silently
    undersample a ``cos(x t)`` factor.  ``breakpoints`` seed extra initial
    panel edges (used to concentrate panels near an interior peak).
    """
    with working_dps(cfg.precision_digits):
        radius, tail = resolve_truncation(cfg.truncation_policy, cfg.abs_tol)
        abs_tol = to_mpf(cfg.abs_tol)
        rel_tol = to_mpf(cfg.rel_tol)
        if radius <= 0:
            return EstimatedValue(mpf(0), tail + abs_tol)
        edges = _initial_breaks(radius, osc_freq, breakpoints)
        panels = [_eval_panel(f, a, b) for a, b in zip(edges, edges[1:])]
        counter = itertools.count()
        heap = [(_heap_key(p.err), next(counter), p) for p in panels]
        heapq.heapify(heap)
        total_v = sum((p.value for p in panels), mpf(0))
        total_e = sum((p.err for p in panels), mpf(0))
        total_s = sum((p.abs_sum for p in panels), mpf(0))
        n_panels = len(panels)
        while total_e > max(abs_tol, rel_tol * abs(total_v)):
            if n_panels >= cfg.max_panels:
                raise NonConvergence(
                    "quadrature error %s above tolerance with %d panels"
                    % (mpmath.nstr(total_e, 5), n_panels))
            _, _, worst = heapq.heappop(heap)
            total_v -= worst.value
            total_e -= worst.err
            total_s -= worst.abs_sum
            mid = (worst.a + worst.b) / 2
            for a, b in ((worst.a, mid), (mid, worst.b)):
                p = _eval_panel(f, a, b)
                heapq.heappush(heap, (_heap_key(p.err), next(counter), p))
                total_v += p.value
                total_e += p.err
                total_s += p.abs_sum
            n_panels += 1
        rounding = total_s * round_ulp(cfg.precision_digits)
        return EstimatedValue(total_v, total_e + tail + rounding)


def integrate_half_line_multi(f_vec: Callable[[mpf], Sequence[mpf]],
                              n_components: int,
                              cfg: QuadratureConfig = DEFAULT_CONFIG,
                              osc_freq: Real = 0,
                              breakpoints: Optional[Sequence[Real]] = None,
                              tails: Optional[Sequence[Real]] = None) -> list:
    """Integrate several integrands sharing their evaluation points.

    Same scheme as :func:`integrate_half_line`, but ``f_vec`` returns one
    value per component and adaptivity is driven by the worst component.
    Saves the dominant cost when the components share an expensive common
    factor (for example one kernel product times several monomial weights).
    """
    nodes, w_fine, w_diff, w_abs = None, None, None, None

    class _MPanel:
        __slots__ = ("a", "b", "values", "errs", "abs_sums", "score")

    def eval_panel(a, b):
        half = (b - a) / 2
        mid = (a + b) / 2
        vs = [mpf(0)] * n_components
        ds = [mpf(0)] * n_components
        ss = [mpf(0)] * n_components
        for x, wf, wd, wa in zip(nodes, w_fine, w_diff, w_abs):
            fx = f_vec(mid + half * x)
            for c in range(n_components):
                vs[c] += wf * fx[c]
                ds[c] += wd * fx[c]
                ss[c] += wa * abs(fx[c])
        p = _MPanel()
        p.a, p.b = a, b
        p.values = [half * v for v in vs]
        p.errs = [abs(half * d) for d in ds]
        p.abs_sums = [half * s for s in ss]
        p.score = min(_heap_key(e) for e in p.errs)
        return p

    with working_dps(cfg.precision_digits):
        nodes, w_fine, w_diff, w_abs = cc_rule()
        radius, policy_tail = resolve_truncation(cfg.truncation_policy, cfg.abs_tol)
        tail_list = ([to_mpf(t) for t in tails] if tails is not None
                     else [policy_tail] * n_components)
        abs_tol = to_mpf(cfg.abs_tol)
        rel_tol = to_mpf(cfg.rel_tol)
        edges = _initial_breaks(radius, osc_freq, breakpoints)
        panels = [eval_panel(a, b) for a, b in zip(edges, edges[1:])]
        counter = itertools.count()
        heap = [(p.score, next(counter), p) for p in panels]
        heapq.heapify(heap)
        tv = [sum((p.values[c] for p in panels), mpf(0)) for c in range(n_components)]
        te = [sum((p.errs[c] for p in panels), mpf(0)) for c in range(n_components)]
        ts = [sum((p.abs_sums[c] for p in panels), mpf(0)) for c in range(n_components)]
        n_panels = len(panels)

        def converged():
            return all(te[c] <= max(abs_tol, rel_tol * abs(tv[c]))
                       for c in range(n_components))

        while not converged():
            if n_panels >= cfg.max_panels:
                raise NonConvergence(
                    "multi-component quadrature above tolerance with %d panels" % n_panels)
            _, _, worst = heapq.heappop(heap)
            for c in range(n_components):
                tv[c] -= worst.values[c]
                te[c] -= worst.errs[c]
                ts[c] -= worst.abs_sums[c]
            mid = (worst.a + worst.b) / 2
            for a, b in ((worst.a, mid), (mid, worst.b)):
                p = eval_panel(a, b)
                heapq.heappush(heap, (p.score, next(counter), p))
                for c in range(n_components):
                    tv[c] += p.values[c]
                    te[c] += p.errs[c]
                    ts[c] += p.abs_sums[c]
            n_panels += 1
        ulp = round_ulp(cfg.precision_digits)
        return [EstimatedValue(tv[c], te[c] + tail_list[c] + ts[c] * ulp)
                for c in range(n_components)]


# ---------------------------------------------------------------------------
# Finite differences with Richardson extrapolation
# ---------------------------------------------------------------------------

def finite_difference(f: Callable[[mpf], mpf], x: Real, order: int,
                      h0: Real = None, precision_digits: int = 30,
                      max_levels: int = 8) -> EstimatedValue:
    """Central-difference derivative of ``f`` at ``x`` with extrapolation.

    The central stencil of the requested order is evaluated at steps
    h0, h0/2, h0/4, ... and Richardson-extrapolated (error order h^2 per
    level).  The reported bound is twice the last extrapolation residual;
    successive residuals must shrink, otherwise NonConvergence is raised.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    with working_dps(precision_digits + 2 * order):
        x = to_mpf(x)
        h0 = to_mpf(h0) if h0 is not None else mpf("0.25")
        coeffs = [((-1) ** i) * math.comb(order, i) for i in range(order + 1)]
        offsets = [mpf(order) / 2 - i for i in range(order + 1)]

        def stencil(h):
            acc = mpf(0)
            for c, o in zip(coeffs, offsets):
                acc += c * f(x + o * h)
            return acc / h ** order

        diag = []
        rows = []
        residuals = []
        best = None
        best_err = None
        for j in range(max_levels):
            h = h0 / 2 ** j
            row = [stencil(h)]
            for k in range(1, j + 1):
                fac = mpf(4) ** k
                row.append((fac * row[k - 1] - rows[j - 1][k - 1]) / (fac - 1))
            rows.append(row)
            diag.append(row[-1])
            if j >= 1:
                res = abs(diag[j] - diag[j - 1])
                residuals.append(res)
                if best_err is None or res < best_err:
                    best, best_err = diag[j], res
                # Stop once the residual stagnates at the rounding floor.
                if best_err > 0 and res > 16 * best_err and len(residuals) >= 3:
                    break
        if best is None:
            best, best_err = diag[-1], abs(diag[-1]) + 1
        if len(residuals) >= 3 and residuals[0] < residuals[1] < residuals[2]:
            raise NonConvergence("finite-difference extrapolants diverge at x=%s" % x)
        floor = (abs(best) + 1) * round_ulp(precision_digits)
        return EstimatedValue(best, 2 * best_err + floor)


# ---------------------------------------------------------------------------
# Real-zero bracketing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BracketedZero:
    bracket: tuple
    refined: mpf
    simple: bool


@dataclass(frozen=True)
class ZeroReport:
    """Sign-change zeros of a function on an interval.

    Zeros between grid points with no sign change (for example tangential
    zeros) are not detected; that is a documented limitation, not an error.
    """

    interval: tuple
    zeros: tuple
    sign_change_count: int

    def refined_zeros(self) -> list:
        return [z.refined for z in self.zeros]


def bracket_zeros(f: Callable[[mpf], object], interval: tuple, n_grid: int,
                  rel_tol: Real = 1e-12, abs_tol: Real = 1e-12,
                  derivative: Optional[Callable[[mpf], EstimatedValue]] = None,
                  simple_factor: Real = 1.0,
                  precision_digits: int = 30,
                  estimates: bool = False) -> ZeroReport:
    """Bracket sign changes of ``f`` on a uniform grid and refine by bisection.

    With ``estimates=True`` the function returns EstimatedValue and only
    margin-certified sign changes are counted: grid cells where a value sits
    inside its own error bound give no sign information, so noise below the
    quadrature floor can never masquerade as a zero.  Bisection likewise
    stops once the midpoint's sign is no longer certified (the refined point
    is then within noise distance of the true zero).

    Each refined zero is flagged ``simple`` when the first derivative there
    (caller-supplied estimate, else a finite difference) is bounded away from
    zero by ``simple_factor`` times its own error bound.
    """
    if n_grid < 2:
        raise ValueError("n_grid must be >= 2")

    def sign_of(v) -> int:
        if estimates:
            return v.certified_sign()
        return 0 if v == 0 else (1 if v > 0 else -1)

    with working_dps(precision_digits):
        a, b = to_mpf(interval[0]), to_mpf(interval[1])
        rel_tol = to_mpf(rel_tol)
        abs_tol = to_mpf(abs_tol)
        xs = [a + (b - a) * i / n_grid for i in range(n_grid + 1)]
        vals = [f(x) for x in xs]
        signs = [sign_of(v) for v in vals]
        zeros = []
        for i in range(n_grid):
            x0, x1 = xs[i], xs[i + 1]
            s0, s1 = signs[i], signs[i + 1]
            if not estimates and s0 == 0 and vals[i] == 0:
                if i == 0 or vals[i - 1] != 0:
                    zeros.append(_refine_exact(f, x0, x0, derivative,
                                               simple_factor, precision_digits))
                continue
            if s0 == 0 or s1 == 0 or s0 == s1:
                continue
            lo, hi, slo = x0, x1, s0
            while hi - lo > rel_tol * abs((lo + hi) / 2) + abs_tol:
                mid = (lo + hi) / 2
                sm = sign_of(f(mid))
                if sm == 0:
                    lo = hi = mid
                    break
                if sm == slo:
                    lo = mid
                else:
                    hi = mid
            z = (lo + hi) / 2
            zeros.append(BracketedZero(
                bracket=(x0, x1), refined=z,
                simple=_is_simple(f, z, derivative, simple_factor,
                                  precision_digits, estimates)))
        if not estimates and vals[-1] == 0:
            zeros.append(_refine_exact(f, xs[-1], xs[-1], derivative,
                                       simple_factor, precision_digits))
        return ZeroReport(interval=(a, b), zeros=tuple(zeros),
                          sign_change_count=len(zeros))


def _refine_exact(f, x, bracket_pt, derivative, simple_factor, digits):
    return BracketedZero(bracket=(bracket_pt, bracket_pt), refined=x,
                         simple=_is_simple(f, x, derivative, simple_factor,
                                           digits, False))


def _is_simple(f, z, derivative, simple_factor, digits, estimates) -> bool:
    if derivative is not None:
        d = derivative(z)
    elif estimates:
        d = finite_difference(lambda u: f(u).value, z, 1,
                              precision_digits=digits)
    else:
        d = finite_difference(f, z, 1, precision_digits=digits)
    return abs(d.value) > to_mpf(simple_factor) * d.abs_error_bound
