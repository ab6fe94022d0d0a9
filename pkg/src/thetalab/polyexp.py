"""Exact calculus for functions of the form exp(sigma*t^2) * p(t).

Derivatives of such functions stay in the same family: differentiating maps
the polynomial p to p' + 2*sigma*t*p.  Working with the coefficient vectors
directly keeps this family exact at the working precision, which makes it the
reference oracle for every numerical route in the package (its derivatives
cost a polynomial evaluation, and its autocorrelation integrals reduce to
Gaussian moments).
"""

from __future__ import annotations

import math
from typing import Sequence

import mpmath
from mpmath import mp, mpf

from .numerics import Real, to_mpf

Poly = tuple  # ascending coefficient tuple of mpf


def poly(coeffs: Sequence[Real]) -> Poly:
    out = [to_mpf(c) for c in coeffs]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def p_eval(p: Poly, t: mpf) -> mpf:
    acc = mpf(0)
    for c in reversed(p):
        acc = acc * t + c
    return acc


def p_add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return tuple((p[i] if i < len(p) else mpf(0)) + (q[i] if i < len(q) else mpf(0))
                 for i in range(n))


def p_scale(p: Poly, c: Real) -> Poly:
    c = to_mpf(c)
    return tuple(c * x for x in p)


def p_mul(p: Poly, q: Poly) -> Poly:
    out = [mpf(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return tuple(out)


def p_deriv(p: Poly) -> Poly:
    if len(p) <= 1:
        return (mpf(0),)
    return tuple(i * p[i] for i in range(1, len(p)))


def p_shift_expand(p: Poly) -> list:
    """Coefficients of p(s + t) as polynomials in t, indexed by the power of s."""
    out = [[mpf(0)] * (len(p)) for _ in range(len(p))]
    for i, c in enumerate(p):
        for j in range(i + 1):
            out[j][i - j] += c * math.comb(i, j)
    return [poly(row) for row in out]


def p_abs(p: Poly) -> Poly:
    return tuple(abs(c) for c in p)


def is_even_poly(p: Poly) -> bool:
    return all(c == 0 for c in p[1::2])


# ---------------------------------------------------------------------------
# exp(sigma t^2) * p(t) derivatives
# ---------------------------------------------------------------------------

_deriv_cache: dict = {}


def gausspoly_deriv_poly(coeffs_key: tuple, sigma_key: str, order: int) -> Poly:
    """Polynomial q_d with d/dt^d [exp(sigma t^2) p(t)] = exp(sigma t^2) q_d(t)."""
    key = (coeffs_key, sigma_key, order, mp.prec)
    hit = _deriv_cache.get(key)
    if hit is not None:
        return hit
    if order == 0:
        q = poly([to_mpf(c) for c in coeffs_key])
    else:
        prev = gausspoly_deriv_poly(coeffs_key, sigma_key, order - 1)
        sigma = to_mpf(sigma_key)
        q = p_add(p_deriv(prev), p_mul((mpf(0), 2 * sigma), prev))
    _deriv_cache[key] = q
    return q


def gausspoly_value(coeffs: Sequence[Real], sigma: Real, t: mpf, order: int = 0) -> mpf:
    """d^order/dt^order of exp(sigma t^2) * p(t), exactly (up to rounding)."""
    key = tuple(str(c) for c in coeffs)
    q = gausspoly_deriv_poly(key, str(sigma), order)
    return mpmath.exp(to_mpf(sigma) * t * t) * p_eval(q, t)


# ---------------------------------------------------------------------------
# Gaussian moments and the autocorrelation oracle
# ---------------------------------------------------------------------------

def gaussian_moment(k: int, alpha: Real) -> mpf:
    """Integral of exp(-alpha s^2) s^k over the whole line (0 for odd k)."""
    if k % 2 == 1:
        return mpf(0)
    alpha = to_mpf(alpha)
    return mpmath.gamma((k + 1) / mpf(2)) / alpha ** ((k + 1) / mpf(2))


def autocorrelation_poly(coeffs: Sequence[Real], n: int, weight_m: int = 0) -> Poly:
    """Closed form of the weighted autocorrelation of exp(-t^2) p(t).

    Returns the polynomial r with

        integral over s of phi(s+t) phi(s-t) (s^2 - t^2)^weight_m s^(2n) ds
            = exp(-2 t^2) r(t),      phi(u) = exp(-u^2) p(u).

    The product phi(s+t) phi(s-t) equals exp(-2s^2 - 2t^2) p(s+t) p(s-t);
    expanding p(s+t) p(s-t) in powers of s leaves Gaussian moments in s with
    polynomial-in-t coefficients.
    """
    p = poly(coeffs)
    plus = p_shift_expand(p)                       # s-power -> poly in t
    minus = _reflect(plus)
    prod: dict = {}
    for j1, c1 in enumerate(plus):
        for j2, c2 in enumerate(minus):
            prod[j1 + j2] = p_add(prod.get(j1 + j2, (mpf(0),)), p_mul(c1, c2))
    # (s^2 - t^2)^m expands binomially; each term shifts the s-power and
    # multiplies by a power of t.
    result: Poly = (mpf(0),)
    for i in range(weight_m + 1):
        sign = (-1) ** (weight_m - i)
        binom = math.comb(weight_m, i)
        for spow, ct in prod.items():
            k = spow + 2 * i + 2 * n
            moment = gaussian_moment(k, 2)
            if moment == 0:
                continue
            term = p_scale(p_mul(ct, _t_power(2 * (weight_m - i))), sign * binom * moment)
            result = p_add(result, term)
    return result


def _reflect(shifted: list) -> list:
    """Coefficients of p(s - t) in powers of s given those of p(s + t)."""
    return [tuple((-1) ** i * c for i, c in enumerate(pc)) for pc in shifted]


def _t_power(k: int) -> Poly:
    return tuple([mpf(0)] * k + [mpf(1)])
