import random

import mpmath as mp
import pytest
from mpmath import mpf

from thetalab.errors import InvalidDecayBound, NonConvergence
from thetalab.numerics import (DecayBound, EstimatedValue, ExplicitRadius,
                               QuadratureConfig, bracket_zeros, cc_rule,
                               ev_div, finite_difference, integrate_half_line,
                               integrate_half_line_multi, resolve_truncation)


def test_estimated_value_rejects_nan_and_negative_bound():
    with pytest.raises(ValueError):
        EstimatedValue(mpf("nan"), mpf(0))
    with pytest.raises(ValueError):
        EstimatedValue(mpf(1), mpf(-1))


def test_estimated_value_product_bound_covers_cross_term():
    a = EstimatedValue(mpf(2), mpf("0.5"))
    b = EstimatedValue(mpf(3), mpf("0.25"))
    prod = a * b
    # worst case |(2 +/- .5)(3 +/- .25) - 6| = 1.625
    assert prod.abs_error_bound >= mpf("1.625")


def test_certified_sign():
    assert EstimatedValue(mpf(1), mpf("0.5")).certified_sign() == 1
    assert EstimatedValue(mpf(-1), mpf("0.5")).certified_sign() == -1
    assert EstimatedValue(mpf("0.1"), mpf("0.5")).certified_sign() == 0


def test_cc_rule_integrates_polynomials_exactly(dps40):
    nodes, w_fine, w_diff, _ = cc_rule()
    for k in (0, 2, 8, 16):
        got = sum(w * x ** k for w, x in zip(w_fine, nodes))
        exact = mpf(2) / (k + 1)
        assert abs(got - exact) < mpf("1e-35")


def test_gaussian_integral_within_tolerance(cfg30, dps40):
    ev = integrate_half_line(lambda t: mp.exp(-t * t), cfg30)
    exact = mp.sqrt(mp.pi) / 2
    assert abs(ev.value - exact) < mpf("1e-12")
    assert abs(ev.value - exact) <= ev.abs_error_bound


def test_zero_integrand(cfg30):
    ev = integrate_half_line(lambda t: mpf(0), cfg30)
    assert ev.value == 0
    assert ev.abs_error_bound <= mpf(cfg30.abs_tol)


def test_error_bound_honesty_on_gaussian_moments(cfg30, dps40):
    # 20 integrands with closed forms: integral of t^(2k) e^(-t^2)
    # over [0, oo) equals Gamma(k + 1/2) / 2.
    for k in range(20):
        ev = integrate_half_line(lambda t, k=k: t ** (2 * k) * mp.exp(-t * t),
                                 cfg30)
        exact = mp.gamma(k + mpf(1) / 2) / 2
        assert abs(ev.value - exact) <= ev.abs_error_bound


def test_linearity_on_random_polynomial_gaussians(cfg30, dps40):
    rng = random.Random(20240811)
    for _ in range(5):
        pa = [rng.randint(-3, 3) for _ in range(4)]
        pb = [rng.randint(-3, 3) for _ in range(4)]
        a, b = rng.randint(-4, 4), rng.randint(-4, 4)

        def poly(c, t):
            return sum(ci * t ** i for i, ci in enumerate(c))

        fa = lambda t: poly(pa, t) * mp.exp(-t * t)
        fb = lambda t: poly(pb, t) * mp.exp(-t * t)
        combo = integrate_half_line(lambda t: a * fa(t) + b * fb(t), cfg30)
        ia = integrate_half_line(fa, cfg30)
        ib = integrate_half_line(fb, cfg30)
        lhs = combo.value
        rhs = a * ia.value + b * ib.value
        slack = combo.abs_error_bound + abs(a) * ia.abs_error_bound \
            + abs(b) * ib.abs_error_bound
        assert abs(lhs - rhs) <= slack + mpf("1e-30")


def test_multi_component_shares_nodes(cfg30, dps40):
    evs = integrate_half_line_multi(
        lambda t: (mp.exp(-t * t), t * t * mp.exp(-t * t)), 2, cfg30)
    assert abs(evs[0].value - mp.sqrt(mp.pi) / 2) <= evs[0].abs_error_bound
    assert abs(evs[1].value - mp.sqrt(mp.pi) / 4) <= evs[1].abs_error_bound


def test_non_convergence_raises():
    cfg = QuadratureConfig(rel_tol=1e-25, abs_tol=1e-30, max_panels=3,
                           truncation_policy=ExplicitRadius(16.0))
    with pytest.raises(NonConvergence):
        integrate_half_line(lambda t: mp.cos(50 * t) * mp.exp(-t * t), cfg)


def test_oscillation_cap_keeps_high_frequency_accurate(cfg30, dps40):
    # integral of e^(-t^2) cos(x t) = (sqrt(pi)/2) e^(-x^2/4); at x = 60 the
    # result is ~1e-391, pure cancellation: the grid must resolve the phase.
    x = mpf(60)
    ev = integrate_half_line(lambda t: mp.exp(-t * t) * mp.cos(x * t),
                             cfg30.with_policy(ExplicitRadius(8.0)),
                             osc_freq=x)
    assert abs(ev.value) <= ev.abs_error_bound + mpf("1e-25")


def test_decay_bound_radius_and_tail(dps40):
    r, tail = resolve_truncation(DecayBound(1.0, 1.0), mpf("1e-24"))
    # criterion: c exp(-R^3)(1+R) < abs_tol/10, met tightly
    val = mp.exp(-r ** 3) * (1 + r)
    assert val < mpf("1e-25")
    assert val > mpf("1e-25") / 4   # near-smallest radius
    assert tail == val
    r2, _ = resolve_truncation(DecayBound(1.0, 1.0), mpf("1e-40"))
    assert r2 > r


def test_invalid_decay_bound():
    with pytest.raises(InvalidDecayBound):
        resolve_truncation(DecayBound(1.0, 1.0, max_radius=0.5), mpf("1e-40"))


def test_finite_difference_exp(dps40):
    ev = finite_difference(mp.exp, 0, 1)
    assert abs(ev.value - 1) < mpf("1e-9")
    assert abs(ev.value - 1) <= ev.abs_error_bound + mpf("1e-30")


def test_finite_difference_polynomial_exact(dps40):
    ev = finite_difference(lambda t: t * t, 3, 2)
    assert abs(ev.value - 2) < mpf("1e-25")


def test_finite_difference_third_order_sin(dps40):
    ev = finite_difference(mp.sin, mpf("0.7"), 3)
    assert abs(ev.value - (-mp.cos(mpf("0.7")))) <= ev.abs_error_bound


def test_ev_div_requires_certified_denominator():
    from thetalab.errors import PrecisionLoss
    num = EstimatedValue(mpf(1), mpf("0.1"))
    with pytest.raises(PrecisionLoss):
        ev_div(num, EstimatedValue(mpf("0.01"), mpf("0.5")))
    q = ev_div(num, EstimatedValue(mpf(2), mpf("0.01")))
    assert abs(q.value - mpf("0.5")) < mpf("1e-20")


def test_bracket_zeros_quadratic(dps40):
    rep = bracket_zeros(lambda x: x * x - 1, (-2, 2), 100)
    assert rep.sign_change_count == 2
    assert all(z.simple for z in rep.zeros)
    assert abs(rep.zeros[0].refined + 1) < mpf("1e-10")
    assert abs(rep.zeros[1].refined - 1) < mpf("1e-10")


def test_bracket_zeros_misses_tangential(dps40):
    rep = bracket_zeros(lambda x: x * x, (-1, 1), 37)
    assert rep.sign_change_count == 0


def test_bracket_zeros_random_real_rooted(dps40):
    rng = random.Random(7)
    for _ in range(6):
        n_grid = 200
        spacing = mpf(4) / n_grid
        roots = []
        x = mpf(-2)
        while x < 2 and len(roots) < 5:
            x += spacing * (10 + rng.randint(0, 12))
            if x < 2:
                roots.append(x)
        if not roots:
            continue

        def f(x, roots=roots):
            out = mpf(1)
            for r in roots:
                out *= (x - r)
            return out

        rep = bracket_zeros(f, (-2, 2), n_grid)
        assert rep.sign_change_count == len(roots)
        for z, r in zip(rep.zeros, roots):
            assert abs(z.refined - r) < mpf("1e-9")
            assert z.simple


def test_bracket_zeros_estimates_reject_noise(dps40):
    # A function drowned in its own error bound must yield no zeros even
    # though its raw values oscillate in sign.
    rng = random.Random(3)

    def noisy(x):
        return EstimatedValue(mpf(rng.uniform(-1, 1)) * mpf("1e-20"), mpf("1e-18"))

    rep = bracket_zeros(noisy, (0, 1), 50, estimates=True,
                        derivative=lambda x: EstimatedValue(mpf(1), mpf(0)))
    assert rep.sign_change_count == 0
