import mpmath as mp
import pytest
from mpmath import mpf

from thetalab import theta
from thetalab.errors import UnsupportedDerivativeOrder
from thetalab.numerics import finite_difference


def direct_term(n, t):
    """Series term written out independently of the engine's recurrences."""
    w = mp.exp(4 * t)
    return mp.pi * n * n * (2 * mp.pi * n * n * w - 3) * mp.exp(5 * t - mp.pi * n * n * w)


def test_value_at_zero_against_direct_partial_sums(dps40):
    ev = theta.theta_eval(0, 0, 30)
    oracle = sum(direct_term(n, mpf(0)) for n in range(1, 40))
    assert abs(ev.value - oracle) < mpf("1e-28")
    assert ev.abs_error_bound <= mpf("1e-25")


def test_odd_derivative_vanishes_at_zero(dps40):
    ev = theta.theta_eval(0, 1, 30)
    assert abs(ev.value) <= ev.abs_error_bound


def test_first_derivative_negative_for_positive_t(dps40):
    for t in ("0.2", "1"):
        ev = theta.theta_eval(mpf(t), 1, 30)
        assert ev.certainly_negative()


def test_tail_bound_honest_and_tight(dps40):
    # oracle: directly summed terms n = 4..50 at t = 0
    true_tail = sum(abs(direct_term(n, mpf(0))) for n in range(4, 51))
    bound = theta.theta_tail_bound(0, 3)
    assert bound >= true_tail
    assert bound <= mpf("1e-17")          # true tail is ~7.25e-19
    assert bound <= 10 * true_tail        # majorant stays within a decade


def test_tail_bound_at_t1(dps40):
    true_tail = sum(abs(direct_term(n, mpf(1))) for n in range(2, 30))
    bound = theta.theta_tail_bound(1, 1)
    assert bound >= true_tail
    # dominated by exp(-4 pi e^4) times a computable constant
    assert bound < mp.exp(-4 * mp.pi * mp.e ** 4) * mpf("1e7")


def test_tail_bound_monotone_in_terms(dps40):
    prev = None
    for n in range(1, 8):
        b = theta.theta_tail_bound(0, n)
        if prev is not None:
            assert b <= prev
        prev = b


def test_even_extension_matches_raw_series(dps40):
    # the series itself converges for t < 0; evenness is a theorem about it
    for t in ("0.1", "0.25"):
        gap = abs(theta.raw_series_value(mpf(t)) - theta.raw_series_value(-mpf(t)))
        assert gap < mpf("1e-30")
    ev_neg = theta.theta_eval(mpf("-0.5"), 1, 30)
    ev_pos = theta.theta_eval(mpf("0.5"), 1, 30)
    assert ev_neg.value == -ev_pos.value


def test_derivative_order_cap():
    with pytest.raises(UnsupportedDerivativeOrder):
        theta.theta_eval(0, 9, 30)


def test_termwise_derivative_consistency(dps40):
    for d in (1, 2, 3, 4):
        for t in ("0.1", "0.5", "1"):
            direct = theta.theta_eval(mpf(t), d, 30)
            fd = finite_difference(lambda u, d=d: theta.theta_eval(u, d - 1, 35).value,
                                   mpf(t), 1, h0=mpf("0.05"), precision_digits=30)
            assert abs(direct.value - fd.value) <= \
                direct.abs_error_bound + fd.abs_error_bound + mpf("1e-24")


def test_error_bound_honesty_under_refinement(dps40):
    # raising the precision must move the value by less than the old bound
    for i in range(7):
        t = mpf(3) * i / 6
        lo = theta.theta_eval(t, 0, 30)
        hi = theta.theta_eval(t, 0, 40)
        assert abs(lo.value - hi.value) <= lo.abs_error_bound


def test_positivity_on_grid(dps40):
    for i in range(1, 31):
        t = mpf(3) * i / 30
        assert theta.theta_eval(t, 0, 30).certainly_positive()


def test_raw_value_matches_eval(dps40):
    for t in ("0", "0.4", "1.3"):
        raw = theta.theta_raw_value(mpf(t), 30)
        ev = theta.theta_eval(mpf(t), 0, 30)
        assert abs(raw - ev.value) <= ev.abs_error_bound + mpf("1e-33")


# -- probes -------------------------------------------------------------------

def test_derivative_log_concavity_probe(dps40):
    reports = theta.derivative_log_concavity_probe(2, (0, 2), 40, 30)
    # J_1(0) = -Phi(0) Phi''(0) because the first derivative vanishes at 0
    p0 = theta.theta_eval(0, 0, 30)
    p2 = theta.theta_eval(0, 2, 30)
    j1_at_zero = reports[1].values[0]
    assert abs(j1_at_zero.value - (-p0.value * p2.value)) <= \
        j1_at_zero.abs_error_bound + (p0 * p2).abs_error_bound
    assert reports[1].positive_certified
    assert reports[2].n_grid == 40


def test_sqrt_arg_derivative_definition(dps40):
    s = theta.sqrt_arg_derivatives(1, 0, 30)
    direct = theta.theta_eval(1, 0, 30)
    assert s[0].value == direct.value


def test_sqrt_laguerre_logconcavity_probe(dps40):
    rep = theta.sqrt_laguerre_logconcavity_probe((mpf("0.1"), 4), 25, 30)
    assert rep.n_grid == 25
    # f itself is positive on the window (checked internally); the probe
    # records margins only
    assert rep.min_value.value < rep.max_value.value


def test_sqrt_arg_convexity(dps40):
    rep = theta.sqrt_arg_convexity_check((mpf("0.01"), 10), 60, 30)
    assert rep.positive_certified


def test_sqrt_convexity_chain_rule_against_finite_difference(dps40):
    # d^2/dt^2 Phi(sqrt t) = Phi''(sqrt t)/(4t) - Phi'(sqrt t)/(4 t^(3/2))
    for t in ("0.5", "2"):
        t = mpf(t)
        u = mp.sqrt(t)
        chain = theta.theta_eval(u, 2, 30).value / (4 * t) \
            - theta.theta_eval(u, 1, 30).value / (4 * t ** mpf("1.5"))
        s2 = theta.sqrt_arg_derivatives(t, 2, 30)[2]
        assert abs(s2.value - chain) < mpf("1e-25")
        fd = finite_difference(lambda v: theta.theta_eval(mp.sqrt(v), 0, 35).value,
                               t, 2, h0=t / 8, precision_digits=30)
        assert abs(s2.value - fd.value) <= s2.abs_error_bound + fd.abs_error_bound


def test_sqrt_log_concavity_strength_positive(dps40):
    rep = theta.sqrt_log_concavity_strength((mpf("0.025"), 5), 50, 30)
    assert rep.positive_certified
