import mpmath as mp
import pytest
from mpmath import mpf

from thetalab import kernels, theta
from thetalab.errors import PrecisionLoss, UnsupportedDerivativeOrder, UsageError
from thetalab.numerics import finite_difference


def test_parse_round_trip():
    for text in ("theta", "thetasqrt", "gausspoly:15,0,1,0,1",
                 "modtheta:lambda=0.1,m=1"):
        k = kernels.parse_kernel(text)
        assert k.label == text
        assert kernels.parse_kernel(k.label).key() == k.key()


def test_parse_rejects_bad_input():
    for text in ("nope", "gausspoly:", "gausspoly:1,x", "modtheta:lambda=z",
                 "modtheta:q=1"):
        with pytest.raises(UsageError):
            kernels.parse_kernel(text)


def test_gausspoly_must_be_even_and_positive():
    with pytest.raises(UsageError):
        kernels.gaussian_poly([0, 1])          # odd term
    with pytest.raises(UsageError):
        kernels.gaussian_poly([-1, 0, 1])      # negative near 0


def test_gausspoly_value_at_zero(dps40, ex312_kernel):
    ev = kernels.kernel_eval(ex312_kernel, 0, 0, 30)
    assert abs(ev.value - 15) < mpf("1e-28")


def test_evenness_all_families(dps40, theta_kernel, ex312_kernel):
    fams = [theta_kernel, ex312_kernel,
            kernels.modified_theta("0.1", 1), kernels.theta_sqrt_arg()]
    for k in fams:
        for t in ("0.3", "1.1"):
            a = kernels.kernel_eval(k, mpf(t), 0, 30)
            b = kernels.kernel_eval(k, -mpf(t), 0, 30)
            assert abs(a.value - b.value) <= \
                a.abs_error_bound + b.abs_error_bound + mpf("1e-33")


def test_odd_derivative_vanishes_at_zero(dps40, theta_kernel, ex312_kernel):
    for k in (theta_kernel, ex312_kernel):
        ev = kernels.kernel_eval(k, 0, 1, 30)
        assert abs(ev.value) <= ev.abs_error_bound + mpf("1e-30")


def test_gausspoly_derivatives_vs_finite_difference(dps40, ex312_kernel):
    for order in (1, 2, 4):
        direct = kernels.kernel_eval(ex312_kernel, mpf("0.8"), order, 30)
        fd = finite_difference(
            lambda u: kernels.kernel_eval(ex312_kernel, u, order - 1, 35).value,
            mpf("0.8"), 1, precision_digits=30)
        assert abs(direct.value - fd.value) <= \
            direct.abs_error_bound + fd.abs_error_bound + mpf("1e-24")


def test_modtheta_derivative_vs_finite_difference(dps40):
    k = kernels.modified_theta("0.1", 1)
    direct = kernels.kernel_eval(k, mpf("0.6"), 1, 30)
    fd = finite_difference(lambda u: kernels.kernel_eval(k, u, 0, 35).value,
                           mpf("0.6"), 1, h0=mpf("0.05"), precision_digits=30)
    assert abs(direct.value - fd.value) <= \
        direct.abs_error_bound + fd.abs_error_bound + mpf("1e-24")


def test_theta_sqrt_arg_values(dps40):
    k = kernels.theta_sqrt_arg()
    at0 = kernels.kernel_eval(k, 0, 0, 30)
    phi0 = theta.theta_eval(0, 0, 30)
    assert at0.value == phi0.value
    # one-sided first derivative at 0 equals Phi''(0)/2 (even power series):
    # approach the limit through the chain-rule derivative at tiny t > 0
    d0 = kernels.kernel_eval(k, 0, 1, 30)
    phi2 = theta.theta_eval(0, 2, 30)
    assert abs(d0.value - phi2.value / 2) < mpf("1e-25")
    near = kernels.kernel_eval(k, mpf("1e-10"), 1, 30)
    assert abs(near.value - d0.value) < mpf("1e-6")
    # away from 0 the derivative matches a finite difference
    at = mpf("0.02")
    direct = kernels.kernel_eval(k, at, 1, 30)
    fd = finite_difference(lambda u: kernels.kernel_eval(k, u, 0, 35).value,
                           at, 1, h0=mpf("0.004"), precision_digits=30)
    assert abs(direct.value - fd.value) <= \
        direct.abs_error_bound + fd.abs_error_bound + mpf("1e-20")
    with pytest.raises(UnsupportedDerivativeOrder):
        kernels.kernel_eval(k, 1, 3, 30)


def test_derivative_order_caps(dps40, theta_kernel):
    with pytest.raises(UnsupportedDerivativeOrder):
        kernels.kernel_eval(theta_kernel, 0, 9, 30)
    with pytest.raises(UnsupportedDerivativeOrder):
        kernels.kernel_eval(kernels.modified_theta("0.1", 1), 0, 9, 30)


def test_kernel_value_fast_agrees(dps40, theta_kernel, ex312_kernel):
    for k in (theta_kernel, ex312_kernel, kernels.modified_theta("0.2", 1),
              kernels.theta_sqrt_arg()):
        for t in ("0.3", "1.2"):
            fast = kernels.kernel_value_fast(k, mpf(t), 30)
            ev = kernels.kernel_eval(k, mpf(t), 0, 30)
            assert abs(fast - ev.value) <= ev.abs_error_bound + \
                (abs(ev.value) + 1) * mpf("1e-32")


# -- admissibility -------------------------------------------------------------

def test_admissibility_ex312(dps40, ex312_kernel):
    rep = kernels.admissibility_report(ex312_kernel, 3, 24, 30)
    assert rep.positivity.passed
    assert rep.evenness.passed
    assert rep.monotone_decreasing.passed
    assert rep.decay_condition.status == "borderline"


def test_admissibility_theta(dps40, theta_kernel):
    rep = kernels.admissibility_report(theta_kernel, 3, 24, 30)
    assert rep.all_core_passed()
    assert rep.decay_condition.status == "satisfied"
    assert rep.decay_condition.fitted_exponent > 2.05


def test_admissibility_modtheta_monotone_fails(dps40):
    rep = kernels.admissibility_report(kernels.modified_theta("0.1", 1), 3, 24, 30)
    assert rep.positivity.passed
    assert not rep.monotone_decreasing.passed
    assert rep.monotone_decreasing.witness_t < mpf("0.5")
    assert rep.monotone_decreasing.witness_value > 0


# -- log-concavity -------------------------------------------------------------

def test_log_concavity_ex312_identity(dps40, ex312_kernel):
    rep = kernels.log_concavity_check(ex312_kernel, "identity", ("0.05", 5), 40, 30)
    assert rep.passed
    assert rep.min_neg_second_derivative.certainly_positive()


def test_log_concavity_theta_sqrt(dps40, theta_kernel):
    rep = kernels.log_concavity_check(theta_kernel, "sqrt", ("0.01", 10), 50, 30)
    assert rep.passed


def test_log_concavity_pure_gaussian_exact(dps40, gaussian_kernel):
    rep = kernels.log_concavity_check(gaussian_kernel, "identity", ("0.1", 3), 12, 30)
    assert rep.passed
    assert abs(rep.min_neg_second_derivative.value - 2) < mpf("1e-25")


def test_log_concavity_failure_has_witness(dps40):
    # t^2 e^(0.1 t^2) Phi(t) rises from zero at the origin: its logarithm is
    # convex against the identity map near small t ... use a kernel-like
    # callable that is certifiably log-convex somewhere: k(t) = e^(t^2) shape
    # is not registered, so check PrecisionLoss/fail wiring through a
    # gausspoly that IS concave but on a window via eval_fn override.
    from thetalab.numerics import EstimatedValue

    def convex_eval(t, order):
        # k(t) = cosh(t): (log k)'' = sech^2 > 0, closed forms
        if order == 0:
            return EstimatedValue(mp.cosh(t), mpf("1e-30"))
        if order == 1:
            return EstimatedValue(mp.sinh(t), mpf("1e-30"))
        return EstimatedValue(mp.cosh(t), mpf("1e-30"))

    rep = kernels.log_concavity_check(kernels.gaussian_poly([1]), "identity",
                                      ("0.5", 2), 8, 30, eval_fn=convex_eval)
    assert not rep.passed
    assert rep.witness_t is not None
