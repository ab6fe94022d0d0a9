import math
import random

import mpmath as mp
import pytest
from mpmath import mpf

from thetalab import assoc, kernels, laguerre, polyexp, transform
from thetalab.errors import HypothesisUnverified


def test_gaussian_autocorrelation_closed_form(cfg30, gaussian_kernel, dps40):
    for t in (0, 1):
        ev = assoc.assoc_kernel_eval(gaussian_kernel, 0, t, cfg30)
        exact = mp.sqrt(mp.pi / 2) * mp.exp(-2 * mpf(t) ** 2)
        assert abs(ev.value - exact) <= ev.abs_error_bound


def test_assoc_kernel_even(cfg30, ex312_kernel):
    a = assoc.assoc_kernel_eval(ex312_kernel, 1, mpf("0.8"), cfg30)
    b = assoc.assoc_kernel_eval(ex312_kernel, 1, mpf("-0.8"), cfg30)
    assert a.value == b.value


def test_assoc_kernel_matches_polynomial_oracle(cfg30, ex312_kernel, dps40):
    # exact autocorrelation polynomial for the Gaussian-polynomial family
    r = polyexp.autocorrelation_poly([15, 0, 1, 0, 1], 2)
    for t in ("0.5", "1.5"):
        t = mpf(t)
        oracle = mp.exp(-2 * t * t) * polyexp.p_eval(r, t)
        got = assoc.assoc_kernel_eval(ex312_kernel, 2, t, cfg30)
        assert abs(got.value - oracle) <= got.abs_error_bound


def test_assoc_derivative_route(cfg30, ex312_kernel, dps40):
    from thetalab.numerics import finite_difference
    d = assoc.assoc_kernel_derivative(ex312_kernel, 1, mpf("0.7"), cfg30)
    fd = finite_difference(
        lambda t: assoc.assoc_kernel_eval(ex312_kernel, 1, t, cfg30).value,
        mpf("0.7"), 1, h0=mpf("0.05"), precision_digits=30)
    assert abs(d.value - fd.value) <= d.abs_error_bound + fd.abs_error_bound


def test_ex312_assoc_transform_shape(cfg30, ex312_kernel, dps40):
    # transform of the first associated kernel is proportional to
    # e^(-x^2/2) (84240 - 13536 x^2 + 712 x^4 - 24 x^6 + x^8) in x = half
    # the scan frequency; constant fitted at 0, shape pinned to 1e-6.
    table = assoc.transform_scan_table(ex312_kernel, 1, 12, cfg30, orders=(0,))

    def poly(x):
        return 84240 - 13536 * x ** 2 + 712 * x ** 4 - 24 * x ** 6 + x ** 8

    c = table.eval(0, 0).value / poly(mpf(0))
    for xs in ("0.5", "1", "2", "4"):
        x = mpf(xs)
        predicted = c * mp.exp(-x * x / 2) * poly(x)
        got = table.eval(2 * x, 0)
        assert abs(got.value / predicted - 1) < mpf("1e-6")


def test_theta_assoc_admissibility(cfg30, theta_kernel):
    for n in (0, 1):
        rep, spots = assoc.assoc_admissibility(theta_kernel, n, 3, 10, cfg30)
        assert rep.positivity.passed
        assert rep.monotone_decreasing.passed
        assert all(s["holds_certified"] for s in spots)


def test_assoc_admissibility_requires_log_concavity(cfg30, theta_kernel):
    failed = kernels.LogConcavityReport(
        kernel="stub", arg_map="identity", interval=(mpf(0), mpf(1)),
        n_grid=2, min_neg_second_derivative=None, argmin=None, passed=False,
        witness_t=mpf("0.5"))
    with pytest.raises(HypothesisUnverified):
        assoc.assoc_admissibility(theta_kernel, 0, 3, 8, cfg30,
                                  log_concavity=failed)


def test_log_slope_cross_inequality(cfg30, theta_kernel):
    out = assoc.log_slope_cross_inequality(theta_kernel, 1, mpf("0.5"), cfg30)
    assert out["holds_certified"]


def test_pd_transform_verdicts_ex312(cfg30, ex312_kernel):
    assoc.prepare_scan_nodes(ex312_kernel, (1, 2), 24, cfg30)
    r1 = assoc.pd_check_transform(ex312_kernel, 1, 20, 300, cfg30)
    assert r1.verdict == "no_negativity_found"
    assert r1.min_certified_positive
    r2 = assoc.pd_check_transform(ex312_kernel, 2, 20, 300, cfg30)
    assert r2.verdict == "negativity_witness"
    assert r2.witness_value.certainly_negative()


def test_pd_transform_gaussian(cfg30, gaussian_kernel):
    rep = assoc.pd_check_transform(gaussian_kernel, 0, 10, 100, cfg30)
    assert rep.verdict == "no_negativity_found"
    assert rep.min_certified_positive


def test_gram_cosine_kernel():
    rep = assoc.pd_check_gram(math.cos, [0.0, 1.0, 2.0, 3.0])
    assert rep.min_eigenvalue >= -1e-12
    assert rep.matrix_dim == 4


def test_gram_gaussian_random_points():
    rng = random.Random(5)
    pts = sorted(set(round(rng.uniform(-5, 5), 4) for _ in range(50)))
    rep = assoc.pd_check_gram(lambda u: math.exp(-u * u), pts)
    assert rep.min_eigenvalue >= -1e-10


def test_gram_witness_from_transform_negativity(cfg30, ex312_kernel):
    # where the transform scan certifies negativity, a tapered cosine probe
    # vector at the scan argmin drives the Hermitian form negative
    rep = assoc.pd_check_transform(ex312_kernel, 2, 20, 300, cfg30)
    assert rep.verdict == "negativity_witness"
    assert rep.min_value.certainly_negative()
    w = float(rep.argmin)
    table = assoc.kernel_value_table(ex312_kernel, (2,), cfg30)[2]
    k_func = lambda u: float(table.interpolate(u).value)
    delta = math.pi / (2 * w)
    pts = [j * delta for j in range(160)]
    rho = assoc.cosine_probe_vector(pts, w)
    form = assoc.gram_form(k_func, pts, rho)
    assert form < 0
    gram = assoc.pd_check_gram(k_func, pts)
    assert gram.min_eigenvalue < 0


def test_gbar_decreasing_and_consistent(cfg30, theta_kernel):
    g = [assoc.gbar(theta_kernel, t, cfg30) for t in ("0", "0.2", "0.4", "0.6")]
    vals = [x.value.value for x in g]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert g[0].A.value == g[0].value.value  # A equals G-bar(0)


def test_sine_criterion_small_x_limit(cfg30, theta_kernel):
    rep = assoc.sine_criterion(theta_kernel, mpf("1e-4"), cfg30)
    assert abs(rep.cosine_direct.value / rep.a_value.value - 1) < mpf("0.001")


def test_sine_criterion_identity_and_positivity(cfg30, theta_kernel):
    for x in ("0.5", "1", "2"):
        rep = assoc.sine_criterion(theta_kernel, mpf(x), cfg30)
        assert rep.identity_within_bounds
        assert rep.lhs.value > 0          # alternating-series positivity
        assert rep.printed_form_holds
        assert rep.derivation_form_holds


def test_mathias_base_case(cfg30, theta_kernel, gaussian_kernel, dps40):
    # kernel route at n = 0 reproduces the squared transform
    for kernel in (theta_kernel, gaussian_kernel):
        spec = transform.make_spec(kernel)
        for x in (0, 1, 3):
            k0 = assoc.laguerre_kernel_route(kernel, 0, x, cfg30)
            f = transform.transform_eval(spec, x, 0, cfg30)
            f2 = f * f
            assert abs(k0.value - f2.value) <= \
                k0.abs_error_bound + f2.abs_error_bound + mpf("1e-24")


def test_route_agreement_compact(cfg30, gaussian_kernel, dps40):
    spec = transform.make_spec(gaussian_kernel)
    for n in (0, 1, 2):
        for x in (0, 1):
            d = laguerre.laguerre_Ln_derivative_route(spec, n, x, cfg30)
            k = assoc.laguerre_kernel_route(gaussian_kernel, n, x, cfg30)
            scale = max(abs(d.value), mpf("1e-20"))
            assert abs(d.value - k.value) / scale < mpf("1e-6")
