import mpmath as mp
from mpmath import mpf

from thetalab import polyexp
from thetalab.numerics import finite_difference


def test_poly_eval_and_mul(dps40):
    p = polyexp.poly([1, 2, 3])
    q = polyexp.poly([0, 1])
    assert polyexp.p_eval(p, mpf(2)) == 17
    prod = polyexp.p_mul(p, q)
    assert polyexp.p_eval(prod, mpf(2)) == 34


def test_shift_expand(dps40):
    # p(s+t) for p(u) = u^2 + 5: coefficients in s are (t^2+5, 2t, 1)
    rows = polyexp.p_shift_expand(polyexp.poly([5, 0, 1]))
    t = mpf("0.7")
    assert abs(polyexp.p_eval(rows[0], t) - (t * t + 5)) < mpf("1e-30")
    assert abs(polyexp.p_eval(rows[1], t) - 2 * t) < mpf("1e-30")
    assert abs(polyexp.p_eval(rows[2], t) - 1) < mpf("1e-30")


def test_gausspoly_derivatives_match_finite_differences(dps40):
    coeffs = [15, 0, 1, 0, 1]
    for order in (1, 2, 3):
        for t in (mpf("0.3"), mpf("1.2")):
            exact = polyexp.gausspoly_value(coeffs, -1, t, order)
            fd = finite_difference(
                lambda u: polyexp.gausspoly_value(coeffs, -1, u, order - 1),
                t, 1, precision_digits=35)
            assert abs(exact - fd.value) <= fd.abs_error_bound + mpf("1e-28")


def test_gaussian_moment(dps40):
    # integral over the line of exp(-2 s^2) s^4 = (3/8) sqrt(pi/2) / 2 ... use gamma
    got = polyexp.gaussian_moment(4, 2)
    exact = mp.gamma(mpf(5) / 2) / mpf(2) ** mpf("2.5")
    assert abs(got - exact) < mpf("1e-35")
    assert polyexp.gaussian_moment(3, 2) == 0


def test_autocorrelation_poly_against_quadrature(dps40):
    # phi(u) = exp(-u^2)(1 + u^2); K_1(t) against direct numerical integration
    coeffs = [1, 0, 1]
    r = polyexp.autocorrelation_poly(coeffs, 1)
    for t in (mpf("0.4"), mpf("1.1")):
        oracle = mp.quad(
            lambda s: polyexp.gausspoly_value(coeffs, -1, s + t)
            * polyexp.gausspoly_value(coeffs, -1, s - t) * s * s,
            [-8, 0, 8])
        got = mp.exp(-2 * t * t) * polyexp.p_eval(r, t)
        assert abs(got - oracle) < mpf("1e-30")


def test_autocorrelation_poly_with_separation_weight(dps40):
    coeffs = [1]
    r = polyexp.autocorrelation_poly(coeffs, 1, weight_m=1)
    t = mpf("0.5")
    oracle = mp.quad(
        lambda s: mp.exp(-(s + t) ** 2) * mp.exp(-(s - t) ** 2)
        * (s * s - t * t) * s * s, [-8, 0, 8])
    got = mp.exp(-2 * t * t) * polyexp.p_eval(r, t)
    assert abs(got - oracle) < mpf("1e-30")
