import mpmath as mp
import pytest
from mpmath import mpf

from thetalab import kernels, moments, transform
from thetalab.errors import PrecisionExhausted


def xi_oracle_at_zero():
    s = mpf(1) / 2
    return s * (s - 1) / 2 * mp.pi ** (-s / 2) * mp.gamma(s / 2) * mp.zeta(s) / 8


def test_gamma0_equals_b0(theta_kernel, dps40):
    table = moments.moment_table(theta_kernel, 2, 30)
    row = table.row(0)
    assert row.gamma.value == row.b.value


def test_b0_matches_xi_oracle(theta_kernel, dps40):
    table = moments.moment_table(theta_kernel, 1, 30)
    assert abs(table.row(0).b.value - xi_oracle_at_zero()) < mpf("1e-22")


def test_turan_margins_certified_small(theta_kernel, dps40):
    table = moments.moment_table(theta_kernel, 6, 30)
    rep = moments.turan_margin_report(table)
    assert rep.first_uncertified_k is None
    assert rep.min_turan_margin > 0
    assert rep.classical_sign_agreement


def test_double_turan_recorded(theta_kernel, dps40):
    table = moments.moment_table(theta_kernel, 6, 30)
    doubles = [r.double_turan for r in table.rows if r.double_turan is not None]
    assert len(doubles) == 4            # k = 2..5
    assert all(d.certainly_positive() for d in doubles)


def test_strict_mode_raises_on_turan_equality(gaussian_kernel, dps40):
    # the pure Gaussian sits exactly on the Turan equality (its section has
    # log-linear coefficients), so no margin can ever be certified
    with pytest.raises(PrecisionExhausted):
        moments.moment_table(gaussian_kernel, 2, 30, strict=True)
    table = moments.moment_table(gaussian_kernel, 2, 30)
    rep = moments.turan_margin_report(table)
    assert rep.first_uncertified_k == 1
    assert abs(table.row(1).turan.value) <= table.row(1).turan.abs_error_bound


def test_scaling_covariance(dps40):
    base = kernels.gaussian_poly([1, 0, 1])
    scaled = kernels.gaussian_poly([3, 0, 3])
    t1 = moments.moment_table(base, 3, 30)
    t3 = moments.moment_table(scaled, 3, 30)
    for k in range(4):
        ratio = t3.row(k).b.value / t1.row(k).b.value
        assert abs(ratio - 3) < mpf("1e-20")
    for k in range(1, 4):
        ratio = t3.row(k).turan.value / t1.row(k).turan.value
        assert abs(ratio - 9) < mpf("1e-15")
        assert (t3.row(k).turan.value >= 0) == (t1.row(k).turan.value >= 0)


def test_monotone_precision_margins(theta_kernel, dps40):
    t40 = moments.moment_table(theta_kernel, 5, 40)
    t50 = moments.moment_table(theta_kernel, 5, 50)
    for k in range(1, 6):
        m40 = t40.row(k).turan.value - t40.row(k).turan.abs_error_bound
        m50 = t50.row(k).turan.value - t50.row(k).turan.abs_error_bound
        assert m50 >= m40 - abs(m40) * mpf("1e-6")


def test_fc_at_zero(theta_kernel, dps40):
    rep = moments.fc_eval(theta_kernel, 0, 3, 30)
    assert rep.series.value == moments.moment_table(theta_kernel, 3, 30).row(0).gamma.value
    assert abs(rep.series.value - rep.direct.value) <= \
        rep.series.abs_error_bound + rep.direct.abs_error_bound


def test_fc_negative_argument_is_transform(theta_kernel, dps40):
    # F_c(-x^2) equals the cosine transform at x (change of variables)
    rep = moments.fc_eval(theta_kernel, -4, 20, 30)
    spec = transform.make_spec(theta_kernel)
    h2 = transform.transform_eval(spec, 2, 0,
                                  moments._moment_quad_config(30))
    assert abs(rep.direct.value - h2.value) <= \
        rep.direct.abs_error_bound + h2.abs_error_bound
    assert rep.agree_within_bounds


def test_fc_positive_argument_routes_agree(theta_kernel, dps40):
    rep = moments.fc_eval(theta_kernel, 1, 25, 40)
    assert rep.agree_within_bounds
    assert not rep.series_diverging


def test_taylor_partial_sum_consistency(theta_kernel, dps40):
    # alternating Taylor sum of the transform against its direct value
    table = moments.moment_table(theta_kernel, 16, 40)
    partial, next_term = moments.taylor_partial_transform(theta_kernel, 1, 15,
                                                          40, table)
    spec = transform.make_spec(theta_kernel)
    h1 = transform.transform_eval(spec, 1, 0,
                                  moments._moment_quad_config(40))
    assert abs(partial.value - h1.value) <= next_term + \
        partial.abs_error_bound + h1.abs_error_bound
