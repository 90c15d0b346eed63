import json
import math

import numpy as np
import pytest

from latentbias import (
    ConditioningError,
    DomainError,
    Gaussian1D,
    MultivariateGaussian,
    NaturalGaussian,
    from_natural,
    mvn_marginal,
    mvn_sample,
    sample_truncated_normal,
    std_normal_cdf,
    to_natural,
    truncated_moments,
)

from conftest import cdf_oracle, mills_lambda_oracle, truncated_moment_oracle


# --- standard normal CDF -----------------------------------------------------

def test_cdf_at_zero():
    assert std_normal_cdf(0.0) == 0.5


def test_cdf_symmetry():
    assert std_normal_cdf(0.7) + std_normal_cdf(-0.7) == pytest.approx(1.0, abs=1e-15)


def test_cdf_against_quadrature_oracle():
    for x in (-3.0, -1.0, 0.3, 1.96, 2.5):
        assert std_normal_cdf(x) == pytest.approx(cdf_oracle(x), abs=1e-12)


def test_cdf_1p96_value():
    assert std_normal_cdf(1.96) == pytest.approx(0.9750021048517796, abs=1e-12)


def test_cdf_monotone():
    xs = np.linspace(-9, 9, 400)
    vals = std_normal_cdf(xs)
    assert np.all(np.diff(vals) >= 0)


def test_cdf_rejects_non_finite():
    with pytest.raises(DomainError):
        std_normal_cdf(float("nan"))
    with pytest.raises(DomainError):
        std_normal_cdf(float("inf"))


# --- truncated normal sampling ----------------------------------------------

def test_truncated_support_positive():
    rng = np.random.default_rng(0)
    xs = sample_truncated_normal(np.zeros(10_000), 1.0, np.ones(10_000), rng)
    assert np.all(xs > 0)


def test_half_normal_mean():
    rng = np.random.default_rng(1)
    xs = sample_truncated_normal(np.zeros(1_000_000), 1.0, np.ones(1_000_000), rng)
    assert xs.mean() == pytest.approx(math.sqrt(2 / math.pi), abs=0.01)


def test_far_tail_mean_against_mills_oracle():
    # N(-4, 1) restricted to x > 0: mean is phi(4)/Phi(-4) - 4
    rng = np.random.default_rng(2)
    xs = sample_truncated_normal(np.full(1_000_000, -4.0), 1.0, np.ones(1_000_000), rng)
    expected = mills_lambda_oracle(4.0) - 4.0
    assert expected == pytest.approx(0.22561, abs=1e-4)
    assert xs.mean() == pytest.approx(expected, abs=0.01)
    assert xs.min() > 0


def test_negative_sign_mirror():
    rng = np.random.default_rng(3)
    xs = sample_truncated_normal(np.full(200_000, 1.0), 2.0, -np.ones(200_000), rng)
    assert np.all(xs < 0)
    m, v = truncated_moment_oracle(1.0, 2.0, -1.0)
    assert xs.mean() == pytest.approx(m, abs=0.02)
    assert xs.var() == pytest.approx(v, abs=0.02)


def test_extreme_tail_does_not_hang_or_leak():
    # kept mass ~6e-16: must use the rejection path, finish fast, stay in support
    rng = np.random.default_rng(4)
    xs = sample_truncated_normal(np.full(100_000, -8.0), 1.0, np.ones(100_000), rng)
    assert np.all(xs > 0)
    m, _v = truncated_moment_oracle(-8.0, 1.0, 1.0)
    assert xs.mean() == pytest.approx(m, abs=0.02)


def test_truncation_support_fuzz():
    # 10^7 draws across the documented envelope |mean|/sd up to 8: no sign
    # violation anywhere
    rng = np.random.default_rng(5)
    n = 10_000_000
    means = rng.uniform(-8.0, 8.0, n)
    signs = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    xs = sample_truncated_normal(means, 1.0, signs, rng)
    assert np.all(signs * xs > 0)


def test_truncated_moments_match_oracle_grid():
    for a in (-8, -4, -1, 0, 1, 4, 8):
        m, v = truncated_moments(-float(a), 1.0, 1.0)
        mo, vo = truncated_moment_oracle(-float(a), 1.0, 1.0)
        assert m == pytest.approx(mo, rel=1e-9)
        assert v == pytest.approx(vo, rel=1e-7)


def test_truncated_rejects_bad_variance():
    rng = np.random.default_rng(0)
    with pytest.raises(DomainError):
        sample_truncated_normal(0.0, 0.0, 1.0, rng)
    with pytest.raises(DomainError):
        sample_truncated_normal(0.0, -1.0, 1.0, rng)
    with pytest.raises(DomainError):
        sample_truncated_normal(0.0, 1.0, 2.0, rng)


# --- Gaussian1D ---------------------------------------------------------------

def test_gaussian1d_roundtrip_exact():
    g = Gaussian1D(mean=0.12345678901234567, variance=3.9999999999999996)
    g2 = Gaussian1D.from_dict(json.loads(json.dumps(g.to_dict())))
    assert g2.mean == g.mean and g2.variance == g.variance


def test_gaussian1d_rejects_bad_variance():
    with pytest.raises(DomainError):
        Gaussian1D(0.0, 0.0)


# --- natural/moment conversions ----------------------------------------------

def test_identity_roundtrip():
    mvn = MultivariateGaussian(mean=np.zeros(3), covariance=np.eye(3))
    nat = to_natural(mvn)
    assert np.allclose(nat.precision, np.eye(3))
    assert np.allclose(nat.precision_mean, 0.0)


def test_known_2x2_inverse():
    mvn = MultivariateGaussian(mean=[1.0, -1.0], covariance=[[1.0, 0.5], [0.5, 1.0]])
    nat = to_natural(mvn)
    expected = np.array([[4 / 3, -2 / 3], [-2 / 3, 4 / 3]])
    assert np.allclose(nat.precision, expected, atol=1e-12)


@pytest.mark.parametrize("dim", [1, 2, 3, 5, 8])
def test_random_spd_roundtrips(dim):
    rng = np.random.default_rng(dim)
    for _ in range(20):
        a = rng.standard_normal((dim, dim))
        cov = a @ a.T + dim * np.eye(dim)
        mean = rng.standard_normal(dim)
        mvn = MultivariateGaussian(mean=mean, covariance=cov)
        back = from_natural(to_natural(mvn))
        assert np.allclose(back.mean, mvn.mean, rtol=1e-8, atol=1e-10)
        assert np.allclose(back.covariance, mvn.covariance, rtol=1e-8)
        nat = NaturalGaussian(precision=np.linalg.inv(cov), precision_mean=np.linalg.solve(cov, mean))
        nat2 = to_natural(from_natural(nat))
        assert np.allclose(nat2.precision, nat.precision, rtol=1e-8)


def test_non_spd_covariance_reports_pivot():
    bad = np.array([[1.0, 0.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, 1.0]])
    with pytest.raises(ConditioningError) as exc:
        MultivariateGaussian(mean=np.zeros(3), covariance=bad)
    assert exc.value.pivot == 1


def test_asymmetric_covariance_rejected():
    with pytest.raises(DomainError):
        MultivariateGaussian(mean=np.zeros(2), covariance=[[1.0, 0.3], [0.1, 1.0]])


# --- marginalization -----------------------------------------------------------

def _mvn3():
    cov = np.array([[2.0, 0.3, 0.1], [0.3, 1.5, -0.2], [0.1, -0.2, 1.0]])
    return MultivariateGaussian(mean=[1.0, 2.0, 3.0], covariance=cov)


def test_marginal_full_identity():
    mvn = _mvn3()
    marg = mvn_marginal(mvn, (0, 1, 2))
    assert np.array_equal(marg.mean, mvn.mean)
    assert np.array_equal(marg.covariance, mvn.covariance)


def test_marginal_single_index():
    mvn = _mvn3()
    marg = mvn_marginal(mvn, (1,))
    assert marg.mean[0] == 2.0
    assert marg.covariance[0, 0] == 1.5


def test_marginal_selection():
    mvn = _mvn3()
    marg = mvn_marginal(mvn, (0, 2))
    assert np.array_equal(marg.mean, [1.0, 3.0])
    assert np.array_equal(marg.covariance, mvn.covariance[np.ix_([0, 2], [0, 2])])


def test_marginal_rejects_bad_indices():
    mvn = _mvn3()
    with pytest.raises(DomainError):
        mvn_marginal(mvn, (0, 0))
    with pytest.raises(DomainError):
        mvn_marginal(mvn, (0, 3))


# --- sampling -------------------------------------------------------------------

def test_sample_deterministic_given_seed():
    mvn = _mvn3()
    a = mvn_sample(mvn, np.random.default_rng(42), size=10)
    b = mvn_sample(mvn, np.random.default_rng(42), size=10)
    assert np.array_equal(a, b)


def test_sample_concentrates_at_tiny_variance():
    mvn = MultivariateGaussian(mean=[2.0, -3.0], covariance=1e-12 * np.eye(2))
    draws = mvn_sample(mvn, np.random.default_rng(0), size=1000)
    assert np.all(np.abs(draws - np.array([2.0, -3.0])) < 1e-5)


def test_sample_moments_match_covariance():
    cov = np.array([[1.0, 0.5], [0.5, 1.0]])
    mvn = MultivariateGaussian(mean=[0.0, 0.0], covariance=cov)
    draws = mvn_sample(mvn, np.random.default_rng(1), size=1_000_000)
    emp = np.cov(draws.T)
    assert np.allclose(emp, cov, atol=0.01)
    corr = np.corrcoef(draws.T)[0, 1]
    assert corr == pytest.approx(0.5, abs=0.01)


def test_marginal_consistency_joint_vs_direct():
    # project joint samples vs sample the marginal directly: same moments
    mvn = _mvn3()
    n = 1_000_000
    joint = mvn_sample(mvn, np.random.default_rng(7), size=n)[:, [0, 2]]
    direct = mvn_sample(mvn_marginal(mvn, (0, 2)), np.random.default_rng(8), size=n)
    assert np.allclose(joint.mean(axis=0), direct.mean(axis=0), atol=0.01)
    assert np.allclose(np.cov(joint.T), np.cov(direct.T), atol=0.01)
