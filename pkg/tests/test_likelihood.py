import numpy as np
import pytest

from latentbias import (
    DomainError,
    PosteriorSummary,
    PriorKind,
    StopRecord,
    likelihood_oracle,
    outcome_probability_given_stop,
    predictive_score,
    stop_search_likelihood,
)

from conftest import cdf_oracle


def _summary(bias_mean, c_mean=0.0):
    k = len(bias_mean)
    return PosteriorSummary(
        labels=[f"g{i}" for i in range(k)],
        bias_mean=np.asarray(bias_mean, dtype=float),
        bias_variance=np.ones(k),
        rank=np.argsort(np.argsort(-np.asarray(bias_mean))) + 1,
        criminality_mean=c_mean,
        criminality_variance=1.0,
        prior_kind=PriorKind.DEPENDENT,
        sweeps=100,
    )


# --- closed form ----------------------------------------------------------------

def test_origin_both_branches_quarter():
    assert stop_search_likelihood(0.0, 0.0, 1) == pytest.approx(0.25, abs=1e-15)
    assert stop_search_likelihood(0.0, 0.0, 0) == pytest.approx(0.25, abs=1e-15)


def test_known_product_value():
    want = cdf_oracle(1.0) * cdf_oracle(1.5)
    assert want == pytest.approx(0.78514, abs=5e-6)
    assert stop_search_likelihood(1.0, 0.5, 1) == pytest.approx(want, abs=1e-10)


def test_branch_sum_is_stop_probability():
    grid = (-2.0, -1.0, 0.0, 1.0, 2.0)
    for c in grid:
        for beta in grid:
            total = stop_search_likelihood(c, beta, 1) + stop_search_likelihood(c, beta, 0)
            from latentbias import std_normal_cdf

            assert total == pytest.approx(std_normal_cdf(c + beta), abs=1e-12)


def test_monotone_in_c_for_positive_branch():
    vals = [stop_search_likelihood(c, 0.4, 1) for c in np.linspace(-3, 3, 61)]
    assert np.all(np.diff(vals) > 0)


def test_rejects_bad_branch():
    with pytest.raises(DomainError):
        stop_search_likelihood(0.0, 0.0, 2)


# --- oracle ------------------------------------------------------------------------

def test_oracle_at_origin():
    assert likelihood_oracle(0.0, 0.0, 1) == pytest.approx(0.25, abs=1e-4)


def test_oracle_branch_sum():
    total = likelihood_oracle(0.0, 0.0, 0) + likelihood_oracle(0.0, 0.0, 1)
    assert total == pytest.approx(0.5, abs=2e-4)


def test_oracle_vanishing_stop_mass():
    assert likelihood_oracle(-6.0, 0.0, 1) <= 1e-8


def test_oracle_matches_closed_form_subgrid():
    # the full 25-point grid runs in the acceptance suite
    for c in (-1.0, 0.0, 2.0):
        for beta in (-2.0, 1.0):
            for x in (0, 1):
                assert likelihood_oracle(c, beta, x) == pytest.approx(
                    stop_search_likelihood(c, beta, x), abs=1e-4
                )


# --- predictive scoring ---------------------------------------------------------------

def test_saturated_positive_posterior_scores_one():
    summary = _summary([0.0, 0.0], c_mean=5.0)
    test = [StopRecord(group=i % 2, outcome=True) for i in range(40)]
    assert predictive_score(summary, test, 1.0, 1.0) == 1.0


def test_zero_mean_breaks_tie_to_positive():
    # predicted probability is exactly 0.5 -> predict positive -> accuracy
    # equals the positive fraction
    summary = _summary([0.3, -0.3], c_mean=0.0)
    test = [StopRecord(group=i % 2, outcome=(i % 5 < 2)) for i in range(100)]
    positive_fraction = sum(1 for r in test if r.outcome) / len(test)
    assert predictive_score(summary, test, 1.0, 1.0) == pytest.approx(positive_fraction)


def test_strongly_negative_posterior_predicts_negative():
    summary = _summary([0.0], c_mean=-4.0)
    test = [StopRecord(group=0, outcome=False) for _ in range(10)]
    assert predictive_score(summary, test, 1.0, 1.0) == 1.0


def test_likelihood_method_uses_group_specific_probabilities():
    summary = _summary([2.0, -2.0], c_mean=0.0)
    p_hi = outcome_probability_given_stop(2.0, 0.0, 1.0, 1.0)
    p_lo = outcome_probability_given_stop(-2.0, 0.0, 1.0, 1.0)
    assert p_hi != pytest.approx(p_lo, abs=1e-3)
    # stop selection biases criminality upward: both conditionals above 1/2,
    # and a larger bias means weaker selection, so a smaller probability
    assert 0.5 < p_hi < p_lo
    test = [StopRecord(group=0, outcome=True), StopRecord(group=1, outcome=True)]
    want = (p_hi + p_lo) / 2
    assert predictive_score(summary, test, 1.0, 1.0, method="likelihood") == pytest.approx(want)


def test_score_validates_input():
    summary = _summary([0.0])
    with pytest.raises(DomainError):
        predictive_score(summary, [], 1.0, 1.0)
    with pytest.raises(DomainError):
        predictive_score(summary, [StopRecord(group=0, stopped=False)], 1.0, 1.0)
    with pytest.raises(DomainError):
        predictive_score(summary, [StopRecord(group=0, outcome=True)], 1.0, 1.0, method="bogus")
