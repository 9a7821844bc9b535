"""Schedule arithmetic, its invariants over a parameter grid, and the alias
sampler's distributional correctness."""

import math

import numpy as np
import pytest
from scipy import stats

from cover_sampler import (InvalidEpsilon, bucket_distribution, build_alias,
                           compute_b, make_schedule, probabilities, probability,
                           sample_alias, schedule_for_max_size,
                           schedule_length_inner, schedule_length_outer)
from cover_sampler.schedule import alias_for_schedule
from cover_sampler.util import derive_rng

GRID_EPS = (0.05, 0.1, 0.25, 0.5)


@pytest.mark.parametrize("eps,expected", [(0.5, 3), (0.1, 8), (0.25, 4)])
def test_compute_b_values(eps, expected):
    assert compute_b(eps) == expected


@pytest.mark.parametrize("eps", [0.0, -0.1, 0.51, 0.9, 2.0])
def test_eps_out_of_range_rejected(eps):
    with pytest.raises(InvalidEpsilon):
        compute_b(eps)


def test_probability_values():
    sched = make_schedule(0.5, 21)
    assert probability(0, sched) == 1.0
    assert probability(sched.b, sched) == pytest.approx(1 / 1.5)
    assert probability(7, sched) == pytest.approx(0.296296, abs=1e-6)
    with pytest.raises(IndexError):
        probability(22, sched)
    with pytest.raises(IndexError):
        probability(-1, sched)


def test_probabilities_vector_matches_scalar():
    sched = make_schedule(0.25, 40)
    vec = probabilities(sched)
    assert vec.shape == (41,)
    for i in range(41):
        assert vec[i] == pytest.approx(probability(i, sched))


@pytest.mark.parametrize("delta,eps,expected", [(1, 0.5, 6), (8, 0.5, 21)])
def test_outer_length_values(delta, eps, expected):
    assert schedule_length_outer(delta, eps) == expected


@pytest.mark.parametrize("freq,eps,expected", [(1, 0.5, 6), (2, 0.5, 12)])
def test_inner_length_values(freq, eps, expected):
    assert schedule_length_inner(freq, eps) == expected


@pytest.mark.parametrize("eps", GRID_EPS)
@pytest.mark.parametrize("delta", [1, 2, 7, 50, 1000])
def test_final_probability_small_enough(delta, eps):
    k = schedule_length_outer(delta, eps)
    sched = make_schedule(eps, k)
    assert probability(k, sched) * delta <= eps * (1 + 1e-12)


@pytest.mark.parametrize("eps", GRID_EPS)
@pytest.mark.parametrize("delta", [3, 64, 500])
def test_low_initial_and_slow_increase(delta, eps):
    sched = schedule_for_max_size(delta, eps)
    p = probabilities(sched)
    k, b = sched.k, sched.b
    # last b steps keep the expected sample count below eps
    for j in range(k - b + 1, k + 1):
        assert p[j] * delta <= eps * (1 + 1e-12)
    # probabilities rise by exactly (1+eps) every b steps, never faster
    for i in range(0, k - b + 1):
        assert p[i] <= (1 + eps) * p[i + b] * (1 + 1e-12)
    assert np.all(np.diff(p) <= 1e-15)  # non-increasing in the step index


def test_bucket_distribution_degenerate():
    sched = make_schedule(0.3, 0)
    assert bucket_distribution(sched).tolist() == [1.0]


def test_bucket_distribution_sums_to_one():
    sched = schedule_for_max_size(50, 0.3)
    probs = bucket_distribution(sched)
    assert abs(probs.sum() - 1.0) <= 1e-12
    assert np.all(probs >= 0) and np.all(probs <= 1)


def test_bucket_distribution_last_entry():
    sched = make_schedule(0.5, 6)
    probs = bucket_distribution(sched)
    assert probs[6] == pytest.approx(1.5 ** -2)


def test_alias_single_weight():
    table = build_alias([1.0])
    rng = derive_rng(0)
    assert all(sample_alias(table, rng) == 0 for _ in range(50))


def test_alias_rejects_bad_weights():
    with pytest.raises(ValueError):
        build_alias([0.0, 0.0])
    with pytest.raises(ValueError):
        build_alias([1.0, -0.5])
    with pytest.raises(ValueError):
        build_alias([])


def test_alias_two_equal_weights_balanced():
    table = build_alias([1.0, 1.0])
    draws = sample_alias(table, derive_rng(1), size=100_000)
    freq = (draws == 0).mean()
    sigma = math.sqrt(0.25 / 100_000)
    assert abs(freq - 0.5) <= 3 * sigma


def _chi2_pvalue(draws, probs):
    obs = np.bincount(draws, minlength=len(probs)).astype(float)
    exp = probs * len(draws)
    keep = exp >= 5
    if (~keep).any():
        obs = np.append(obs[keep], obs[~keep].sum())
        exp = np.append(exp[keep], exp[~keep].sum())
    return stats.chisquare(obs, exp * obs.sum() / exp.sum()).pvalue


def test_alias_matches_bucket_distribution():
    sched = schedule_for_max_size(8, 0.5)
    probs = bucket_distribution(sched)
    table = alias_for_schedule(sched)
    draws = sample_alias(table, derive_rng(2), size=1_000_000)
    assert _chi2_pvalue(draws, probs) > 0.001


def test_alias_deterministic_given_seed():
    sched = schedule_for_max_size(32, 0.25)
    table = alias_for_schedule(sched)
    a = sample_alias(table, derive_rng(3), size=1000)
    b = sample_alias(table, derive_rng(3), size=1000)
    assert np.array_equal(a, b)
