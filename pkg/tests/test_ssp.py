"""Sampling-process simulator: trace structure, adversaries, estimator
correctness (including cross-validation of the batch engine against the
step-faithful runner), and the deterministic step-level checks."""

import pytest

from cover_sampler import (AdaptiveKillOnNearMiss, Adversary,
                           DeleteSampledNeighbors, HalveEachStep,
                           InsufficientSamples, InsufficientTrials,
                           InvalidConfig, SspConfig, builtin_adversaries,
                           check_step_lemmas, estimate_conditional_multiplicity,
                           estimate_expected_rz, make_schedule, minimum_steps,
                           run_ssp)
from cover_sampler.util import mean_ci95


class KillEverythingEarly(Adversary):
    """Deletes the whole pool on the first shrink."""

    name = "kill-all"

    def shrink(self, sched, step, alive, history, rng, keep=None):
        return {keep} if keep is not None else set()


def test_trace_structure_identity():
    cfg = SspConfig(initial_size=30, eps=0.25, seed=3)
    trace = run_ssp(cfg)
    assert trace.z >= 0
    assert trace.r_z >= 1
    steps = [rec[0] for rec in trace.steps]
    assert steps == sorted(steps, reverse=True)
    sizes = [rec[1] for rec in trace.steps]
    assert all(a >= b for a, b in zip(sizes, sizes[1:]))  # non-increasing
    assert all(rec[2] <= rec[1] for rec in trace.steps)
    assert trace.steps[-1][0] == trace.z
    assert trace.steps[-1][2] == trace.r_z
    assert all(rec[2] == 0 for rec in trace.steps[:-1])


def test_kill_all_adversary_never_samples():
    hit_empty = 0
    for seed in range(40):
        trace = run_ssp(SspConfig(initial_size=5, eps=0.5,
                                  adversary=KillEverythingEarly(), seed=seed))
        if trace.steps[0][2] == 0:
            hit_empty += 1
            assert trace.z == -1
            assert trace.r_z == 0
    assert hit_empty > 0  # the first-step sample is empty most of the time


def test_single_item_always_sampled():
    for seed in range(30):
        trace = run_ssp(SspConfig(initial_size=1, eps=0.5, seed=seed))
        assert trace.z >= 0
        assert trace.r_z == 1


def test_minimum_length_enforced():
    kmin = minimum_steps(100, 0.1)
    with pytest.raises(InvalidConfig):
        run_ssp(SspConfig(initial_size=100, eps=0.1, k=kmin - 1))
    run_ssp(SspConfig(initial_size=100, eps=0.1, k=kmin))


def test_estimators_enforce_trial_minimum():
    cfg = SspConfig(initial_size=10, eps=0.5)
    with pytest.raises(InsufficientTrials):
        estimate_expected_rz(cfg, 999)
    with pytest.raises(InsufficientTrials):
        estimate_conditional_multiplicity(cfg, 0, 10)


def test_expected_rz_single_item_exact():
    mean, ci = estimate_expected_rz(SspConfig(initial_size=1, eps=0.5, seed=1), 2000)
    assert mean == 1.0
    assert ci == 0.0


def test_expected_rz_identity_within_bound():
    cfg = SspConfig(initial_size=100, eps=0.1, seed=2)
    mean, ci = estimate_expected_rz(cfg, 100_000)
    assert mean - ci <= 1.4


def test_expected_rz_halve_within_bound():
    cfg = SspConfig(initial_size=50, eps=0.25, adversary=HalveEachStep(), seed=3)
    mean, ci = estimate_expected_rz(cfg, 100_000)
    assert mean - ci <= 2.0


def test_conditional_multiplicity_single_item_zero():
    p, ci = estimate_conditional_multiplicity(
        SspConfig(initial_size=1, eps=0.25, seed=4), 0, 5000)
    assert p == 0.0


def test_conditional_multiplicity_identity():
    cfg = SspConfig(initial_size=100, eps=0.05, seed=5)
    p, ci = estimate_conditional_multiplicity(cfg, 0, 200_000)
    assert p - ci <= 0.30


def test_conditional_multiplicity_deleting_adversary():
    cfg = SspConfig(initial_size=200, eps=0.1,
                    adversary=DeleteSampledNeighbors(0.5), seed=6)
    p, ci = estimate_conditional_multiplicity(cfg, 0, 200_000)
    assert p - ci <= 0.6


def test_marked_out_of_range():
    with pytest.raises(InvalidConfig):
        estimate_conditional_multiplicity(
            SspConfig(initial_size=5, eps=0.25), 7, 2000)


def test_near_miss_sequence_shrinks_after_trigger():
    adv = AdaptiveKillOnNearMiss()
    sched = make_schedule(0.25, minimum_steps(400, 0.25))
    seq = adv.size_sequence(sched, 400, protect=False)
    assert seq[sched.k] == 400
    assert seq[0] < 400  # the kill fired somewhere
    assert all(int(a) >= int(b) for a, b in
               zip(seq[::-1], seq[::-1][1:]))  # non-increasing over time


@pytest.mark.parametrize("name", sorted(builtin_adversaries()))
def test_batch_engine_matches_direct_runs(name):
    """The vectorized estimators draw from the same law as the faithful
    step-by-step runner."""
    adv = builtin_adversaries()[name]
    direct = [run_ssp(SspConfig(initial_size=12, eps=0.5, adversary=adv,
                                seed=10_000 + t)).r_z
              for t in range(4000)]
    m_direct, ci_direct = mean_ci95(direct)
    m_batch, ci_batch = estimate_expected_rz(
        SspConfig(initial_size=12, eps=0.5, adversary=adv, seed=77), 60_000)
    assert abs(m_direct - m_batch) <= 3.0 * (ci_direct + ci_batch)


def test_batch_engine_matches_exact_value():
    # Identity, n=12, eps=0.25: conditional multiplicity has a closed form
    eps, n = 0.25, 12
    from cover_sampler.schedule import probabilities
    sched = make_schedule(eps, minimum_steps(n, eps))
    p = probabilities(sched)
    surv, acc, mult = 1.0, 0.0, 0.0
    for i in range(sched.k, -1, -1):
        acc += surv * p[i]
        mult += surv * p[i] * (1 - (1 - p[i]) ** (n - 1))
        surv *= (1 - p[i]) ** n
    exact = mult / acc
    p_hat, ci = estimate_conditional_multiplicity(
        SspConfig(initial_size=n, eps=eps, seed=8), 0, 400_000)
    assert abs(p_hat - exact) <= max(3 * ci, 1e-3)


def test_custom_adversary_falls_back_to_direct_runs():
    mean, ci = estimate_expected_rz(
        SspConfig(initial_size=6, eps=0.5, adversary=KillEverythingEarly(),
                  seed=9), 1000)
    assert mean - ci <= 3.0  # bound 1 + 4 * 0.5


def test_insufficient_samples_raised():
    # acceptance probability is about 1/n per trial, so with a huge pool and
    # the minimum trial count no trial has the marked item sampled
    cfg = SspConfig(initial_size=1_000_000, eps=0.5, seed=1)
    with pytest.raises(InsufficientSamples):
        estimate_conditional_multiplicity(cfg, 0, 1000)


def test_check_step_lemmas_constant_sequence():
    n = 40
    sched = make_schedule(0.25, minimum_steps(n, 0.25))
    report = check_step_lemmas(sched, [n] * (sched.k + 1))
    assert report.ok
    assert report.violations == ()


def test_check_step_lemmas_probability_one_step():
    n = 10
    sched = make_schedule(0.5, minimum_steps(n, 0.5))
    # at step 0 the sample equals the pool: conditional mean n <= 1 + n
    report = check_step_lemmas(sched, [n] * (sched.k + 1))
    assert report.ok


def test_check_step_lemmas_decreasing_sequence():
    n = 64
    sched = make_schedule(0.1, minimum_steps(n, 0.1))
    sizes = [max(1, n - idx // 4) for idx in range(sched.k + 1)]
    report = check_step_lemmas(sched, sizes)
    assert report.ok


def test_check_step_lemmas_validates_input():
    sched = make_schedule(0.5, minimum_steps(10, 0.5))
    with pytest.raises(ValueError):
        check_step_lemmas(sched, [10] * sched.k)  # wrong length
    with pytest.raises(ValueError):
        check_step_lemmas(sched, list(range(sched.k + 1)))  # increasing
    with pytest.raises(InvalidConfig):
        check_step_lemmas(make_schedule(0.5, 6), [10**6] * 7)  # k too short
