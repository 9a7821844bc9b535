"""Cover solvers: validity, determinism, work counters, batch invariants,
and the distributional equivalence of the two frequency-solver variants."""

import pytest
from scipy.stats import ks_2samp

from cover_sampler import (Cover, ExactSize, NoisyExactSize, f_approx_bucketed,
                           f_approx_online, generate_random_instance,
                           hdelta_cover, parse_instance, verify_cover)
from cover_sampler.cover import BatchRecord
from cover_sampler.instance import SetCoverInstance
from cover_sampler.util import derive_rng

SOLVERS = [f_approx_online, f_approx_bucketed, hdelta_cover]


@pytest.fixture(scope="module")
def small_instance():
    return generate_random_instance(15, 50, 3, seed=11)


def single_set_instance(num_elements=6):
    return SetCoverInstance.from_edges(1, num_elements,
                                       [(0, t) for t in range(num_elements)])


def disjoint_singletons(num_sets=5):
    return SetCoverInstance.from_edges(num_sets, num_sets,
                                       [(s, s) for s in range(num_sets)])


@pytest.mark.parametrize("solver", SOLVERS)
def test_single_covering_set(solver):
    inst = single_set_instance()
    cover, counters = solver(inst, 0.25, derive_rng(1))
    assert cover.chosen_sets == (0,)
    assert verify_cover(inst, cover) == (True, None)


@pytest.mark.parametrize("solver", SOLVERS)
def test_disjoint_singletons_forced_optimal(solver):
    inst = disjoint_singletons()
    cover, _ = solver(inst, 0.5, derive_rng(2))
    assert cover.size == inst.num_sets


@pytest.mark.parametrize("solver", SOLVERS)
def test_empty_instance(solver):
    inst = SetCoverInstance.from_edges(4, 0, [])
    cover, counters = solver(inst, 0.1, derive_rng(3))
    assert cover.size == 0
    assert counters.steps_executed == 0


@pytest.mark.parametrize("solver", SOLVERS)
def test_validity_over_seeds(solver, small_instance):
    for seed in range(60):
        cover, _ = solver(small_instance, 0.25, derive_rng(seed))
        ok, witness = verify_cover(small_instance, cover)
        assert ok, f"seed {seed} left element {witness} uncovered"


@pytest.mark.parametrize("solver", SOLVERS)
def test_deterministic_given_seed(solver, small_instance):
    a, _ = solver(small_instance, 0.1, derive_rng(42))
    b, _ = solver(small_instance, 0.1, derive_rng(42))
    assert a == b


def test_bucketed_validity_many_seeds(small_instance):
    # the final step has sampling probability 1, so every run must cover
    for seed in range(1000):
        cover, _ = f_approx_bucketed(small_instance, 0.5, derive_rng(9, seed))
        assert verify_cover(small_instance, cover)[0]


def test_bucketed_work_counters(small_instance):
    inst = small_instance
    for seed in range(50):
        _, counters = f_approx_bucketed(inst, 0.1, derive_rng(4, seed))
        assert counters.edge_touches <= 2 * inst.m
        assert counters.element_touches <= inst.num_elements + inst.m


def test_bucketed_counters_single_set():
    inst = single_set_instance()
    _, counters = f_approx_bucketed(inst, 0.25, derive_rng(5))
    assert counters.element_touches <= inst.num_elements + inst.m


def test_online_and_bucketed_same_distribution():
    inst = generate_random_instance(10, 40, 2, seed=77)
    runs = 4000
    online = [f_approx_online(inst, 0.1, derive_rng(1, t))[0].size
              for t in range(runs)]
    bucketed = [f_approx_bucketed(inst, 0.1, derive_rng(2, t))[0].size
                for t in range(runs)]
    assert ks_2samp(online, bucketed).statistic < 0.05


def test_calibrated_runs_longer_schedule(small_instance):
    _, raw = f_approx_bucketed(small_instance, 0.4, derive_rng(6))
    _, cal = f_approx_online(small_instance, 0.4, derive_rng(6), calibrated=True)
    assert cal.steps_executed > raw.steps_executed


def test_calibrated_still_validates_caller_eps(small_instance):
    from cover_sampler import InvalidEpsilon
    with pytest.raises(InvalidEpsilon):
        f_approx_bucketed(small_instance, 0.9, derive_rng(6), calibrated=True)


def test_hdelta_single_large_set_committed_at_top_level():
    inst = single_set_instance(num_elements=16)
    log = []
    cover, _ = hdelta_cover(inst, 0.25, derive_rng(7), batch_log=log)
    assert cover.size == 1
    assert len(log) == 1
    # floor(log_{1.25} 16) = 12
    assert log[0].level == 12
    assert log[0].min_committed_size == 16


def test_hdelta_batch_invariants(small_instance):
    eps = 0.1
    for seed in range(40):
        log: list[BatchRecord] = []
        cover, _ = hdelta_cover(small_instance, eps, derive_rng(8, seed),
                                batch_log=log)
        assert verify_cover(small_instance, cover)[0]
        for rec in log:
            assert rec.min_committed_size * (1 + eps) ** 2 >= \
                rec.max_live_size * (1 - 1e-9)
            assert all(m >= 1 for m in rec.cover_multiplicities)


def test_hdelta_batch_multiplicity_mean():
    # averaged over many runs, a newly covered element is covered by barely
    # more than one set of its committing batch
    eps = 0.1
    inst = generate_random_instance(12, 36, 3, seed=21)
    total = count = 0
    for run in range(10_000):
        log: list[BatchRecord] = []
        hdelta_cover(inst, eps, derive_rng(20, run), batch_log=log)
        for rec in log:
            total += sum(rec.cover_multiplicities)
            count += len(rec.cover_multiplicities)
    assert count > 0
    assert total / count <= 1 + 4 * eps + 3 / count ** 0.5


def test_hdelta_noisy_oracle_invariants(small_instance):
    eps, delta = 0.1, 0.1
    for seed in range(30):
        rng = derive_rng(9, seed)
        log: list[BatchRecord] = []
        cover, _ = hdelta_cover(small_instance, eps, rng,
                                size_oracle=NoisyExactSize(delta, rng),
                                batch_log=log)
        assert verify_cover(small_instance, cover)[0]
        for rec in log:
            assert rec.min_committed_size * (1 + eps) ** 2 * (1 + delta) >= \
                rec.max_live_size * (1 - 1e-9)


def test_noisy_oracle_contract():
    rng = derive_rng(10)
    oracle = NoisyExactSize(0.2, rng)
    for size in (1, 5, 40):
        for _ in range(200):
            est = oracle.estimate(0, size)
            assert size <= est <= 1.2 * size * (1 + 1e-12)
    assert ExactSize().estimate(3, 17) == 17.0
    with pytest.raises(ValueError):
        NoisyExactSize(-0.1, rng)


def test_hdelta_rebuckets_shrinking_sets():
    # two overlapping large sets: after one is taken the other shrinks
    edges = [(0, t) for t in range(8)] + [(1, t) for t in range(4, 12)]
    inst = SetCoverInstance.from_edges(2, 12, edges)
    total = 0
    for seed in range(30):
        _, counters = hdelta_cover(inst, 0.25, derive_rng(11, seed))
        total += counters.rebucket_events
    assert total > 0


def test_verify_cover_reports_witness():
    inst = parse_instance("p sc 2 3 4\ne 0 0\ne 0 1\ne 1 1\ne 1 2")
    assert verify_cover(inst, Cover(())) == (False, 0)
    assert verify_cover(inst, Cover((0, 1))) == (True, None)
    assert verify_cover(inst, Cover((1,))) == (False, 0)
    assert verify_cover(inst, Cover((0,))) == (False, 2)
    with pytest.raises(ValueError):
        verify_cover(inst, Cover((5,)))
