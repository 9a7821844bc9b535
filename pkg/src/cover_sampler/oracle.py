"""Ground-truth baselines: exact minimum cover, exact maximum matching,
classic greedy, harmonic numbers, and the ratio-measurement harness."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cover import Cover
from .errors import TooLarge
from .instance import Hypergraph, SetCoverInstance
from .util import mean_ci95, worker_count

EXACT_COVER_LIMIT = 30
EXACT_MATCHING_LIMIT = 25


def exact_min_cover(instance: SetCoverInstance, limit: int = EXACT_COVER_LIMIT) -> int:
    """Exact optimum by branch and bound: branch on the uncovered element in
    the fewest sets, order candidate sets by residual coverage, prune with the
    ceil(uncovered/delta) lower bound and a greedy upper bound."""
    if instance.num_sets > limit:
        raise TooLarge(f"{instance.num_sets} sets exceeds the exact limit {limit}")
    if instance.num_elements == 0:
        return 0
    masks = []
    for adj in instance.set_neighbors:
        m = 0
        for t in adj:
            m |= 1 << t
        masks.append(m)
    full = (1 << instance.num_elements) - 1
    delta = max(instance.delta, 1)
    best = greedy_cover(instance).size

    def descend(covered: int, count: int) -> None:
        nonlocal best
        if covered == full:
            best = min(best, count)
            return
        uncovered = full & ~covered
        if count + -(-(uncovered.bit_count()) // delta) >= best:
            return
        # branch on the uncovered element with the fewest candidate sets
        pick, pick_sets = -1, None
        rem = uncovered
        while rem:
            t = (rem & -rem).bit_length() - 1
            rem &= rem - 1
            cands = instance.element_neighbors[t]
            if pick_sets is None or len(cands) < len(pick_sets):
                pick, pick_sets = t, cands
                if len(cands) == 1:
                    break
        assert pick_sets is not None
        ordered = sorted(pick_sets, key=lambda s: -(masks[s] & uncovered).bit_count())
        for s in ordered:
            descend(covered | masks[s], count + 1)

    descend(0, 0)
    return best


def exact_max_matching(hg: Hypergraph, limit: int = EXACT_MATCHING_LIMIT) -> int:
    """Exact maximum matching size by exhaustive search with pruning."""
    if len(hg.edges) > limit:
        raise TooLarge(f"{len(hg.edges)} edges exceeds the exact limit {limit}")
    masks = []
    for e in hg.edges:
        m = 0
        for v in e:
            m |= 1 << v
        masks.append(m)
    n = len(masks)
    best = 0

    def descend(idx: int, used: int, count: int) -> None:
        nonlocal best
        best = max(best, count)
        if idx == n or count + (n - idx) <= best:
            return
        if not (masks[idx] & used):
            descend(idx + 1, used | masks[idx], count + 1)
        descend(idx + 1, used, count)

    descend(0, 0, 0)
    return best


def greedy_cover(instance: SetCoverInstance) -> Cover:
    """Classic greedy: repeatedly take the set covering the most uncovered
    elements, lowest id on ties."""
    residual = [len(a) for a in instance.set_neighbors]
    covered = [False] * instance.num_elements
    remaining = instance.num_elements
    chosen = []
    while remaining > 0:
        s_best = max(range(instance.num_sets), key=lambda s: (residual[s], -s))
        if residual[s_best] == 0:
            raise AssertionError("uncoverable element in a validated instance")
        chosen.append(s_best)
        for t in instance.set_neighbors[s_best]:
            if not covered[t]:
                covered[t] = True
                remaining -= 1
                for s2 in instance.element_neighbors[t]:
                    residual[s2] -= 1
    return Cover(tuple(sorted(chosen)))


def harmonic(d: int) -> float:
    """d-th harmonic number, sum of 1/i for i = 1..d."""
    if d < 1:
        raise ValueError("harmonic number defined for d >= 1")
    return sum(1.0 / i for i in range(1, d + 1))


def f_approx_bound(instance: SetCoverInstance, eps: float) -> float:
    """Expected-ratio bound of the frequency solvers at raw eps."""
    return (1.0 + 4.0 * eps) * max(instance.freq, 1)


def hdelta_bound(instance: SetCoverInstance, eps: float,
                 oracle_delta: float = 0.0) -> float:
    """Expected-ratio bound of the size-threshold solver; the extra
    (1 + oracle_delta) factor covers over-approximate size estimates."""
    return (1.0 + eps) * (1.0 + oracle_delta) * (1.0 + 4.0 * eps) * harmonic(max(instance.delta, 1))


def matching_bound(hg: Hypergraph, eps: float) -> float:
    """Expected |M|/OPT lower bound for rank-h matching."""
    h = max(hg.rank, 1)
    return max(0.0, 1.0 - 6.0 * eps * h) / h


@dataclass(frozen=True)
class RatioReport:
    """Solution/optimum ratio statistics over seeded trials.  ``passed`` is
    mean - ci95 <= bound for minimization and mean + ci95 >= bound for
    maximization."""

    trials: int
    mean_ratio: float
    ci95: float
    opt: int
    bound: float
    passed: bool


def measure_ratio(solver, target, eps: float, trials: int,
                  rng: np.random.Generator, bound: float,
                  maximize: bool = False, opt: int | None = None,
                  workers: int = 1) -> RatioReport:
    """Run ``solver(target, eps, child_rng)`` for ``trials`` derived streams
    and compare the solution-size/optimum ratios against ``bound``.

    The optimum comes from the exact oracle matching ``target``'s type unless
    supplied.  A zero-size solution contributes ratio 0 (never divides).
    """
    if opt is None:
        if isinstance(target, SetCoverInstance):
            opt = exact_min_cover(target)
        elif isinstance(target, Hypergraph):
            opt = exact_max_matching(target)
        else:
            raise TypeError("target must be a SetCoverInstance or Hypergraph")
    children = rng.spawn(trials)

    def one(child):
        solution, _ = solver(target, eps, child)
        if opt == 0:
            return 1.0
        return solution.size / opt

    n_workers = worker_count(workers)
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            ratios = list(pool.map(one, children))
    else:
        ratios = [one(c) for c in children]
    mean, ci = mean_ci95(ratios)
    passed = (mean + ci >= bound) if maximize else (mean - ci <= bound)
    return RatioReport(trials=trials, mean_ratio=mean, ci95=ci, opt=int(opt),
                       bound=bound, passed=passed)


def exhaustive_min_cover(instance: SetCoverInstance, limit: int = 12) -> int:
    """Brute-force optimum over all set subsets; cross-checks the branch and
    bound oracle on small instances."""
    if instance.num_sets > limit:
        raise TooLarge(f"{instance.num_sets} sets exceeds the exhaustive limit {limit}")
    if instance.num_elements == 0:
        return 0
    masks = []
    for adj in instance.set_neighbors:
        m = 0
        for t in adj:
            m |= 1 << t
        masks.append(m)
    full = (1 << instance.num_elements) - 1
    for size in range(0, instance.num_sets + 1):
        for combo in itertools.combinations(range(instance.num_sets), size):
            acc = 0
            for s in combo:
                acc |= masks[s]
            if acc == full:
                return size
    raise AssertionError("validated instance must be coverable")
