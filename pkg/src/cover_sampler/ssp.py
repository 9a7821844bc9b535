"""Sampling process over an adversarially shrinking pool.

Steps run from k down to 0.  Before each step an adversary (which may inspect
the earlier, necessarily empty, sample results) deletes some pool items; then
every survivor enters the step's sample independently with the schedule
probability.  The process stops at the first step whose sample is nonempty;
``z`` is that step's index (-1 if no sample ever lands) and ``r_z`` the
sample size there.

`run_ssp` executes one run faithfully on item ids.  The estimators handle
large trial counts by drawing (z, r_z) from the process's stopping
distribution directly whenever the adversary's size trajectory is
deterministic, and by vectorized stepping otherwise; tests cross-validate
both against `run_ssp`.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InsufficientSamples, InsufficientTrials, InvalidConfig
from .schedule import (Schedule, compute_b, make_schedule, probabilities,
                       probability)
from .util import derive_rng, guarded_ceil, mean_ci95, proportion_ci95

MIN_TRIALS = 1000


class Adversary(ABC):
    """Shrinks the pool between sampling steps.

    ``shrink`` receives the step about to be sampled, the current pool as an
    id set, and the history of earlier (empty) samples; it must return a
    subset.  ``keep`` names an item the adversary must not delete.  Built-ins
    also expose a size-only view used by the batch estimators.
    """

    name = "adversary"
    deterministic_sizes = False

    @abstractmethod
    def shrink(self, sched: Schedule, step: int, alive: set[int],
               history: tuple, rng: np.random.Generator,
               keep: int | None = None) -> set[int]:
        raise NotImplementedError

    def size_sequence(self, sched: Schedule, initial_size: int,
                      protect: bool) -> np.ndarray | None:
        """Pool size at each step 0..k when the trajectory is deterministic."""
        return None

    def batch_update(self, sched: Schedule, step: int, sizes: np.ndarray,
                     protect: bool, rng: np.random.Generator) -> np.ndarray:
        """Vectorized size transition for one shrink, one entry per trial."""
        raise NotImplementedError

    def floor_size(self, protect: bool) -> int:
        """Absorbing minimum pool size (sizes at the floor never change)."""
        return 1 if protect else 0


class Identity(Adversary):
    """Never deletes anything."""

    name = "identity"
    deterministic_sizes = True

    def shrink(self, sched, step, alive, history, rng, keep=None):
        return set(alive)

    def size_sequence(self, sched, initial_size, protect):
        return np.full(sched.k + 1, initial_size, dtype=np.int64)


def _keep_lowest(alive: set[int], target: int, keep: int | None) -> set[int]:
    ids = sorted(alive)
    kept = ids[:target]
    if keep is not None and keep in alive and keep not in kept:
        if not kept:
            kept = [keep]
        else:
            kept[-1] = keep
    return set(kept)


class HalveEachStep(Adversary):
    """Deletes half the pool (lowest ids survive) every step."""

    name = "halve"
    deterministic_sizes = True

    def _next(self, n: int, protect: bool) -> int:
        t = n // 2
        return max(1, t) if protect else t

    def shrink(self, sched, step, alive, history, rng, keep=None):
        return _keep_lowest(alive, self._next(len(alive), keep is not None), keep)

    def size_sequence(self, sched, initial_size, protect):
        seq = np.empty(sched.k + 1, dtype=np.int64)
        seq[sched.k] = initial_size
        for i in range(sched.k - 1, -1, -1):
            seq[i] = self._next(int(seq[i + 1]), protect)
        return seq


class DeleteSampledNeighbors(Adversary):
    """Deletes each item independently with a fixed per-step rate, modelling
    items removed because unrelated structures got covered elsewhere."""

    name = "delete-sampled"

    def __init__(self, rate: float = 0.5):
        if not (0.0 <= rate <= 1.0):
            raise ValueError("rate must lie in [0, 1]")
        self.rate = rate

    def shrink(self, sched, step, alive, history, rng, keep=None):
        out = set()
        for t in sorted(alive):
            if t == keep or rng.random() >= self.rate:
                out.add(t)
        return out

    def batch_update(self, sched, step, sizes, protect, rng):
        if protect:
            return 1 + rng.binomial(np.maximum(sizes - 1, 0), 1.0 - self.rate)
        return rng.binomial(sizes, 1.0 - self.rate)


class AdaptiveKillOnNearMiss(Adversary):
    """Watches the expected sample count; whenever the step just executed was
    close to producing a sample it slashes the pool hard.  Exercises the
    adaptive side of the adversary interface (the sample history is available
    but is always empty before the stop step)."""

    name = "near-miss"
    deterministic_sizes = True

    def __init__(self, keep_fraction: float = 0.1, trigger: float | None = None):
        if not (0.0 < keep_fraction < 1.0):
            raise ValueError("keep_fraction must lie in (0, 1)")
        self.keep_fraction = keep_fraction
        self.trigger = trigger

    def _level(self, sched: Schedule) -> float:
        return self.trigger if self.trigger is not None else sched.eps * (1.0 + sched.eps)

    def _next(self, sched: Schedule, step: int, n: int, protect: bool) -> int:
        if probability(step + 1, sched) * n >= self._level(sched):
            floor = 1 if protect else 0
            return max(floor, int(n * self.keep_fraction))
        return n

    def shrink(self, sched, step, alive, history, rng, keep=None):
        target = self._next(sched, step, len(alive), keep is not None)
        if target >= len(alive):
            return set(alive)
        return _keep_lowest(alive, target, keep)

    def size_sequence(self, sched, initial_size, protect):
        seq = np.empty(sched.k + 1, dtype=np.int64)
        seq[sched.k] = initial_size
        for i in range(sched.k - 1, -1, -1):
            seq[i] = self._next(sched, i, int(seq[i + 1]), protect)
        return seq


def builtin_adversaries() -> dict[str, Adversary]:
    return {
        "identity": Identity(),
        "halve": HalveEachStep(),
        "delete-sampled": DeleteSampledNeighbors(0.5),
        "near-miss": AdaptiveKillOnNearMiss(),
    }


@dataclass(frozen=True)
class SspConfig:
    """One process setup.  ``k`` defaults to the minimum admissible length,
    which keeps the initial expected sample count at most eps."""

    initial_size: int
    eps: float
    adversary: Adversary = field(default_factory=Identity)
    k: int | None = None
    seed: int = 0
    marked: int | None = None


@dataclass(frozen=True)
class SspTrace:
    """Executed steps as (step, pool size, sample size) triples, the stop
    index z (-1 when no sample ever lands) and the final sample size."""

    steps: tuple[tuple[int, int, int], ...]
    z: int
    r_z: int
    contains_marked: bool


def minimum_steps(initial_size: int, eps: float) -> int:
    if initial_size < 1:
        raise InvalidConfig("initial_size must be >= 1")
    b = compute_b(eps)
    return b * guarded_ceil(math.log(initial_size / eps) / math.log1p(eps))


def _resolve_schedule(config: SspConfig) -> Schedule:
    kmin = minimum_steps(config.initial_size, config.eps)
    k = kmin if config.k is None else config.k
    if k < kmin:
        raise InvalidConfig(f"k={k} below the required minimum {kmin}")
    if config.marked is not None and not (0 <= config.marked < config.initial_size):
        raise InvalidConfig("marked item id outside the initial pool")
    return make_schedule(config.eps, k)


def run_ssp(config: SspConfig) -> SspTrace:
    """Execute one run on item ids, stopping at the first nonempty sample.
    Steps after the stop never influence (z, |R_z|), so they are skipped."""
    sched = _resolve_schedule(config)
    rng = derive_rng(config.seed)
    alive = set(range(config.initial_size))
    history: list[frozenset] = []
    records: list[tuple[int, int, int]] = []
    for i in range(sched.k, -1, -1):
        if i < sched.k:
            alive = config.adversary.shrink(sched, i, alive, tuple(history),
                                            rng, keep=config.marked)
            if config.marked is not None and config.marked not in alive:
                raise InvalidConfig("adversary deleted the protected item")
        n_i = len(alive)
        if n_i == 0:
            records.append((i, 0, 0))
            break
        p_i = probability(i, sched)
        cnt = int(rng.binomial(n_i, p_i))
        sampled: set[int] = set()
        if cnt:
            ids = sorted(alive)
            sampled = set(int(x) for x in rng.choice(ids, size=cnt, replace=False))
        records.append((i, n_i, len(sampled)))
        if sampled:
            contains = config.marked is not None and config.marked in sampled
            return SspTrace(tuple(records), z=i, r_z=len(sampled),
                            contains_marked=contains)
        history.append(frozenset())
    return SspTrace(tuple(records), z=-1, r_z=0, contains_marked=False)


def _conditional_binomial(n: np.ndarray, p: np.ndarray,
                          rng: np.random.Generator) -> np.ndarray:
    """Binomial(n, p) conditioned on being >= 1, drawn exactly.

    The index J of the first success, given at least one among n trials, is a
    truncated geometric with closed-form inverse CDF; the trials after J are
    unconditioned, so the total is 1 + Binomial(n - J, p).  Exact for any p,
    including the tiny success probabilities where rejection would stall.
    """
    n = np.asarray(n, dtype=np.int64)
    p = np.asarray(p, dtype=float)
    out = np.empty(n.shape, dtype=np.int64)
    ones = p >= 1.0
    out[ones] = n[ones]
    rest = ~ones
    if rest.any():
        nn = n[rest]
        pp = p[rest]
        log1mp = np.log1p(-pp)
        at_least_one = -np.expm1(nn * log1mp)
        u = rng.random(nn.shape[0])
        first = np.log1p(-u * at_least_one) / log1mp
        j = np.clip(np.ceil(first), 1, nn).astype(np.int64)
        out[rest] = 1 + rng.binomial(nn - j, pp)
    return out


def _zr_from_sizes(sizes: np.ndarray, p: np.ndarray, trials: int,
                   rng: np.random.Generator):
    """Draw (z, |R_z|, pool size at z) for a fixed size trajectory.

    P(z = i) = (1 - (1-p_i)^{n_i}) * prod_{j>i} (1-p_j)^{n_j}; given z = i the
    sample size is Binomial(n_i, p_i) conditioned on >= 1.  This is the exact
    stopping distribution of the process, not an approximation.
    """
    kk = len(sizes) - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        log_empty = np.where(sizes > 0, sizes * np.log1p(-p), 0.0)
        # survival strictly above step i
        suffix = np.concatenate([np.cumsum(log_empty[::-1])[::-1], [0.0]])
        stop_p = np.exp(suffix[1:]) * (-np.expm1(log_empty))
    outcome_p = np.concatenate([stop_p[::-1], [float(np.exp(suffix[0]))]])
    cdf = np.cumsum(outcome_p)
    u = rng.random(trials) * cdf[-1]
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), kk + 1)
    z = np.where(idx <= kk, kk - idx, -1).astype(np.int64)
    r = np.zeros(trials, dtype=np.int64)
    n_at = np.zeros(trials, dtype=np.int64)
    hit = np.flatnonzero(z >= 0)
    if hit.size:
        zi = z[hit]
        n_at[hit] = sizes[zi]
        r[hit] = _conditional_binomial(sizes[zi], p[zi], rng)
    return z, r, n_at


def _zr_stepping(adv: Adversary, sched: Schedule, initial_size: int,
                 trials: int, rng: np.random.Generator, protect: bool):
    """Vectorized per-step simulation for adversaries with random size
    trajectories.  Once every live trial reaches the adversary's absorbing
    floor the remaining steps collapse to a fixed-size tail draw."""
    p = probabilities(sched)
    floor = adv.floor_size(protect)
    z = np.full(trials, -1, dtype=np.int64)
    r = np.zeros(trials, dtype=np.int64)
    n_at = np.zeros(trials, dtype=np.int64)
    active = np.arange(trials)
    sizes = np.full(trials, initial_size, dtype=np.int64)
    for i in range(sched.k, -1, -1):
        if active.size == 0:
            break
        if i < sched.k:
            sizes = adv.batch_update(sched, i, sizes, protect, rng)
        if np.all(sizes <= floor):
            if floor > 0:
                zz, rr, nn = _zr_from_sizes(np.full(i + 1, floor, dtype=np.int64),
                                            p[:i + 1], active.size, rng)
                z[active] = zz
                r[active] = rr
                n_at[active] = nn
            break
        cnt = rng.binomial(sizes, p[i])
        hit = cnt > 0
        if hit.any():
            idx = active[hit]
            z[idx] = i
            r[idx] = cnt[hit]
            n_at[idx] = sizes[hit]
            active = active[~hit]
            sizes = sizes[~hit]
    return z, r, n_at


def _zr_via_runs(config: SspConfig, sched: Schedule, trials: int, protect: bool):
    """Fallback for custom adversaries without a size-only view."""
    marked = 0 if protect else None
    z = np.empty(trials, dtype=np.int64)
    r = np.empty(trials, dtype=np.int64)
    n_at = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        cfg = SspConfig(initial_size=config.initial_size, eps=config.eps,
                        adversary=config.adversary, k=sched.k,
                        seed=int(derive_rng(config.seed, 3, t).integers(2**63)),
                        marked=marked)
        trace = run_ssp(cfg)
        z[t] = trace.z
        r[t] = trace.r_z
        n_at[t] = trace.steps[-1][1] if trace.z >= 0 else 0
    return z, r, n_at


def _batch_zr(config: SspConfig, sched: Schedule, trials: int,
              rng: np.random.Generator, protect: bool):
    adv = config.adversary
    if adv.deterministic_sizes:
        seq = adv.size_sequence(sched, config.initial_size, protect)
        if seq is not None:
            return _zr_from_sizes(np.asarray(seq, dtype=np.int64),
                                  probabilities(sched), trials, rng)
    try:
        return _zr_stepping(adv, sched, config.initial_size, trials, rng, protect)
    except NotImplementedError:
        return _zr_via_runs(config, sched, trials, protect)


def estimate_expected_rz(config: SspConfig, trials: int) -> tuple[float, float]:
    """Monte Carlo mean of |R_z| (a run that never samples contributes 0)
    with a 95% confidence half-width."""
    if trials < MIN_TRIALS:
        raise InsufficientTrials(f"need at least {MIN_TRIALS} trials, got {trials}")
    sched = _resolve_schedule(config)
    rng = derive_rng(config.seed, 1)
    _, r, _ = _batch_zr(config, sched, trials, rng, protect=False)
    return mean_ci95(r)


def estimate_conditional_multiplicity(config: SspConfig, marked: int,
                                      trials: int) -> tuple[float, float]:
    """Rejection estimate of P(|R_z| > 1 given the marked item is in R_z).

    The adversary is run in protected mode so the marked item survives to the
    sampling; by exchangeability the marked item lies in a sample of size r
    drawn from a pool of size n with probability r/n.
    """
    if trials < MIN_TRIALS:
        raise InsufficientTrials(f"need at least {MIN_TRIALS} trials, got {trials}")
    if not (0 <= marked < config.initial_size):
        raise InvalidConfig("marked item id outside the initial pool")
    sched = _resolve_schedule(config)
    rng = derive_rng(config.seed, 2)
    z, r, n_at = _batch_zr(config, sched, trials, rng, protect=True)
    u = rng.random(trials)
    accepted = (z >= 0) & (u * n_at < r)
    total = int(accepted.sum())
    if total == 0:
        raise InsufficientSamples("no trial had the marked item sampled")
    multi = int(((r > 1) & accepted).sum())
    return proportion_ci95(multi, total)


@dataclass(frozen=True)
class StepLemmaReport:
    """Deterministic step-level inequality checks for a size trajectory."""

    ok: bool
    violations: tuple[tuple[str, int, float, float], ...]


def check_step_lemmas(sched: Schedule, sizes_desc: Sequence[int]) -> StepLemmaReport:
    """Verify, for the given non-increasing size trajectory (listed in
    simulation order, largest step first):

    (a) the first b steps have expected sample count at most eps,
    (b) the expected sample count grows at most by (1+eps) over b steps,
    (c) E[|R_i| given R_i nonempty] = p n / (1 - (1-p)^n) <= 1 + p n.
    """
    sizes = np.asarray(list(sizes_desc), dtype=np.int64)[::-1]
    k = sched.k
    if sizes.size != k + 1:
        raise ValueError(f"need {k + 1} sizes, got {sizes.size}")
    if np.any(np.diff(sizes) < 0):
        raise ValueError("sizes must be non-increasing in simulation order")
    if sizes[k] < 1:
        raise InvalidConfig("initial pool must be nonempty")
    if k < minimum_steps(int(sizes[k]), sched.eps):
        raise InvalidConfig("schedule too short for the initial pool size")
    p = probabilities(sched)
    expct = p * sizes
    tol = 1e-12
    violations: list[tuple[str, int, float, float]] = []
    for j in range(k - sched.b + 1, k + 1):
        if expct[j] > sched.eps * (1 + tol) + tol:
            violations.append(("low-initial", j, float(expct[j]), sched.eps))
    bound_factor = 1.0 + sched.eps
    for i in range(0, k - sched.b + 1):
        rhs = bound_factor * expct[i + sched.b]
        if expct[i] > rhs * (1 + tol) + tol:
            violations.append(("slow-increase", i, float(expct[i]), float(rhs)))
    for i in range(k + 1):
        n_i = int(sizes[i])
        if n_i < 1:
            continue
        nonempty = -math.expm1(n_i * math.log1p(-p[i])) if p[i] < 1.0 else 1.0
        cond_mean = expct[i] / nonempty
        rhs = 1.0 + expct[i]
        if cond_mean > rhs * (1 + tol) + tol:
            violations.append(("conditional-mean", i, float(cond_mean), float(rhs)))
    return StepLemmaReport(ok=not violations, violations=tuple(violations))
