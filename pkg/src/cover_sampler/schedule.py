"""The sampling-probability schedule and constant-time discrete sampling.

The schedule starts at a probability low enough that a structure of size
``delta`` sees at most ``eps`` expected samples, and raises the probability
by a (1+eps) factor every ``b`` steps until it reaches 1 at step 0.  Steps
are indexed k, k-1, ..., 0 (decreasing).  Natural logarithms throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidConfig, InvalidEpsilon
from .util import guarded_ceil

EPS_MAX = 0.5


def _validate_eps(eps: float) -> None:
    if not (0.0 < eps <= EPS_MAX):
        raise InvalidEpsilon(f"eps must lie in (0, {EPS_MAX}], got {eps}")


def compute_b(eps: float) -> int:
    """Number of steps the sampling probability stays on one plateau:
    ceil(ln(2 + 2*eps) / eps)."""
    _validate_eps(eps)
    return guarded_ceil(math.log(2.0 + 2.0 * eps) / eps)


@dataclass(frozen=True)
class Schedule:
    """eps, the plateau width b, and the largest step index k."""

    eps: float
    b: int
    k: int


def make_schedule(eps: float, k: int) -> Schedule:
    if k < 0:
        raise InvalidConfig(f"step count must be nonnegative, got {k}")
    return Schedule(eps=eps, b=compute_b(eps), k=int(k))


def probability(i: int, sched: Schedule) -> float:
    """Sampling probability at step i: (1+eps)^(-ceil(i/b)).  p(0) == 1."""
    if not (0 <= i <= sched.k):
        raise IndexError(f"step {i} outside [0, {sched.k}]")
    level = -((-i) // sched.b)
    return (1.0 + sched.eps) ** (-level)


def probabilities(sched: Schedule) -> np.ndarray:
    """Vector of p(i) for i = 0..k."""
    i = np.arange(sched.k + 1)
    levels = (i + sched.b - 1) // sched.b
    return (1.0 + sched.eps) ** (-levels.astype(float))


def schedule_length_outer(delta: int, eps: float) -> int:
    """k = b * ceil(log_{1+eps}(delta/eps)); guarantees p(k) * delta <= eps."""
    _validate_eps(eps)
    if delta < 1:
        raise ValueError("delta must be >= 1; empty instances short-circuit earlier")
    b = compute_b(eps)
    return b * guarded_ceil(math.log(delta / eps) / math.log1p(eps))


def schedule_length_inner(freq: int, eps: float) -> int:
    """Same arithmetic with the element frequency in place of the set size."""
    return schedule_length_outer(freq, eps)


def schedule_for_max_size(delta: int, eps: float) -> Schedule:
    return make_schedule(eps, schedule_length_outer(delta, eps))


def schedule_for_frequency(freq: int, eps: float) -> Schedule:
    return make_schedule(eps, schedule_length_inner(freq, eps))


def bucket_distribution(sched: Schedule) -> np.ndarray:
    """Probability that an item's first sampled step is i, over i = 0..k:
    p(i) * prod_{j>i} (1 - p(j)).  Sums to 1 because p(0) == 1."""
    p = probabilities(sched)
    out = np.empty(sched.k + 1, dtype=float)
    surv = 1.0
    for i in range(sched.k, -1, -1):
        out[i] = p[i] * surv
        surv *= 1.0 - p[i]
    return out


@dataclass(frozen=True, eq=False)
class AliasTable:
    """Walker alias table: O(n) build, O(1) per sample."""

    thresholds: np.ndarray
    aliases: np.ndarray

    def __len__(self) -> int:
        return len(self.thresholds)


def build_alias(weights) -> AliasTable:
    """Build an alias table for the normalized weight vector.

    Ties in the small/large partition are consumed lowest index first, which
    makes the table (and therefore seeded sampling) deterministic.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a nonempty 1-d sequence")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    total = float(w.sum())
    if total <= 0.0:
        raise ValueError("weights must not all be zero")
    n = w.size
    scaled = w * (n / total)
    thresholds = np.ones(n, dtype=float)
    aliases = np.arange(n, dtype=np.int64)
    from collections import deque

    small = deque(i for i in range(n) if scaled[i] < 1.0)
    large = deque(i for i in range(n) if scaled[i] >= 1.0)
    while small and large:
        s = small.popleft()
        g = large.popleft()
        thresholds[s] = scaled[s]
        aliases[s] = g
        scaled[g] -= 1.0 - scaled[s]
        if scaled[g] < 1.0:
            small.append(g)
        else:
            large.append(g)
    # leftovers are numerically 1
    for q in (small, large):
        while q:
            thresholds[q.popleft()] = 1.0
    return AliasTable(thresholds=thresholds, aliases=aliases)


def sample_alias(table: AliasTable, rng: np.random.Generator, size: int | None = None):
    """Draw one index (or ``size`` indices) from the table's distribution."""
    n = len(table)
    if size is None:
        slot = int(rng.integers(n))
        if rng.random() < table.thresholds[slot]:
            return slot
        return int(table.aliases[slot])
    slots = rng.integers(0, n, size=size)
    u = rng.random(size)
    return np.where(u < table.thresholds[slots], slots, table.aliases[slots]).astype(np.int64)


@lru_cache(maxsize=256)
def _alias_cached(eps: float, k: int) -> AliasTable:
    return build_alias(bucket_distribution(make_schedule(eps, k)))


def alias_for_schedule(sched: Schedule) -> AliasTable:
    """Alias table over the schedule's first-sample distribution (cached)."""
    return _alias_cached(sched.eps, sched.k)
