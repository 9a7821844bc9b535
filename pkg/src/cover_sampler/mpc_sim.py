"""Desk-scale simulation of the distributed execution: phase planning (how
many schedule steps fit into one communication-bounded phase), phase-by-phase
execution measuring the quantities the distributed analysis bounds, edge
sparsification accounting, sample-based size estimation, and best-of-many
amplification.

The simulator is logical: one machine executes the bucketed solver phase by
phase and measures relevant-subgraph sizes, neighborhood-ball sizes and
residual degrees.  No networking or machine partitioning is emulated.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field

import numpy as np

from .cover import Cover, CostCounters, _SweepState, buckets_by_step, draw_buckets
from .instance import Hypergraph, SetCoverInstance
from .schedule import probabilities, schedule_for_frequency, schedule_for_max_size
from .util import derive_rng, guarded_floor


@dataclass(frozen=True)
class PlannerConfig:
    """Planner constants.  The theory fixes none of them; defaults are tuned
    so desk-scale inputs exercise compressed and uncompressed phases alike.

    tau_constant scales the residual-degree proxy tau = c * ln(n) / p(i).
    case1_exponent_scale scales the exponent of the no-compression gate
    (ln n)^(scale * eps^-2 * ln ln n); at 1.0 the gate swallows every
    desk-scale input.
    """

    tau_constant: float = 1.0
    case1_exponent_scale: float = 0.05


DEFAULT_PLANNER = PlannerConfig()


@dataclass(frozen=True)
class PlannedPhase:
    start_step: int
    length: int
    case_tag: int
    tau: float


@dataclass(frozen=True)
class PhasePlan:
    """Partition of the schedule steps k..0 into phases; a phase of length r
    costs ceil(log2 r) + 2 simulated communication rounds."""

    phases: tuple[PlannedPhase, ...]
    k: int
    predicted_mpc_rounds: int


def plan_phases(delta: int, freq: int, eps: float, n: int,
                config: PlannerConfig = DEFAULT_PLANNER) -> PhasePlan:
    """Walk steps k..0 assigning each phase a length by the residual-degree
    proxy tau: length 1 below the no-compression gate (case 1), otherwise
    ceil(sqrt(ln tau)/eps) when the frequency is small (case 2) or
    ceil(ln tau / ln freq) when it dominates (case 3).  Lengths are clamped to
    the remaining steps and to ceil(log2 n)."""
    if delta < 1 or freq < 1:
        raise ValueError("delta and freq must be >= 1")
    if n < 2:
        raise ValueError("n must be >= 2")
    sched = schedule_for_max_size(delta, eps)
    p = probabilities(sched)
    ln_n = math.log(n)
    cap = max(1, math.ceil(math.log2(n)))
    exponent = config.case1_exponent_scale * (eps ** -2) * math.log(max(ln_n, 1.0 + 1e-12))
    case1_gate = ln_n ** exponent
    # tau is non-decreasing in the step index, so the no-compression zone is
    # the prefix [0, gate_step]; compressed phases stop at its boundary
    gate_step = -1
    for i in range(sched.k + 1):
        if config.tau_constant * ln_n / p[i] <= max(case1_gate, 1.0):
            gate_step = i
        else:
            break
    phases: list[PlannedPhase] = []
    rounds = 0
    i = sched.k
    while i >= 0:
        tau = config.tau_constant * ln_n / p[i]
        if i <= gate_step:
            case, r = 1, 1
        else:
            ln_tau = math.log(tau)
            r2 = math.ceil(math.sqrt(ln_tau) / eps)
            if freq >= 2 and freq > (1.0 + eps) ** (r2 / sched.b) * ln_n ** 2:
                case, r = 3, math.ceil(ln_tau / math.log(freq))
            else:
                case, r = 2, r2
            r = min(r, i - gate_step)
        r = max(1, min(r, i + 1, cap))
        phases.append(PlannedPhase(start_step=i, length=r, case_tag=case, tau=tau))
        rounds += max(0, math.ceil(math.log2(r))) + 2
        i -= r
    return PhasePlan(phases=tuple(phases), k=sched.k, predicted_mpc_rounds=rounds)


@dataclass
class PhaseRecord:
    index: int
    case_tag: int
    start_step: int
    end_step: int
    length: int
    p_start: float
    p_end: float
    live_elements: int
    relevant_elements: int
    nonisolated_sets: int
    max_ball: int
    residual_degree_after: int
    cumulative_rounds: int


@dataclass
class MpcReport:
    phases: list[PhaseRecord] = field(default_factory=list)
    simulated_rounds: int = 0
    counters: CostCounters = field(default_factory=CostCounters)


def _max_ball_size(adj: dict, radius: int) -> int:
    """Largest number of vertices within ``radius`` hops of any vertex.
    Components no larger than the best ball so far cannot improve it."""
    best = 0
    seen: set[int] = set()
    components: list[list[int]] = []
    for start in adj:
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        components.append(comp)
    for comp in sorted(components, key=len, reverse=True):
        if len(comp) <= best:
            break
        for src in comp:
            dist = {src: 0}
            queue = deque([src])
            count = 1
            while queue:
                u = queue.popleft()
                if dist[u] == radius:
                    continue
                for w in adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        count += 1
                        queue.append(w)
            best = max(best, count)
            if best == len(comp):
                break
    return best


def simulate_mpc_f_approx(instance: SetCoverInstance, eps: float,
                          rng: np.random.Generator,
                          config: PlannerConfig = DEFAULT_PLANNER
                          ) -> tuple[Cover, MpcReport]:
    """Execute the bucketed frequency solver phase by phase along the plan,
    measuring per phase the relevant subgraph (elements whose pre-drawn step
    falls inside the phase, plus live sets touching them), the largest
    neighborhood ball of the phase radius inside it, and the largest residual
    set size after the phase.

    The bucket draws are the only randomness, so for equal seeds the cover is
    bit-identical to ``f_approx_bucketed``.
    """
    report = MpcReport()
    if instance.num_elements == 0:
        return Cover(()), report
    sched = schedule_for_max_size(instance.delta, eps)
    p = probabilities(sched)
    assignment = draw_buckets(instance, sched, rng)
    buckets = buckets_by_step(assignment)
    plan = plan_phases(instance.delta, max(instance.freq, 1), eps,
                       instance.num_sets + instance.num_elements, config)
    state = _SweepState(instance, report.counters)
    rounds = 0
    for idx, phase in enumerate(plan.phases):
        i_hi = phase.start_step
        i_lo = phase.start_step - phase.length + 1
        live_elements = int((~state.covered).sum())
        relevant = [t for i in range(i_lo, i_hi + 1) for t in buckets.get(i, ())
                    if not state.covered[t]]
        adj: dict = defaultdict(list)
        side_sets: set[int] = set()
        for t in relevant:
            node_t = ("t", t)
            adj.setdefault(node_t, [])
            for s in instance.element_neighbors[t]:
                if not state.set_chosen[s]:
                    side_sets.add(s)
                    adj[node_t].append(("s", s))
                    adj[("s", s)].append(node_t)
        max_ball = _max_ball_size(adj, phase.length) if adj else 0
        for i in range(i_hi, i_lo - 1, -1):
            group = buckets.get(i)
            if group:
                state.sweep_step(group)
        live_mask = ~state.set_chosen
        residual_after = int(state.residual[live_mask].max()) if live_mask.any() else 0
        rounds += max(0, math.ceil(math.log2(phase.length))) + 2
        report.phases.append(PhaseRecord(
            index=idx, case_tag=phase.case_tag, start_step=i_hi, end_step=i_lo,
            length=phase.length, p_start=float(p[i_hi]), p_end=float(p[i_lo]),
            live_elements=live_elements, relevant_elements=len(relevant),
            nonisolated_sets=len(side_sets), max_ball=max_ball,
            residual_degree_after=residual_after, cumulative_rounds=rounds))
    report.simulated_rounds = rounds
    return state.cover(), report


def sparsify_hypergraph(hg: Hypergraph, p: float,
                        rng: np.random.Generator) -> tuple[Hypergraph, int]:
    """Keep each edge independently with probability p; return the kept
    subgraph and the number of vertices left with at least one edge."""
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")
    keep = rng.random(len(hg.edges)) < p
    kept_edges = [e for e, k in zip(hg.edges, keep) if k]
    non_isolated = len({v for e in kept_edges for v in e})
    return Hypergraph.from_edges(hg.num_vertices, kept_edges), non_isolated


def sparsify_non_isolated_counts(hg: Hypergraph, p: float, trials: int,
                                 rng: np.random.Generator) -> np.ndarray:
    """Vectorized non-isolated vertex counts over repeated sparsifications."""
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")
    num_edges = len(hg.edges)
    if num_edges == 0:
        return np.zeros(trials, dtype=np.int64)
    incidence = np.zeros((num_edges, hg.num_vertices), dtype=bool)
    for e, edge in enumerate(hg.edges):
        for v in edge:
            incidence[e, v] = True
    keep = rng.random((trials, num_edges)) < p
    touched = keep @ incidence  # counts per vertex
    return (touched > 0).sum(axis=1).astype(np.int64)


@dataclass
class DegreeBatch:
    step: int
    set_ids: tuple[int, ...]
    estimates: tuple[float, ...]
    true_sizes: tuple[int, ...]


@dataclass
class DegreeEstimationTrace:
    level: int
    threshold: float
    q: float
    k: int
    batches: list[DegreeBatch] = field(default_factory=list)
    estimates_by_step: list[np.ndarray] = field(default_factory=list)


def simulate_degree_estimation(instance: SetCoverInstance, eps: float,
                               level: int, rng: np.random.Generator
                               ) -> DegreeEstimationTrace:
    """One size-level pass where residual set sizes are read from upfront
    element samples instead of exact counts.

    Elements are sampled into k+1 independent pools at rate
    q = min(100/eps^2 * ln(n) / (1+eps)^level, 1); a set's running size
    estimate is the minimum over executed steps of |residual(set) & pool|/q.
    Sets whose estimate still reaches (1+eps)^level are sampled at the step
    probability, committed in batches, and removed with their elements.
    """
    log_base = math.log1p(eps)
    level_cap = guarded_floor(math.log(max(instance.delta, 1)) / log_base)
    if not (0 <= level <= level_cap):
        raise ValueError(f"level must lie in [0, {level_cap}]")
    sched = schedule_for_frequency(max(instance.freq, 1), eps)
    p = probabilities(sched)
    n_total = instance.num_sets + instance.num_elements
    threshold = (1.0 + eps) ** level
    q = min(100.0 / eps ** 2 * math.log(max(n_total, 2)) / threshold, 1.0)
    trace = DegreeEstimationTrace(level=level, threshold=threshold, q=q, k=sched.k)
    if instance.num_elements == 0:
        return trace

    pools = rng.random((sched.k + 1, instance.num_elements)) < q
    edge_sets = np.fromiter((s for s, adj in enumerate(instance.set_neighbors)
                             for _ in adj), dtype=np.int64, count=instance.m)
    edge_elems = np.fromiter((t for adj in instance.set_neighbors for t in adj),
                             dtype=np.int64, count=instance.m)
    live_elem = np.ones(instance.num_elements, dtype=bool)
    live_set = np.ones(instance.num_sets, dtype=bool)
    estimates = np.full(instance.num_sets, np.inf)
    for i in range(sched.k, -1, -1):
        in_pool = pools[i] & live_elem
        counts = np.bincount(edge_sets, weights=in_pool[edge_elems].astype(float),
                             minlength=instance.num_sets)
        estimates = np.minimum(estimates, counts / q)
        trace.estimates_by_step.append(estimates.copy())
        eligible = live_set & (estimates >= threshold * (1.0 - 1e-9))
        ids = np.flatnonzero(eligible)
        if ids.size == 0:
            continue
        sampled = ids[rng.random(ids.size) < p[i]]
        if sampled.size == 0:
            continue
        true_sizes = np.bincount(edge_sets, weights=live_elem[edge_elems].astype(float),
                                 minlength=instance.num_sets)
        trace.batches.append(DegreeBatch(
            step=i, set_ids=tuple(int(s) for s in sampled),
            estimates=tuple(float(estimates[s]) for s in sampled),
            true_sizes=tuple(int(true_sizes[s]) for s in sampled)))
        for s in sampled:
            live_set[s] = False
            for t in instance.set_neighbors[int(s)]:
                live_elem[t] = False
    return trace


def amplify_to_whp(solver, target, eps: float, copies: int, seed: int = 0,
                   maximize: bool = False, validator=None):
    """Run ``copies`` independently seeded solver instances and return
    (best valid solution, its counters, its copy index).  Copy c uses the
    stream derived from (seed, c), so copies=1 reproduces a single run at
    stream (seed, 0).  ``validator(target, solution)`` may veto candidates;
    if every copy is vetoed the last one is returned so the caller can
    report the failure."""
    if copies < 1:
        raise ValueError("copies must be >= 1")
    best = None
    last = None
    for c in range(copies):
        solution, counters = solver(target, eps, derive_rng(seed, c))
        last = (solution, counters, c)
        if validator is not None and not validator(target, solution)[0]:
            continue
        key = solution.size if maximize else -solution.size
        if best is None or key > best[0]:
            best = (key, solution, counters, c)
    if best is None:
        assert last is not None
        return last
    return best[1], best[2], best[3]
