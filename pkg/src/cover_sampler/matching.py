"""Hypergraph matching via the rising sampling schedule.

Each edge draws its sampling step upfront from the schedule's first-sample
distribution (an edge is sampled at most once, so the upfront draw preserves
the step-by-step law exactly).  Sweeping steps from the top, still-intact
edges sampled at a step are collected and their endpoints removed; edges
adjacent to another collected edge are dropped at the end.  Conflicts between
collected edges can only arise within a single step, which is asserted.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np

from .cover import CostCounters
from .instance import Hypergraph
from .schedule import alias_for_schedule, sample_alias, schedule_for_max_size


@dataclass(frozen=True)
class Matching:
    """Pairwise vertex-disjoint edge ids, sorted."""

    edge_ids: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.edge_ids)


def hypergraph_matching(hg: Hypergraph, eps: float,
                        rng: np.random.Generator) -> tuple[Matching, CostCounters]:
    counters = CostCounters()
    num_edges = len(hg.edges)
    if num_edges == 0:
        return Matching(()), counters
    max_degree = hg.max_vertex_degree()
    sched = schedule_for_max_size(max_degree, eps)
    table = alias_for_schedule(sched)
    draws = np.asarray(sample_alias(table, rng, size=num_edges))

    step_groups: dict[int, list[int]] = defaultdict(list)
    for e, x in enumerate(draws):
        step_groups[int(x)].append(e)

    vertex_dead = np.zeros(hg.num_vertices, dtype=bool)
    collected: list[tuple[int, int]] = []  # (edge id, step)
    for i in sorted(step_groups, reverse=True):
        counters.steps_executed += 1
        batch = []
        for e in step_groups[i]:
            counters.edge_touches += len(hg.edges[e])
            if not any(vertex_dead[v] for v in hg.edges[e]):
                batch.append(e)
        for e in batch:
            collected.append((e, i))
            for v in hg.edges[e]:
                counters.element_touches += 1
                vertex_dead[v] = True

    vertex_use = Counter(v for e, _ in collected for v in hg.edges[e])
    kept = []
    step_of = dict(collected)
    for e, _ in collected:
        if all(vertex_use[v] == 1 for v in hg.edges[e]):
            kept.append(e)
    # collected edges sharing a vertex must come from the same step: endpoints
    # of earlier collected edges are gone before later steps sample
    for v, uses in vertex_use.items():
        if uses > 1:
            steps = {step_of[e] for e, _ in collected if v in hg.edges[e]}
            assert len(steps) == 1, "cross-step conflict in collected edges"
    return Matching(tuple(sorted(kept))), counters


def verify_matching(hg: Hypergraph, matching: Matching) -> tuple[bool, int | None]:
    """True when no vertex appears in two chosen edges; otherwise False plus
    the lowest conflicting vertex id."""
    use = Counter()
    for e in matching.edge_ids:
        if not (0 <= e < len(hg.edges)):
            raise ValueError(f"edge id {e} out of range")
        for v in hg.edges[e]:
            use[v] += 1
    conflicts = sorted(v for v, n in use.items() if n > 1)
    if conflicts:
        return False, conflicts[0]
    return True, None
