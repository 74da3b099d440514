"""Grouping solvers built on graph matching.

``optimal_mu2_su`` is exact when groups are capped at two users: pairing
decisions reduce to maximum-weight matching on a general graph whose
edge weights are the gain of pairing over serving both users alone.

``gma`` extends this to larger caps: after the optimal pairing pass, each
round sorts the working groups by weighted throughput, breaks the weakest
ones into singletons, matches groups against singletons with the
assignment solver, and accepts a merge only when it strictly beats
keeping the parts separate.  One round is needed for a cap of three,
two for four, and so on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grouping import (
    Group,
    GroupingSolution,
    canonical_group,
    canonical_partition,
    objective,
)
from .matching import WeightedGraph, hungarian, max_weight_matching

__all__ = ["GmaPassState", "optimal_mu2_su", "gma", "merge_gain"]


def merge_gain(group, user: int, oracle) -> float:
    """Objective change from growing ``group`` by ``user``:
    (|g|+1) R(g+u) - |g| R(g) - R({u}).  Accepted only when > 0."""
    g = canonical_group(group)
    if user in g:
        raise ValueError(f"user {user} is already in group {g}")
    merged = canonical_group(g + (user,))
    return (
        len(merged) * oracle.rate(merged)
        - len(g) * oracle.rate(g)
        - oracle.rate((user,))
    )


def optimal_mu2_su(oracle, num_users: int) -> GroupingSolution:
    """Exact optimum when only singletons and pairs are allowed.

    Pairing user i with j changes the objective by
    w(i, j) = 2 R({i,j}) - R({i}) - R({j}); a maximum-weight matching
    over the positive-gain edges therefore yields the optimal partition,
    with unmatched users served alone.
    """
    if num_users < 1:
        raise ValueError("num_users must be >= 1")
    singles = [oracle.rate((u,)) for u in range(num_users)]
    edges = []
    for i in range(num_users):
        for j in range(i + 1, num_users):
            gain = 2.0 * oracle.rate((i, j)) - singles[i] - singles[j]
            if gain > 0.0:
                edges.append((i, j, gain))
    matching = max_weight_matching(WeightedGraph(num_users, tuple(edges)))
    paired = {u for pair in matching.pairs for u in pair}
    groups = [pair for pair in matching.pairs]
    groups.extend((u,) for u in range(num_users) if u not in paired)
    parts = canonical_partition(groups)
    return GroupingSolution(parts, num_users, objective(parts, oracle))


@dataclass
class GmaPassState:
    """Working sets of one merge round (kept mainly for introspection)."""

    current_groups: list[Group] = field(default_factory=list)
    s1: list[Group] = field(default_factory=list)
    s2: list[Group] = field(default_factory=list)
    committed: list[Group] = field(default_factory=list)
    pass_target_size: int = 2


def _group_metric(g: Group, oracle) -> float:
    return len(g) * oracle.rate(g)


def _split_and_balance(groups: list[Group], oracle, target: int,
                       max_group_size: int) -> GmaPassState:
    """Sort, decompose the weakest groups, and balance |S1| with |S2|."""
    state = GmaPassState(current_groups=list(groups), pass_target_size=target)
    state.committed = [g for g in groups if len(g) >= max_group_size]
    s1 = [g for g in groups if len(g) < max_group_size]
    # strongest first; ties broken by smallest member for reproducibility
    s1.sort(key=lambda g: (-_group_metric(g, oracle), g))
    s2: list[Group] = []
    while len(s1) > len(s2):
        weakest = s1.pop()
        s2.extend((u,) for u in weakest)
    s2.sort(key=lambda g: (-oracle.rate(g), g))
    while len(s1) != len(s2):
        # move the weakest singleton back; commit it outright if that
        # overshoots the balance
        u = s2.pop()
        s1.append(u)
        if len(s1) > len(s2):
            state.committed.append(u)
            s1.pop()
    state.s1 = s1
    state.s2 = s2
    return state


def _merge_pass(groups: list[Group], oracle, target: int,
                max_group_size: int) -> list[Group]:
    state = _split_and_balance(groups, oracle, target, max_group_size)
    s1, s2 = state.s1, state.s2
    if not s2:
        return state.committed + s1

    n_rows, n_cols = len(s1), len(s2)
    benefit = np.zeros((max(n_rows, n_cols), n_cols))
    finite_total = 1.0
    for i, g in enumerate(s1):
        for j, (u,) in enumerate(s2):
            merged_size = len(g) + 1
            rate = oracle.rate(g + (u,)) if merged_size <= max_group_size else 0.0
            value = merged_size * rate
            benefit[i, j] = value
            finite_total += abs(value)
    # zero-rate merges (rank-deficient groups) and over-cap merges get a
    # sentinel so the assignment never prefers them; dummy rows mean the
    # matched singleton simply stays single
    sentinel = -finite_total
    for i in range(n_rows):
        for j in range(n_cols):
            if benefit[i, j] <= 0.0:
                benefit[i, j] = sentinel

    assign, _ = hungarian(benefit)
    result = list(state.committed)
    for i, j in enumerate(assign):
        u = s2[j]
        if i >= n_rows:  # dummy row
            result.append(u)
            continue
        g = s1[i]
        if benefit[i, j] <= sentinel or merge_gain(g, u[0], oracle) <= 0.0:
            result.append(g)
            result.append(u)
        else:
            result.append(canonical_group(g + u))
    return result


def gma(oracle, num_users: int, max_group_size: int) -> GroupingSolution:
    """Graph-matching grouping heuristic for group sizes up to
    ``max_group_size``; equals ``optimal_mu2_su`` exactly when the cap
    is two."""
    if max_group_size < 2:
        raise ValueError("max_group_size must be >= 2")
    solution = optimal_mu2_su(oracle, num_users)
    groups = list(solution.groups)
    for target in range(3, max_group_size + 1):
        groups = _merge_pass(groups, oracle, target, max_group_size)
    parts = canonical_partition(groups)
    return GroupingSolution(parts, num_users, objective(parts, oracle))
