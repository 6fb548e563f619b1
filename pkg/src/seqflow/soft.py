"""Soft Sequence propagation via minimum-cost flow.

The violation measure of an assignment is the sum over windows of
max(l - sum, sum - u, 0), bounded above by a cost variable T.  The hard
network gains, per window j, two unit-cost penalty edges feeding window
node 2j: Q_j (2j-1 -> 2j, capacity l) absorbs lower-bound shortfalls and
P_j (2j+1 -> 2j, capacity k-u) absorbs overshoots.  Surplus/slack
capacities widen to k-l and u so that every assignment keeps a flow with
its minimal penalty decomposition; a minimum-cost flow's cost then equals
the minimal violation over completions.

Consistency requires min cost <= max(T); the cost lower bound rises to the
min cost; and a free variable keeps its unused value iff the cheapest
residual cycle through its edge stays within max(T).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import (
    FIXPOINT,
    INCONSISTENT,
    BoolDomainStore,
    CostVarDomain,
    PropagationOutcome,
)
from .flow import (
    INF,
    FlowNetwork,
    all_pairs_shortest_paths,
    build_residual,
    min_cost_flow,
)
from .sequence import SequenceNetworkLayout, SequenceSpec, _sequence_edge_arrays

SoftSequenceSpec = SequenceSpec


@dataclass(frozen=True)
class SoftNetworkLayout(SequenceNetworkLayout):
    """Hard layout plus the per-window cost-1 penalty edges."""

    q_edge: np.ndarray = None
    p_edge: np.ndarray = None


def build_soft_network(spec: SequenceSpec) -> tuple[FlowNetwork, SoftNetworkLayout]:
    n, k, l, u = spec.n, spec.k, spec.l, spec.u
    m = spec.window_count
    tail, head, lower, upper, base = _sequence_edge_arrays(spec, k - l, u)
    j = np.arange(1, m + 1, dtype=np.int64)
    e0 = len(tail)
    tail = np.concatenate([tail, 2 * j - 1, 2 * j + 1])
    head = np.concatenate([head, 2 * j, 2 * j])
    lower = np.concatenate([lower, np.zeros(2 * m, dtype=np.int64)])
    upper = np.concatenate([upper, np.full(m, l), np.full(m, k - u)])
    cost = np.concatenate([np.zeros(e0, dtype=np.int64), np.ones(2 * m, dtype=np.int64)])
    f = spec.required_value
    net = FlowNetwork.from_arrays(
        2 * m + 3, tail, head, lower, upper, cost,
        supply={base.source: f, base.sink: -f},
    )
    layout = SoftNetworkLayout(
        n=base.n, k=base.k, m=base.m,
        source=base.source, sink=base.sink,
        x_edge=base.x_edge, y_edge=base.y_edge, z_edge=base.z_edge,
        x_tail=base.x_tail, x_head=base.x_head,
        window_nodes=base.window_nodes,
        q_edge=np.arange(e0, e0 + m, dtype=np.int64),
        p_edge=np.arange(e0 + m, e0 + 2 * m, dtype=np.int64),
    )
    return net, layout


def violation_cost(spec: SequenceSpec, assignment) -> int:
    """Total window violation of a full 0/1 assignment."""
    xs = np.asarray(assignment, dtype=np.int64)
    if len(xs) != spec.n:
        raise ValueError("assignment length does not match the constraint")
    sums = np.convolve(xs, np.ones(spec.k, dtype=np.int64), mode="valid")
    return int(
        (np.maximum(spec.l - sums, 0) + np.maximum(sums - spec.u, 0)).sum()
    )


class SoftSequencePropagator:
    """Propagates one soft Sequence constraint plus its cost variable.

    No state survives between calls: the residual graph can differ on every
    invocation, so each propagation recomputes the min-cost flow and one
    all-pairs shortest-path table.
    """

    def __init__(self, spec: SequenceSpec):
        self.spec = spec
        self.network, self.layout = build_soft_network(spec)

    def propagate(
        self, domains: BoolDomainStore, t: CostVarDomain
    ) -> PropagationOutcome:
        spec, layout = self.spec, self.layout
        if len(domains) != spec.n:
            raise ValueError("store length does not match the constraint")
        lower = self.network.lower.copy()
        upper = self.network.upper.copy()
        x = layout.x_edge
        lower[x] = np.where(domains.has_zero, 0, 1)
        upper[x] = np.where(domains.has_one, 1, 0)
        capped = FlowNetwork.from_arrays(
            self.network.node_count,
            self.network.tail, self.network.head,
            lower, upper, self.network.cost,
            supply=self.network.supply,
        )
        state = min_cost_flow(capped)
        if state is None or state.cost > t.hi:
            return PropagationOutcome(INCONSISTENT, domains, cost=t)
        new_t = CostVarDomain(max(t.lo, state.cost), t.hi)

        free = np.flatnonzero(domains.has_zero & domains.has_one)
        out = domains.copy()
        removed = []
        if len(free):
            dist = all_pairs_shortest_paths(build_residual(capped, state))
            xs = state.flow[x]
            for i in free:
                a, b = int(layout.x_tail[i]), int(layout.x_head[i])
                # flipping X_i rides the one residual direction of its edge
                back = dist[b][a] if xs[i] == 0 else dist[a][b]
                if back is INF or state.cost + back > t.hi:
                    keep = int(xs[i])
                    out.has_zero[i] = keep == 0
                    out.has_one[i] = keep == 1
                    removed.append((int(i), 1 - keep))
        return PropagationOutcome(FIXPOINT, out, tuple(removed), cost=new_t)


def propagate_soft(
    spec: SequenceSpec, domains: BoolDomainStore, t: CostVarDomain
) -> PropagationOutcome:
    """From-scratch propagation of one soft Sequence constraint."""
    return SoftSequencePropagator(spec).propagate(domains, t)
