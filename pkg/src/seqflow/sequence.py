"""Compile a uniform-window Sequence constraint into a flow network and
enforce domain consistency on it.

The constraint "every window of k consecutive 0/1 variables sums to a value
in [l, u]" compiles to a network with 5n-4k+5 edges and 2n-2k+5 nodes
(m = n-k+1 windows):

* internal nodes 1..2m+1: even node 2j carries window j, odd nodes carry
  the transition between adjacent windows,
* variable edge X_i from node 2*max(i-k,0)+1 to 2*min(i,m)+1, capacity 0..1,
* per window a surplus edge Y_j (2j -> 2j-1) and a slack edge Z_j
  (2j -> 2j+1), capacity 0..u-l each,
* rigid supply edges: source->1 carries l, source->2j carries u-l,
  (2j+1)->sink carries u-l, (2m+1)->sink carries u.

Feasible flows of value (n-k)(u-l)+u correspond one-to-one to solutions;
X_i = 1 exactly when its edge carries a unit.  Pruning reads strong
components of the residual graph: a free variable keeps its unused value
iff both endpoints of its edge share a component.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .domains import FIXPOINT, INCONSISTENT, BoolDomainStore, PropagationOutcome
from .flow import FlowNetwork, FlowState, scc_labels


@dataclass(frozen=True)
class SequenceSpec:
    n: int
    k: int
    l: int
    u: int

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ValueError("need 1 <= k <= n")
        if not 0 <= self.l <= self.u <= self.k:
            raise ValueError("need 0 <= l <= u <= k")

    @property
    def window_count(self) -> int:
        return self.n - self.k + 1

    @property
    def required_value(self) -> int:
        return (self.n - self.k) * (self.u - self.l) + self.u


@dataclass(frozen=True)
class SequenceNetworkLayout:
    """Bidirectional map between constraint symbols and edge/node ids."""

    n: int
    k: int
    m: int
    source: int
    sink: int
    x_edge: np.ndarray
    y_edge: np.ndarray
    z_edge: np.ndarray
    x_tail: np.ndarray
    x_head: np.ndarray
    window_nodes: np.ndarray


def _sequence_edge_arrays(spec: SequenceSpec, y_cap: int, z_cap: int):
    """Edge arrays of the compiled network; y/z capacities are parameters
    because the soft variant needs looser ones."""
    n, k, l, u = spec.n, spec.k, spec.l, spec.u
    m = spec.window_count
    i = np.arange(1, n + 1, dtype=np.int64)
    x_tail = 2 * np.maximum(i - k, 0) + 1
    x_head = 2 * np.minimum(i, m) + 1
    j = np.arange(1, m + 1, dtype=np.int64)
    source, sink = 0, 2 * m + 2

    tail = np.concatenate([
        x_tail,
        2 * j,                      # Y_j: 2j -> 2j-1
        2 * j,                      # Z_j: 2j -> 2j+1
        [source],                   # source -> 1, carries l
        np.full(m, source),         # source -> 2j, carries u-l
        2 * j[:-1] + 1,             # (2j+1) -> sink for j < m, carries u-l
        [2 * m + 1],                # (2m+1) -> sink, carries u
    ])
    head = np.concatenate([
        x_head,
        2 * j - 1,
        2 * j + 1,
        [1],
        2 * j,
        np.full(m - 1, sink),
        [sink],
    ])
    rigid = np.concatenate([[l], np.full(m, u - l), np.full(m - 1, u - l), [u]])
    lower = np.concatenate([np.zeros(n + 2 * m, dtype=np.int64), rigid])
    upper = np.concatenate([
        np.ones(n, dtype=np.int64),
        np.full(m, y_cap),
        np.full(m, z_cap),
        rigid,
    ])
    layout = SequenceNetworkLayout(
        n=n,
        k=k,
        m=m,
        source=source,
        sink=sink,
        x_edge=np.arange(n, dtype=np.int64),
        y_edge=np.arange(n, n + m, dtype=np.int64),
        z_edge=np.arange(n + m, n + 2 * m, dtype=np.int64),
        x_tail=x_tail,
        x_head=x_head,
        window_nodes=2 * j,
    )
    return tail, head, lower, upper, layout


def build_sequence_network(spec: SequenceSpec) -> tuple[FlowNetwork, SequenceNetworkLayout]:
    delta = spec.u - spec.l
    tail, head, lower, upper, layout = _sequence_edge_arrays(spec, delta, delta)
    f = spec.required_value
    net = FlowNetwork.from_arrays(
        2 * spec.window_count + 3,
        tail, head, lower, upper,
        np.zeros(len(tail), dtype=np.int64),
        supply={layout.source: f, layout.sink: -f},
    )
    return net, layout


def decode_flow(state: FlowState, layout: SequenceNetworkLayout) -> np.ndarray:
    """Variable assignment encoded by a feasible flow."""
    return state.flow[layout.x_edge].copy()


def flow_for_assignment(
    spec: SequenceSpec, network: FlowNetwork, layout: SequenceNetworkLayout, assignment
) -> FlowState:
    """Encode a satisfying assignment as the unique flow carrying it."""
    xs = np.asarray(assignment, dtype=np.int64)
    sums = np.convolve(xs, np.ones(spec.k, dtype=np.int64), mode="valid")
    if np.any(sums < spec.l) or np.any(sums > spec.u):
        raise ValueError("assignment violates a window bound")
    flow = network.lower.copy()
    flow[layout.x_edge] = xs
    flow[layout.y_edge] = sums - spec.l
    flow[layout.z_edge] = spec.u - sums
    return FlowState(flow, spec.required_value, 0)


class SequencePropagator:
    """Domain-consistency propagator with incremental flow repair.

    A feasible flow is cached between calls.  Loosening domains keeps it
    feasible, and each newly conflicting fixed variable is repaired by one
    unit push around a residual cycle through its edge, so propagation
    after a single fix costs one cycle search plus one SCC pass.
    """

    def __init__(self, spec: SequenceSpec):
        self.spec = spec
        self.network, self.layout = build_sequence_network(spec)
        self._lo = self.network.lower.copy()
        self._up = self.network.upper.copy()
        self._flow: np.ndarray | None = None
        # static incidence lists for cycle search
        self._out_fwd: list[list[int]] = [[] for _ in range(self.network.node_count)]
        self._out_bwd: list[list[int]] = [[] for _ in range(self.network.node_count)]
        for e in range(self.network.edge_count):
            self._out_fwd[int(self.network.tail[e])].append(e)
            self._out_bwd[int(self.network.head[e])].append(e)

    def reset(self) -> None:
        self._flow = None

    # -- flow maintenance ---------------------------------------------------

    def _pattern_flow(self) -> np.ndarray:
        """Closed-form feasible flow: the k-periodic assignment with exactly
        l ones per window."""
        spec = self.spec
        xs = (np.arange(spec.n) % spec.k < spec.l).astype(np.int64)
        state = flow_for_assignment(spec, self.network, self.layout, xs)
        return state.flow

    def _find_cycle(self, flow, lo, up, edge: int, target: int):
        """Shortest residual cycle flipping `edge` to `target`; returns the
        path arcs (edge, forward?) or None.  `lo`/`up` already carry the
        relaxations for still-conflicting variables."""
        net = self.network
        if target == 1:
            start, goal = int(net.head[edge]), int(net.tail[edge])
        else:
            start, goal = int(net.tail[edge]), int(net.head[edge])
        parent: dict[int, tuple[int, bool]] = {start: (-1, True)}
        q = deque([start])
        while q:
            v = q.popleft()
            if v == goal:
                break
            for e in self._out_fwd[v]:
                w = int(net.head[e])
                if e != edge and flow[e] < up[e] and w not in parent:
                    parent[w] = (e, True)
                    q.append(w)
            for e in self._out_bwd[v]:
                w = int(net.tail[e])
                if e != edge and flow[e] > lo[e] and w not in parent:
                    parent[w] = (e, False)
                    q.append(w)
        if goal not in parent:
            return None
        path = []
        v = goal
        while v != start:
            e, fwd = parent[v]
            path.append((e, fwd))
            v = int(net.tail[e]) if fwd else int(net.head[e])
        return path

    def _repair(self, flow, lo, up) -> bool:
        """Push repair cycles until the cached flow fits the x capacities.
        Mutates `flow`; False means no feasible flow exists."""
        x = self.layout.x_edge
        while True:
            xs = flow[x]
            bad = np.flatnonzero((xs < lo[x]) | (xs > up[x]))
            if not len(bad):
                return True
            relaxed_lo, relaxed_up = lo.copy(), up.copy()
            relaxed_lo[x[bad]] = 0
            relaxed_up[x[bad]] = 1
            edge = int(x[bad[0]])
            target = int(lo[edge])  # fixed variable: lo == up == target
            path = self._find_cycle(flow, relaxed_lo, relaxed_up, edge, target)
            if path is None:
                return False
            flow[edge] += 1 if target == 1 else -1
            for e, fwd in path:
                flow[e] += 1 if fwd else -1

    # -- propagation ---------------------------------------------------------

    def propagate(self, domains: BoolDomainStore) -> PropagationOutcome:
        spec, layout = self.spec, self.layout
        if len(domains) != spec.n:
            raise ValueError("store length does not match the constraint")
        lo, up = self._lo, self._up
        x = layout.x_edge
        lo[x] = np.where(domains.has_zero, 0, 1)
        up[x] = np.where(domains.has_one, 1, 0)

        flow = self._flow if self._flow is not None else self._pattern_flow()
        ok = self._repair(flow, lo, up)
        self._flow = flow  # repaired pushes stay valid as a base flow
        if not ok:
            return PropagationOutcome(INCONSISTENT, domains)

        fwd = flow < up
        bwd = flow > lo
        tails = np.concatenate([self.network.tail[fwd], self.network.head[bwd]])
        heads = np.concatenate([self.network.head[fwd], self.network.tail[bwd]])
        labels = scc_labels(self.network.node_count, tails, heads)

        free = domains.has_zero & domains.has_one
        supported = labels[layout.x_tail] == labels[layout.x_head]
        pruned = np.flatnonzero(free & ~supported)
        if not len(pruned):
            return PropagationOutcome(FIXPOINT, domains.copy())
        out = domains.copy()
        xs = flow[x]
        removed = []
        for i in pruned:
            keep = int(xs[i])
            out.has_zero[i] = keep == 0
            out.has_one[i] = keep == 1
            removed.append((int(i), 1 - keep))
        return PropagationOutcome(FIXPOINT, out, tuple(removed))

    def incremental_fix(
        self, domains: BoolDomainStore, var: int, value: int
    ) -> PropagationOutcome:
        """Fix one variable on top of an already-propagated store and re-prune.

        Requires the flow cached by an earlier propagate() call; when that
        flow already assigns var=value only the SCC pass reruns, otherwise
        one repair cycle through the variable's edge is pushed first.  The
        result equals from-scratch propagation on the updated store.
        """
        if self._flow is None:
            raise ValueError("incremental_fix needs a previous propagation")
        store = domains.copy()
        store.fix(var, value)
        return self.propagate(store)


def propagate_dc(spec: SequenceSpec, domains: BoolDomainStore) -> PropagationOutcome:
    """From-scratch domain consistency for one Sequence constraint."""
    return SequencePropagator(spec).propagate(domains)
