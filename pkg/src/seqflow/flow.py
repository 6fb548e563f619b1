"""Graph and flow primitives shared by every propagator.

Networks carry per-edge capacity intervals [lower, upper], integer costs and
integer node supplies (positive = source-like).  Feasibility and min-cost
search run on a normalized instance: lower bounds and supplies are folded
into super-source/super-sink edges, negative-cost edges are presaturated
(represented reversed), so the augmenting search only ever sees plain
capacities and non-negative costs.

Distances use math.inf as the unreachable sentinel; arithmetic with it
saturates.  All tie-breaking is lowest-node-first so results are
reproducible.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from heapq import heappop, heappush

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

INF = math.inf

FORWARD = "forward"
BACKWARD = "backward"

# Worst-case path cost must stay below 2**63 / 4 (64-bit contract).
_COST_LIMIT = 2**61


@dataclass(frozen=True)
class FlowEdge:
    tail: int
    head: int
    lower: int
    upper: int
    cost: int = 0


class FlowNetwork:
    """Capacitated, costed directed graph with lower bounds and supplies.

    Edge data lives in parallel int64 arrays so constraint compilers can
    emit large networks without per-edge object churn.
    """

    __slots__ = ("node_count", "tail", "head", "lower", "upper", "cost", "supply")

    def __init__(self, node_count: int, edges=(), supply: dict[int, int] | None = None):
        rows = [
            (e.tail, e.head, e.lower, e.upper, e.cost)
            if isinstance(e, FlowEdge)
            else tuple(e)
            for e in edges
        ]
        arr = np.array(rows, dtype=np.int64).reshape(len(rows), 5)
        self._init_from_arrays(
            node_count, arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4], supply
        )

    @classmethod
    def from_arrays(cls, node_count, tail, head, lower, upper, cost, supply=None):
        net = cls.__new__(cls)
        net._init_from_arrays(
            node_count,
            np.asarray(tail, dtype=np.int64),
            np.asarray(head, dtype=np.int64),
            np.asarray(lower, dtype=np.int64),
            np.asarray(upper, dtype=np.int64),
            np.asarray(cost, dtype=np.int64),
            supply,
        )
        return net

    def _init_from_arrays(self, node_count, tail, head, lower, upper, cost, supply):
        self.node_count = int(node_count)
        self.tail, self.head = tail, head
        self.lower, self.upper = lower, upper
        self.cost = cost
        self.supply = dict(supply) if supply else {}
        if len(tail):
            lo = min(tail.min(), head.min())
            hi = max(tail.max(), head.max())
            if lo < 0 or hi >= self.node_count:
                raise ValueError("edge endpoint out of range")
            if lower.min() < 0 or np.any(lower > upper):
                raise ValueError("need 0 <= lower <= upper on every edge")
            worst = self.node_count * int(np.abs(cost).max())
            if worst > _COST_LIMIT:
                raise ValueError("worst-case path cost exceeds 64-bit budget")
        for node in self.supply:
            if not 0 <= node < self.node_count:
                raise ValueError("supply node out of range")

    @property
    def edge_count(self) -> int:
        return len(self.tail)

    def edge(self, i: int) -> FlowEdge:
        return FlowEdge(
            int(self.tail[i]),
            int(self.head[i]),
            int(self.lower[i]),
            int(self.upper[i]),
            int(self.cost[i]),
        )

    def edges(self) -> list[FlowEdge]:
        return [self.edge(i) for i in range(self.edge_count)]

    def positive_supply(self) -> int:
        return sum(s for s in self.supply.values() if s > 0)

    def __repr__(self) -> str:
        return (
            f"FlowNetwork(nodes={self.node_count}, edges={self.edge_count}, "
            f"supply={self.supply})"
        )


class FlowState:
    """A flow assignment: per-edge amounts plus its value and cost."""

    __slots__ = ("flow", "value", "cost")

    def __init__(self, flow, value: int, cost: int):
        self.flow = np.asarray(flow, dtype=np.int64)
        self.value = int(value)
        self.cost = int(cost)

    def copy(self) -> "FlowState":
        return FlowState(self.flow.copy(), self.value, self.cost)

    def __repr__(self) -> str:
        return f"FlowState(value={self.value}, cost={self.cost}, flow={self.flow.tolist()})"


@dataclass(frozen=True)
class ResidualArc:
    tail: int
    head: int
    capacity: int
    cost: int
    origin: int
    direction: str


@dataclass(frozen=True)
class ResidualGraph:
    node_count: int
    arcs: tuple[ResidualArc, ...]


@dataclass(frozen=True)
class NegativeCycle:
    """Witness cycle of negative total cost, as a closed arc sequence."""

    arcs: tuple
    cost: int


def check_feasible(network: FlowNetwork, state: FlowState) -> None:
    """Raise ValueError unless `state` is a feasible flow for `network`."""
    f = state.flow
    if len(f) != network.edge_count:
        raise ValueError("flow length does not match edge count")
    if len(f) and (np.any(f < network.lower) or np.any(f > network.upper)):
        raise ValueError("flow violates an edge capacity")
    net = np.zeros(network.node_count, dtype=np.int64)
    np.add.at(net, network.head, f)
    np.subtract.at(net, network.tail, f)
    for node, s in network.supply.items():
        net[node] += s
    if np.any(net != 0):
        raise ValueError("flow violates conservation")


def build_residual(network: FlowNetwork, state: FlowState) -> ResidualGraph:
    """Residual graph of a feasible flow; zero-capacity arcs are omitted."""
    check_feasible(network, state)
    arcs = []
    f = state.flow
    for i in range(network.edge_count):
        t, h = int(network.tail[i]), int(network.head[i])
        w = int(network.cost[i])
        if f[i] < network.upper[i]:
            arcs.append(
                ResidualArc(t, h, int(network.upper[i] - f[i]), w, i, FORWARD)
            )
        if f[i] > network.lower[i]:
            arcs.append(
                ResidualArc(h, t, int(f[i] - network.lower[i]), -w, i, BACKWARD)
            )
    return ResidualGraph(network.node_count, tuple(arcs))


# ---------------------------------------------------------------------------
# normalized augmenting-path machinery

class _ArcGraph:
    """Paired-arc adjacency structure for augmenting-path search."""

    __slots__ = ("n", "head", "cap", "cost", "adj")

    def __init__(self, n: int):
        self.n = n
        self.head: list[int] = []
        self.cap: list[int] = []
        self.cost: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]

    def add(self, u: int, v: int, cap: int, cost: int = 0) -> int:
        aid = len(self.head)
        self.head += [v, u]
        self.cap += [cap, 0]
        self.cost += [cost, -cost]
        self.adj[u].append(aid)
        self.adj[v].append(aid + 1)
        return aid


def _normalized(network: FlowNetwork):
    """Per-node imbalance after folding lower bounds into the demand side."""
    if sum(network.supply.values()) != 0:
        raise ValueError("node supplies must sum to zero")
    d = np.zeros(network.node_count, dtype=np.int64)
    if network.edge_count:
        np.add.at(d, network.head, network.lower)
        np.subtract.at(d, network.tail, network.lower)
    for node, s in network.supply.items():
        d[node] += s
    return d


def _bfs_max_flow(g: _ArcGraph, s: int, t: int) -> int:
    total = 0
    while True:
        prev = [-1] * g.n
        prev[s] = -2
        q = deque([s])
        while q and prev[t] == -1:
            u = q.popleft()
            for aid in g.adj[u]:
                v = g.head[aid]
                if g.cap[aid] > 0 and prev[v] == -1:
                    prev[v] = aid
                    q.append(v)
        if prev[t] == -1:
            return total
        push = None
        v = t
        while v != s:
            aid = prev[v]
            push = g.cap[aid] if push is None else min(push, g.cap[aid])
            v = g.head[aid ^ 1]
        v = t
        while v != s:
            aid = prev[v]
            g.cap[aid] -= push
            g.cap[aid ^ 1] += push
            v = g.head[aid ^ 1]
        total += push


def find_feasible_flow(network: FlowNetwork) -> FlowState | None:
    """Feasible flow respecting capacities, lower bounds and supplies.

    Lower bounds and supplies are folded into a super-source/super-sink
    max-flow instance; feasibility holds iff every super edge saturates.
    Returns None when no feasible flow exists.
    """
    d = _normalized(network)
    n = network.node_count
    s, t = n, n + 1
    g = _ArcGraph(n + 2)
    arc_of = [g.add(int(u), int(v), int(c), 0)
              for u, v, c in zip(network.tail, network.head,
                                 network.upper - network.lower)]
    need = 0
    for v in range(n):
        if d[v] > 0:
            g.add(s, v, int(d[v]))
            need += int(d[v])
        elif d[v] < 0:
            g.add(v, t, int(-d[v]))
    if _bfs_max_flow(g, s, t) < need:
        return None
    flow = network.lower.copy()
    for i, aid in enumerate(arc_of):
        flow[i] += int(network.upper[i] - network.lower[i]) - g.cap[aid]
    cost = int(np.dot(network.cost, flow)) if network.edge_count else 0
    return FlowState(flow, network.positive_supply(), cost)


def min_cost_flow(network: FlowNetwork) -> FlowState | None:
    """Minimum-cost feasible flow by successive shortest paths.

    Negative-cost edges are presaturated (entered reversed with the
    imbalance shifted), so reduced costs stay non-negative and every
    augmentation is a Dijkstra run under node potentials.  The result's
    residual graph contains no negative-cost cycle.
    """
    d = _normalized(network)
    n = network.node_count
    s, t = n, n + 1
    g = _ArcGraph(n + 2)
    entries = []  # (arc id, reversed?)
    for i in range(network.edge_count):
        u, v = int(network.tail[i]), int(network.head[i])
        c = int(network.upper[i] - network.lower[i])
        w = int(network.cost[i])
        if w >= 0:
            entries.append((g.add(u, v, c, w), False))
        else:
            entries.append((g.add(v, u, c, -w), True))
            d[u] -= c
            d[v] += c
    need = 0
    for v in range(n):
        if d[v] > 0:
            g.add(s, v, int(d[v]))
            need += int(d[v])
        elif d[v] < 0:
            g.add(v, t, int(-d[v]))

    pot = [0] * g.n
    pushed = 0
    while True:
        dist = [INF] * g.n
        dist[s] = 0
        prev = [-1] * g.n
        heap = [(0, s)]
        while heap:
            du, u = heappop(heap)
            if du > dist[u]:
                continue
            for aid in g.adj[u]:
                if g.cap[aid] <= 0:
                    continue
                v = g.head[aid]
                nd = du + g.cost[aid] + pot[u] - pot[v]
                if nd < dist[v]:
                    dist[v] = nd
                    prev[v] = aid
                    heappush(heap, (nd, v))
        if dist[t] is INF or dist[t] == INF:
            break
        for v in range(g.n):
            pot[v] += dist[v] if dist[v] < dist[t] else dist[t]
        push = None
        v = t
        while v != s:
            aid = prev[v]
            push = g.cap[aid] if push is None else min(push, g.cap[aid])
            v = g.head[aid ^ 1]
        v = t
        while v != s:
            aid = prev[v]
            g.cap[aid] -= push
            g.cap[aid ^ 1] += push
            v = g.head[aid ^ 1]
        pushed += push
    if pushed < need:
        return None
    flow = network.lower.copy()
    for i, (aid, rev) in enumerate(entries):
        c = int(network.upper[i] - network.lower[i])
        flow[i] += g.cap[aid] if rev else c - g.cap[aid]
    cost = int(np.dot(network.cost, flow)) if network.edge_count else 0
    return FlowState(flow, network.positive_supply(), cost)


# ---------------------------------------------------------------------------
# residual-graph algorithms

def scc_labels(node_count: int, tails, heads) -> np.ndarray:
    """Strong-component label per node, over raw arc arrays."""
    if node_count == 0:
        return np.zeros(0, dtype=np.int32)
    data = np.ones(len(tails), dtype=np.int8)
    m = csr_matrix((data, (tails, heads)), shape=(node_count, node_count))
    return connected_components(m, directed=True, connection="strong")[1]


def strongly_connected_components(residual: ResidualGraph) -> np.ndarray:
    """Map node -> component id; same id iff mutually reachable."""
    tails = np.fromiter((a.tail for a in residual.arcs), dtype=np.int64,
                        count=len(residual.arcs))
    heads = np.fromiter((a.head for a in residual.arcs), dtype=np.int64,
                        count=len(residual.arcs))
    return scc_labels(residual.node_count, tails, heads)


def _bellman_ford(node_count: int, arcs, sources):
    """Distances from `sources` (node list, distance 0 each).

    Returns (dist, pred) or a NegativeCycle reachable from the sources.
    """
    dist = [INF] * node_count
    pred = [None] * node_count
    for s in sources:
        dist[s] = 0
    relaxing_arc = None
    for round_ in range(node_count):
        changed = False
        for arc in arcs:
            dt = dist[arc.tail]
            if dt is not INF and dt + arc.cost < dist[arc.head]:
                dist[arc.head] = dt + arc.cost
                pred[arc.head] = arc
                changed = True
                relaxing_arc = arc
        if not changed:
            return dist, pred
    # still relaxing after node_count rounds: walk predecessors into the cycle
    y = relaxing_arc.head
    for _ in range(node_count):
        y = pred[y].tail
    cycle = []
    cur = y
    while True:
        a = pred[cur]
        cycle.append(a)
        cur = a.tail
        if cur == y:
            break
    cycle.reverse()
    total = sum(a.cost for a in cycle)
    return NegativeCycle(tuple(cycle), total)


def detect_negative_cycle(node_count: int, arcs) -> NegativeCycle | None:
    """Any negative-cost cycle in the arc set, or None."""
    res = _bellman_ford(node_count, arcs, range(node_count))
    return res if isinstance(res, NegativeCycle) else None


def shortest_paths_from(residual: ResidualGraph, source: int):
    """Bellman-Ford distances from `source` (INF where unreachable),
    or a NegativeCycle reachable from it."""
    res = _bellman_ford(residual.node_count, residual.arcs, [source])
    return res if isinstance(res, NegativeCycle) else res[0]


def _dijkstra(node_count: int, adj, source: int) -> list:
    dist = [INF] * node_count
    dist[source] = 0
    heap = [(0, source)]
    while heap:
        du, u = heappop(heap)
        if du > dist[u]:
            continue
        for v, w in adj[u]:
            nd = du + w
            if nd < dist[v]:
                dist[v] = nd
                heappush(heap, (nd, v))
    return dist


def all_pairs_shortest_paths(residual: ResidualGraph):
    """Johnson's algorithm: matrix of pairwise distances or a NegativeCycle.

    One Bellman-Ford pass (virtual source) yields reweighting potentials,
    then a Dijkstra run per node on non-negative reduced costs.
    """
    n = residual.node_count
    res = _bellman_ford(n, residual.arcs, range(n))
    if isinstance(res, NegativeCycle):
        return res
    h = res[0]
    adj = [[] for _ in range(n)]
    for a in residual.arcs:
        adj[a.tail].append((a.head, a.cost + h[a.tail] - h[a.head]))
    out = []
    for u in range(n):
        du = _dijkstra(n, adj, u)
        out.append(
            [d if d is INF or d == INF else d - h[u] + h[v]
             for v, d in enumerate(du)]
        )
    return out


def push_unit_on_cycle(state: FlowState, cycle) -> FlowState:
    """Push one unit around a closed residual cycle.

    The cycle must be simple, have residual capacity on every arc, and must
    not contain both residual directions of one origin edge (such pushes
    are no-ops that corrupt cost accounting).  Value is preserved; cost
    moves by the cycle's total arc cost.
    """
    cycle = list(cycle)
    new = state.copy()
    if not cycle:
        return new
    seen_dir: dict[int, str] = {}
    tails = set()
    for i, arc in enumerate(cycle):
        if arc.capacity < 1:
            raise ValueError("cycle arc has no residual capacity")
        if arc.head != cycle[(i + 1) % len(cycle)].tail:
            raise ValueError("arc sequence is not a closed cycle")
        if arc.tail in tails:
            raise ValueError("cycle is not simple")
        tails.add(arc.tail)
        if seen_dir.get(arc.origin, arc.direction) != arc.direction:
            raise ValueError("cycle uses both residual directions of one edge")
        seen_dir[arc.origin] = arc.direction
    for arc in cycle:
        new.flow[arc.origin] += 1 if arc.direction == FORWARD else -1
        new.cost += arc.cost
    return new


def min_cost_through_arc(state: FlowState, residual: ResidualGraph, arc: ResidualArc):
    """Minimal cost of a flow that pushes one extra unit through `arc`.

    Equals state cost + arc cost + shortest head-to-tail return path.  The
    opposite residual direction of the arc's origin edge is excluded from
    the return path (it would close a degenerate no-op cycle).  INF when
    no return path exists.
    """
    arcs = [
        a
        for a in residual.arcs
        if not (a.origin == arc.origin and a.direction != arc.direction)
    ]
    res = _bellman_ford(residual.node_count, arcs, [arc.head])
    if isinstance(res, NegativeCycle):
        raise ValueError("residual graph has a negative cycle; flow is not optimal")
    back = res[0][arc.tail]
    if back is INF or back == INF:
        return INF
    return state.cost + arc.cost + back
