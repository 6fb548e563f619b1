"""Sliding window sums over integer intervals, as a dual flow graph.

With S_j the prefix sums of the variables, every constraint is a bound on
a difference S_q - S_p: variable bounds a_i <= X_i <= b_i and window bounds
l <= X_s + ... + X_{s+k-1} <= u.  These compile to a graph on the n+1
prefix-sum nodes where an arc p -> q of cost c states S_p - S_q <= c:

* node i -> i+1 with cost -a_i and i+1 -> i with cost b_i per variable,
* node (s-1) -> (s-1+k) with cost -l and the reverse with cost u per window.

All node supplies are zero, so a flow on the graph is a circulation.  The
constraint is satisfiable iff the graph has no negative cycle, and shortest
paths tighten the bounds: a_i rises to -s(i, i+1) and b_i falls to
s(i+1, i).  On 0/1 domains every value is a bound, so bounds consistency
here is domain consistency for multi-window Boolean constraints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import (
    FIXPOINT,
    INCONSISTENT,
    BoolDomainStore,
    IntDomainStore,
    PropagationOutcome,
)
from .flow import INF, NegativeCycle, _bellman_ford, _dijkstra

VAR_LOWER = "var-lower"
VAR_UPPER = "var-upper"
WIN_LOWER = "win-lower"
WIN_UPPER = "win-upper"


@dataclass(frozen=True)
class WindowSpec:
    """One window: variables X_s .. X_{s+k-1} (s is 1-based) sum into [l, u]."""

    s: int
    k: int
    l: int
    u: int

    def __post_init__(self):
        if self.s < 1 or self.k < 1:
            raise ValueError("window needs s >= 1 and k >= 1")
        if self.l > self.u:
            raise ValueError("window needs l <= u")

    def covers(self, n: int) -> bool:
        return self.s + self.k - 1 <= n


@dataclass(frozen=True)
class DualArc:
    tail: int
    head: int
    cost: int
    kind: str
    index: int


@dataclass(frozen=True)
class DualGraph:
    node_count: int
    arcs: tuple[DualArc, ...]


def build_dual_graph(n: int, windows, domains: IntDomainStore) -> DualGraph:
    """Difference-constraint graph over the n+1 prefix-sum nodes."""
    if len(domains) != n:
        raise ValueError("domain store length does not match n")
    arcs = []
    for i in range(n):
        lo, hi = domains.bounds(i)
        arcs.append(DualArc(i, i + 1, -lo, VAR_LOWER, i))
        arcs.append(DualArc(i + 1, i, hi, VAR_UPPER, i))
    for w, win in enumerate(windows):
        if not win.covers(n):
            raise ValueError(f"window {w} does not fit n={n}")
        p, q = win.s - 1, win.s - 1 + win.k
        arcs.append(DualArc(p, q, -win.l, WIN_LOWER, w))
        arcs.append(DualArc(q, p, win.u, WIN_UPPER, w))
    return DualGraph(n + 1, tuple(arcs))


def check_satisfiable(graph: DualGraph) -> bool:
    """True iff the graph has no negative-cost cycle."""
    res = _bellman_ford(graph.node_count, graph.arcs, range(graph.node_count))
    return not isinstance(res, NegativeCycle)


def _pair_distances(n: int, arcs):
    """Shortest s(i, i+1) and s(i+1, i) for every variable, or None on a
    negative cycle.  One Bellman-Ford pass reweights, then Dijkstra per
    source node."""
    nodes = n + 1
    res = _bellman_ford(nodes, arcs, range(nodes))
    if isinstance(res, NegativeCycle):
        return None
    h = res[0]
    adj = [[] for _ in range(nodes)]
    for a in arcs:
        adj[a.tail].append((a.head, a.cost + h[a.tail] - h[a.head]))
    down = [INF] * n   # s(i, i+1)
    up = [INF] * n     # s(i+1, i)
    for src in range(nodes):
        dist = _dijkstra(nodes, adj, src)
        if src < n and dist[src + 1] is not INF and dist[src + 1] != INF:
            down[src] = dist[src + 1] - h[src] + h[src + 1]
        if src >= 1 and dist[src - 1] is not INF and dist[src - 1] != INF:
            up[src - 1] = dist[src - 1] - h[src] + h[src - 1]
    return down, up


def propagate_bc(n: int, windows, domains: IntDomainStore) -> PropagationOutcome:
    """Bounds consistency: tighten every interval to shortest-path bounds,
    iterating to a fixpoint since tightened bounds change arc costs."""
    windows = list(windows)
    lo = domains.lo.copy()
    hi = domains.hi.copy()
    changed_vars: set[int] = set()
    while True:
        graph = build_dual_graph(n, windows, IntDomainStore(lo, hi))
        dists = _pair_distances(n, graph.arcs)
        if dists is None:
            return PropagationOutcome(INCONSISTENT, domains)
        down, up = dists
        changed = False
        for i in range(n):
            new_lo = max(int(lo[i]), -down[i]) if down[i] is not INF else int(lo[i])
            new_hi = min(int(hi[i]), up[i]) if up[i] is not INF else int(hi[i])
            if new_lo > new_hi:
                return PropagationOutcome(INCONSISTENT, domains)
            if new_lo != lo[i] or new_hi != hi[i]:
                lo[i], hi[i] = new_lo, new_hi
                changed_vars.add(i)
                changed = True
        if not changed:
            break
    out = IntDomainStore(lo, hi)
    removed = tuple(
        (i, int(lo[i]), int(hi[i])) for i in sorted(changed_vars)
    )
    return PropagationOutcome(FIXPOINT, out, removed)


def gen_sequence_propagate(
    n: int, windows, domains: BoolDomainStore
) -> PropagationOutcome:
    """Multi-window constraint over 0/1 variables via the dual route.

    Channels the Boolean store to intervals, runs bounds consistency, and
    channels back; on {0,1} every value is a bound, so the result is
    domain consistent."""
    lo = np.where(domains.has_zero, 0, 1)
    hi = np.where(domains.has_one, 1, 0)
    res = propagate_bc(n, windows, IntDomainStore(lo, hi))
    if res.inconsistent:
        return PropagationOutcome(INCONSISTENT, domains)
    out = BoolDomainStore(res.domains.lo == 0, res.domains.hi == 1)
    removed = []
    for i, new_lo, new_hi in res.removed:
        if new_lo == 1 and domains.has_zero[i]:
            removed.append((i, 0))
        if new_hi == 0 and domains.has_one[i]:
            removed.append((i, 1))
    return PropagationOutcome(FIXPOINT, out, tuple(removed))
