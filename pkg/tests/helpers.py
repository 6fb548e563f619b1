"""Shared random generators and tiny reference oracles for the test suite."""

from __future__ import annotations

import itertools
import random

from seqflow.flow import FlowNetwork


def random_network(
    rand: random.Random,
    max_nodes: int = 5,
    max_edges: int = 8,
    cap: int = 3,
    cost_range: tuple[int, int] = (-3, 3),
    with_lowers: bool = True,
    with_supplies: bool = True,
) -> FlowNetwork:
    n = rand.randint(2, max_nodes)
    m = rand.randint(1, max_edges)
    edges = []
    for _ in range(m):
        t = rand.randrange(n)
        h = rand.randrange(n)
        while h == t:
            h = rand.randrange(n)
        lo = rand.randint(0, cap) if with_lowers else 0
        up = rand.randint(lo, cap)
        edges.append((t, h, lo, up, rand.randint(*cost_range)))
    supply = {}
    if with_supplies:
        vals = [rand.randint(-2, 2) for _ in range(n)]
        vals[0] -= sum(vals)
        supply = {i: v for i, v in enumerate(vals) if v}
    return FlowNetwork(n, edges, supply)


def network_edge_tuples(net: FlowNetwork) -> list[tuple[int, int, int, int, int]]:
    return [
        (int(t), int(h), int(lo), int(up), int(w))
        for t, h, lo, up, w in zip(net.tail, net.head, net.lower, net.upper, net.cost)
    ]


def reachability_partition(node_count: int, arcs) -> list[int]:
    """Strong components by brute-force transitive closure."""
    reach = [[i == j for j in range(node_count)] for i in range(node_count)]
    for a in arcs:
        reach[a.tail][a.head] = True
    for k in range(node_count):
        for i in range(node_count):
            if reach[i][k]:
                for j in range(node_count):
                    if reach[k][j]:
                        reach[i][j] = True
    comp = [-1] * node_count
    next_id = 0
    for i in range(node_count):
        if comp[i] < 0:
            comp[i] = next_id
            for j in range(i + 1, node_count):
                if reach[i][j] and reach[j][i]:
                    comp[j] = next_id
            next_id += 1
    return comp


def simple_path_distances(node_count: int, arcs, source: int) -> list:
    """Minimum path cost by enumerating all simple paths (small graphs)."""
    from math import inf

    adj = [[] for _ in range(node_count)]
    for a in arcs:
        adj[a.tail].append((a.head, a.cost))
    best = [inf] * node_count
    best[source] = 0

    def walk(v, cost, seen):
        for w, c in adj[v]:
            if w in seen:
                continue
            if cost + c < best[w]:
                best[w] = cost + c
            walk(w, cost + c, seen | {w})

    walk(source, 0, {source})
    return best


def random_bool_store(rand: random.Random, n: int):
    from seqflow.domains import BoolDomainStore

    store = BoolDomainStore.free(n)
    for i in range(n):
        pick = rand.randrange(3)
        if pick == 0:
            store.fix(i, 0)
        elif pick == 1:
            store.fix(i, 1)
    return store


def ad_fixpoint(n, k, l, u, store):
    """Among-decomposition fixpoint, or None when inconsistent."""
    from seqflow.among import among_propagate, sequence_among_windows

    cur = store.copy()
    windows = sequence_among_windows(n, k, l, u)
    while True:
        changed = False
        for w in windows:
            out = among_propagate(w, cur)
            if out.inconsistent:
                return None
            if out.removed:
                changed = True
            cur = out.domains
        if not changed:
            return cur


def all_windows(rand: random.Random, n: int, max_windows: int, lo: int, hi: int):
    """Random window tuples (s, k, l, u) fitting n variables."""
    from seqflow.slidingsum import WindowSpec

    wins = []
    for _ in range(rand.randint(1, max_windows)):
        k = rand.randint(1, n)
        s = rand.randint(1, n - k + 1)
        a = rand.randint(lo * k, hi * k)
        b = rand.randint(a, hi * k)
        wins.append(WindowSpec(s=s, k=k, l=a, u=b))
    return wins
