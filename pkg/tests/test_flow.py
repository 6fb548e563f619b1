import math
import random

import numpy as np
import pytest

from seqflow.flow import (
    BACKWARD,
    FORWARD,
    INF,
    FlowNetwork,
    FlowState,
    NegativeCycle,
    ResidualArc,
    ResidualGraph,
    all_pairs_shortest_paths,
    build_residual,
    check_feasible,
    detect_negative_cycle,
    find_feasible_flow,
    min_cost_flow,
    min_cost_through_arc,
    push_unit_on_cycle,
    shortest_paths_from,
    strongly_connected_components,
)
from seqflow.oracle import (
    iter_integral_flows,
    min_cost_by_flow_enumeration,
)

from helpers import (
    network_edge_tuples,
    random_network,
    reachability_partition,
    simple_path_distances,
)


def arcs_of(*triples):
    return ResidualGraph(
        max(max(t, h) for t, h, _ in triples) + 1,
        tuple(
            ResidualArc(t, h, 1, c, i, FORWARD) for i, (t, h, c) in enumerate(triples)
        ),
    )


# ---------------------------------------------------------------------------
# residual graph construction

def test_residual_zero_flow_single_edge():
    net = FlowNetwork(2, [(0, 1, 0, 1, 0)], supply={})
    res = build_residual(net, FlowState([0], 0, 0))
    assert res.arcs == (ResidualArc(0, 1, 1, 0, 0, FORWARD),)


def test_residual_saturated_edge():
    net = FlowNetwork(2, [(0, 1, 0, 1, 0)], supply={0: 1, 1: -1})
    res = build_residual(net, FlowState([1], 1, 0))
    assert res.arcs == (ResidualArc(1, 0, 1, 0, 0, BACKWARD),)


def test_residual_both_directions():
    net = FlowNetwork(2, [(0, 1, 1, 3, 2)], supply={0: 2, 1: -2})
    res = build_residual(net, FlowState([2], 2, 4))
    assert res.arcs == (
        ResidualArc(0, 1, 1, 2, 0, FORWARD),
        ResidualArc(1, 0, 1, -2, 0, BACKWARD),
    )


def test_residual_rejects_infeasible_flow():
    net = FlowNetwork(2, [(0, 1, 1, 3, 2)], supply={0: 2, 1: -2})
    with pytest.raises(ValueError):
        build_residual(net, FlowState([3], 3, 6))  # violates conservation vs supply


# ---------------------------------------------------------------------------
# feasible flow

def test_feasible_empty_network():
    state = find_feasible_flow(FlowNetwork(0, [], supply={}))
    assert state.value == 0 and len(state.flow) == 0


def test_feasible_single_edge_supply():
    net = FlowNetwork(2, [(0, 1, 0, 1, 0)], supply={0: 1, 1: -1})
    state = find_feasible_flow(net)
    assert state.flow.tolist() == [1] and state.value == 1


def test_feasible_detects_infeasible():
    net = FlowNetwork(2, [(0, 1, 0, 1, 0)], supply={0: 2, 1: -2})
    assert find_feasible_flow(net) is None


def test_feasible_unbalanced_supplies_error():
    net = FlowNetwork(2, [(0, 1, 0, 1, 0)], supply={0: 1})
    with pytest.raises(ValueError):
        find_feasible_flow(net)


def test_feasible_matches_enumeration_on_random_networks():
    rand = random.Random(1)
    for _ in range(150):
        net = random_network(rand, max_nodes=4, max_edges=6, cap=2)
        state = find_feasible_flow(net)
        any_flow = next(
            iter(iter_integral_flows(net.node_count, network_edge_tuples(net), net.supply)),
            None,
        )
        if state is None:
            assert any_flow is None
        else:
            check_feasible(net, state)
            assert any_flow is not None


# ---------------------------------------------------------------------------
# min-cost flow

def test_min_cost_forced_edge():
    net = FlowNetwork(2, [(0, 1, 1, 1, 3)], supply={0: 1, 1: -1})
    state = min_cost_flow(net)
    assert state.value == 1 and state.cost == 3


def test_min_cost_parallel_edges():
    net = FlowNetwork(2, [(0, 1, 0, 1, 5), (0, 1, 0, 1, 2)], supply={0: 1, 1: -1})
    state = min_cost_flow(net)
    assert state.cost == 2 and state.flow.tolist() == [0, 1]


def test_min_cost_matches_enumeration_on_random_networks():
    rand = random.Random(2)
    for _ in range(200):
        net = random_network(rand, max_nodes=4, max_edges=6, cap=2)
        state = min_cost_flow(net)
        best = min_cost_by_flow_enumeration(
            net.node_count, network_edge_tuples(net), net.supply
        )
        if state is None:
            assert best is None
        else:
            check_feasible(net, state)
            assert state.cost == best


def test_min_cost_residual_has_no_negative_cycle():
    rand = random.Random(3)
    for _ in range(100):
        net = random_network(rand, max_nodes=5, max_edges=8, cap=3)
        state = min_cost_flow(net)
        if state is None:
            continue
        res = build_residual(net, state)
        assert detect_negative_cycle(res.node_count, res.arcs) is None


# ---------------------------------------------------------------------------
# strongly connected components

def test_scc_two_cycle():
    g = arcs_of((0, 1, 0), (1, 0, 0))
    labels = strongly_connected_components(g)
    assert labels[0] == labels[1]


def test_scc_single_arc():
    g = arcs_of((0, 1, 0))
    labels = strongly_connected_components(g)
    assert labels[0] != labels[1]


def test_scc_matches_reachability_partition():
    rand = random.Random(4)
    for _ in range(120):
        n = rand.randint(2, 10)
        arcs = tuple(
            ResidualArc(rand.randrange(n), rand.randrange(n), 1, 0, i, FORWARD)
            for i in range(rand.randint(0, 2 * n))
        )
        g = ResidualGraph(n, arcs)
        labels = strongly_connected_components(g).tolist()
        expected = reachability_partition(n, arcs)
        pairs = itertools_pairs(n)
        for i, j in pairs:
            assert (labels[i] == labels[j]) == (expected[i] == expected[j])


def itertools_pairs(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


# ---------------------------------------------------------------------------
# shortest paths

def test_shortest_path_line():
    g = arcs_of((0, 1, 2), (1, 2, 3))
    dist = shortest_paths_from(g, 0)
    assert dist[2] == 5


def test_shortest_path_negative_two_cycle():
    g = arcs_of((0, 1, -4), (1, 0, 1))
    res = shortest_paths_from(g, 0)
    assert isinstance(res, NegativeCycle)
    assert res.cost == -3


def test_shortest_path_unreachable_is_inf():
    g = arcs_of((0, 1, 1))
    dist = shortest_paths_from(ResidualGraph(3, g.arcs), 0)
    assert dist[2] == INF and dist[2] + 5 == INF  # saturating arithmetic


def test_shortest_paths_match_simple_path_enumeration():
    rand = random.Random(5)
    checked = 0
    while checked < 120:
        n = rand.randint(2, 8)
        arcs = tuple(
            ResidualArc(rand.randrange(n), rand.randrange(n), 1, rand.randint(-3, 3), i, FORWARD)
            for i in range(rand.randint(1, 2 * n))
        )
        g = ResidualGraph(n, arcs)
        if detect_negative_cycle(n, arcs) is not None:
            continue
        src = rand.randrange(n)
        dist = shortest_paths_from(g, src)
        assert dist == simple_path_distances(n, arcs, src)
        checked += 1


def test_negative_cycle_witness_is_closed_and_negative():
    rand = random.Random(6)
    found = 0
    while found < 40:
        n = rand.randint(2, 6)
        arcs = tuple(
            ResidualArc(rand.randrange(n), rand.randrange(n), 1, rand.randint(-3, 2), i, FORWARD)
            for i in range(rand.randint(2, 2 * n))
        )
        cyc = detect_negative_cycle(n, arcs)
        if cyc is None:
            continue
        found += 1
        assert sum(a.cost for a in cyc.arcs) == cyc.cost < 0
        for a, b in zip(cyc.arcs, cyc.arcs[1:] + cyc.arcs[:1]):
            assert a.head == b.tail


# ---------------------------------------------------------------------------
# all-pairs shortest paths

def test_apsp_diagonal_zero():
    g = arcs_of((0, 1, 2), (1, 2, 1), (2, 0, 4))
    dist = all_pairs_shortest_paths(g)
    for u in range(3):
        assert dist[u][u] == 0


def test_apsp_negative_arc_no_cycle():
    g = arcs_of((0, 1, -2), (1, 2, 1))
    dist = all_pairs_shortest_paths(g)
    assert dist[0][2] == -1


def test_apsp_reports_negative_cycle():
    g = arcs_of((0, 1, -4), (1, 0, 1))
    assert isinstance(all_pairs_shortest_paths(g), NegativeCycle)


def test_apsp_matches_per_source_runs():
    rand = random.Random(7)
    checked = 0
    while checked < 60:
        n = rand.randint(2, 7)
        arcs = tuple(
            ResidualArc(rand.randrange(n), rand.randrange(n), 1, rand.randint(-2, 4), i, FORWARD)
            for i in range(rand.randint(1, 2 * n))
        )
        g = ResidualGraph(n, arcs)
        dist = all_pairs_shortest_paths(g)
        if isinstance(dist, NegativeCycle):
            continue
        checked += 1
        for u in range(n):
            assert dist[u] == shortest_paths_from(g, u)


# ---------------------------------------------------------------------------
# cycle pushes

def test_push_empty_cycle_identity():
    state = FlowState([1, 0], 1, 0)
    new = push_unit_on_cycle(state, [])
    assert new.flow.tolist() == [1, 0] and new.cost == state.cost


def test_push_rejects_two_directions_of_one_edge():
    cyc = [
        ResidualArc(0, 1, 1, 2, 0, FORWARD),
        ResidualArc(1, 0, 1, -2, 0, BACKWARD),
    ]
    with pytest.raises(ValueError):
        push_unit_on_cycle(FlowState([1], 1, 2), cyc)


def test_push_rejects_zero_capacity():
    cyc = [
        ResidualArc(0, 1, 0, 0, 0, FORWARD),
        ResidualArc(1, 0, 1, 0, 1, FORWARD),
    ]
    with pytest.raises(ValueError):
        push_unit_on_cycle(FlowState([0, 0], 0, 0), cyc)


def test_push_preserves_feasibility_and_value_on_random_networks():
    rand = random.Random(8)
    pushed = 0
    while pushed < 80:
        net = random_network(rand, max_nodes=4, max_edges=6, cap=2, cost_range=(-2, 2))
        state = find_feasible_flow(net)
        if state is None:
            continue
        res = build_residual(net, state)
        # find a simple cycle in the residual graph by DFS
        cyc = _find_simple_cycle(res)
        if cyc is None:
            continue
        new = push_unit_on_cycle(state, cyc)
        pushed += 1
        check_feasible(net, new)
        assert new.value == state.value
        assert new.cost == state.cost + sum(a.cost for a in cyc)


def _find_simple_cycle(res: ResidualGraph):
    adj = {}
    for a in res.arcs:
        adj.setdefault(a.tail, []).append(a)

    def dfs(path, seen_nodes, seen_origin_dirs):
        last = path[-1].head
        for a in adj.get(last, ()):
            if a.origin in seen_origin_dirs and seen_origin_dirs[a.origin] != a.direction:
                continue
            if a.head == path[0].tail:
                return path + [a]
            if a.head in seen_nodes:
                continue
            found = dfs(
                path + [a],
                seen_nodes | {a.head},
                {**seen_origin_dirs, a.origin: a.direction},
            )
            if found:
                return found
        return None

    for start in res.arcs:
        found = dfs([start], {start.tail, start.head}, {start.origin: start.direction})
        if found:
            return found
    return None


# ---------------------------------------------------------------------------
# min cost through an arc

def test_min_cost_through_arc_zero_cost_return():
    net = FlowNetwork(2, [(0, 1, 0, 2, 3), (1, 0, 0, 2, 0)], supply={})
    state = min_cost_flow(net)
    res = build_residual(net, state)
    arc = next(a for a in res.arcs if a.origin == 0 and a.direction == FORWARD)
    assert min_cost_through_arc(state, res, arc) == state.cost + 3


def test_min_cost_through_arc_no_return_path():
    net = FlowNetwork(2, [(0, 1, 0, 1, 2)], supply={})
    state = min_cost_flow(net)
    res = build_residual(net, state)
    arc = res.arcs[0]
    assert min_cost_through_arc(state, res, arc) == INF


def test_min_cost_through_arc_matches_flow_enumeration():
    rand = random.Random(9)
    checked = 0
    while checked < 60:
        net = random_network(
            rand, max_nodes=4, max_edges=6, cap=2, cost_range=(0, 3), with_lowers=False
        )
        state = min_cost_flow(net)
        if state is None:
            continue
        res = build_residual(net, state)
        edges = network_edge_tuples(net)
        for arc in res.arcs:
            got = min_cost_through_arc(state, res, arc)
            want = _best_cost_with_shift(net, edges, state, arc)
            assert got == want, (edges, net.supply, state.flow, arc)
        checked += 1


def _best_cost_with_shift(net, edges, state, arc):
    """Cheapest integral flow moving arc's origin edge one unit in the arc
    direction, by full enumeration."""
    target = state.flow[arc.origin] + (1 if arc.direction == FORWARD else -1)
    best = None
    for flow in iter_integral_flows(net.node_count, edges, net.supply):
        if flow[arc.origin] != target:
            continue
        c = sum(w * f for (_, _, _, _, w), f in zip(edges, flow))
        if best is None or c < best:
            best = c
    return INF if best is None else best
