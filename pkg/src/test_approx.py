import pytest

from src.approx import (ApproxMessage, NetworkEstimate, approx_init, approx_outbound, approx_step, estimate_at,
                        graph_estimate_at, in_stable_root, stable_root_at)
from src.dyngraph import GraphSequence, Interval


def simulate(seq, rounds=None):
    """Run the approximation alone on seq; returns per-round estimate dicts."""
    states = {p: approx_init(p) for p in range(1, seq.n + 1)}
    history = []
    for r in range(1, (rounds or seq.T) + 1):
        g = seq.graph(r)
        out = {p: approx_outbound(s) for p, s in states.items()}
        states = {q: approx_step(s, [out[p] for p in sorted(g.in_neighbors(q))], r) for q, s in states.items()}
        history.append(states)
    return history


def test_init_is_singleton():
    est = approx_init(3)
    assert est.nodes == {3} and est.labels == {}
    assert graph_estimate_at(est, 1, n=3).edges == frozenset()
    assert in_stable_root(est, (1, 1)) == frozenset()


def test_receiving_adds_labeled_edge():
    p1, p2 = approx_init(1), approx_init(2)
    p2 = approx_step(p2, [approx_outbound(p1)], 1)
    assert p2.rounds_of(1, 2) == [1]
    assert graph_estimate_at(p2, 1).edges == {(1, 2)}
    p2 = approx_step(p2, [approx_outbound(approx_init(1))], 2)
    assert p2.rounds_of(1, 2) == [1, 2]


def test_no_messages_only_advances_round():
    est = approx_step(approx_init(1), [], 1)
    assert est.round == 1 and est.labels == {} and est.nodes == {1}


def test_step_errors():
    est = approx_step(approx_init(1), [], 1)
    with pytest.raises(ValueError):
        approx_step(est, [], 1)
    msg = approx_outbound(approx_init(2))
    with pytest.raises(ValueError):
        approx_step(est, [msg, msg], 2)
    with pytest.raises(ValueError):
        approx_step(est, [approx_outbound(est)], 2)


def test_outbound_is_a_snapshot():
    est = approx_init(1)
    msg = approx_outbound(est)
    est.nodes.add(9)
    assert msg.estimate.nodes == {1}


def test_merge_unions_labels():
    seq = GraphSequence.from_edges(3, [[(1, 2)], [(2, 3)]])
    final = simulate(seq)[-1]
    assert final[3].rounds_of(1, 2) == [1]
    assert final[3].rounds_of(2, 3) == [2]
    assert final[3].nodes == {1, 2, 3}


def test_star_center_stays_singleton():
    seq = GraphSequence.from_edges(4, [[(1, 2), (1, 3), (1, 4)]] * 4)
    final = simulate(seq)[-1]
    for t in range(1, 5):
        assert graph_estimate_at(final[1], t).edges == frozenset()
    assert in_stable_root(final[1], Interval(1, 3)) == {1}


def test_estimate_at_contains_owner_and_edge_endpoints():
    seq = GraphSequence.from_edges(3, [[(1, 2)], [(2, 3)]])
    nodes, edges = estimate_at(simulate(seq)[-1][3], 1)
    assert nodes == {1, 2, 3} and edges == {(1, 2)}


def test_stable_root_for_future_or_nonpositive_rounds_is_empty():
    est = approx_step(approx_init(1), [], 1)
    assert stable_root_at(est, 2) == frozenset()
    assert stable_root_at(est, 0) == frozenset()
    assert in_stable_root(est, (0, 1)) == frozenset()


def test_in_stable_root_completeness_on_cycle():
    # static 3-cycle is a 2-bounded VSRC; query [a, b-D] at the end of round b
    D, b = 2, 5
    seq = GraphSequence.from_edges(3, [[(1, 2), (2, 3), (3, 1)]] * b)
    final = simulate(seq)[-1]
    for p in (1, 2, 3):
        assert in_stable_root(final[p], Interval(1, b - D)) == {1, 2, 3}


def test_in_stable_root_rejects_changing_members():
    seq = GraphSequence.from_edges(2, [[(1, 2)], [(1, 2), (2, 1)], [(1, 2), (2, 1)]])
    final = simulate(seq)[-1]
    assert in_stable_root(final[1], Interval(1, 2)) == frozenset()
    assert in_stable_root(final[1], Interval(2, 2)) == {1, 2}


def test_underapproximation_on_fixture():
    seq = GraphSequence.from_edges(4, [[(1, 2), (3, 2), (2, 4)], [(4, 1), (2, 3)], [(1, 4), (3, 4)]])
    for states in simulate(seq):
        for est in states.values():
            for (v, w), _ in est.labels.items():
                for t in est.rounds_of(v, w):
                    g = seq.graph(t)
                    assert (v, w) in g.edges
                    assert all(t in est.rounds_of(x, w) for x in g.in_neighbors(w))


def test_json_round_trip_keeps_labels():
    est = NetworkEstimate(2, 3, {1, 2}, {(1, 2): 0b1010})
    back = NetworkEstimate.from_json(est.to_json())
    assert back == est
    assert est.to_json()["edges"] == [[1, 2, [1, 3]]]


def test_message_wraps_sender():
    msg = approx_outbound(approx_init(4))
    assert isinstance(msg, ApproxMessage) and msg.sender == 4
