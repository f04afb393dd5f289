from dataclasses import replace

import pytest

from src.dyngraph import GraphSequence, SystemParams
from src.kset import KSetMessage, Lock, LockHistory, get_lock, ks_init, ks_outbound, ks_step
from src.sim import run


def hist_with(cells):
    h = LockHistory()
    for (j, r), locks in cells.items():
        h.add(j, r, locks)
    return h


def test_init_holds_virtual_lock():
    s = ks_init(2, 9, 1)
    assert s.hist.get(2, 0) == {Lock(frozenset({2}), 9, 0)}
    assert s.ell is None and s.decision is None
    msg = ks_outbound(s)
    assert msg.decision is None and msg.hist == s.hist


def test_outbound_copies_history():
    s = ks_init(1, 5, 1)
    msg = ks_outbound(s)
    s.hist.add(1, 3, {Lock(frozenset({1}), 5, 3)})
    assert msg.hist.get(1, 3) == frozenset()


def test_get_lock_prefers_strictly_latest_most_frequent():
    L = Lock(frozenset({1, 2}), 7, 5)
    L2 = Lock(frozenset({3}), 9, 3)
    h = hist_with({(1, 5): {L, L2}, (2, 4): {L, L2}})
    assert get_lock(h, {1, 2}, 5, 8) == Lock(frozenset({1, 2}), 7, 8)


def test_get_lock_falls_back_to_max_value_on_tied_rounds():
    L = Lock(frozenset({1}), 4, 5)
    L2 = Lock(frozenset({2}), 9, 5)
    h = hist_with({(1, 5): {L, L2}, (2, 5): {L, L2}})
    assert get_lock(h, {1, 2}, 5, 8).v == 9


def test_get_lock_single_process_virtual_lock():
    assert get_lock(ks_init(3, 11, 1).hist, {3}, 0, 2).v == 11


def test_get_lock_window_is_inclusive():
    late = Lock(frozenset({1}), 8, 3)
    h = hist_with({(1, 0): {Lock(frozenset({1}), 2, 0)}, (1, 3): {late}})
    assert get_lock(h, {1}, 3, 5).v == 8
    assert get_lock(h, {1}, 2, 5).v == 2


def test_get_lock_counts_processes_not_cells():
    L = Lock(frozenset({1}), 1, 2)
    L2 = Lock(frozenset({2}), 2, 1)
    # L sits in two cells of process 1, L2 is known to two processes
    h = hist_with({(1, 2): {L}, (1, 3): {L}, (1, 1): {L2}, (2, 1): {L2}})
    assert get_lock(h, {1, 2}, 3, 4).v == 2


def test_get_lock_errors():
    h = ks_init(1, 5, 1).hist
    with pytest.raises(ValueError):
        get_lock(h, set(), 0, 2)
    with pytest.raises(ValueError):
        get_lock(h, {1}, 2, 2)
    with pytest.raises(ValueError):
        get_lock(h, {4}, 0, 2)


def test_adopts_received_decision():
    s = ks_init(2, 3, 1)
    other = replace(ks_init(1, 4, 1), decision=4)
    s, event = ks_step(s, [ks_outbound(other)], 1)
    assert s.decision == 4 and event == (4, "adopted")


def test_newly_learned_locks_land_in_own_cell():
    s = ks_init(2, 3, 1)
    msg = ks_outbound(ks_init(1, 4, 1))
    s, _ = ks_step(s, [msg], 1)
    assert s.hist.get(1, 0) == {Lock(frozenset({1}), 4, 0)}
    assert s.hist.get(2, 1) == {Lock(frozenset({1}), 4, 0)}
    assert s.hist.get(2, 0) == {Lock(frozenset({2}), 3, 0)}


def test_merge_skips_own_cells():
    s = ks_init(2, 3, 1)
    forged = ks_outbound(ks_init(1, 4, 1))
    forged.hist.add(2, 0, {Lock(frozenset({2}), 99, 0)})
    s, _ = ks_step(s, [forged], 1)
    assert s.hist.get(2, 0) == {Lock(frozenset({2}), 3, 0)}


def test_two_node_fixture():
    seq = GraphSequence.from_edges(2, [[(1, 2)]] * 6)
    trace = run(seq, "kset", [7, 3], SystemParams(2, 1), keep_states=True)
    assert [(d.process, d.round, d.value, d.via) for d in trace.decisions] == [
        (1, 4, 7, "own"), (2, 5, 7, "adopted")]
    p1_round3 = trace.rounds[2].states[0]
    assert p1_round3.ell == 1
    assert p1_round3.lock == Lock(frozenset({1}), 7, 3)


def test_release_clears_lock():
    # p1 is isolated for two rounds, locks in round 3, then hears from p2 about round 3
    seq = GraphSequence.from_edges(2, [[], [], [(2, 1)], []])
    trace = run(seq, "kset", [7, 3], SystemParams(2, 1), keep_states=True, stop_when_decided=False)
    p1 = [rec.states[0] for rec in trace.rounds]
    assert p1[2].ell == 1 and p1[2].lock.v == 7
    assert p1[3].ell is None and p1[3].lock is None
    assert p1[3].decision is None
    assert trace.decision_of(2).value == 3


def test_message_json_has_no_k():
    msg = ks_outbound(ks_init(1, 5, 2))
    assert isinstance(msg, KSetMessage)
    assert "k" not in msg.to_json()
