import pytest

from src.dyngraph import GraphSequence, SystemParams
from src.setagree import SetAgreeMessage, sa_init, sa_outbound, sa_step
from src.sim import run


def test_init_and_outbound():
    s = sa_init(1, 5, 3)
    assert (s.v, s.y, s.terminated) == (5, None, False)
    msg = sa_outbound(s)
    assert (msg.v, msg.y) == (5, None)


def test_init_needs_two_processes():
    with pytest.raises(ValueError):
        sa_init(1, 5, 1)


def test_max_rule():
    s, event = sa_step(sa_init(1, 4, 3), [SetAgreeMessage(2, 9, None)], 1)
    assert s.v == 9 and event is None


def test_isolated_process_decides_own():
    s, event = sa_step(sa_init(1, 4, 3), [], 1)
    assert s.y == 4 and event == (4, "own")


def test_adopts_first_decision_by_sender_id():
    inbound = [SetAgreeMessage(3, 1, 8), SetAgreeMessage(2, 1, 6)]
    s, event = sa_step(sa_init(1, 4, 3), inbound, 1)
    assert s.y == 6 and event == (6, "adopted")


def test_forced_decision_in_round_n():
    s = sa_init(1, 4, 2)
    s, _ = sa_step(s, [SetAgreeMessage(2, 1, None)], 1)
    s, event = sa_step(s, [SetAgreeMessage(2, 1, None)], 2)
    assert s.terminated and s.y == 4 and event == (4, "own")


def test_step_after_termination_or_beyond_n():
    s = sa_init(1, 4, 2)
    with pytest.raises(ValueError):
        sa_step(s, [], 3)
    s, _ = sa_step(s, [], 1)
    s, _ = sa_step(s, [], 2)
    with pytest.raises(ValueError):
        sa_step(s, [], 2)


def test_star_fixture():
    seq = GraphSequence.from_edges(3, [[(1, 2), (1, 3)]] * 3)
    trace = run(seq, "setagree", [1, 2, 3], SystemParams(3))
    assert [(d.process, d.round, d.value, d.via) for d in trace.decisions] == [
        (1, 1, 1, "own"), (2, 2, 1, "adopted"), (3, 2, 1, "adopted")]
    assert len(trace.rounds) == 3
    assert trace.status == "complete"


def test_all_isolated_gives_n_values():
    seq = GraphSequence.from_edges(3, [[]] * 3)
    trace = run(seq, "setagree", [1, 2, 3], SystemParams(3))
    assert trace.values() == [1, 2, 3]
