import pytest

from src.adversary import validate_good, validate_stable
from src.data_loader import canonical_dumps, sequence_to_json
from src.dyngraph import Interval, SystemParams, Vsrc
from src.scenarios import (SCENARIOS, lossy_link, lost_decide, phase_decider, phase_groups, ring_ids, ring_split,
                           scenario, singleton_partitions, static_star)
from src.sim import run


def test_static_star():
    seq = scenario("static_star", n=5, T=10)
    assert seq.T == 10
    assert all(g.edges == {(1, q) for q in range(2, 6)} for g in seq.rounds)
    assert all(roots == (frozenset({1}),) for roots in seq.root_sets)
    assert seq.metadata["scenario"] == "static_star"


def test_static_star_center_out_of_range():
    with pytest.raises(ValueError):
        static_star(3, 2, center=4)


def test_line_reversal():
    seq = scenario("line_reversal", n=4, kappa=3)
    assert seq.T == 7
    for r in range(1, 4):
        assert seq.graph(r).edges == {(1, 2), (2, 3), (3, 4)}
    for r in range(4, 8):
        assert seq.graph(r).edges == {(4, 3), (3, 2), (2, 1)}
    assert seq.vsrcs[0] == Vsrc(frozenset({1}), Interval(1, 3))


def test_ring_split_roles_and_phases():
    T = 2
    ids = ring_ids(T)
    assert (ids["p"], ids["t"], ids["q"], ids["s"], ids["r"]) == (1, 3, 4, 6, 7)
    seq = ring_split(T)
    assert seq.n == 7 and seq.T == 7
    assert seq.root_sets[0] == (frozenset(range(1, 8)),)
    for roots in seq.root_sets[T:]:
        assert roots == (frozenset({7}),)


@pytest.mark.parametrize("variant, root", [("cut_p", 1), ("cut_q", 4)])
def test_ring_split_cut_variants(variant, root):
    seq = ring_split(2, variant=variant)
    assert seq.root_sets[0] == (frozenset({root}),)
    assert seq.root_sets[-1] == (frozenset({7}),)


def test_ring_split_errors():
    with pytest.raises(ValueError):
        ring_split(0)
    with pytest.raises(ValueError):
        ring_split(2, variant="twist")


def test_lossy_link():
    seq = lossy_link(6)
    assert seq.n == 2 and seq.T == 12
    for r in range(1, 6):
        assert seq.graph(r).edges & {(1, 2), (2, 1)}
    for r in range(6, 13):
        assert not seq.graph(r).edges
    assert seq.graph(1).edges == {(1, 2), (2, 1)}
    assert seq.graph(2).edges == {(1, 2)}
    assert seq.graph(3).edges == {(2, 1)}


def test_lossy_link_rejects_bad_pattern():
    with pytest.raises(ValueError):
        lossy_link(3, pattern="bx")


def test_singleton_partitions():
    n, k, r_ST = 6, 2, 3
    seq = singleton_partitions(n, k, r_ST)
    ell = n - k - 1
    for r, roots in enumerate(seq.root_sets, start=1):
        assert frozenset({1}) in roots
        assert len(roots) == k
        if r_ST <= r < r_ST + ell:
            assert frozenset({k}) in roots
    assert validate_stable(seq, k, ell, 1, n - 1, r_ST).feasible


def test_singleton_partitions_errors():
    with pytest.raises(ValueError):
        singleton_partitions(3, 2, 1)
    with pytest.raises(ValueError):
        singleton_partitions(5, 2, 1, ell=0)


def test_phase_groups():
    pairs, odd, solo, rest = phase_groups(7, 3)
    assert pairs == [(1, 2)] and odd == [3] and solo == 4 and rest == [5, 6, 7]


@pytest.mark.parametrize("n, k", [(5, 2), (6, 3), (7, 4), (9, 5)])
def test_phase_decider_respects_root_limit(n, k):
    seq = phase_decider(n, k, phase_len=3)
    limit = seq.metadata["root_limit"]
    assert all(len(roots) <= limit for roots in seq.root_sets)
    assert seq.root_sets[-1] == (frozenset({1}),)


def test_phase_decider_errors():
    with pytest.raises(ValueError):
        phase_decider(4, 1, 2)
    with pytest.raises(ValueError):
        phase_decider(4, 2, 0)


def test_star_is_good_and_consensus_decides_center_value():
    seq = static_star(4, 12, center=2)
    assert validate_good(seq, 4, 1, 1).feasible
    trace = run(seq, "consensus", [5, 9, 1, 3], SystemParams(4, 1, 1))
    assert trace.status == "complete"
    assert trace.values() == [9]
    assert trace.decision_of(2).round == 4
    assert {d.via for d in trace.decisions if d.process != 2} == {"adopted"}


def test_lost_decide():
    seq = scenario("lost_decide", rounds=9)
    assert seq.n == 2 and seq.T == 9 and seq.metadata["scenario_params"] == {"rounds": 9}
    assert [sorted(seq.graph(r).edges) for r in range(1, 6)] == [[(1, 2)], [], [(1, 2)], [], [(2, 1)]]
    assert all(not seq.graph(r).edges for r in range(6, 10))
    with pytest.raises(ValueError):
        lost_decide(rounds=6)


def test_scenarios_are_byte_deterministic():
    for name, params in [("static_star", {"n": 4, "T": 3}), ("ring_split", {"T": 3}),
                         ("phase_decider", {"n": 6, "k": 3, "phase_len": 2})]:
        a = canonical_dumps(sequence_to_json(scenario(name, **params)))
        b = canonical_dumps(sequence_to_json(scenario(name, **params)))
        assert a == b


def test_unknown_scenario():
    with pytest.raises(ValueError, match="unknown scenario"):
        scenario("hypercube")
    assert set(SCENARIOS) >= {"static_star", "lossy_link"}
