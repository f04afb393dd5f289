import numpy as np
import pytest

from src.adversary import validate_good, validate_majinf, validate_stable
from src.data_loader import canonical_dumps, sequence_to_json
from src.dyngraph import InfluenceIndex, root_components
from src.generators import (estimate_expansion, expander_h, gen_expander_graph, gen_good_sequence,
                            gen_stable_majinf_sequence, random_sequence, random_single_root_graph,
                            random_single_root_sequence, sample_expander, self_check)


def test_good_sequence_is_feasible():
    seq = gen_good_sequence(4, 22, 5, seed=1)
    p = seq.metadata["params"]
    assert (p["n"], p["d"], p["H"], p["r_ST"], p["seed"]) == (4, 22, 3, 5, 1)
    assert seq.T == 5 + 22 + 3 * 3
    assert self_check(seq).feasible


@pytest.mark.parametrize("seed", range(6))
def test_good_sequence_many_seeds(seed):
    seq = gen_good_sequence(5, 10, 1 + seed, seed)
    assert validate_good(seq, 10, 4, 1 + seed).feasible


def test_good_two_processes_use_only_two_shapes():
    seq = gen_good_sequence(2, 3, 2, seed=4)
    for g, roots in zip(seq.rounds, seq.root_sets):
        assert g.edges in ({(1, 2)}, {(2, 1)}, {(1, 2), (2, 1)})
        assert len(roots) == 1


def test_good_sequence_is_deterministic():
    a = canonical_dumps(sequence_to_json(gen_good_sequence(6, 8, 3, seed=11)))
    b = canonical_dumps(sequence_to_json(gen_good_sequence(6, 8, 3, seed=11)))
    c = canonical_dumps(sequence_to_json(gen_good_sequence(6, 8, 3, seed=12)))
    assert a == b
    assert a != c


def test_good_sequence_errors():
    with pytest.raises(ValueError):
        gen_good_sequence(1, 3, 1, 0)
    with pytest.raises(ValueError):
        gen_good_sequence(4, 3, 1, 0, style="smallworld")


def test_expander_style_records_alpha_and_validates():
    seq = gen_good_sequence(12, 10, 2, seed=3, style="expander")
    assert seq.metadata["style"] == "expander"
    assert seq.metadata["params"]["alpha"] is not None
    assert self_check(seq).feasible


def test_expander_h():
    assert expander_h(10, 0.0) == 9
    assert expander_h(2, 1.0) == 1
    assert expander_h(1024, 1.0) < expander_h(1024, 0.5) < 1023
    assert expander_h(8, 1.0) <= 7


def test_expander_on_all_processes_is_strongly_connected():
    g = gen_expander_graph(10, range(1, 11), seed=2)
    assert [c.members for c in root_components(g)] == [frozenset(range(1, 11))]


def test_expander_single_root():
    g = gen_expander_graph(9, {4}, seed=5)
    assert [c.members for c in root_components(g)] == [frozenset({4})]
    assert not g.in_neighbors(4)


def test_expander_sampled_expansion():
    R = frozenset(range(1, 9))
    g, achieved = sample_expander(16, R, alpha=0.0, seed=7)
    assert achieved > 0
    assert not any(v not in R and w in R for v, w in g.edges)
    again = estimate_expansion(g, R, np.random.default_rng(0))
    assert again > 0


def test_expander_rejects_bad_root_set():
    with pytest.raises(ValueError):
        sample_expander(5, set(), seed=1)
    with pytest.raises(ValueError):
        sample_expander(5, {6}, seed=1)


def test_expander_failure_reports_alpha():
    with pytest.raises(RuntimeError, match="achieved alpha"):
        sample_expander(8, range(1, 5), alpha=50.0, seed=1, retries=2)


def test_random_single_root_graph_has_one_root():
    rng = np.random.default_rng(9)
    for R in ({1}, {2, 5}, {1, 2, 3, 4, 5, 6}):
        g = random_single_root_graph(6, R, rng)
        assert [c.members for c in root_components(g)] == [frozenset(R)]


def test_random_sequences_carry_metadata():
    seq = random_sequence(4, 5, seed=3)
    assert seq.metadata["adversary"] == "none" and seq.T == 5
    one = random_single_root_sequence(5, 7, seed=3)
    assert all(len(r) == 1 for r in one.root_sets)


def test_partition_variant():
    seq = gen_stable_majinf_sequence(6, 2, 5, r_ST=4, seed=0, variant="partition")
    p = seq.metadata["params"]
    assert (p["k"], p["D"], p["H"], p["d"]) == (2, 5, 5, 20)
    assert self_check(seq).feasible
    assert len(seq.root_sets[-1]) == 2


def test_merge_chain_variant_has_one_uninfluenced():
    seq = gen_stable_majinf_sequence(4, 1, 1, r_ST=8, seed=2, variant="merge_chain")
    assert seq.metadata["variant"] == "merge_chain"
    report = validate_majinf(seq, 1, 1)
    assert report.feasible
    assert len(InfluenceIndex(seq, 1).uninfluenced()) == 1


@pytest.mark.parametrize("variant", ["partition", "merge_chain"])
@pytest.mark.parametrize("n, k, D", [(3, 1, 1), (5, 2, 1), (7, 3, 2)])
def test_stable_majinf_round_trip(variant, n, k, D):
    for seed in range(3):
        seq = gen_stable_majinf_sequence(n, k, D, r_ST=1 + 3 * seed, seed=seed, variant=variant)
        p = seq.metadata["params"]
        assert validate_stable(seq, k, p["d"], D, p["H"], p["r_ST"]).feasible
        assert validate_majinf(seq, k, D).feasible


def test_stable_majinf_errors():
    with pytest.raises(ValueError):
        gen_stable_majinf_sequence(3, 3, 1, 1, 0)
    with pytest.raises(ValueError):
        gen_stable_majinf_sequence(4, 2, 1, 1, 0, variant="spiral")


def test_self_check_needs_known_adversary():
    with pytest.raises(ValueError):
        self_check(random_sequence(3, 2, seed=0))
