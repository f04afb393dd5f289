import pandas as pd
import pytest

from src.run_eval import (consensus_liveness_item, consensus_safety_item, exact_k, failures, isolated_fixture,
                          kset_item, lemma_item, lost_decide_fixture, run_experiment, set_agreement,
                          set_agreement_item, summarize)


def test_summarize_and_failures():
    df = pd.DataFrame([{"seed": 1, "agreement": True, "validity": True},
                       {"seed": 2, "agreement": False, "validity": True}])
    table = summarize(df)
    assert table.loc[0, "items"] == 2
    assert table.loc[0, "agreement"] == 0.5
    assert list(failures(df)["seed"]) == [2]
    assert summarize(pd.DataFrame()).loc[0, "items"] == 0


def test_summarize_grouped():
    df = pd.DataFrame([{"variant": "partition", "k": 2, "values": 2},
                       {"variant": "partition", "k": 2, "values": 1}])
    table = summarize(df, ["variant", "k"])
    assert table.loc[0, "max"] == 2 and table.loc[0, "count"] == 2


def test_consensus_liveness_rows():
    for seed in range(3):
        row = consensus_liveness_item(seed)
        assert row["feasible"] and row["agreement"] and row["validity"] and row["termination"]
        assert row["last_decision"] <= row["bound"]


@pytest.mark.parametrize("variant", ["partition", "merge_chain"])
def test_kset_rows(variant):
    row = kset_item((5, variant))
    assert row["feasible"] and row["agreement"] and row["termination"] and row["timing"]
    assert 1 <= row["values"] <= row["k"]


def test_exact_k():
    df = exact_k(count=4, seed=1)
    assert df["exact"].all()


def test_set_agreement_rows():
    row = set_agreement_item(3)
    assert row["termination"] and row["validity"]
    if row["feasible"]:
        assert row["agreement"]


def test_set_agreement_keeps_drawing_until_enough_feasible_rows():
    df = set_agreement(count=5, seed=1)
    assert len(df) == 5
    assert df["feasible"].all() and df["agreement"].all()
    with pytest.raises(ValueError, match="Sigma-feasible"):
        set_agreement(count=5, seed=1, max_draws=3)


def test_consensus_safety_rows():
    for seed in range(6):
        row = consensus_safety_item(seed, rounds=30)
        assert row["safe"] and row["validity"]
        if row["single_root"]:
            assert row["h_bounded"] and row["any_agreement"]


def test_lost_decide_fixture():
    assert lost_decide_fixture() == {"h_bounded": False, "values": 2, "decisions": [(1, 4, 0), (2, 7, 8)]}


def test_isolated_fixture():
    assert isolated_fixture() == {"feasible": False, "values": 3}


def test_lemma_rows():
    for seed in range(4):
        row = lemma_item(seed)
        assert row["monotone"] and row["diameter"] and row["h_bound"] and row["broadcaster"]
        assert row["pairs"] > 0
        assert row["antisymmetric"] and row["acyclic"] and row["intransitive"]


def test_run_experiment():
    df, table = run_experiment("determinism", count=2, seed=3)
    assert len(df) == 2 and table.loc[0, "identical"] == 1.0
    with pytest.raises(ValueError):
        run_experiment("speedrun")
