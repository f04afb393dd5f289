# src/run_eval.py
"""
Batch experiments. Each batch draws its items from one seed, runs them through
joblib (one row per item) and returns a pandas DataFrame; summarize() turns a
batch into the one-line table printed by the CLI.
"""
import logging
import math

import networkx as nx
import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from tqdm import tqdm

from .adversary import validate_good, validate_sigma
from .config import FEASIBLE_DRAW_FACTOR
from .data_loader import canonical_dumps, sequence_to_json
from .dyngraph import (GraphSequence, InfluenceIndex, SystemParams, all_h_network_bounded, broadcaster,
                       causal_distance_matrix, dynamic_causal_diameter, network_causal_diameter)
from .eval import (check_agreement, check_in_stable_root, check_termination, check_underapproximation,
                   check_validity, check_vsrc_decision_timing, check_set_termination)
from .generators import (expander_h, gen_good_sequence, gen_stable_majinf_sequence, random_sequence,
                         random_single_root_sequence, sample_expander, self_check)
from .scenarios import lost_decide
from .sim import run

logger = logging.getLogger(__name__)


def _seeds(seed, count):
    return [int(s) for s in np.random.default_rng(seed).integers(2**31 - 1, size=count)]


def _batch(fn, items, jobs=1, desc=None):
    rows = Parallel(n_jobs=jobs)(delayed(fn)(item) for item in tqdm(items, desc=desc, leave=False))
    return pd.DataFrame(rows)


def _inputs(rng, n, distinct=False):
    if distinct:
        return [int(x) for x in rng.permutation(np.arange(1, n + 1)) * 10]
    return [int(x) for x in rng.integers(0, 10, size=n)]


# --- consensus -----------------------------------------------------------------

def consensus_liveness_item(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    D = H = n - 1
    r_ST = int(rng.integers(1, 21))
    d = 2 * D + 2 * H + 2
    seq = gen_good_sequence(n, d, r_ST, int(rng.integers(2**31 - 1)))
    trace = run(seq, "consensus", _inputs(rng, n), SystemParams(n, D, H, r_ST))
    bound = r_ST + 2 * D + 2 * H + 1
    return {
        "seed": seed, "n": n, "r_ST": r_ST,
        "feasible": validate_good(seq, d, H, r_ST).feasible,
        "agreement": check_agreement(trace, 1).holds,
        "validity": check_validity(trace).holds,
        "termination": check_termination(trace, bound).holds,
        "last_decision": max(dd.round for dd in trace.decisions) if trace.decisions else None,
        "bound": bound,
    }


def consensus_liveness(count=200, seed=0, jobs=1):
    return _batch(consensus_liveness_item, _seeds(seed, count), jobs, "consensus liveness")


def consensus_safety_item(seed, rounds=100):
    """
    Arbitrary sequences: validity must always hold, agreement whenever every
    VSRC is H-network-bounded. Odd seeds draw single-root sequences, which are
    (n-1)-network-bounded throughout.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    D = H = max(n - 1, 1)
    sub = int(rng.integers(2**31 - 1))
    single_root = bool(seed % 2)
    seq = random_single_root_sequence(n, rounds, sub) if single_root else random_sequence(n, rounds, sub)
    trace = run(seq, "consensus", _inputs(rng, n), SystemParams(n, D, H))
    bounded = all_h_network_bounded(seq, H)
    agreement = check_agreement(trace, 1).holds
    return {"seed": seed, "n": n, "single_root": single_root, "decisions": len(trace.decisions),
            "h_bounded": bounded, "any_agreement": agreement, "safe": agreement or not bounded,
            "validity": check_validity(trace).holds}


def consensus_safety(count=500, seed=0, jobs=1):
    return _batch(consensus_safety_item, _seeds(seed, count), jobs, "consensus safety")


def lost_decide_fixture():
    """Two decisions on the unbounded lost_decide sequence with D=H=1."""
    seq = lost_decide()
    trace = run(seq, "consensus", [0, 8], SystemParams(2, 1, 1))
    return {"h_bounded": all_h_network_bounded(seq, 1), "values": len(trace.values()),
            "decisions": [(d.process, d.round, d.value) for d in trace.decisions]}


# --- network approximation ------------------------------------------------------

def instableroot_item(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    D = H = max(n - 1, 1)
    sub = int(rng.integers(2**31 - 1))
    if seed % 2:
        seq = gen_good_sequence(n, 2 * D + 2 * H + 2, int(rng.integers(1, 8)), sub)
    else:
        seq = random_single_root_sequence(n, 4 * n, sub)
    trace = run(seq, "consensus", _inputs(rng, n), SystemParams(n, D, H),
                keep_states=True, stop_when_decided=False)
    return {"seed": seed, "n": n, "rounds": seq.T,
            "queries": sum(len(rec.queries) for rec in trace.rounds),
            "instableroot": check_in_stable_root(trace, seq, D).holds,
            "underapprox": check_underapproximation(trace, seq).holds}


def instableroot_exactness(count=100, seed=0, jobs=1):
    return _batch(instableroot_item, _seeds(seed, count), jobs, "instableroot")


def underapproximation_item(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    algo = "kset" if seed % 2 else "consensus"
    D = max(n - 1, 1)
    seq = random_sequence(n, 3 * n, int(rng.integers(2**31 - 1)))
    trace = run(seq, algo, _inputs(rng, n), SystemParams(n, D, D), keep_states=True,
                stop_when_decided=False)
    return {"seed": seed, "n": n, "algorithm": algo,
            "underapprox": check_underapproximation(trace, seq).holds}


def underapproximation(count=100, seed=0, jobs=1):
    return _batch(underapproximation_item, _seeds(seed, count), jobs, "underapproximation")


# --- k-set agreement ------------------------------------------------------------

def kset_item(item):
    seed, variant = item
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 4))
    n = int(rng.integers(max(3, k + 1), 9))
    D = int(rng.integers(1, 3))
    H = D
    r_ST = int(rng.integers(1, 11))
    seq = gen_stable_majinf_sequence(n, k, D, r_ST, int(rng.integers(2**31 - 1)), variant)
    trace = run(seq, "kset", _inputs(rng, n, distinct=True), SystemParams(n, D, H, r_ST))
    return {
        "seed": seed, "variant": variant, "n": n, "k": k, "D": D, "r_ST": r_ST,
        "feasible": self_check(seq).feasible,
        "values": len(trace.values()),
        "agreement": check_agreement(trace, k).holds,
        "validity": check_validity(trace).holds,
        "termination": check_termination(trace, r_ST + 3 * D + H).holds,
        "timing": check_vsrc_decision_timing(trace, seq, D).holds,
    }


def kset_agreement(count=100, seed=0, jobs=1):
    items = [(s, ("partition", "merge_chain")[i % 2]) for i, s in enumerate(_seeds(seed, count))]
    return _batch(kset_item, items, jobs, "k-set agreement")


def exact_k_item(seed):
    """Isolated partitions from round 1 with distinct inputs: exactly k values."""
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 4))
    n = int(rng.integers(k + 1, 9))
    seq = gen_stable_majinf_sequence(n, k, 1, 1, int(rng.integers(2**31 - 1)), "partition")
    trace = run(seq, "kset", _inputs(rng, n, distinct=True), SystemParams(n, 1, 1, 1))
    return {"seed": seed, "n": n, "k": k, "values": len(trace.values()),
            "exact": len(trace.values()) == k}


def exact_k(count=30, seed=0, jobs=1):
    return _batch(exact_k_item, _seeds(seed, count), jobs, "exact k")


def degradation_item(item):
    seed, variant, k = item
    rng = np.random.default_rng(seed)
    n = int(rng.integers(k + 1, 9))
    seq = gen_stable_majinf_sequence(n, k, 1, int(rng.integers(1, 11)), int(rng.integers(2**31 - 1)), variant)
    trace = run(seq, "kset", _inputs(rng, n, distinct=True), SystemParams(n, 1, 1))
    return {"variant": variant, "k": k, "n": n, "values": len(trace.values())}


def degradation_sweep(count=10, seed=0, jobs=1):
    """Distinct decision values per (variant, k): one under good stretches, at most k otherwise."""
    items = [(s, variant, k) for variant in ("partition", "merge_chain") for k in (1, 2, 3)
             for s in _seeds(seed + k, count)]
    return _batch(degradation_item, items, jobs, "degradation")


# --- set agreement --------------------------------------------------------------

def set_agreement_item(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 6))
    seq = random_sequence(n, n, int(rng.integers(2**31 - 1)))
    report = validate_sigma(seq)
    trace = run(seq, "setagree", _inputs(rng, n, distinct=True), SystemParams(n))
    return {"seed": seed, "n": n, "feasible": report.feasible, "values": len(trace.values()),
            "agreement": check_agreement(trace, n - 1).holds,
            "termination": check_set_termination(trace).holds,
            "validity": check_validity(trace).holds}


def set_agreement(count=500, seed=0, jobs=1, max_draws=None):
    """`count` rows on Sigma-feasible sequences; raises when max_draws seeds do not yield enough."""
    max_draws = FEASIBLE_DRAW_FACTOR * count if max_draws is None else max_draws
    rng = np.random.default_rng(seed)
    kept, have, drawn = [], 0, 0
    while have < count:
        size = min(3 * (count - have), max_draws - drawn)
        if size <= 0:
            raise ValueError(f"only {have} of {count} Sigma-feasible sequences in {drawn} draws")
        seeds = [int(s) for s in rng.integers(2**31 - 1, size=size)]
        drawn += size
        df = _batch(set_agreement_item, seeds, jobs, "set agreement")
        kept.append(df[df["feasible"]])
        have += len(kept[-1])
    logger.info("set agreement: %d feasible of %d drawn", have, drawn)
    if not kept:
        return pd.DataFrame()
    return pd.concat(kept).head(count).reset_index(drop=True)


def isolated_fixture():
    """All-isolated n=3: the adversary is violated and three values are accepted."""
    seq = GraphSequence.from_edges(3, [[]] * 3)
    trace = run(seq, "setagree", [1, 2, 3], SystemParams(3))
    return {"feasible": validate_sigma(seq).feasible, "values": len(trace.values())}


# --- graph lemmas ---------------------------------------------------------------

def _transitive_triples(rel):
    pairs = set(rel)
    return sum(1 for a, b in pairs for c, e in pairs if b == c and (a, e) in pairs)


def lemma_item(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    sub = int(rng.integers(2**31 - 1))
    seq = random_single_root_sequence(n, n * max(n - 2, 1) + 1, sub)
    monotone = True
    for r in range(1, seq.T):
        now, nxt = causal_distance_matrix(seq, r), causal_distance_matrix(seq, r + 1)
        both = np.isfinite(now) & np.isfinite(nxt)
        monotone &= bool((nxt[both] >= now[both] - 1).all())
    diameter_ok, h_ok = True, True
    for v in seq.vsrcs:
        a, b = v.interval
        m = len(v.members)
        if m >= 2 and b >= a + m - 2:
            for x in range(a, b - m + 3):
                dia = dynamic_causal_diameter(seq, v, x)
                diameter_ok &= dia is not None and dia <= m - 1
        if b >= a + n - 2:
            for x in range(a, b - n + 3):
                h = network_causal_diameter(seq, [v], x)
                h_ok &= h is not None and h <= n - 1
    # merge chains give nested shrinking roots, so the relation is nonempty
    k = 1 if n < 4 else int(rng.integers(1, 3))
    chain = gen_stable_majinf_sequence(n, k, 1, int(rng.integers(4, 12)), int(rng.integers(2**31 - 1)), "merge_chain")
    rel = InfluenceIndex(chain, 1).relation()
    antisymmetric = not any((s, c) in set(rel) for c, s in rel)
    return {"seed": seed, "n": n, "monotone": monotone, "diameter": diameter_ok, "h_bound": h_ok,
            "broadcaster": bool(broadcaster(seq, seq.T)), "pairs": len(rel), "antisymmetric": antisymmetric,
            "acyclic": nx.is_directed_acyclic_graph(nx.DiGraph(rel)),
            "intransitive": _transitive_triples(rel) == 0}


def lemma_suite(count=1000, seed=0, jobs=1):
    return _batch(lemma_item, _seeds(seed, count), jobs, "lemmas")


# --- expanders ------------------------------------------------------------------

def _log_rounds(size, alpha):
    return 2 * math.ceil(math.log(size / 2) / math.log(1 + alpha)) if alpha > 0 and size > 2 else 0


def expander_item(item):
    n, seed = item
    rng = np.random.default_rng(seed)
    size = int(rng.integers(math.ceil(n / 2), n + 1))
    R = frozenset(int(p) + 1 for p in rng.choice(n, size=size, replace=False))
    graph, alpha = sample_expander(n, R, seed=int(rng.integers(2**31 - 1)))
    seq = GraphSequence(n, (graph,) * (4 * n))
    dist = causal_distance_matrix(seq, 1)
    rows = np.array(sorted(p - 1 for p in R))
    cover_r = float(np.nanmax(dist[np.ix_(rows, rows)]))
    cover_all = float(np.nanmax(dist[rows, :]))
    bound_r = _log_rounds(len(R), alpha) + 2
    bound_all = bound_r + _log_rounds(n, alpha)
    return {"n": n, "R": len(R), "alpha": alpha, "H": expander_h(n, alpha),
            "cover_R": cover_r, "cover_all": cover_all,
            "spread": alpha > 0 and cover_r <= bound_r and cover_all <= bound_all}


def expander_spread(count=3, seed=0, jobs=1):
    items = [(n, s) for n in (32, 64) for s in _seeds(seed + n, count)]
    return _batch(expander_item, items, jobs, "expanders")


# --- determinism ----------------------------------------------------------------

def determinism_item(seed):
    def once():
        seq = gen_good_sequence(4, 10, 3, seed)
        trace = run(seq, "consensus", [seed % 7, 3, 5, 1], SystemParams(4, 3, 3))
        return canonical_dumps(sequence_to_json(seq)), canonical_dumps(trace.to_json())
    return {"seed": seed, "identical": once() == once()}


def determinism(count=10, seed=0, jobs=1):
    return _batch(determinism_item, _seeds(seed, count), jobs, "determinism")


EXPERIMENTS = {
    "consensus_liveness": consensus_liveness,
    "consensus_safety": consensus_safety,
    "instableroot": instableroot_exactness,
    "underapproximation": underapproximation,
    "kset": kset_agreement,
    "exact_k": exact_k,
    "degradation": degradation_sweep,
    "set_agreement": set_agreement,
    "lemmas": lemma_suite,
    "expander": expander_spread,
    "determinism": determinism,
}

CHECK_COLUMNS = ("feasible", "agreement", "validity", "termination", "timing", "instableroot",
                 "underapprox", "monotone", "diameter", "h_bound", "broadcaster", "antisymmetric",
                 "acyclic", "intransitive", "safe", "spread", "identical", "exact")


GROUPED = {"degradation": ["variant", "k"]}


def summarize(df, by=None):
    """Item count and pass rate of every boolean check column, or value counts grouped by `by`."""
    if df.empty:
        return pd.DataFrame([{"items": 0}])
    if by:
        return df.groupby(by)["values"].agg(["count", "mean", "max"]).reset_index()
    row = {"items": len(df)}
    for col in CHECK_COLUMNS:
        if col in df:
            row[col] = float(df[col].astype(bool).mean())
    return pd.DataFrame([row])


def failures(df):
    cols = [c for c in CHECK_COLUMNS if c in df]
    if not cols:
        return df.iloc[0:0]
    return df[~df[cols].astype(bool).all(axis=1)]


def run_experiment(name, count=None, seed=0, jobs=1):
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    fn = EXPERIMENTS[name]
    df = fn(seed=seed, jobs=jobs) if count is None else fn(count=count, seed=seed, jobs=jobs)
    logger.info("%s: %d items, %d failing", name, len(df), len(failures(df)))
    return df, summarize(df, GROUPED.get(name))


if __name__ == "__main__":
    for name in EXPERIMENTS:
        _, table = run_experiment(name, count=5)
        print(name)
        print(table.to_string(index=False))
