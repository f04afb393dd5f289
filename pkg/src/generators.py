# src/generators.py
"""
Seeded generators of adversary-feasible graph sequences.

Every random choice is drawn from numpy.random.default_rng(seed); nested
samplers receive integer seeds drawn from the parent generator, so a
(parameters, seed) pair always yields the same sequence.
"""
import itertools
import logging
import math

import networkx as nx
import numpy as np

from .adversary import validate_good, validate_stable_majinf
from .config import DEFAULT_ALPHA, DEFAULT_SLACK, EXPANDER_DEGREE, EXPANDER_RETRIES, EXPANDER_SAMPLES
from .data_loader import make_metadata
from .dyngraph import CommGraph, GraphSequence

logger = logging.getLogger(__name__)

STYLES = ("random", "expander")
VARIANTS = ("partition", "merge_chain")


def _seed(rng):
    return int(rng.integers(2**31 - 1))


def random_root_set(n, rng):
    size = int(rng.integers(1, n + 1))
    return frozenset(int(p) + 1 for p in rng.choice(n, size=size, replace=False))


def _attach(n, roots, edges, rng, allowed=None):
    """Give every process outside the roots an in-edge from an already attached one."""
    rooted = set().union(*roots)
    attached = sorted(rooted)
    pool = [p for p in range(1, n + 1) if p not in rooted and (allowed is None or p in allowed)]
    for w in rng.permutation(pool) if pool else []:
        v = attached[int(rng.integers(len(attached)))]
        edges.add((int(v), int(w)))
        attached.append(int(w))
    return pool


def _complete(group, edges):
    edges.update((v, w) for v in group for w in group if v != w)


def random_single_root_graph(n, R, rng, density=0.3):
    """One root component with members R: a cycle over R plus random intra-R edges, the rest attached."""
    R = sorted(R)
    edges = set()
    if len(R) > 1:
        order = [int(p) for p in rng.permutation(R)]
        edges.update(zip(order, order[1:] + order[:1]))
        edges.update((v, w) for v in R for w in R if v != w and rng.random() < density)
    others = _attach(n, [set(R)], edges, rng)
    # extra edges never enter R
    edges.update((v, w) for v in range(1, n + 1) for w in others if v != w and rng.random() < density / 2)
    return CommGraph(n, frozenset(edges))


def rooted_groups_graph(n, groups, rng, density=0.3, regions=None):
    """
    Complete root groups with the remaining processes attached below them. With
    regions, every other process of a region hangs directly off one of its root members.
    """
    edges = set()
    for g in groups:
        _complete(g, edges)
    if regions is None:
        others = _attach(n, groups, edges, rng)
        edges.update((v, w) for v in others for w in others if v != w and rng.random() < density / 2)
    else:
        for g, region in zip(groups, regions):
            roots = sorted(g)
            others = sorted(region - g)
            edges.update((roots[int(rng.integers(len(roots)))], w) for w in others)
            edges.update((v, w) for v in others for w in others if v != w and rng.random() < density / 2)
    return CommGraph(n, frozenset(edges))


def random_sequence(n, T, seed, density=None):
    """Arbitrary directed graphs with no feasibility filter."""
    rng = np.random.default_rng(seed)
    rounds = []
    for _ in range(T):
        p = density if density is not None else rng.uniform(0.0, 0.6)
        mask = rng.random((n, n)) < p
        rounds.append([(i + 1, j + 1) for i, j in zip(*np.nonzero(mask)) if i != j])
    return GraphSequence.from_edges(n, rounds, metadata=make_metadata("none", n=n, seed=seed))


def random_single_root_sequence(n, T, seed):
    rng = np.random.default_rng(seed)
    rounds = [random_single_root_graph(n, random_root_set(n, rng), rng) for _ in range(T)]
    return GraphSequence(n, tuple(rounds), metadata=make_metadata("one_root", n=n, seed=seed))


# --- expanders ---------------------------------------------------------------

def _regular(nodes, degree, rng, retries=EXPANDER_RETRIES):
    nodes = sorted(nodes)
    m = len(nodes)
    if m <= 2 or degree >= m - 1:
        return nx.relabel_nodes(nx.complete_graph(m), dict(enumerate(nodes)))
    deg = degree if degree * m % 2 == 0 else degree - 1
    deg = max(deg, 2)
    for _ in range(retries):
        g = nx.random_regular_graph(deg, m, seed=_seed(rng))
        if nx.is_connected(g):
            return nx.relabel_nodes(g, dict(enumerate(nodes)))
    raise RuntimeError(f"no connected {deg}-regular graph on {m} nodes after {retries} tries")


def _expansion(nbrs, S, within=None):
    reached = set().union(*(nbrs[s] for s in S)) - set(S)
    if within is not None:
        reached &= within
    return len(reached) / len(S)


def _subset(rng, universe, most):
    size = int(rng.integers(1, most + 1))
    return [int(s) for s in rng.choice(universe, size=size, replace=False)]


def estimate_expansion(graph, R, rng, samples=EXPANDER_SAMPLES):
    """
    Sampled directed expansion around the root set R: out- and in-expansion of
    subsets of R inside R, out-expansion of supersets of R and in-expansion of
    sets avoiding R. Returns the smallest ratio seen.
    """
    n = graph.n
    R = sorted(R)
    rest = [p for p in range(1, n + 1) if p not in R]
    out = {p: graph.out_neighbors(p) for p in range(1, n + 1)}
    inn = {p: graph.in_neighbors(p) for p in range(1, n + 1)}
    ratios = []
    if len(R) >= 2:
        for _ in range(samples):
            S = _subset(rng, R, len(R) // 2)
            ratios += [_expansion(out, S, set(R)), _expansion(inn, S, set(R))]
    if rest and len(R) <= n // 2:
        ratios.append(_expansion(out, R))
        room = min(len(rest), n // 2 - len(R))
        for _ in range(samples if room else 0):
            ratios.append(_expansion(out, R + _subset(rng, rest, room)))
    if rest:
        for _ in range(samples):
            ratios.append(_expansion(inn, _subset(rng, rest, min(len(rest), n // 2))))
    return min(ratios) if ratios else 0.0


def sample_expander(n, R, alpha=DEFAULT_ALPHA, seed=None, degree=EXPANDER_DEGREE, retries=EXPANDER_RETRIES):
    """Returns (graph, achieved alpha)."""
    R = frozenset(int(p) for p in R)
    if not R or not R <= set(range(1, n + 1)):
        raise ValueError(f"root set {sorted(R)} must be a nonempty subset of 1..{n}")
    rng = np.random.default_rng(seed)
    best = 0.0
    for attempt in range(retries):
        edges = set()
        for g in (_regular(R, degree, rng), _regular(range(1, n + 1), degree, rng)):
            for u, v in g.edges():
                edges.update({(int(u), int(v)), (int(v), int(u))})
        # drop every edge entering R from outside
        edges = {(u, v) for u, v in edges if not (v in R and u not in R)}
        graph = CommGraph(n, frozenset(edges))
        achieved = estimate_expansion(graph, R, rng)
        if achieved >= alpha:
            if attempt:
                logger.info("expander accepted after %d retries (alpha=%.3f)", attempt, achieved)
            return graph, achieved
        best = max(best, achieved)
    raise RuntimeError(f"expander sampling failed after {retries} tries: achieved alpha={best:.3f} < {alpha}")


def gen_expander_graph(n, R, alpha=DEFAULT_ALPHA, seed=None):
    graph, _ = sample_expander(n, R, alpha, seed)
    return graph


def expander_h(n, alpha):
    if alpha <= 0 or n <= 2:
        return n - 1
    return min(n - 1, 2 * math.ceil(math.log(n / 2) / math.log(1 + alpha)) + 2)


# --- eventually good ----------------------------------------------------------

def _good_roots(n, d, r_ST, T, rng):
    stable = random_root_set(n, rng)
    return [stable if r_ST <= r < r_ST + d else random_root_set(n, rng) for r in range(1, T + 1)]


def gen_good_sequence(n, d, r_ST, seed, style="random", alpha=DEFAULT_ALPHA):
    if n < 2:
        raise ValueError("need n >= 2")
    if d < 1 or r_ST < 1:
        raise ValueError("d and r_ST must be >= 1")
    if style not in STYLES:
        raise ValueError(f"unknown style {style!r}")
    rng = np.random.default_rng(seed)
    longest = r_ST + d + 3 * (n - 1)
    roots = _good_roots(n, d, r_ST, longest, rng)

    if style == "random":
        H = n - 1
        graphs = [random_single_root_graph(n, R, rng) for R in roots]
        achieved = None
    else:
        sampled = [sample_expander(n, R, alpha, _seed(rng)) for R in roots]
        graphs = [g for g, _ in sampled]
        achieved = min(a for _, a in sampled)
        H = expander_h(n, achieved)

    def build(H):
        meta = make_metadata("good", n=n, d=d, D=H, H=H, r_ST=r_ST, alpha=achieved, seed=seed)
        meta["style"] = style
        return GraphSequence(n, tuple(graphs[: r_ST + d + 3 * H]), metadata=meta)

    seq = build(H)
    if style == "expander" and H < n - 1 and not validate_good(seq, d, H, r_ST).feasible:
        logger.info("expander sequence not %d-network-bounded; falling back to H=%d", H, n - 1)
        seq = build(n - 1)
    return seq


# --- stable + majority influence --------------------------------------------

def _split(items, parts, rng):
    items = [int(p) for p in items]
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, len(items)), size=parts - 1, replace=False)) if parts > 1 else []
    bounds = [0] + cuts + [len(items)]
    return [frozenset(items[a:b]) for a, b in zip(bounds, bounds[1:])]


def random_partition(n, k, rng):
    return _split(rng.permutation(np.arange(1, n + 1)), k, rng)


def _epoch_groups(n, k, rng, forbidden, tries=100):
    for _ in range(tries):
        count = int(rng.integers(1, k + 1))
        total = int(rng.integers(count, n + 1))
        groups = _split(rng.permutation(np.arange(1, n + 1))[:total], count, rng)
        if not any(g in forbidden for g in groups):
            return groups
    for size in range(1, n + 1):
        for combo in itertools.combinations(range(1, n + 1), size):
            if frozenset(combo) not in forbidden:
                return [frozenset(combo)]
    raise RuntimeError("no admissible root group")


def _partition_rounds(n, k, D, r_ST, T, rng):
    parts = random_partition(n, k, rng)
    rounds, prev, r = [], set(), 1
    while r < r_ST:
        length = min(int(rng.integers(1, 2 * D + 1)), r_ST - r)
        forbidden = prev | (set(parts) if r + length >= r_ST else set())
        groups = _epoch_groups(n, k, rng, forbidden)
        rounds += [rooted_groups_graph(n, groups, rng) for _ in range(length)]
        prev, r = set(groups), r + length
    final = rooted_groups_graph(n, parts, rng)
    rounds += [final] * (T - r_ST + 1)
    return rounds


def _shrinking_chain(region, count, rng):
    sizes = sorted(int(s) for s in rng.choice(np.arange(1, len(region) + 1), size=count, replace=False))[::-1]
    chain = [frozenset(int(p) for p in rng.choice(sorted(region), size=sizes[0], replace=False))]
    for size in sizes[1:]:
        chain.append(frozenset(int(p) for p in rng.choice(sorted(chain[-1]), size=size, replace=False)))
    return chain


def _region_schedule(region, D, r_ST, T, rng):
    """Root set of the region for each round 1..T."""
    blocks = min((r_ST - 1) // (2 * D + 1), len(region) - 1)
    chain = _shrinking_chain(region, blocks + 1, rng)
    if blocks == 0:
        return [chain[0]] * T
    first = (r_ST - 1) - (blocks - 1) * (2 * D + 1)
    lengths = [first] + [2 * D + 1] * (blocks - 1) + [T - r_ST + 1]
    return [R for R, length in zip(chain, lengths) for _ in range(length)]


def _merge_chain_rounds(n, k, D, r_ST, T, rng):
    regions = random_partition(n, k, rng)
    schedules = [_region_schedule(region, D, r_ST, T, rng) for region in regions]
    return [rooted_groups_graph(n, [s[r] for s in schedules], rng, regions=regions) for r in range(T)]


def gen_stable_majinf_sequence(n, k, D, r_ST, seed, variant="partition"):
    if n < 2 or n <= k:
        raise ValueError(f"need n > k and n >= 2, got n={n} k={k}")
    if k < 1 or D < 1 or r_ST < 1:
        raise ValueError("k, D and r_ST must be >= 1")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    rng = np.random.default_rng(seed)
    H = D
    d = 3 * D + H
    T = r_ST + d + D + DEFAULT_SLACK
    make = _partition_rounds if variant == "partition" else _merge_chain_rounds
    meta = make_metadata("stable_majinf", n=n, k=k, d=d, D=D, H=H, r_ST=r_ST, seed=seed)
    meta["variant"] = variant
    return GraphSequence(n, tuple(make(n, k, D, r_ST, T, rng)), metadata=meta)


def self_check(seq):
    """Validate a generated sequence against the adversary recorded in its metadata."""
    meta = seq.metadata or {}
    p = meta.get("params", {})
    if meta.get("adversary") == "good":
        return validate_good(seq, p["d"], p["H"], p["r_ST"])
    if meta.get("adversary") == "stable_majinf":
        return validate_stable_majinf(seq, p["k"], p["D"], p["H"], p["r_ST"], p["d"])
    raise ValueError(f"no generator validator for {meta.get('adversary')!r}")
