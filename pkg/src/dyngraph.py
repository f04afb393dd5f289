# src/dyngraph.py
"""
Graph-sequence mathematics for directed dynamic networks.

Processes are 1-based integers. A GraphSequence is a finite prefix of per-round
communication graphs plus a continuation rule ("none" or "repeat_last") that
decides whether anything may be said about rounds past the prefix.

Causal distances are computed all-pairs with numpy: starting from round r every
process reaches itself, and each round extends the reached set along that
round's edges. Distances come back as floats:
    finite  -> length of the shortest causal chain (cd(p,p) = 1)
    np.inf  -> proven unreachable (only under the repeat_last continuation)
    np.nan  -> not reached within the examined rounds (unknown)
"""
import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

CONTINUATIONS = ("none", "repeat_last")
UNKNOWN = None  # cd / diameter marker for "beyond the prefix"


@dataclass(frozen=True)
class Interval:
    a: int
    b: int

    def __post_init__(self):
        if not (1 <= self.a <= self.b):
            raise ValueError(f"invalid interval [{self.a},{self.b}]")

    def __iter__(self):
        yield self.a
        yield self.b

    def __len__(self):
        return self.b - self.a + 1

    def __contains__(self, r):
        return self.a <= r <= self.b

    def __str__(self):
        return f"[{self.a},{self.b}]"


@dataclass(frozen=True)
class CommGraph:
    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        edges = frozenset((int(p), int(q)) for p, q in self.edges)
        for p, q in edges:
            if p == q:
                raise ValueError(f"self-loop on process {p}")
            if not (1 <= p <= self.n and 1 <= q <= self.n):
                raise ValueError(f"edge {p}->{q} outside 1..{self.n}")
        object.__setattr__(self, "edges", edges)

    def sorted_edges(self):
        return sorted(self.edges)

    def in_neighbors(self, q):
        return {p for p, w in self.edges if w == q}

    def out_neighbors(self, p):
        return {w for v, w in self.edges if v == p}

    def adjacency(self):
        adj = np.zeros((self.n, self.n), dtype=bool)
        for p, q in self.edges:
            adj[p - 1, q - 1] = True
        return adj


@dataclass(frozen=True)
class RootComponent:
    round: int
    members: frozenset


@dataclass(frozen=True)
class Vsrc:
    members: frozenset
    interval: Interval

    def __post_init__(self):
        if not self.members:
            raise ValueError("a VSRC needs at least one member")
        object.__setattr__(self, "members", frozenset(self.members))

    def __len__(self):
        return len(self.interval)

    def precedes(self, other):
        return self.interval.b < other.interval.a

    def sort_key(self):
        return (self.interval.a, self.interval.b, sorted(self.members))

    def __str__(self):
        return f"{{{','.join(map(str, sorted(self.members)))}}}{self.interval}"


@dataclass(frozen=True)
class CausalFrontier:
    origin: int
    start_round: int
    reached: tuple  # reached[k] = processes reached by chains of length <= k


@dataclass(frozen=True)
class SystemParams:
    n: int
    D: int = None
    H: int = None
    r_ST: int = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.D is not None and self.D < 1:
            raise ValueError("D must be >= 1")
        if self.D is not None and self.H is not None and not (self.D <= self.H <= max(self.n - 1, 1)):
            raise ValueError(f"need D <= H <= n-1, got D={self.D} H={self.H} n={self.n}")
        if self.r_ST is not None and self.r_ST < 1:
            raise ValueError("r_ST must be >= 1")


@dataclass(frozen=True)
class GraphSequence:
    n: int
    rounds: tuple
    continuation: str = "none"
    metadata: dict = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        if self.continuation not in CONTINUATIONS:
            raise ValueError(f"unknown continuation {self.continuation!r}")
        rounds = tuple(g if isinstance(g, CommGraph) else CommGraph(self.n, frozenset(map(tuple, g)))
                       for g in self.rounds)
        for r, g in enumerate(rounds, start=1):
            if g.n != self.n:
                raise ValueError(f"round {r} has n={g.n}, expected {self.n}")
        object.__setattr__(self, "rounds", rounds)

    @classmethod
    def from_edges(cls, n, rounds, continuation="none", metadata=None):
        return cls(n, tuple(CommGraph(n, frozenset(map(tuple, edges))) for edges in rounds),
                   continuation, metadata)

    @property
    def T(self):
        return len(self.rounds)

    def graph(self, r):
        if r < 1:
            raise ValueError(f"round {r} out of range")
        if r > self.T:
            if self.continuation == "repeat_last" and self.T > 0:
                return self.rounds[-1]
            raise ValueError(f"round {r} beyond prefix of length {self.T}")
        return self.rounds[r - 1]

    @cached_property
    def _steps(self):
        # per-round reachability step: own edges plus self-influence
        eye = np.eye(self.n, dtype=bool)
        return [g.adjacency() | eye for g in self.rounds]

    @cached_property
    def _cd_cache(self):
        return {}

    def step_matrix(self, r):
        return self._steps[min(r, self.T) - 1]

    @cached_property
    def root_sets(self):
        return tuple(tuple(_root_sets(g)) for g in self.rounds)

    @cached_property
    def vsrcs(self):
        return _enumerate(self)


def _root_sets(g):
    n = g.n
    if not g.edges:
        return [frozenset({p}) for p in range(1, n + 1)]
    src = np.array([p - 1 for p, _ in g.edges])
    dst = np.array([q - 1 for _, q in g.edges])
    mat = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    ncomp, labels = connected_components(mat, directed=True, connection="strong")
    cross = labels[src] != labels[dst]
    has_in = np.zeros(ncomp, dtype=bool)
    has_in[labels[dst[cross]]] = True
    roots = [frozenset(int(i) + 1 for i in np.flatnonzero(labels == c))
             for c in np.flatnonzero(~has_in)]
    return sorted(roots, key=min)


def root_components(g, r=None):
    """All SCCs of g without incoming edges from outside (isolated processes count)."""
    return [RootComponent(r, members) for members in _root_sets(g)]


def is_strongly_connected(nodes, edges):
    """A single vertex counts as strongly connected; the empty graph does not."""
    nodes = sorted(nodes)
    if not nodes:
        return False
    if len(nodes) == 1:
        return True
    index = {v: i for i, v in enumerate(nodes)}
    pairs = [(index[v], index[w]) for v, w in edges if v in index and w in index]
    if not pairs:
        return False
    src, dst = zip(*pairs)
    mat = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(len(nodes), len(nodes)))
    ncomp, _ = connected_components(mat, directed=True, connection="strong")
    return ncomp == 1


def _check_round(seq, r):
    if not (1 <= r <= seq.T):
        raise ValueError(f"round {r} outside prefix 1..{seq.T}")


def causal_distance_matrix(seq, r, budget=None):
    """
    All-pairs cd^r as an n x n float array (row = source, column = target).
    With a budget only chains of at most `budget` rounds are explored; anything
    not reached stays nan.
    """
    _check_round(seq, r)
    key = (r, budget)
    if key in seq._cd_cache:
        return seq._cd_cache[key]
    n = seq.n
    dist = np.full((n, n), np.nan)
    np.fill_diagonal(dist, 1.0)
    reach = np.eye(n, dtype=bool)
    steps, t = 0, r
    while not reach.all():
        if budget is not None and steps >= budget:
            break
        if t > seq.T and seq.continuation != "repeat_last":
            break
        nxt = (reach.astype(np.int32) @ seq.step_matrix(t).astype(np.int32)) > 0
        steps += 1
        new = nxt & ~reach
        dist[new] = steps
        if t >= seq.T and seq.continuation == "repeat_last" and not new.any():
            # fixpoint of the repeated last graph
            dist[~nxt] = np.inf
            break
        reach = nxt
        t += 1
    dist.flags.writeable = False
    seq._cd_cache[key] = dist
    return dist


def _as_distance(value):
    if np.isnan(value):
        return UNKNOWN
    if np.isinf(value):
        return math.inf
    return int(value)


def causal_distance(seq, p, q, r):
    return _as_distance(causal_distance_matrix(seq, r)[p - 1, q - 1])


def causal_frontier(seq, p, r, budget=None):
    row = causal_distance_matrix(seq, r, budget)[p - 1]
    finite = row[np.isfinite(row)]
    top = int(finite.max()) if finite.size else 1
    reached = [frozenset({p})]
    for k in range(1, top + 1):
        reached.append(frozenset(int(i) + 1 for i in np.flatnonzero(row <= k)))
    return CausalFrontier(p, r, tuple(reached))


def _idx(members):
    return np.array(sorted(m - 1 for m in members))


def dynamic_causal_diameter(seq, vsrc, x):
    if x not in vsrc.interval:
        raise ValueError(f"round {x} outside {vsrc.interval}")
    m = _idx(vsrc.members)
    sub = causal_distance_matrix(seq, x)[np.ix_(m, m)]
    if np.isnan(sub).any():
        return UNKNOWN
    return _as_distance(sub.max())


def enumerate_vsrcs(seq):
    return list(seq.vsrcs)


def _enumerate(seq):
    found, open_runs = [], {}
    for r, roots in enumerate(seq.root_sets, start=1):
        current = set(roots)
        for members in [m for m in open_runs if m not in current]:
            found.append(Vsrc(members, Interval(open_runs.pop(members), r - 1)))
        for members in current:
            open_runs.setdefault(members, r)
    for members, a in open_runs.items():
        found.append(Vsrc(members, Interval(a, seq.T)))
    return tuple(sorted(found, key=Vsrc.sort_key))


def vsrcs_of_length_at_least(seq, d):
    """V_d: maximal VSRCs that are vertex-stable for at least d rounds."""
    return [v for v in seq.vsrcs if len(v) >= d]


def d_bound_failures(seq, vsrc, D):
    """Rounds x in [a, b-D+1] whose diameter exceeds D (empty when |I| < D)."""
    a, b = vsrc.interval
    if len(vsrc) < D:
        return []
    m = _idx(vsrc.members)
    return [x for x in range(a, b - D + 2)
            if not (causal_distance_matrix(seq, x, D)[np.ix_(m, m)] <= D).all()]


def is_d_bounded(seq, vsrc, D):
    return not d_bound_failures(seq, vsrc, D)


def _shared_interval(vsrc_set):
    vsrc_set = list(vsrc_set)
    if not vsrc_set:
        raise ValueError("empty VSRC set")
    interval = vsrc_set[0].interval
    if any(v.interval != interval for v in vsrc_set):
        raise ValueError("VSRCs do not share an interval")
    union = frozenset().union(*(v.members for v in vsrc_set))
    return interval, union


def network_causal_diameter(seq, vsrc_set, x):
    """h^x: max over all q of min over members p of the set of cd^x(p,q)."""
    interval, union = _shared_interval(vsrc_set)
    if x not in interval:
        raise ValueError(f"round {x} outside {interval}")
    sub = causal_distance_matrix(seq, x)[_idx(union), :]
    worst = 0.0
    for col in sub.T:
        finite = col[np.isfinite(col)]
        if finite.size:
            best = finite.min()
        elif np.isnan(col).any():
            return UNKNOWN
        else:
            best = np.inf
        worst = max(worst, best)
    return _as_distance(worst)


def h_bound_failures(seq, vsrc_set, H):
    """(x, unreached processes) for each x in [a, b-H+1] where h^x > H."""
    interval, union = _shared_interval(vsrc_set)
    a, b = interval
    if len(interval) < H:
        return []
    failures = []
    rows = _idx(union)
    for x in range(a, b - H + 2):
        covered = (causal_distance_matrix(seq, x, H)[rows, :] <= H).any(axis=0)
        if not covered.all():
            failures.append((x, frozenset(int(i) + 1 for i in np.flatnonzero(~covered))))
    return failures


def is_h_network_bounded(seq, vsrc_set, H):
    return not h_bound_failures(seq, vsrc_set, H)


def all_h_network_bounded(seq, H):
    """Every VSRC of the prefix, taken alone, is H-network-bounded."""
    return all(is_h_network_bounded(seq, [v], H) for v in seq.vsrcs)


def influence_set(seq, cur, suc):
    s_cur, r_suc = cur.interval.b, suc.interval.a
    if r_suc <= s_cur:
        raise ValueError(f"{suc} does not start after {cur} ends")
    budget = r_suc - s_cur
    # unbudgeted matrix: shared by every pair starting at s_cur+1
    dist = causal_distance_matrix(seq, s_cur + 1)
    sub = dist[np.ix_(_idx(cur.members), _idx(suc.members))]
    hit = (sub <= budget).any(axis=0)
    return frozenset(q for q, ok in zip(sorted(suc.members), hit) if ok)


def influences(seq, cur, suc):
    return cur.precedes(suc) and bool(influence_set(seq, cur, suc))


def majority_over(own, competitors):
    """
    Counting rule of majority influence. `competitors` holds (|IS(R,suc)|, known)
    pairs where known means R already influenced the candidate; unknown ones must
    be beaten strictly, known ones only matched.
    """
    return all(own >= size if known else own > size for size, known in competitors)


class InfluenceIndex:
    """Caches influence sets and the V_{D+1} / V_{2D+1} families of one sequence."""

    def __init__(self, seq, D):
        self.seq, self.D = seq, D
        self.v_lock = vsrcs_of_length_at_least(seq, D + 1)
        self.v_decide = vsrcs_of_length_at_least(seq, 2 * D + 1)
        self._is = {}

    def influence_set(self, cur, suc):
        if not cur.precedes(suc):
            return frozenset()
        key = (cur, suc)
        if key not in self._is:
            self._is[key] = influence_set(self.seq, cur, suc)
        return self._is[key]

    def majority_influences(self, cur, suc):
        for v in (cur, suc):
            if v not in self.v_decide:
                raise ValueError(f"{v} is not in V_{2 * self.D + 1}")
        own = self.influence_set(cur, suc)
        if not own:
            return False
        competitors = [(len(self.influence_set(r, suc)), bool(self.influence_set(r, cur)))
                       for r in self.v_lock if r != cur and r.precedes(suc)]
        return majority_over(len(own), competitors)

    def relation(self):
        return [(c, s) for c, s in product(self.v_decide, repeat=2)
                if c.precedes(s) and self.majority_influences(c, s)]

    def uninfluenced(self):
        influenced = {s for _, s in self.relation()}
        return [v for v in self.v_decide if v not in influenced]


def majority_influences(seq, cur, suc, D):
    return InfluenceIndex(seq, D).majority_influences(cur, suc)


def majority_influence_relation(seq, D):
    return InfluenceIndex(seq, D).relation()


def uninfluenced(seq, D):
    """Minimal K of MAJ-INF: members of V_{2D+1} without a majority influencer."""
    return InfluenceIndex(seq, D).uninfluenced()


def broadcaster(seq, budget):
    """Processes whose round-1 chains reach everybody within `budget` rounds."""
    dist = causal_distance_matrix(seq, 1, budget)
    return [p + 1 for p in range(seq.n) if (dist[p] <= budget).all()]


if __name__ == "__main__":
    fig = GraphSequence.from_edges(5, [
        [(1, 2), (2, 1), (4, 1), (4, 5), (2, 3), (5, 2)],
        [(1, 2), (2, 3), (4, 1), (4, 5)],
        [(2, 1), (3, 1), (5, 3), (5, 2), (3, 4)],
    ])
    for v in enumerate_vsrcs(fig):
        print("VSRC", v)
    print("cd^1(4,3) =", causal_distance(fig, 4, 3, 1))
