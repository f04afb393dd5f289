# src/approx.py
"""
Network approximation: every process keeps a round-labeled digraph that
underapproximates all past communication graphs, and answers InStableRoot
queries from it. Labels are stored as int bitmasks (bit t <=> round t).
"""
from dataclasses import dataclass, field

from .dyngraph import CommGraph, is_strongly_connected


def _bits(rounds):
    mask = 0
    for t in rounds:
        mask |= 1 << t
    return mask


def _rounds(mask):
    out, t = [], 0
    while mask:
        if mask & 1:
            out.append(t)
        mask >>= 1
        t += 1
    return out


@dataclass
class NetworkEstimate:
    owner: int
    round: int = 0
    nodes: set = field(default_factory=set)
    labels: dict = field(default_factory=dict)  # (v, w) -> bitmask of rounds

    def copy(self):
        return NetworkEstimate(self.owner, self.round, set(self.nodes), dict(self.labels))

    def rounds_of(self, v, w):
        return _rounds(self.labels.get((v, w), 0))

    def to_json(self):
        return {
            "owner": self.owner,
            "round": self.round,
            "nodes": sorted(self.nodes),
            "edges": [[v, w, _rounds(mask)] for (v, w), mask in sorted(self.labels.items())],
        }

    @classmethod
    def from_json(cls, obj):
        return cls(obj["owner"], obj["round"], set(obj["nodes"]),
                   {(v, w): _bits(ts) for v, w, ts in obj["edges"]})


@dataclass(frozen=True)
class ApproxMessage:
    sender: int
    estimate: NetworkEstimate


def approx_init(owner):
    return NetworkEstimate(owner, 0, {owner}, {})


def approx_outbound(state):
    return ApproxMessage(state.owner, state.copy())


def approx_step(state, received, r):
    if r <= state.round:
        raise ValueError(f"round {r} does not follow round {state.round}")
    received = list(received)
    senders = [m.sender for m in received]
    if len(set(senders)) != len(senders):
        raise ValueError(f"duplicate sender in round {r}: {sorted(senders)}")
    est = state.copy()
    est.round = r
    bit = 1 << r
    for msg in received:
        if msg.sender == est.owner:
            raise ValueError("a process does not receive its own message")
        key = (msg.sender, est.owner)
        est.labels[key] = est.labels.get(key, 0) | bit
        est.nodes |= msg.estimate.nodes
        for edge, mask in msg.estimate.labels.items():
            est.labels[edge] = est.labels.get(edge, 0) | mask
    return est


def estimate_at(state, t):
    """Vertex and edge set of A_p|t: the owner plus all edges labeled t."""
    bit = 1 << t if t >= 0 else 0
    edges = {e for e, mask in state.labels.items() if mask & bit}
    nodes = {state.owner}
    for v, w in edges:
        nodes.update((v, w))
    return nodes, edges


def graph_estimate_at(state, t, n=None):
    if t < 1:
        raise ValueError(f"round {t} out of range")
    _, edges = estimate_at(state, t)
    return CommGraph(n or max(state.nodes), frozenset(edges))


def stable_root_at(state, t):
    """C_p|t: the vertex set of A_p|t if it is strongly connected, else empty."""
    if t < 1 or t > state.round:
        return frozenset()
    nodes, edges = estimate_at(state, t)
    return frozenset(nodes) if is_strongly_connected(nodes, edges) else frozenset()


def in_stable_root(state, interval):
    a, b = interval
    if a < 1 or b < a:
        return frozenset()
    common = None
    for t in range(a, b + 1):
        current = stable_root_at(state, t)
        if not current or (common is not None and current != common):
            return frozenset()
        common = current
    return common
