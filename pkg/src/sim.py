# src/sim.py
"""
Lock-step round engine. In every round each process emits one message, the
message reaches exactly the out-neighbors of that round's graph, and each
receiver first applies the network approximation step (for the algorithms that
use it) and then the algorithm step. Runs are deterministic: inbound messages
are ordered by sender id and no randomness is involved.
"""
import logging
from dataclasses import dataclass, field, replace

from .approx import approx_step
from .consensus import cons_init, cons_outbound, cons_step
from .data_loader import digest
from .dyngraph import GraphSequence, SystemParams
from .kset import ks_init, ks_outbound, ks_step
from .setagree import sa_init, sa_outbound, sa_step

logger = logging.getLogger(__name__)

COMPLETE = "complete"
EXHAUSTED = "prefix exhausted"


@dataclass(frozen=True)
class Algorithm:
    name: str
    init: object
    outbound: object
    step: object
    uses_approx: bool
    decided: object


def _need(params, *names):
    missing = [x for x in names if getattr(params, x) is None]
    if missing:
        raise ValueError(f"parameters {missing} are required")
    return params


ALGORITHMS = {
    "consensus": Algorithm(
        "consensus",
        lambda p, x, params: cons_init(p, x, _need(params, "D", "H").D, params.H),
        cons_outbound, cons_step, True, lambda s: s.decided),
    "setagree": Algorithm(
        "setagree",
        lambda p, x, params: sa_init(p, x, params.n),
        sa_outbound, sa_step, False, lambda s: s.terminated),
    "kset": Algorithm(
        "kset",
        lambda p, x, params: ks_init(p, x, _need(params, "D").D),
        ks_outbound, ks_step, True, lambda s: s.decision is not None),
}


@dataclass(frozen=True)
class Decision:
    process: int
    round: int
    value: int
    via: str
    lock_round: int = None

    def sort_key(self):
        return (self.round, self.process)

    def to_json(self):
        return {"process": self.process, "round": self.round, "value": self.value,
                "via": self.via, "lock_round": self.lock_round}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["process"], obj["round"], obj["value"], obj["via"], obj.get("lock_round"))


@dataclass
class RoundRecord:
    round: int
    edges: list
    digests: list
    queries: list = field(default_factory=list)   # [process, a, b, sorted result]
    messages: list = None
    states: tuple = field(default=None, repr=False)  # in memory only

    def to_json(self):
        obj = {"round": self.round, "edges": [list(e) for e in self.edges],
               "digests": self.digests, "queries": self.queries}
        if self.messages is not None:
            obj["messages"] = self.messages
        return obj

    @classmethod
    def from_json(cls, obj):
        return cls(obj["round"], [tuple(e) for e in obj["edges"]], obj["digests"],
                   [list(q) for q in obj.get("queries", [])], obj.get("messages"))


@dataclass
class Trace:
    algorithm: str
    params: SystemParams
    inputs: list
    rounds: list = field(default_factory=list)
    decisions: list = field(default_factory=list)
    status: str = EXHAUSTED
    final_states: tuple = field(default=None, repr=False)

    @property
    def n(self):
        return self.params.n

    def decision_of(self, p):
        return next((d for d in self.decisions if d.process == p), None)

    def values(self):
        return sorted({d.value for d in self.decisions})

    def sequence(self):
        """The delivered edges as a GraphSequence (exactly the executed rounds)."""
        return GraphSequence.from_edges(self.n, [rec.edges for rec in self.rounds])

    def has_states(self):
        return bool(self.rounds) and self.rounds[0].states is not None

    def to_json(self):
        p = self.params
        return {
            "algorithm": self.algorithm,
            "params": {"n": p.n, "D": p.D, "H": p.H, "r_ST": p.r_ST},
            "inputs": list(self.inputs),
            "status": self.status,
            "rounds": [rec.to_json() for rec in self.rounds],
            "decisions": [d.to_json() for d in self.decisions],
        }

    @classmethod
    def from_json(cls, obj):
        try:
            p = obj["params"]
            params = SystemParams(p["n"], p.get("D"), p.get("H"), p.get("r_ST"))
            return cls(obj["algorithm"], params, list(obj["inputs"]),
                       [RoundRecord.from_json(r) for r in obj["rounds"]],
                       [Decision.from_json(d) for d in obj["decisions"]], obj["status"])
        except (KeyError, TypeError) as e:
            raise ValueError(f"malformed trace: {e}") from e


def _event_round(state, algo_name):
    if algo_name == "consensus":
        return state.lock_round
    if algo_name == "kset":
        return state.ell
    return None


def run(seq, algorithm, inputs, params=None, keep_states=False, record_messages=False,
        stop_when_decided=True):
    """
    Execute `algorithm` on `seq`. With stop_when_decided the run ends after the
    round in which the last process decides; otherwise every prefix round is
    executed (setagree always stops after round n).
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    params = params or SystemParams(seq.n)
    if params.n != seq.n:
        raise ValueError(f"params.n={params.n} does not match sequence n={seq.n}")
    if len(inputs) != seq.n:
        raise ValueError(f"expected {seq.n} inputs, got {len(inputs)}")
    algo = ALGORITHMS[algorithm]
    states = {p: algo.init(p, inputs[p - 1], params) for p in range(1, seq.n + 1)}
    trace = Trace(algorithm, params, list(inputs))
    last = min(seq.T, seq.n) if algorithm == "setagree" else seq.T

    for r in range(1, last + 1):
        g = seq.graph(r)
        outbound = {p: algo.outbound(s) for p, s in states.items()}
        queries, nxt = [], {}
        for q in range(1, seq.n + 1):
            inbound = [outbound[p] for p in sorted(g.in_neighbors(q))]
            s = states[q]
            if algo.uses_approx:
                s = replace(s, approx=approx_step(s.approx, [m.approx for m in inbound], r))
            s, event = algo.step(s, inbound, r)
            if event is not None:
                value, via = event
                trace.decisions.append(Decision(q, r, value, via,
                                                _event_round(s, algorithm) if via == "own" else None))
            queries += [[q, a, b, sorted(res)] for a, b, res in getattr(s, "queries", [])]
            nxt[q] = s
        states = nxt
        trace.rounds.append(RoundRecord(
            r, g.sorted_edges(),
            [digest(states[p].to_json()) for p in sorted(states)],
            queries,
            [outbound[p].to_json() for p in sorted(outbound)] if record_messages else None,
            tuple(states[p] for p in sorted(states)) if keep_states else None,
        ))
        if all(algo.decided(s) for s in states.values()):
            trace.status = COMPLETE
            if stop_when_decided:
                break

    trace.decisions.sort(key=Decision.sort_key)
    trace.final_states = tuple(states[p] for p in sorted(states))
    logger.debug("%s on n=%d: %d rounds, %d decisions, %s", algorithm, seq.n,
                 len(trace.rounds), len(trace.decisions), trace.status)
    return trace


def replay(trace, keep_states=True, stop_when_decided=False):
    """Re-execute a trace on its delivered edges; digests must come out identical."""
    again = run(trace.sequence(), trace.algorithm, trace.inputs, trace.params,
                keep_states=keep_states, stop_when_decided=stop_when_decided)
    ours = [rec.digests for rec in trace.rounds]
    theirs = [rec.digests for rec in again.rounds]
    if ours != theirs:
        bad = next(i for i, (a, b) in enumerate(zip(ours, theirs), start=1) if a != b) if \
            len(ours) == len(theirs) else min(len(ours), len(theirs)) + 1
        raise ValueError(f"replay diverges from the recorded trace at round {bad}")
    return again


if __name__ == "__main__":
    seq = GraphSequence.from_edges(2, [[(1, 2)]] * 6)
    t = run(seq, "consensus", [7, 3], SystemParams(2, 1, 1))
    for d in t.decisions:
        print(d)
