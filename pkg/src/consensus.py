# src/consensus.py
# Consensus under eventually-good adversaries: flood (lockRound, x) pairs, lock
# once D+1 rounds of root stability are detected, decide after the lock round
# has been confirmed stable for H more rounds, then flood DECIDE.
from dataclasses import dataclass, field, replace

from .approx import approx_init, approx_outbound, in_stable_root


@dataclass
class ConsensusState:
    id: int
    x: int
    D: int
    H: int
    approx: object
    locked: bool = False
    lock_round: int = 0
    decided: bool = False
    queries: list = field(default_factory=list)  # InStableRoot calls of the last step

    def to_json(self):
        return {
            "id": self.id,
            "x": self.x,
            "locked": self.locked,
            "lock_round": self.lock_round,
            "decided": self.decided,
            "approx": self.approx.to_json(),
        }


@dataclass(frozen=True)
class ConsensusMessage:
    sender: int
    decide: bool
    lock_round: int
    x: int
    approx: object

    def to_json(self):
        body = ["DECIDE", self.x] if self.decide else [self.lock_round, self.x]
        return {"sender": self.sender, "msg": body, "approx": self.approx.estimate.to_json()}


def cons_init(id, input_value, D, H):
    return ConsensusState(id, input_value, D, H, approx_init(id))


def cons_outbound(state):
    if state.decided:
        return ConsensusMessage(state.id, True, None, state.x, approx_outbound(state.approx))
    return ConsensusMessage(state.id, False, state.lock_round, state.x, approx_outbound(state.approx))


def _query(state, a, b):
    result = in_stable_root(state.approx, (a, b))
    state.queries.append((a, b, result))
    return result


def cons_step(state, inbound, r):
    """
    One round of computation; the approximation step for round r must already
    be applied to state.approx. Returns (state, event) with event = (value, via)
    when the process decides in this round.
    """
    state = replace(state, queries=[])
    if state.decided:
        return state, None
    inbound = sorted(inbound, key=lambda m: m.sender)
    decides = [m for m in inbound if m.decide]
    if decides:
        state.x = decides[0].x
        state.decided = True
        return state, (state.x, "adopted")

    # lexical order: lock round first, then value
    state.lock_round, state.x = max([(state.lock_round, state.x)] +
                                    [(m.lock_round, m.x) for m in inbound])
    if _query(state, r - state.D - 1, r - state.D):
        if not state.locked:
            state.locked = True
            state.lock_round = r
        elif _query(state, state.lock_round, state.lock_round + state.H):
            state.decided = True
            return state, (state.x, "own")
    else:
        state.locked = False
    return state, None
