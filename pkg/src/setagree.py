# src/setagree.py
# n-1-set agreement for a known system size n; no network approximation.
from dataclasses import dataclass, replace


@dataclass
class SetAgreeState:
    id: int
    v: int
    n: int
    y: int = None
    terminated: bool = False

    def to_json(self):
        return {"id": self.id, "v": self.v, "y": self.y, "n": self.n, "terminated": self.terminated}


@dataclass(frozen=True)
class SetAgreeMessage:
    sender: int
    v: int
    y: int

    def to_json(self):
        return {"sender": self.sender, "v": self.v, "y": self.y}


def sa_init(id, input_value, n):
    if n < 2:
        raise ValueError("set agreement needs n >= 2")
    return SetAgreeState(id, input_value, n)


def sa_outbound(state):
    return SetAgreeMessage(state.id, state.v, state.y)


def sa_step(state, inbound, r):
    if state.terminated:
        raise ValueError(f"process {state.id} stepped after termination")
    if r > state.n:
        raise ValueError(f"round {r} beyond n={state.n}")
    inbound = sorted(inbound, key=lambda m: m.sender)
    state = replace(state, v=max([state.v] + [m.v for m in inbound]))
    event = None
    if state.y is None:
        adopted = next((m.y for m in inbound if m.y is not None), None)
        if adopted is not None:
            state.y = adopted
            event = (adopted, "adopted")
    if not inbound and state.y is None:
        state.y = state.v
        event = (state.v, "own")
    if r == state.n:
        if state.y is None:
            state.y = state.v
            event = (state.v, "own")
        state.terminated = True
    return state, event
