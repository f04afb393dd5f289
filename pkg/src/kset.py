# src/kset.py
"""
k-uniform k-set agreement. Processes exchange lock histories: hist[j][r] is the
local estimate of the locks process j learned in round r. A process locks after
detecting D+1 rounds of root stability (looking D rounds back), derives the
lock value from the histories of the root members, and decides once the
stability extends to 2D+1 rounds. No state or message refers to k.
"""
from collections import Counter
from dataclasses import dataclass, field, replace

from .approx import approx_init, approx_outbound, in_stable_root


@dataclass(frozen=True)
class Lock:
    members: frozenset
    v: int
    tau: int  # creation round, 0 for virtual locks

    def sort_key(self):
        return (self.tau, self.v, sorted(self.members))

    def to_json(self):
        return {"members": sorted(self.members), "v": self.v, "tau": self.tau}

    @classmethod
    def from_json(cls, obj):
        return cls(frozenset(obj["members"]), obj["v"], obj["tau"])


class LockHistory:
    """Sparse (process, round) -> frozenset of Lock; only nonempty cells are stored."""

    def __init__(self, cells=None):
        self.cells = dict(cells or {})

    def copy(self):
        return LockHistory(self.cells)

    def get(self, j, r):
        return self.cells.get((j, r), frozenset())

    def add(self, j, r, locks):
        locks = frozenset(locks)
        if locks:
            self.cells[(j, r)] = self.get(j, r) | locks

    def merge(self, other, skip):
        for (x, r), locks in other.cells.items():
            if x != skip:
                self.add(x, r, locks)

    def all_locks(self):
        return frozenset().union(*self.cells.values()) if self.cells else frozenset()

    def known_by(self, j, upto):
        """Union of hist[j][r''] over r'' <= upto."""
        return frozenset().union(*(locks for (x, r), locks in self.cells.items()
                                   if x == j and r <= upto))

    def __eq__(self, other):
        return isinstance(other, LockHistory) and self.cells == other.cells

    def to_json(self):
        return [{"process": j, "round": r, "locks": [L.to_json() for L in sorted(locks, key=Lock.sort_key)]}
                for (j, r), locks in sorted(self.cells.items())]

    @classmethod
    def from_json(cls, cells):
        return cls({(c["process"], c["round"]): frozenset(Lock.from_json(L) for L in c["locks"])
                    for c in cells})


@dataclass
class KSetState:
    id: int
    D: int
    hist: LockHistory
    approx: object
    ell: int = None
    lock: Lock = None
    decision: int = None
    queries: list = field(default_factory=list)

    def to_json(self):
        return {
            "id": self.id,
            "ell": self.ell,
            "lock": self.lock.to_json() if self.lock else None,
            "decision": self.decision,
            "hist": self.hist.to_json(),
            "approx": self.approx.to_json(),
        }


@dataclass(frozen=True)
class KSetMessage:
    sender: int
    hist: LockHistory
    decision: int
    approx: object

    def to_json(self):
        return {"sender": self.sender, "hist": self.hist.to_json(), "decision": self.decision,
                "approx": self.approx.estimate.to_json()}


def ks_init(id, input_value, D):
    hist = LockHistory({(id, 0): frozenset({Lock(frozenset({id}), input_value, 0)})})
    return KSetState(id, D, hist, approx_init(id))


def ks_outbound(state):
    return KSetMessage(state.id, state.hist.copy(), state.decision, approx_outbound(state.approx))


def get_lock(hist, R, r_prime, r):
    if not R:
        raise ValueError("lock needs a nonempty member set")
    if r_prime >= r:
        raise ValueError(f"lock window end {r_prime} must precede round {r}")
    counts = Counter()
    for j in sorted(R):
        counts.update(hist.known_by(j, r_prime))
    if not counts:
        raise ValueError(f"no locks known for {sorted(R)} up to round {r_prime}")
    top = max(counts.values())
    mfrq = [L for L, c in counts.items() if c == top]
    latest = [L for L in mfrq if all(L.tau > o.tau for o in mfrq if o != L)]
    if len(latest) == 1:
        value = latest[0].v
    else:
        value = max(L.v for L in counts)
    return Lock(frozenset(R), value, r)


def _query(state, a, b):
    result = in_stable_root(state.approx, (a, b))
    state.queries.append((a, b, result))
    return result


def ks_step(state, inbound, r):
    state = replace(state, queries=[])
    if state.decision is not None:
        return state, None
    inbound = sorted(inbound, key=lambda m: m.sender)
    adopted = next((m.decision for m in inbound if m.decision is not None), None)
    if adopted is not None:
        state.decision = adopted
        return state, (adopted, "adopted")

    known = state.hist.all_locks()
    hist = state.hist.copy()
    for m in inbound:
        hist.merge(m.hist, skip=state.id)
    hist.add(state.id, r, hist.all_locks() - known)
    state.hist = hist

    D = state.D
    my_root = _query(state, r - 2 * D, r - D)
    if state.ell is None and my_root:
        state.ell = r - 2 * D
        state.lock = get_lock(hist, my_root, state.ell, r)
        hist.add(state.id, r, {state.lock})
    elif state.ell is not None and not my_root:
        state.ell, state.lock = None, None
    elif state.ell is not None and _query(state, state.ell, state.ell + 2 * D):
        state.decision = state.lock.v
        return state, (state.decision, "own")
    return state, None
