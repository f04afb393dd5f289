# src/eval.py
# Trace-level property checks. Each check returns a PropertyReport; state-level
# checks replay the trace when it was loaded from disk without states.
from dataclasses import dataclass

from .approx import in_stable_root
from .dyngraph import Interval, is_d_bounded
from .kset import ks_outbound
from .sim import replay


@dataclass(frozen=True)
class PropertyReport:
    property: str
    holds: bool
    counterexample: object = None
    detail: str = ""

    def __post_init__(self):
        if self.holds != (self.counterexample is None):
            raise ValueError("a report holds exactly when it has no counterexample")

    def to_json(self):
        return {"property": self.property, "holds": self.holds,
                "counterexample": self.counterexample, "detail": self.detail}

    def line(self):
        verdict = "HOLDS" if self.holds else "VIOLATED"
        extra = f" counterexample={self.counterexample}" if self.counterexample is not None else ""
        return f"{self.property}: {verdict}{extra} {self.detail}".rstrip()


def _report(name, bad, detail=""):
    return PropertyReport(name, not bad, bad or None, detail)


def _event(d):
    return [d.process, d.round, d.value]


def _with_states(trace):
    return trace if trace.has_states() else replay(trace, keep_states=True)


def _states_at(trace, r):
    """Per-process states after round r (index p-1), or None if r was not executed."""
    if 1 <= r <= len(trace.rounds):
        return trace.rounds[r - 1].states
    return None


def _decided_by(trace, p, r):
    d = trace.decision_of(p)
    return d is not None and d.round <= r


def check_agreement(trace, k=1):
    first = {}
    for d in trace.decisions:
        first.setdefault(d.value, d)
    bad = [_event(d) for d in first.values()] if len(first) > k else None
    return _report("agreement", bad, f"{len(first)} distinct values, k={k}")


def check_validity(trace):
    bad = [_event(d) for d in trace.decisions if d.value not in trace.inputs]
    return _report("validity", bad)


def check_termination(trace, bound=None):
    missing = [p for p in range(1, trace.n + 1) if trace.decision_of(p) is None]
    late = [_event(d) for d in trace.decisions if bound is not None and d.round > bound]
    bad = None
    if missing or late:
        bad = {"undecided": missing, "late": late}
    return _report("termination", bad, f"bound={bound}" if bound is not None else "")


def check_lock_provenance(trace, seq, D, H):
    if trace.algorithm != "consensus":
        raise ValueError("lock provenance applies to consensus traces only")
    bad = []
    for d in trace.decisions:
        if d.via != "own":
            continue
        ell = d.lock_round
        lo, hi = ell - D - 1, ell + H
        backed = any(d.process in v.members and v.interval.a <= lo and v.interval.b >= hi
                     for v in seq.vsrcs)
        if not backed or not (hi <= d.round <= hi + D):
            bad.append({"event": _event(d), "lock_round": ell, "window": [lo, hi]})
    return _report("lock_provenance", bad)


def check_underapproximation(trace, seq):
    """Every labeled estimate edge exists in that round, together with the receiver's full in-neighborhood."""
    trace = _with_states(trace)
    bad, seen = [], set()
    for rec in trace.rounds:
        for s in rec.states:
            est = getattr(s, "approx", None)
            if est is None:
                raise ValueError(f"{trace.algorithm} keeps no network estimate")
            for (v, w), _ in sorted(est.labels.items()):
                for t in est.rounds_of(v, w):
                    g = seq.graph(t)
                    if (v, w) not in g.edges:
                        problem = "edge not in graph"
                    elif {x for x in g.in_neighbors(w) if t in est.rounds_of(x, w)} != set(g.in_neighbors(w)):
                        problem = "incomplete in-neighborhood"
                    else:
                        continue
                    # each defect once, at the first round it shows up
                    if (s.id, t, v, w, problem) not in seen:
                        seen.add((s.id, t, v, w, problem))
                        bad.append([rec.round, s.id, t, [v, w], problem])
    return _report("underapproximation", bad)


def check_in_stable_root(trace, seq, D):
    """
    Soundness: a nonempty answer is a root component of every queried round
    and contains the caller. Completeness: for every D-bounded VSRC longer
    than D, each member answers the query [a, b-D] with R at the end of round b.
    """
    if trace.algorithm == "setagree" or D is None:
        raise ValueError("InStableRoot checks need an algorithm with a network estimate and D")
    trace = _with_states(trace)
    bad = []
    for rec in trace.rounds:
        for p, a, b, result in rec.queries:
            if not result:
                continue
            R = frozenset(result)
            if p not in R or any(R not in seq.root_sets[t - 1] for t in range(a, b + 1)):
                bad.append({"kind": "unsound", "round": rec.round, "process": p,
                            "query": [a, b], "result": result})
    for v in seq.vsrcs:
        a, b = v.interval.a, v.interval.b
        states = _states_at(trace, b)
        if len(v) <= D or states is None or not is_d_bounded(seq, v, D):
            continue
        for p in sorted(v.members):
            got = in_stable_root(states[p - 1].approx, Interval(a, b - D))
            if got != v.members:
                bad.append({"kind": "incomplete", "vsrc": str(v), "process": p, "result": sorted(got)})
    return _report("instableroot", bad)


def _fresh_bounded(seq, D, longer_than):
    return [v for v in seq.vsrcs if len(v) > longer_than and is_d_bounded(seq, v, D)]


def check_history_consistency(trace, seq, D):
    if trace.algorithm != "kset":
        raise ValueError("history consistency applies to kset traces only")
    trace = _with_states(trace)
    bad = []
    for v in _fresh_bounded(seq, D, D):
        a, b = v.interval.a, v.interval.b
        for x in range(a + D, b + 1):
            states = _states_at(trace, x)
            if states is None or any(_decided_by(trace, p, x) for p in v.members):
                break
            for i in v.members:
                for j in v.members:
                    if states[i - 1].hist.known_by(j, a) != states[j - 1].hist.known_by(j, a):
                        bad.append({"vsrc": str(v), "round": x, "i": i, "j": j})
    return _report("history", bad)


def check_lock_uniformity(trace, seq, D):
    """Members of a D-bounded VSRC of length >= 2D+1 create one common lock in round a+2D."""
    if trace.algorithm != "kset":
        raise ValueError("lock uniformity applies to kset traces only")
    trace = _with_states(trace)
    bad = []
    for v in _fresh_bounded(seq, D, 2 * D):
        r = v.interval.a + 2 * D
        states = _states_at(trace, r)
        if states is None:
            continue
        locks = {states[p - 1].lock for p in v.members
                 if not _decided_by(trace, p, r - 1) and states[p - 1].lock is not None
                 and states[p - 1].lock.tau == r}
        if len(locks) > 1:
            bad.append({"vsrc": str(v), "round": r, "locks": [L.to_json() for L in locks]})
    return _report("lock_uniformity", bad)


def check_vsrc_decision_timing(trace, seq, D):
    """Members of a D-bounded VSRC of length > 3D starting at a have decided by a+3D."""
    bad = []
    for v in _fresh_bounded(seq, D, 3 * D):
        deadline = v.interval.a + 3 * D
        if deadline > len(trace.rounds) and trace.status != "complete":
            continue
        late = [p for p in sorted(v.members) if not _decided_by(trace, p, deadline)]
        if late:
            bad.append({"vsrc": str(v), "deadline": deadline, "late": late})
    return _report("decision_timing", bad)


def check_set_termination(trace):
    if trace.algorithm != "setagree":
        raise ValueError("set termination applies to setagree traces only")
    bad = None
    missing = [p for p in range(1, trace.n + 1)
               if trace.decision_of(p) is None or trace.decision_of(p).round > trace.n]
    if len(trace.rounds) != trace.n or missing:
        bad = {"rounds": len(trace.rounds), "undecided": missing}
    return _report("set_termination", bad)


def _keys(obj, out):
    if isinstance(obj, dict):
        for key, value in obj.items():
            out.add(key)
            _keys(value, out)
    elif isinstance(obj, list):
        for value in obj:
            _keys(value, out)
    return out


def check_k_uniform(trace):
    """No kset state or message field is named after k."""
    if trace.algorithm != "kset":
        raise ValueError("k-uniformity applies to kset traces only")
    trace = _with_states(trace)
    keys = set()
    for s in trace.rounds[-1].states if trace.rounds else ():
        _keys(s.to_json(), keys)
        _keys(ks_outbound(s).to_json(), keys)
    bad = sorted(x for x in keys if x.lower() == "k") or None
    return _report("k_uniform", bad)


PROPERTIES = ("agreement", "validity", "termination", "lock_provenance", "underapprox",
              "instableroot", "history", "lock_uniformity", "decision_timing",
              "set_termination", "k_uniform")


def check(name, trace, seq=None, k=1, bound=None):
    """Dispatch by property name; seq defaults to the delivered edges of the trace."""
    seq = seq or trace.sequence()
    p = trace.params
    table = {
        "agreement": lambda: check_agreement(trace, k),
        "validity": lambda: check_validity(trace),
        "termination": lambda: check_termination(trace, bound),
        "lock_provenance": lambda: check_lock_provenance(trace, seq, p.D, p.H),
        "underapprox": lambda: check_underapproximation(trace, seq),
        "instableroot": lambda: check_in_stable_root(trace, seq, p.D),
        "history": lambda: check_history_consistency(trace, seq, p.D),
        "lock_uniformity": lambda: check_lock_uniformity(trace, seq, p.D),
        "decision_timing": lambda: check_vsrc_decision_timing(trace, seq, p.D),
        "set_termination": lambda: check_set_termination(trace),
        "k_uniform": lambda: check_k_uniform(trace),
    }
    if name not in table:
        raise ValueError(f"unknown property {name!r}; choose from {', '.join(PROPERTIES)}")
    return table[name]()
