# src/adversary.py
"""
Feasibility validators for the message adversaries. Each validator returns a
FeasibilityReport instead of raising: infeasibility, too-short prefixes
("undecidable") and exhausted enumeration budgets ("undecided") all show up
as violations.
"""
import logging
from dataclasses import dataclass, field

from .config import SIGMA_CAP
from .dyngraph import (InfluenceIndex, Interval, SystemParams, Vsrc, d_bound_failures,
                       h_bound_failures, influences)

logger = logging.getLogger(__name__)

KINDS = ("good", "stable", "majinf", "stable_majinf", "sigma")


@dataclass(frozen=True)
class AdversarySpec:
    kind: str
    params: SystemParams
    k: int = None
    d: int = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown adversary kind {self.kind!r}")
        if self.d is not None and self.d < 1:
            raise ValueError("d must be >= 1")
        if self.k is not None and not (1 <= self.k <= self.params.n):
            raise ValueError(f"k must lie in 1..{self.params.n}")


@dataclass(frozen=True)
class Violation:
    where: str
    rule: str
    detail: str

    def to_json(self):
        return {"where": self.where, "rule": self.rule, "detail": self.detail}


@dataclass(frozen=True)
class Witness:
    rule: str
    evidence: str

    def to_json(self):
        return {"rule": self.rule, "evidence": self.evidence}


@dataclass
class FeasibilityReport:
    adversary: str
    violations: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    undecided: bool = False

    @property
    def feasible(self):
        return not self.violations

    def violate(self, where, rule, detail):
        self.violations.append(Violation(str(where), rule, detail))

    def witness(self, rule, evidence):
        self.witnesses.append(Witness(rule, evidence))

    def to_json(self):
        return {
            "adversary": self.adversary,
            "feasible": self.feasible,
            "undecided": self.undecided,
            "violations": [v.to_json() for v in self.violations],
            "witnesses": [w.to_json() for w in self.witnesses],
            "notes": list(self.notes),
        }

    def lines(self):
        verdict = "UNDECIDED" if self.undecided else ("FEASIBLE" if self.feasible else "INFEASIBLE")
        out = [f"{self.adversary}: {verdict}"]
        out += [f"  violation {v.rule} @ {v.where}: {v.detail}" for v in self.violations]
        out += [f"  witness {w.rule}: {w.evidence}" for w in self.witnesses]
        out += [f"  note: {n}" for n in self.notes]
        return out


def _fmt(members):
    return "{" + ",".join(map(str, sorted(members))) + "}"


def _check_window(report, seq, d, r_ST):
    end = r_ST + d - 1
    if r_ST < 1 or d < 1:
        raise ValueError("r_ST and d must be >= 1")
    if seq.T < end:
        report.violate(f"[1,{seq.T}]", "prefix",
                       f"undecidable: prefix of {seq.T} rounds does not cover r_ST+d-1={end}")
        return None
    return Interval(r_ST, end)


def _check_h_bounded_vsrcs(report, seq, H):
    short = 0
    for v in seq.vsrcs:
        if len(v) < H:
            short += 1
            continue
        for x, unreached in h_bound_failures(seq, [v], H):
            report.violate(v, "h-bounded", f"x={x}: {_fmt(unreached)} not reached within {H} rounds")
    if short:
        report.notes.append(f"{short} VSRCs shorter than H={H} are H-network-bounded vacuously")


def validate_good(seq, d, H, r_ST):
    report = FeasibilityReport("good")
    window = _check_window(report, seq, d, r_ST)
    for r, roots in enumerate(seq.root_sets, start=1):
        if len(roots) != 1:
            report.violate(f"round {r}", "one-root",
                           f"{len(roots)} root components: {' '.join(map(_fmt, roots))}")
    _check_h_bounded_vsrcs(report, seq, H)
    if window is not None:
        spanning = [v for v in seq.vsrcs if v.interval.a <= window.a and v.interval.b >= window.b]
        if not spanning:
            report.violate(window, "stable-window", "no single VSRC spans the window")
        else:
            v = spanning[0]
            failures = h_bound_failures(seq, [v], H)
            if failures:
                report.violate(window, "stable-window", f"{v} is not {H}-network-bounded")
            else:
                report.witness("stable-window", f"{v} spans {window}")
    logger.debug("validate_good: %d violations", len(report.violations))
    return report


def validate_stable(seq, k, d, D, H, r_ST):
    report = FeasibilityReport("stable")
    window = _check_window(report, seq, d, r_ST)
    for r, roots in enumerate(seq.root_sets, start=1):
        if len(roots) > k:
            report.violate(f"round {r}", "at-most-k-roots", f"{len(roots)} > {k} root components")
    short = 0
    for v in seq.vsrcs:
        if len(v) < D:
            short += 1
            continue
        bad = d_bound_failures(seq, v, D)
        if bad:
            report.violate(v, "d-bounded", f"diameter exceeds {D} at x={bad}")
    if short:
        report.notes.append(f"{short} VSRCs shorter than D={D} are D-bounded vacuously")
    if window is not None:
        spanning = [v for v in seq.vsrcs if v.interval.a <= window.a and v.interval.b >= window.b]
        if not spanning or len(spanning) > k:
            report.violate(window, "stable-window", f"{len(spanning)} VSRCs span the window, need 1..{k}")
        else:
            trimmed = [Vsrc(v.members, window) for v in spanning]
            failures = h_bound_failures(seq, trimmed, H)
            if failures:
                x, unreached = failures[0]
                report.violate(window, "stable-window",
                               f"x={x}: {_fmt(unreached)} not reached within {H} rounds")
            else:
                report.witness("stable-window",
                               f"l={len(spanning)}: " + " ".join(str(v) for v in spanning))
    return report


def validate_majinf(seq, k, D):
    report = FeasibilityReport("majinf")
    index = InfluenceIndex(seq, D)
    if not index.v_decide:
        report.notes.append(f"V_{2 * D + 1} is empty; K is empty")
    for cur, suc in index.relation():
        report.witness("majority-influence", f"{cur} -> {suc}")
    K = index.uninfluenced()
    if len(K) > k:
        report.violate("V_%d" % (2 * D + 1), "uninfluenced",
                       f"|K|={len(K)} > {k}: " + " ".join(map(str, K)))
    else:
        report.witness("uninfluenced", f"K={' '.join(map(str, K)) or '{}'} (|K|={len(K)})")
    return report


def validate_stable_majinf(seq, k, D, H, r_ST, d=None):
    """Conjunction used by the k-set generators: stable(k, 3D+H) and MAJ-INF(k)."""
    stable = validate_stable(seq, k, d or 3 * D + H, D, H, r_ST)
    majinf = validate_majinf(seq, k, D)
    report = FeasibilityReport("stable_majinf")
    for part in (stable, majinf):
        report.violations += part.violations
        report.witnesses += part.witnesses
        report.notes += part.notes
    return report


def validate_sigma(seq, cap=SIGMA_CAP):
    report = FeasibilityReport("sigma")
    singles = {p: [v for v in seq.vsrcs if v.members == frozenset({p})] for p in range(1, seq.n + 1)}
    missing = [p for p, vs in singles.items() if not vs]
    if missing:
        report.witness("no-selection", f"processes {missing} are never singleton roots")
        return report

    nodes = [v for p in sorted(singles, key=lambda p: len(singles[p])) for v in singles[p]]
    order = sorted(singles, key=lambda p: len(singles[p]))
    conflict = {}
    for u in nodes:
        for v in nodes:
            if u.precedes(v) and influences(seq, u, v):
                conflict.setdefault(u, set()).add(v)
                conflict.setdefault(v, set()).add(u)

    explored = 0
    chosen = []

    def search(i):
        nonlocal explored
        if i == len(order):
            return True
        for cand in singles[order[i]]:
            explored += 1
            if explored > cap:
                raise OverflowError
            if any(c in conflict.get(cand, ()) for c in chosen):
                continue
            chosen.append(cand)
            if search(i + 1):
                return True
            chosen.pop()
        return False

    try:
        found = search(0)
    except OverflowError:
        report.undecided = True
        report.violate("selections", "undecided", f"more than {cap} partial selections explored")
        return report
    if found:
        report.violate("selections", "uninfluenced-selection",
                       "no influence among " + " ".join(map(str, sorted(chosen, key=Vsrc.sort_key))))
    else:
        report.witness("selections", f"every selection contains an influence pair ({explored} explored)")
    return report


VALIDATORS = {
    "good": validate_good,
    "stable": validate_stable,
    "majinf": validate_majinf,
    "stable_majinf": validate_stable_majinf,
    "sigma": validate_sigma,
}

REQUIRED = {
    "good": ("d", "H", "r_ST"),
    "stable": ("k", "d", "D", "H", "r_ST"),
    "majinf": ("k", "D"),
    "stable_majinf": ("k", "D", "H", "r_ST"),
    "sigma": (),
}


def _spec_value(spec, name):
    return getattr(spec, name) if name in ("k", "d") else getattr(spec.params, name)


def validate(seq, spec, cap=SIGMA_CAP):
    """Run the validator named by spec.kind with the parameters the spec carries."""
    if spec.params.n != seq.n:
        raise ValueError(f"adversary for n={spec.params.n} applied to a sequence with n={seq.n}")
    missing = [name for name in REQUIRED[spec.kind] if _spec_value(spec, name) is None]
    if missing:
        raise ValueError(f"{spec.kind} adversary needs {', '.join(missing)}")
    p = spec.params
    if spec.kind == "good":
        return validate_good(seq, spec.d, p.H, p.r_ST)
    if spec.kind == "stable":
        return validate_stable(seq, spec.k, spec.d, p.D, p.H, p.r_ST)
    if spec.kind == "majinf":
        return validate_majinf(seq, spec.k, p.D)
    if spec.kind == "stable_majinf":
        return validate_stable_majinf(seq, spec.k, p.D, p.H, p.r_ST, spec.d)
    return validate_sigma(seq, cap)
