# src/scenarios.py
# Fixed adversarial graph sequences from the impossibility constructions.
# Every fixture is deterministic; process ids are 1-based.
import math

from .data_loader import make_metadata
from .dyngraph import GraphSequence

LOSSY_PATTERN = "bfr"  # both edges, forward only, reverse only


def _line(order):
    return [(v, w) for v, w in zip(order, order[1:])]


def _seq(n, rounds, name, /, **params):
    meta = make_metadata("scenario", n=n)
    meta["scenario"] = name
    meta["scenario_params"] = params
    return GraphSequence.from_edges(n, rounds, metadata=meta)


def static_star(n, T, center=1):
    if not 1 <= center <= n:
        raise ValueError(f"center {center} outside 1..{n}")
    edges = [(center, q) for q in range(1, n + 1) if q != center]
    return _seq(n, [edges] * T, "static_star", T=T, center=center)


def line_reversal(n, kappa, T=None):
    """Line p1 -> ... -> pn for rounds 1..kappa, the reversed line afterwards."""
    if n < 2 or kappa < 1:
        raise ValueError("line_reversal needs n >= 2 and kappa >= 1")
    T = T or kappa + n
    forward = _line(list(range(1, n + 1)))
    backward = _line(list(range(n, 0, -1)))
    rounds = [forward if r <= kappa else backward for r in range(1, T + 1)]
    return _seq(n, rounds, "line_reversal", kappa=kappa, T=T)


RING_VARIANTS = ("base", "cut_p", "cut_q")


def ring_ids(T):
    """Process roles of the ring construction on n = 2T+3 processes."""
    chain_p = list(range(1, T + 2))              # p ... t
    chain_q = list(range(T + 2, 2 * T + 3))      # q ... s
    return {"p": chain_p[0], "t": chain_p[-1], "q": chain_q[0], "s": chain_q[-1],
            "r": 2 * T + 3, "chain_p": chain_p, "chain_q": chain_q}


def ring_split(T, rounds=None, variant="base"):
    """
    A unidirectional ring for the first T rounds, then r alone feeds the chain
    of q and the reversed chain of p. cut_p drops s->p and cut_q drops r->q
    during the ring phase.
    """
    if T < 1:
        raise ValueError("ring_split needs T >= 1")
    if variant not in RING_VARIANTS:
        raise ValueError(f"unknown ring_split variant {variant!r}")
    ids = ring_ids(T)
    n = 2 * T + 3
    rounds = rounds or 2 * T + 3
    ring = _line(ids["chain_p"]) + _line(ids["chain_q"]) + [(ids["t"], ids["r"])]
    if variant != "cut_p":
        ring.append((ids["s"], ids["p"]))
    if variant != "cut_q":
        ring.append((ids["r"], ids["q"]))
    split = ([(ids["r"], ids["q"]), (ids["r"], ids["t"])] + _line(ids["chain_q"]) +
             _line(ids["chain_p"][::-1]))
    seq_rounds = [ring if r <= T else split for r in range(1, rounds + 1)]
    return _seq(n, seq_rounds, "ring_split", T=T, rounds=rounds, variant=variant)


def lossy_link(T, pattern=LOSSY_PATTERN, rounds=None):
    """Two processes linked at least one way before round T, disconnected from T on."""
    if T < 1 or not pattern or set(pattern) - set(LOSSY_PATTERN):
        raise ValueError(f"lossy_link needs T >= 1 and a pattern over {LOSSY_PATTERN!r}")
    shapes = {"b": [(1, 2), (2, 1)], "f": [(1, 2)], "r": [(2, 1)]}
    rounds = rounds or 2 * T
    seq_rounds = [shapes[pattern[(r - 1) % len(pattern)]] if r < T else []
                  for r in range(1, rounds + 1)]
    return _seq(2, seq_rounds, "lossy_link", T=T, pattern=pattern, rounds=rounds)


def singleton_partitions(n, k, r_ST, ell=None, rounds=None):
    """
    p1..p(k-1) stay isolated. The remaining processes have a single root that
    changes every round, except during [r_ST, r_ST+ell-1] where they form a
    line headed by p_k.
    """
    if k < 1 or n < k + 2:
        raise ValueError(f"singleton_partitions needs k >= 1 and n >= k+2, got n={n} k={k}")
    ell = ell if ell is not None else n - k - 1
    if ell < 1 or r_ST < 1:
        raise ValueError("ell and r_ST must be >= 1")
    rest = list(range(k, n + 1))
    m = len(rest)
    rounds = rounds or r_ST + ell + m
    seq_rounds = []
    for r in range(1, rounds + 1):
        if r_ST <= r < r_ST + ell:
            seq_rounds.append(_line(rest))
        else:
            head = (r % (m - 1)) + 1
            seq_rounds.append(_line(rest[head:] + rest[:head]))
    return _seq(n, seq_rounds, "singleton_partitions", k=k, r_ST=r_ST, ell=ell, rounds=rounds)


def phase_groups(n, k):
    """Pairs D_i of the phase construction, the odd singleton, {p_(k+1)} and the rest."""
    if k < 2 or n < k + 1:
        raise ValueError(f"phase_decider needs k >= 2 and n >= k+1, got n={n} k={k}")
    pairs = [(2 * i + 1, 2 * i + 2) for i in range(k // 2)]
    odd = [k] if k % 2 else []
    return pairs, odd, k + 1, list(range(k + 2, n + 1))


def phase_decider(n, k, phase_len):
    """
    Initial phase: p_(k+1) (and p_k for odd k) is an isolated root; every pair
    is linked lossily. Phase i drops the link inside pair i. Groups whose phase
    is over get an in-edge from the first member of the earliest pending pair,
    so no round has more than ceil(k/2)+1 roots. A star from p1 follows the last phase.
    """
    if phase_len < 1:
        raise ValueError("phase_len must be >= 1")
    pairs, odd, solo, rest = phase_groups(n, k)
    phases = 1 + len(pairs)
    shapes = {"b": lambda a, b: [(a, b), (b, a)], "f": lambda a, b: [(a, b)], "r": lambda a, b: [(b, a)]}
    seq_rounds = []
    for phase in range(phases):
        finished = [solo] + odd if phase >= 1 else []
        for a, b in pairs[: max(phase - 1, 0)]:
            finished += [a, b]
        pending = pairs[max(phase - 1, 0):]
        hub = pending[0][0]
        for step in range(phase_len):
            r = len(seq_rounds) + 1
            edges = []
            for i, (a, b) in enumerate(pending):
                if not (phase >= 1 and i == 0):
                    edges += shapes[LOSSY_PATTERN[(r - 1) % 3]](a, b)
            edges += [(hub, q) for q in finished + rest if q != hub]
            seq_rounds.append(edges)
    star = [(1, q) for q in range(2, n + 1)]
    seq_rounds += [star] * phase_len
    seq = _seq(n, seq_rounds, "phase_decider", k=k, phase_len=phase_len)
    seq.metadata["root_limit"] = math.ceil(k / 2) + 1
    return seq


def lost_decide(rounds=7):
    """
    Two processes: {p1} is a root in rounds 1-4 but reaches p2 only in rounds 1
    and 3; p2 reaches p1 once in round 5, then both stay isolated. {p1} is not
    1-network-bounded, so consensus with D=H=1 decides twice.
    """
    if rounds < 7:
        raise ValueError("lost_decide needs rounds >= 7")
    pattern = [[(1, 2)], [], [(1, 2)], [], [(2, 1)]]
    return _seq(2, pattern + [[]] * (rounds - len(pattern)), "lost_decide", rounds=rounds)


SCENARIOS = {
    "static_star": static_star,
    "line_reversal": line_reversal,
    "ring_split": ring_split,
    "lossy_link": lossy_link,
    "singleton_partitions": singleton_partitions,
    "phase_decider": phase_decider,
    "lost_decide": lost_decide,
}


def scenario(name, **params):
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    return SCENARIOS[name](**params)


if __name__ == "__main__":
    for name, params in [("static_star", {"n": 5, "T": 3}), ("line_reversal", {"n": 4, "kappa": 3}),
                         ("ring_split", {"T": 2}), ("phase_decider", {"n": 6, "k": 4, "phase_len": 2})]:
        seq = scenario(name, **params)
        print(name, "n:", seq.n, "rounds:", seq.T, "roots:", [len(r) for r in seq.root_sets])
