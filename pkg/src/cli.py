# src/cli.py
"""
Command-line frontend:

    python -m src gen --adversary good --n 5 --d 22 --rst 8 --seed 1 --out s.json
    python -m src validate --adversary good --d 22 --h 4 --rst 8 s.json
    python -m src run --algo consensus --inputs 7,3 --D 1 --H 1 s2.json --trace t.json
    python -m src check --property agreement --k 1 t.json
    python -m src analyze --D 1 s.json
    python -m src scenario --name static_star --n 5 --rounds 10
    python -m src experiment --name consensus_liveness --count 20

Exit codes: 0 success / property holds, 1 infeasible / violated, 2 usage errors.
"""
import argparse
import inspect
import logging
import sys

from .adversary import KINDS, AdversarySpec, validate
from .config import SIGMA_CAP, setup_logging
from .data_loader import canonical_dumps, load_sequence, load_trace, save_sequence, save_trace, sequence_to_json
from .dyngraph import InfluenceIndex, SystemParams, d_bound_failures, h_bound_failures
from .eval import PROPERTIES, check
from .generators import (STYLES, VARIANTS, gen_good_sequence, gen_stable_majinf_sequence, random_sequence,
                         random_single_root_sequence)
from .run_eval import EXPERIMENTS, failures, run_experiment
from .scenarios import SCENARIOS, scenario
from .sim import ALGORITHMS, run

logger = logging.getLogger(__name__)

OK, VIOLATED, USAGE = 0, 1, 2


def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _system_flags(p, rst=True):
    p.add_argument("--n", type=int, help="Number of processes.")
    p.add_argument("--k", type=int, help="Number of allowed decision values / root components.")
    p.add_argument("--d", type=int, help="Length of the stability window.")
    p.add_argument("--D", type=int, help="Dynamic causal diameter bound.")
    p.add_argument("--H", "--h", dest="H", type=int, help="Dynamic network causal diameter bound.")
    if rst:
        p.add_argument("--rst", type=int, help="Round r_ST where the stability window starts.")


def build_parser():
    ap = argparse.ArgumentParser(prog="python -m src",
                                 description="Directed dynamic networks: adversaries, agreement algorithms, checks.")
    ap.add_argument("--log-level", default=None, help="Logging level (default: LOG_LEVEL env or INFO).")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("gen", help="Generate an adversary-feasible graph sequence.")
    p.add_argument("--adversary", choices=["good", "stable_majinf", "random", "one_root"], required=True)
    _system_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--style", choices=STYLES, default="random")
    p.add_argument("--alpha", type=float, default=0.0, help="Target vertex expansion for --style expander.")
    p.add_argument("--variant", choices=VARIANTS, default="partition")
    p.add_argument("--rounds", type=int, default=20, help="Length of random / one_root sequences.")
    p.add_argument("--out", required=True, help="Output JSON path.")

    p = sub.add_parser("validate", help="Check a sequence against a message adversary.")
    p.add_argument("--adversary", choices=KINDS, required=True)
    _system_flags(p)
    p.add_argument("--cap", type=int, default=SIGMA_CAP, help="Selection cap of the sigma validator.")
    p.add_argument("path")

    p = sub.add_parser("run", help="Simulate an algorithm on a sequence and write the trace.")
    p.add_argument("--algo", choices=sorted(ALGORITHMS), required=True)
    p.add_argument("--inputs", type=_ints, required=True, help='Comma-separated inputs, e.g. "7,3".')
    _system_flags(p)
    p.add_argument("--messages", action="store_true", help="Record every message in the trace.")
    p.add_argument("--all-rounds", action="store_true", help="Keep running after every process decided.")
    p.add_argument("--trace", required=True, help="Output trace path.")
    p.add_argument("path")

    p = sub.add_parser("check", help="Evaluate properties on a trace.")
    p.add_argument("--property", action="append", choices=PROPERTIES, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--bound", type=int, default=None, help="Latest admissible decision round.")
    p.add_argument("--seq", default=None, help="Ground-truth sequence (default: delivered edges of the trace).")
    p.add_argument("path")

    p = sub.add_parser("analyze", help="Print VSRCs, boundedness and the influence relation.")
    p.add_argument("--D", type=int, default=None)
    p.add_argument("--H", "--h", dest="H", type=int, default=None)
    p.add_argument("path")

    p = sub.add_parser("scenario", help="Materialize a fixed adversarial construction.")
    p.add_argument("--name", choices=sorted(SCENARIOS), required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--T", type=int, help="Ring phase length / lossy cut round / star length.")
    p.add_argument("--kappa", type=int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--rst", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--phase-len", type=int)
    p.add_argument("--center", type=int)
    p.add_argument("--variant", default=None)
    p.add_argument("--pattern", default=None)
    p.add_argument("--out", default=None, help="Output path (default: print JSON).")

    p = sub.add_parser("experiment", help="Run a batch experiment and print its summary.")
    p.add_argument("--name", choices=sorted(EXPERIMENTS), required=True)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None, help="Write all rows as CSV.")
    return ap


def _from_metadata(args, seq):
    """Fill unset system flags from the parameters recorded by the generator."""
    params = (seq.metadata or {}).get("params", {})
    for flag, key in (("n", "n"), ("k", "k"), ("d", "d"), ("D", "D"), ("H", "H"), ("rst", "r_ST")):
        if getattr(args, flag, None) is None and params.get(key) is not None:
            setattr(args, flag, params[key])


def _require(args, *flags):
    missing = [f for f in flags if getattr(args, f, None) is None]
    if missing:
        raise ValueError("missing flags: " + ", ".join("--" + f for f in missing))


def cmd_gen(args):
    if args.adversary == "good":
        _require(args, "n", "d", "rst")
        seq = gen_good_sequence(args.n, args.d, args.rst, args.seed, args.style, args.alpha)
    elif args.adversary == "stable_majinf":
        _require(args, "n", "k", "D", "rst")
        seq = gen_stable_majinf_sequence(args.n, args.k, args.D, args.rst, args.seed, args.variant)
    elif args.adversary == "random":
        _require(args, "n")
        seq = random_sequence(args.n, args.rounds, args.seed)
    else:
        _require(args, "n")
        seq = random_single_root_sequence(args.n, args.rounds, args.seed)
    save_sequence(seq, args.out)
    print(f"Wrote: {args.out} ({seq.T} rounds, n={seq.n})")
    return OK


def cmd_validate(args):
    seq = load_sequence(args.path)
    _from_metadata(args, seq)
    spec = AdversarySpec(args.adversary, SystemParams(seq.n, args.D, args.H, args.rst), k=args.k, d=args.d)
    report = validate(seq, spec, args.cap)
    print("\n".join(report.lines()))
    return OK if report.feasible else VIOLATED


def cmd_run(args):
    seq = load_sequence(args.path)
    _from_metadata(args, seq)
    params = SystemParams(seq.n, args.D, args.H, args.rst)
    trace = run(seq, args.algo, args.inputs, params, record_messages=args.messages,
                stop_when_decided=not args.all_rounds)
    save_trace(trace, args.trace)
    for d in trace.decisions:
        print(f"p{d.process} decides {d.value} in round {d.round} ({d.via})")
    print(f"Wrote: {args.trace} ({len(trace.rounds)} rounds, {trace.status})")
    return OK


def cmd_check(args):
    trace = load_trace(args.path)
    seq = load_sequence(args.seq) if args.seq else None
    status = OK
    for name in args.property:
        report = check(name, trace, seq, k=args.k, bound=args.bound)
        print(report.line())
        if not report.holds:
            status = VIOLATED
    return status


def cmd_analyze(args):
    seq = load_sequence(args.path)
    print(f"n={seq.n} rounds={seq.T} continuation={seq.continuation}")
    for r, roots in enumerate(seq.root_sets, start=1):
        print(f"round {r}: roots " + " ".join("{" + ",".join(map(str, sorted(R))) + "}" for R in roots))
    for v in seq.vsrcs:
        notes = []
        if args.D is not None:
            bad = d_bound_failures(seq, v, args.D)
            notes.append(f"{args.D}-bounded" if not bad else f"diameter > {args.D} at {bad}")
        if args.H is not None:
            bad = h_bound_failures(seq, [v], args.H)
            notes.append(f"{args.H}-network-bounded" if not bad else f"h > {args.H} at {[x for x, _ in bad]}")
        print(f"VSRC {v} length {len(v)}" + ("  " + "; ".join(notes) if notes else ""))
    if args.D is not None:
        index = InfluenceIndex(seq, args.D)
        for cur, suc in index.relation():
            print(f"majority influence {cur} -> {suc} (IS={sorted(index.influence_set(cur, suc))})")
        K = index.uninfluenced()
        print(f"K = {' '.join(map(str, K)) or '{}'} (|K|={len(K)})")
    return OK


def _scenario_params(args):
    values = {"n": args.n, "k": args.k, "T": args.T, "kappa": args.kappa, "rounds": args.rounds,
              "r_ST": args.rst, "ell": args.ell, "phase_len": args.phase_len, "center": args.center,
              "variant": args.variant, "pattern": args.pattern}
    if args.name == "static_star" and values["T"] is None:
        values["T"] = args.rounds
    accepted = inspect.signature(SCENARIOS[args.name]).parameters
    return {k: v for k, v in values.items() if k in accepted and v is not None}


def cmd_scenario(args):
    try:
        seq = scenario(args.name, **_scenario_params(args))
    except TypeError as e:
        raise ValueError(f"scenario {args.name}: {e}") from e
    if args.out:
        save_sequence(seq, args.out)
        print(f"Wrote: {args.out} ({seq.T} rounds, n={seq.n})")
    else:
        print(canonical_dumps(sequence_to_json(seq)))
    return OK


def cmd_experiment(args):
    df, table = run_experiment(args.name, args.count, args.seed, args.jobs)
    print(table.to_string(index=False))
    if args.out:
        df.to_csv(args.out, index=False)
        print(f"Wrote: {args.out}")
    bad = failures(df)
    if len(bad):
        print(bad.to_string(index=False))
        return VIOLATED
    return OK


COMMANDS = {
    "gen": cmd_gen,
    "validate": cmd_validate,
    "run": cmd_run,
    "check": cmd_check,
    "analyze": cmd_analyze,
    "scenario": cmd_scenario,
    "experiment": cmd_experiment,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    setup_logging(args.log_level)
    try:
        return COMMANDS[args.verb](args)
    except ValueError as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return USAGE
