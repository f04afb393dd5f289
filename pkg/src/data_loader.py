# src/data_loader.py

from pathlib import Path
import hashlib
import json

from .config import DATA_DIR
from .dyngraph import GraphSequence

BASE = Path(DATA_DIR)
META_KEYS = ("n", "k", "d", "D", "H", "r_ST", "alpha", "seed")


def canonical_dumps(obj):
    """Sorted keys, no whitespace: the form used for digests and byte-stable files."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj):
    return hashlib.sha256(canonical_dumps(obj).encode("utf8")).hexdigest()


def make_metadata(adversary, **params):
    return {"adversary": adversary, "params": {k: params.get(k) for k in META_KEYS}}


def sequence_to_json(seq):
    obj = {
        "n": seq.n,
        "continuation": seq.continuation,
        "rounds": [[list(e) for e in g.sorted_edges()] for g in seq.rounds],
    }
    if seq.metadata:
        obj["metadata"] = seq.metadata
    return obj


def sequence_from_json(obj):
    try:
        n = int(obj["n"])
        rounds = [[(int(p), int(q)) for p, q in edges] for edges in obj["rounds"]]
    except (KeyError, TypeError, ValueError) as e:
        raise ValueError(f"malformed graph sequence: {e}") from e
    return GraphSequence.from_edges(n, rounds, obj.get("continuation", "none"), obj.get("metadata"))


def write_json(obj, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_dumps(obj) + "\n", encoding="utf8")
    return path


def read_json(path):
    path = Path(path)
    if not path.exists():
        raise ValueError(f"no such file: {path}")
    try:
        return json.loads(path.read_text(encoding="utf8"))
    except json.JSONDecodeError as e:
        raise ValueError(f"{path} is not valid JSON: {e}") from e


def save_sequence(seq, path):
    return write_json(sequence_to_json(seq), path)


def load_sequence(path):
    return sequence_from_json(read_json(path))


def save_trace(trace, path):
    return write_json(trace.to_json(), path)


def load_trace(path):
    from .sim import Trace
    return Trace.from_json(read_json(path))


if __name__ == "__main__":
    for p in sorted(BASE.glob("*.json")):
        seq = load_sequence(p)
        print(p.name, "n:", seq.n, "rounds:", seq.T, "continuation:", seq.continuation)
