"""Command matrix shared by the CLI golden tests and the determinism check."""

import os
import subprocess
import sys
from pathlib import Path

from ontopret.scenarios import DATA_DIR

GOLDEN = Path(__file__).parent / "golden"

# (name, argv template, expected exit code, output files that must be golden-equal)
MATRIX = [
    ("validate-schema", ["validate", "{data}/ontopret.ttl"], 0, []),
    ("validate-kitting", ["validate", "{data}/kitting.ttl", "--tbox", "builtin"], 0, []),
    ("validate-poker", ["validate", "{data}/poker.ttl", "--tbox", "builtin"], 0, []),
    ("materialize-kitting", ["materialize", "{data}/kitting.ttl", "--tbox", "builtin", "-o", "{out}/kitting_closed.ttl"],
     0, ["kitting_closed.ttl"]),
    ("materialize-skolem", ["materialize", "{data}/poker.ttl", "--tbox", "builtin", "--skolemize",
                            "-o", "{out}/poker_skolem.ttl"], 0, ["poker_skolem.ttl"]),
    ("simulate-skip", ["simulate", "--scenario", "kitting", "--trace", "{data}/traces/kitting_skip.json",
                       "--report", "{out}/skip.json", "--cq", "CQ1", "--cq", "CQ3", "--cq", "CQ5",
                       "--kb-out", "{out}/skip.ttl", "--figure", "{out}/skip.png"], 0, ["skip.json", "skip.ttl"]),
    ("simulate-conformant", ["simulate", "--scenario", "kitting", "--trace", "{data}/traces/kitting_conformant.json",
                             "--report", "{out}/conformant.json"], 0, ["conformant.json"]),
    ("simulate-poker", ["simulate", "--scenario", "poker", "--trace", "{data}/traces/poker_eye_contact.json",
                        "--report", "{out}/poker.json", "--cq", "CQ2", "--cq", "CQ4", "--cq", "CQ6",
                        "--kb-out", "{out}/poker.ttl"], 0, ["poker.json"]),
    ("query-cq1", ["query", "{out}/skip.ttl", "--cq", "CQ1"], 0, []),
    ("query-cq6-json", ["query", "{out}/poker.ttl", "--cq", "CQ6", "--format", "json"], 0, []),
    ("query-pattern", ["query", "{data}/kitting.ttl", "--tbox", "builtin", "--pattern", "{golden}/roles.rq"], 0, []),
    ("explain-lapse", ["explain", "{golden}/deviation.ttl", "--tbox", "builtin",
                       "--assertion", "ontopret:i1 a ontopret:Interpretation"], 0, []),
    ("explain-closed", ["explain", "{out}/skip.ttl", "--assertion", "ontopret:KittingScenario_i0 a ontopret:Contradiction"],
     0, []),
    ("explain-inverse", ["explain", "{data}/kitting.ttl", "--tbox", "builtin",
                         "--assertion", "ontopret:PlaceKitOnTable ontopret:hasPreviousStep ontopret:RetrieveItemB"], 0, []),
]


def render(argv, out):
    return [a.format(data=DATA_DIR, out=out, golden=GOLDEN) for a in argv]


def run_cli(argv, hash_seed="0"):
    env = dict(os.environ, PYTHONHASHSEED=hash_seed, MPLBACKEND="Agg")
    return subprocess.run([sys.executable, "-m", "ontopret.cli", *argv], capture_output=True, env=env)


def run_matrix(out, hash_seed="0"):
    """Run every matrix command in order; returns {name: (exit, stdout bytes, {file: bytes})}."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    results = {}
    for name, argv, _code, _files in MATRIX:
        before = {p.name for p in out.iterdir()}
        proc = run_cli(render(argv, out), hash_seed)
        written = {p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.name not in before}
        results[name] = (proc.returncode, proc.stdout, proc.stderr, written)
    return results
