"""Command line front end: ordtower {verify-identity,cartier,tower,fiber,all}.

Configuration is a single JSON document; the report is a single JSON document
with a schema tag.  Reports are deterministic given the config and the seed
(timings are only included with --timing).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .algebra import is_prime
from .suites import CurveSpecError, build_curve, job_seed, run_job

SCHEMA = "ordtower-report/1"
SUITES = ("verify-identity", "cartier", "tower", "fiber")

DEFAULT_PAIRS = [[5, 7], [5, 11], [7, 4], [7, 5], [11, 4], [13, 4]]

DEFAULT_CURVES = [
    {"kind": "projective-line", "p": 3},
    {"kind": "elliptic", "p": 5, "ainvs": [0, 0, 0, 1, 1]},
    {"kind": "elliptic", "p": 5, "ainvs": [0, 0, 0, 0, 1]},
    {"kind": "elliptic", "p": 7, "ainvs": [0, 0, 0, 1, 0]},
    {"kind": "elliptic", "p": 7, "ainvs": [0, 0, 0, 1, 3]},
    {"kind": "artin-schreier", "p": 3, "poles": [["inf", 1]]},
    {"kind": "artin-schreier", "p": 3, "poles": [[0, 1], ["inf", 1]]},
    {"kind": "artin-schreier", "p": 3, "poles": [[0, 1], [1, 1], ["inf", 1]]},
    {"kind": "artin-schreier", "p": 5, "poles": [["inf", 1]]},
    {"kind": "artin-schreier", "p": 5, "poles": [[0, 1], ["inf", 1]]},
    {"kind": "artin-schreier", "p": 5, "poles": [[0, 1], [1, 1], ["inf", 1]]},
    {"kind": "artin-schreier", "p": 7, "poles": [[0, 1], ["inf", 1]]},
]

DEFAULTS = {
    "pairs": DEFAULT_PAIRS,
    "r_max": 3,
    "identity_form": "literal",
    "curves": DEFAULT_CURVES,
    "residue_samples": 100,
    "towers": {"count": 20, "primes": [3, 5], "d_max": 3},
    "fiber": {"primes": [3, 5], "d": 2, "modular_pairs": [[5, 7]], "dump": [[5, 2]]},
    "seed": 0,
    "output": None,
}


class ConfigError(ValueError):
    pass


def check_pair(pair) -> tuple:
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2
            and all(isinstance(v, int) and not isinstance(v, bool) for v in pair)):
        raise ConfigError(f"(p, N) pair must be two integers, got {pair!r}")
    p, N = pair
    if not is_prime(p) or p <= 2:
        raise ConfigError(f"p = {p} must be an odd prime")
    if N < 1:
        raise ConfigError(f"N = {N} must be positive")
    if N % p == 0:
        raise ConfigError(f"(p, N) = ({p}, {N}): p must not divide N")
    if N * p <= 4:
        raise ConfigError(f"(p, N) = ({p}, {N}): need Np > 4")
    return p, N


def _check_primes(ps, what):
    if not isinstance(ps, list) or not all(isinstance(p, int) and is_prime(p) and p > 2 for p in ps):
        raise ConfigError(f"{what} must be a list of odd primes")
    return ps


def load_config(raw: dict | None) -> dict:
    """Merge a user document over the defaults and validate it."""
    raw = dict(raw or {})
    unknown = set(raw) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = json.loads(json.dumps(DEFAULTS))
    for key, val in raw.items():
        if isinstance(cfg[key], dict) and isinstance(val, dict):
            extra = set(val) - set(cfg[key])
            if extra:
                raise ConfigError(f"unknown keys under {key}: {sorted(extra)}")
            cfg[key].update(val)
        else:
            cfg[key] = val
    if not isinstance(cfg["pairs"], list):
        raise ConfigError("pairs must be a list")
    cfg["pairs"] = [list(check_pair(pr)) for pr in cfg["pairs"]]
    r = cfg["r_max"]
    if not isinstance(r, int) or r < 1:
        raise ConfigError("r_max must be a positive integer")
    if cfg["identity_form"] not in ("literal", "corrected"):
        raise ConfigError("identity_form must be 'literal' or 'corrected'")
    if not isinstance(cfg["curves"], list):
        raise ConfigError("curves must be a list")
    for spec in cfg["curves"]:
        if not isinstance(spec, dict) or spec.get("kind") not in (
                "projective-line", "elliptic", "artin-schreier"):
            raise ConfigError(f"malformed curve spec {spec!r}")
        try:
            build_curve(spec)
        except CurveSpecError as e:
            raise ConfigError(f"malformed curve spec {spec!r}: {e}") from None
    if not isinstance(cfg["residue_samples"], int) or cfg["residue_samples"] < 0:
        raise ConfigError("residue_samples must be a nonnegative integer")
    tw = cfg["towers"]
    _check_primes(tw["primes"], "towers.primes")
    if not isinstance(tw["count"], int) or tw["count"] < 0 or not isinstance(tw["d_max"], int) \
            or tw["d_max"] < 1:
        raise ConfigError("towers.count must be >= 0 and towers.d_max >= 1")
    fb = cfg["fiber"]
    _check_primes(fb["primes"], "fiber.primes")
    if not isinstance(fb["d"], int) or fb["d"] < 1:
        raise ConfigError("fiber.d must be a positive integer")
    fb["modular_pairs"] = [list(check_pair(pr)) for pr in fb["modular_pairs"]]
    for entry in fb["dump"]:
        if not (isinstance(entry, list) and len(entry) == 2 and is_prime(entry[0])
                and isinstance(entry[1], int) and entry[1] >= 1):
            raise ConfigError(f"fiber.dump entries are [p, r], got {entry!r}")
    if not isinstance(cfg["seed"], int) or not 0 <= cfg["seed"] < 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return cfg


def plan(suite: str, cfg: dict) -> list:
    """The job list of a suite, as (suite, kind, kwargs) triples."""
    seed = cfg["seed"]
    jobs = []
    if suite == "verify-identity":
        for p, N in cfg["pairs"]:
            jobs.append((suite, "identity", {"p": p, "N": N, "form": cfg["identity_form"]}))
    elif suite == "cartier":
        for i, spec in enumerate(cfg["curves"]):
            jobs.append((suite, "hasse_witt", {"spec": spec}))
            if spec["kind"] == "artin-schreier":
                jobs.append((suite, "nakajima", {"spec": spec}))
            if cfg["residue_samples"]:
                jobs.append((suite, "residues", {"spec": spec, "seed": job_seed(seed, "res", i),
                                                 "count": cfg["residue_samples"]}))
    elif suite == "tower":
        tw = cfg["towers"]
        shapes = [(p, r, d) for p in tw["primes"] for r in range(1, cfg["r_max"] + 1)
                  for d in range(1, tw["d_max"] + 1)]
        for i in range(tw["count"]):
            p, r, d = shapes[i % len(shapes)]
            jobs.append((suite, "tower", {"p": p, "r_max": r, "d": d, "seed": job_seed(seed, "tw", i)}))
        for p in tw["primes"]:
            r = cfg["r_max"]
            jobs.append((suite, "broken_tower", {"p": p, "r_max": r, "d": 2,
                                                 "seed": job_seed(seed, "bt", p)}))
            for r in range(1, cfg["r_max"] + 1):
                jobs.append((suite, "pairing", {"p": p, "r_max": r, "d": 2,
                                                "seed": job_seed(seed, "pf", p, r)}))
    elif suite == "fiber":
        fb = cfg["fiber"]
        for p in fb["primes"]:
            jobs.append((suite, "closed_form", {"p": p, "r_max": cfg["r_max"], "d": fb["d"],
                                                "seed": job_seed(seed, "cf", p)}))
            jobs.append((suite, "contraction", {"p": p, "r_max": cfg["r_max"], "d": fb["d"],
                                                "seed": job_seed(seed, "ct", p)}))
            jobs.append((suite, "refusal", {"p": p, "d": fb["d"], "seed": job_seed(seed, "rf", p)}))
            jobs.append((suite, "tables", {"p": p, "r_max": cfg["r_max"]}))
        for p, N in fb["modular_pairs"]:
            jobs.append((suite, "modular_fiber", {"p": p, "N": N}))
        for p, r in fb["dump"]:
            jobs.append((suite, "table_dump", {"p": p, "r": r}))
    else:
        raise ConfigError(f"unknown suite {suite!r}")
    return jobs


def run_suites(suites, cfg: dict, workers: int = 1, timing: bool = False) -> dict:
    jobs = []
    for s in suites:
        jobs.extend(plan(s, cfg))
    t0 = time.perf_counter()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_job, jobs))
    else:
        results = [run_job(j) for j in jobs]
    report = {"schema": SCHEMA, "suites": {}, "config": cfg}
    for s in suites:
        rows = [r for r in results if r["suite"] == s]
        report["suites"][s] = {"pass": all(r["pass"] for r in rows), "results": rows}
    report["pass"] = all(v["pass"] for v in report["suites"].values())
    if timing:
        report["timing_seconds"] = round(time.perf_counter() - t0, 3)
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def build_parser() -> argparse.ArgumentParser:
    # defaults are suppressed so flags work before or after the subcommand
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, metavar="U64", help="override the config seed")
    common.add_argument("--jobs", type=int, metavar="N", help="worker processes (default 1)")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing")
    parser = argparse.ArgumentParser(prog="ordtower", description=__doc__.splitlines()[0],
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUITES + ("all",):
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    opts = {"config": None, "out": None, "seed": None, "jobs": 1, "timing": False}
    opts.update(vars(args))
    args = argparse.Namespace(**opts)
    try:
        raw = {}
        if args.config:
            with open(args.config) as fh:
                raw = json.load(fh)
            if not isinstance(raw, dict):
                raise ConfigError("config must be a JSON object")
        if args.seed is not None:
            raw["seed"] = args.seed
        cfg = load_config(raw)
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
    except (ConfigError, OSError, json.JSONDecodeError) as e:
        print(f"ordtower: configuration error: {e}", file=sys.stderr)
        return 2
    suites = SUITES if args.command == "all" else (args.command,)
    report = run_suites(suites, cfg, args.jobs, args.timing)
    report["command"] = args.command
    text = dumps(report)
    out = args.out or cfg["output"]
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
