"""
Command-line entry point.

Exit codes: 0 success, 1 a verification check failed, 2 usage or input error.
Defaults may come from a ``key = value`` config file (``--config`` or the
``CANTORNET_CONFIG`` environment variable); ``command.key`` entries apply to
one subcommand only. Command-line flags always win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .chaoslab import (
    DEDUP_RESOLUTION,
    DEFAULT_MAX_K,
    OMEGA_TOL,
    attractor_estimate,
    box_count,
    forward_invariance_defect,
    network_witness,
    omega_limit_check,
    probe_points,
    sensitivity_probe,
)
from .claims import verify_instance
from .errors import CantorNetError
from .fibodelta import DEFAULT_K, compute_delta, fib_word
from .linedyn import g_orbit
from .netcore import build_network, simulate
from .spectral import MODES, WeightMatrix, gen_weight_matrix, load_weights, read_raw_weights

CONFIG_ENV = "CANTORNET_CONFIG"


class UsageError(Exception):
    pass


def fmt(x) -> str:
    return format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj))
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=1, sort_keys=True) + "\n"


def run_meta(args) -> dict:
    params = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func", "config", "no_timestamp", "command")
    }
    meta = {"command": args.command, "version": __version__, "params": params}
    if not args.no_timestamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat()
    return meta


def write(path: Path, text: str):
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}", file=sys.stderr)


def stem_path(stem, suffix) -> Path:
    return Path(str(stem) + suffix)


# -- network source ------------------------------------------------------


def add_network_flags(p, n_default=4):
    p.add_argument("--weights", help="weight matrix file (.csv or .json); overrides --n/--seed/--sum")
    p.add_argument("--n", type=int, default=n_default)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sum", type=float, default=0.9, dest="sum_target")
    p.add_argument("--mode", choices=MODES, default=None)
    p.add_argument("--K", type=int, default=DEFAULT_K)


def network_from_args(args):
    if args.weights:
        W = load_weights(args.weights, args.mode)
    else:
        W = gen_weight_matrix(args.n, args.seed, args.sum_target, args.mode or "row")
    return build_network(W, K=args.K)


# -- commands ------------------------------------------------------------


def cmd_gen(args):
    W = gen_weight_matrix(args.n, args.seed, args.sum_target, args.mode or "row")
    write(stem_path(args.out, ".csv"), W.to_csv())
    write(stem_path(args.out, ".json"), W.to_json())
    write(stem_path(args.out, ".meta.json"), dumps(run_meta(args)))
    return 0


def cmd_check(args):
    try:
        entries, file_mode = read_raw_weights(args.weights_file)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {args.weights_file}: {exc}") from exc
    mode = args.mode or file_mode or "row"
    report = verify_instance(entries, mode, K=args.K, samples=args.samples, seed=args.seed)
    if report["validation"]["status"] == "structural_error":
        raise UsageError(f"malformed matrix: {report['validation']['message']}")
    report["meta"] = run_meta(args)
    text = dumps(report)
    if args.out:
        write(Path(args.out), text)
    sys.stdout.write(text)
    return 0 if report["passed"] else 1


def cmd_delta(args):
    if args.digits is not None:
        if args.digits < 0:
            raise UsageError("--digits must be nonnegative")
        text = "".join("01"[d] for d in fib_word(args.digits)) + "\n"
    else:
        payload = compute_delta(args.K).as_dict()
        payload["meta"] = run_meta(args)
        text = dumps(payload)
    if args.out:
        write(Path(args.out), text)
    sys.stdout.write(text)
    return 0


def initial_state(args, params):
    if args.x0 is not None and args.t0 is not None:
        raise UsageError("give at most one of --x0 and --t0")
    if args.x0 is not None:
        x0 = np.array([float(tok) for tok in args.x0.split(",")])
        if x0.shape != (params.n,):
            raise UsageError(f"--x0 needs {params.n} comma-separated values")
        return x0
    if args.t0 is not None:
        if not (0.0 <= args.t0 <= 1.0 / params.v.max()):
            raise UsageError("--t0 must keep t*v inside [0,1]^n")
        return args.t0 * params.v
    return np.random.default_rng(args.x0_seed).random(params.n)


def cmd_simulate(args):
    params = network_from_args(args)
    orbit = simulate(initial_state(args, params), args.steps, params, args.record_every)
    meta = run_meta(args)
    meta["orbit"] = orbit.metadata()
    meta["network"] = params.as_dict()
    write(stem_path(args.out, ".csv"), orbit.to_csv())
    write(stem_path(args.out, ".meta.json"), dumps(meta))
    return 0


def cmd_line_orbit(args):
    dp = compute_delta(args.K)
    orbit = g_orbit(args.t0, args.steps, dp)
    meta = run_meta(args)
    meta["delta"] = dp.as_dict()
    meta["right_frequency"] = float(np.mean(orbit.itinerary))
    write(stem_path(args.out, ".csv"), orbit.to_csv())
    write(stem_path(args.out, ".itinerary.txt"), orbit.itinerary_string() + "\n")
    write(stem_path(args.out, ".meta.json"), dumps(meta))
    return 0


def cmd_attractor(args):
    dp = compute_delta(args.K)
    A = attractor_estimate(args.t0, args.burn_in, args.samples, dp, args.resolution)
    meta = run_meta(args)
    meta["delta"] = dp.as_dict()
    meta["points"] = len(A)
    meta["largest_gap"] = A.largest_gap()
    meta["forward_invariance_defect"] = forward_invariance_defect(A, dp)
    meta["box_counts"] = {str(m): box_count(A, 2.0**-m) for m in range(1, 15)}
    status = 0
    if args.omega_points > 0:
        idx = np.linspace(0, len(A) - 1, args.omega_points).round().astype(int)
        checks = [
            omega_limit_check(float(A.points[i]), A, args.tail_start, args.tail_len, args.omega_tol, dp).as_dict()
            for i in idx
        ]
        meta["omega_checks"] = checks
        if not all(c["passed"] for c in checks):
            status = 1
    write(stem_path(args.out, ".txt"), A.to_text())
    write(stem_path(args.out, ".meta.json"), dumps(meta))
    return status


def _probe_one(job):
    t0, eps, max_k, params = job
    try:
        rep = sensitivity_probe(t0, eps, max_k, params.delta_params, params)
    except CantorNetError as exc:
        return {"t0": t0, "epsilon": eps, "error": str(exc), "passed": False}
    wit = network_witness(rep, params)
    d = rep.as_dict()
    d["network_witness"] = wit.as_dict()
    d["passed"] = bool(rep.separation >= 0.5 and wit.holds and wit.start_distance <= eps * np.linalg.norm(params.v))
    return d


def cmd_sensitivity(args):
    params = network_from_args(args)
    seeds = list(args.t0 or [])
    if args.from_attractor:
        A = attractor_estimate(args.attractor_t0, args.burn_in, args.samples, params.delta_params)
        seeds.extend(float(x) for x in probe_points(A, args.from_attractor, args.eps, args.draw_seed))
    if not seeds:
        raise UsageError("give --t0 and/or --from-attractor")
    jobs = [(t, args.eps, args.max_k, params) for t in seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            reports = list(ex.map(_probe_one, jobs, chunksize=max(1, len(jobs) // (4 * args.jobs))))
    else:
        reports = [_probe_one(j) for j in jobs]
    seps = [r["separation"] for r in reports if "separation" in r]
    summary = {
        "count": len(reports),
        "passed": all(r["passed"] for r in reports),
        "min_separation": min(seps) if seps else None,
        "max_k_capture": max((r["k_capture"] for r in reports if "k_capture" in r), default=None),
    }
    meta = run_meta(args)
    meta["network"] = params.as_dict()
    meta["summary"] = summary
    write(stem_path(args.out, ".json"), dumps(reports))
    write(stem_path(args.out, ".meta.json"), dumps(meta))
    sys.stdout.write(dumps(summary))
    return 0 if summary["passed"] else 1


# -- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cantornet", description=__doc__.splitlines()[1])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"key=value defaults file (env {CONFIG_ENV})")
    common.add_argument("--no-timestamp", action="store_true", help="omit timestamps from metadata")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a weight matrix")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sum", type=float, default=0.9, dest="sum_target")
    p.add_argument("--mode", choices=MODES, default="row")
    p.add_argument("--out", default="weights", help="output stem")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", parents=[common], help="verify a weight matrix end to end")
    p.add_argument("weights_file")
    p.add_argument("--mode", choices=MODES, default=None)
    p.add_argument("--K", type=int, default=DEFAULT_K)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("delta", parents=[common], help="print delta and theta")
    p.add_argument("--K", type=int, default=DEFAULT_K)
    p.add_argument("--digits", type=int, default=None, help="print the first N Fibonacci-word digits instead")
    p.add_argument("--out")
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("simulate", parents=[common], help="iterate the network")
    add_network_flags(p)
    p.add_argument("--x0", help="comma-separated initial state")
    p.add_argument("--t0", type=float, help="start on the ray at t*v")
    p.add_argument("--x0-seed", type=int, default=0, help="seed for a random initial state")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument("--out", default="orbit")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("line-orbit", parents=[common], help="iterate the scalar map g")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--K", type=int, default=DEFAULT_K)
    p.add_argument("--out", default="line_orbit")
    p.set_defaults(func=cmd_line_orbit)

    p = sub.add_parser("attractor", parents=[common], help="estimate the Cantor attractor of g")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--burn-in", type=int, default=10_000)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--resolution", type=float, default=DEDUP_RESOLUTION)
    p.add_argument("--K", type=int, default=DEFAULT_K)
    p.add_argument("--omega-points", type=int, default=0)
    p.add_argument("--tail-start", type=int, default=10_000)
    p.add_argument("--tail-len", type=int, default=100_000)
    p.add_argument("--omega-tol", type=float, default=OMEGA_TOL)
    p.add_argument("--out", default="attractor")
    p.set_defaults(func=cmd_attractor)

    p = sub.add_parser("sensitivity", parents=[common], help="search for divergence witnesses")
    add_network_flags(p, n_default=1)
    p.add_argument("--t0", type=float, action="append")
    p.add_argument("--from-attractor", type=int, default=0, metavar="M")
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--max-k", type=int, default=DEFAULT_MAX_K)
    p.add_argument("--attractor-t0", type=float, default=0.0)
    p.add_argument("--burn-in", type=int, default=10_000)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--draw-seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="sensitivity")
    p.set_defaults(func=cmd_sensitivity)
    return parser


def read_config(path) -> dict:
    cfg = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key.replace("-", "_")] = value
    return cfg


def apply_config(parser, argv):
    """Install config-file values as subparser defaults before the real parse."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    path = known.config or os.environ.get(CONFIG_ENV)
    if not path:
        return
    cfg = read_config(path)
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for name, sp in subparsers.choices.items():
        actions = {a.dest: a for a in sp._actions}
        defaults = {}
        for key, value in cfg.items():
            scope, _, dest = key.rpartition(".")
            if scope and scope.replace("_", "-") != name:
                continue
            if dest == "sum":
                dest = "sum_target"
            if dest not in actions:
                continue
            if isinstance(actions[dest], argparse._StoreTrueAction):
                defaults[dest] = value.lower() in ("1", "true", "yes", "on")
            else:
                defaults[dest] = value
        sp.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        apply_config(parser, argv)
    except (OSError, UsageError) as exc:
        print(f"cantornet: config error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, CantorNetError, ValueError, OSError) as exc:
        print(f"cantornet {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
