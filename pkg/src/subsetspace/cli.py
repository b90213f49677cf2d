"""Command line interface.

    subsetspace verify <suite> [--config cfg.json] [--out report.json]
    subsetspace verify --list
    subsetspace estimate <map> [--config cfg.json] [--csv ratios.csv]
    subsetspace retract <r2|r3|rn2|selector|flow>      < fset.json
    subsetspace path <quasigeodesic|geodesic> [--out path.json]   < {"x": .., "y": ..}
    subsetspace flow run [--n 3 --dim 2 --p 2 --seed 0] [--input fset.json] [--trace trace.csv]

Exit status: 0 on success (for ``verify``: every check passed), 1 when a
verification fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .errors import CapacityError, DomainError, NonConvergenceError, PreconditionError
from .flow import FlowConfig, integrate_to_collision
from .fset import FSet
from .harness import MAPS, RunConfig, estimate_lipschitz, get_map, sample_fset, verify
from .paths import geodesic_in_larger, quasigeodesic

INPUT_ERRORS = (ValueError, KeyError, TypeError, json.JSONDecodeError, DomainError,
                PreconditionError, CapacityError)


def _load_config(path, overrides):
    d = {}
    if path:
        with open(path) as fh:
            d = json.load(fh)
    d.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig.from_dict(d)


def _write(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def cmd_verify(args):
    from .suites import SUITES

    if args.list or not args.suite:
        for name, (anchor, _) in SUITES.items():
            print(f"{name:24s} {anchor}")
        return 0
    cfg = _load_config(args.config, {"samples": args.samples, "seed": args.seed})
    report = verify(args.suite, cfg)
    _write(report.to_json(), args.out)
    print(report.summary(), file=sys.stderr)
    return 0 if report.passed else 1


def cmd_estimate(args):
    cfg = _load_config(args.config, {"samples": args.samples, "seed": args.seed})
    est = estimate_lipschitz(args.map, cfg, csv_path=args.csv)
    out = {"map": args.map, "max_ratio": est.max_ratio, "counted": est.counted,
           "stability": est.stability(),
           "witness": None if est.witness is None else [s.to_dict() for s in est.witness]}
    _write(json.dumps(out, indent=2, sort_keys=True), args.out)
    return 0


def cmd_retract(args):
    x = FSet.from_json(sys.stdin.read())
    cfg = RunConfig(dim=x.dim, n=x.n, p=x.p)
    out = get_map(args.map, cfg)(x)
    sys.stdout.write(out.to_json() + "\n")
    return 0


def cmd_path(args):
    obj = json.loads(sys.stdin.read())
    x, y = FSet.from_dict(obj["x"]), FSet.from_dict(obj["y"])
    g = quasigeodesic(x, y) if args.kind == "quasigeodesic" else geodesic_in_larger(x, y)
    _write(g.to_json(), args.out)
    return 0


def _write_trace(path, diag):
    states = diag["states"]
    k, d = states.shape[1], states.shape[2]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "delta"] + [f"u{i}_{j}" for i in range(k) for j in range(d)])
        for t, s, U in zip(diag["times"], diag["min_sep"], states):
            w.writerow([repr(float(t)), repr(float(s))] + [repr(float(v)) for v in U.ravel()])


def cmd_flow(args):
    if args.input:
        with open(args.input) as fh:
            x = FSet.from_json(fh.read())
    else:
        x = sample_fset(RunConfig(dim=args.dim, n=args.n, p=args.p, seed=args.seed), "generic", 0)
    fc = FlowConfig(eps_coll=args.eps_coll, step_safety=args.theta, max_steps=args.max_steps)
    res = integrate_to_collision(x, fc, record=bool(args.trace))
    if args.trace:
        _write_trace(args.trace, res.diagnostics)
    out = {"T": res.T, "input": x.to_dict(), "retract": res.retract.to_dict(),
           "terminal": res.terminal.tolist(), "steps": res.diagnostics["steps"]}
    sys.stdout.write(json.dumps(out) + "\n")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="subsetspace", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a property suite and print a JSON report")
    v.add_argument("suite", nargs="?")
    v.add_argument("--config", help="RunConfig JSON file")
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--out", help="write the report here instead of stdout")
    v.add_argument("--list", action="store_true", help="list registered suites")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("estimate", help="empirical Lipschitz ratio of a map")
    e.add_argument("map", choices=MAPS)
    e.add_argument("--config")
    e.add_argument("--samples", type=int)
    e.add_argument("--seed", type=int)
    e.add_argument("--csv", help="dump per-pair ratios")
    e.add_argument("--out")
    e.set_defaults(func=cmd_estimate)

    r = sub.add_parser("retract", help="apply a retraction to an FSet read from stdin")
    r.add_argument("map", choices=("r2", "r3", "rn2", "selector", "flow"))
    r.set_defaults(func=cmd_retract)

    pth = sub.add_parser("path", help="path between the FSets x and y read from stdin")
    pth.add_argument("kind", choices=("quasigeodesic", "geodesic"))
    pth.add_argument("--out")
    pth.set_defaults(func=cmd_path)

    f = sub.add_parser("flow", help="collision flow")
    fsub = f.add_subparsers(dest="action", required=True)
    run = fsub.add_parser("run", help="integrate one configuration to its first collision")
    run.add_argument("--n", type=int, default=3)
    run.add_argument("--dim", type=int, default=2)
    run.add_argument("--p", default="2")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--input", help="FSet JSON file (default: a random generic set)")
    run.add_argument("--eps-coll", type=float, default=1e-8)
    run.add_argument("--theta", type=float, default=0.1)
    run.add_argument("--max-steps", type=int, default=1_000_000)
    run.add_argument("--trace", help="CSV of (t, delta, coordinates) per step")
    run.set_defaults(func=cmd_flow)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "p", None) is not None and isinstance(args.p, str):
        args.p = "inf" if args.p.lower() in ("inf", "infinity") else float(args.p)
    try:
        return args.func(args)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
