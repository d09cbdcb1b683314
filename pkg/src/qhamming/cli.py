"""Command line: ``qhamming {validate,distance,suite}``.

Exit codes: 0 success, 1 validation or property failure (and size mismatch),
2 unreadable input, 3 dimension cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import distances, magic, states, suite
from .config import SEED_ENV, RunConfig, default_seed
from .errors import DimensionOverflow, ParseError, SizeMismatch, ValidationFailure
from .linalg import DIM_CAP

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_CAP = 0, 1, 2, 3


def _read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _validate_obj(obj) -> tuple[bool, str]:
    if not isinstance(obj, dict):
        raise ParseError("top-level JSON value must be an object")
    if "grid" in obj:
        rep = magic.from_json_obj(obj, check=False)
        report = magic.validate(rep)
        return report.passed, report.summary()
    if "atoms" in obj:
        lines, ok = [], True
        try:
            phi = states.from_json_obj(obj, check=False)
        except ValidationFailure as exc:
            return False, f"FAIL {exc}"
        raw = np.array([float(a["weight"]) for a in obj["atoms"]])
        wres = max(abs(raw.sum() - 1.0), max(0.0, -raw.min()))
        w_ok = wres <= states.WEIGHT_TOL
        ok &= w_ok
        lines.append(f"{'PASS' if w_ok else 'FAIL'} weights: residual {wres:.3e}")
        for k, atom in enumerate(phi.atoms):
            report = magic.validate(atom.rep)
            ok &= report.passed
            lines.append(f"atom {k}: " + report.summary())
        return ok, "\n".join(lines)
    raise ParseError("expected a representation ('grid') or a mixture ('atoms')")


def cmd_validate(args) -> int:
    ok, text = _validate_obj(_read_json(args.path))
    print(text)
    return EXIT_OK if ok else EXIT_FAIL


def _load_state(path: str) -> states.StateMixture:
    obj = _read_json(path)
    if isinstance(obj, dict) and "grid" in obj:
        return states.point_mass(magic.from_json_obj(obj))
    return states.from_json_obj(obj)


def _config(args) -> RunConfig:
    tols = {}
    for item in args.tol or []:
        name, _, value = item.partition("=")
        if not value:
            raise SystemExit(f"--tol expects NAME=VALUE, got {item!r}")
        tols[name] = float(value)
    return RunConfig(
        seed=args.seed,
        dim_cap=args.dim_cap,
        tolerances=tols,
        corpus_len=args.corpus_len,
        restarts=args.restarts,
        steps=args.steps,
    )


def cmd_distance(args) -> int:
    config = _config(args)
    phi, psi = _load_state(args.a), _load_state(args.b)
    for atom in (*phi.atoms, *psi.atoms):
        if atom.d > config.dim_cap:
            raise DimensionOverflow(f"atom dimension {atom.d} exceeds cap {config.dim_cap}")
    if args.metric == "all":
        reports = distances.all_distances(phi, psi, config)
    else:
        reports = {args.metric: distances.distance(phi, psi, args.metric, config)}
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["metric", "upper", "lower", "exact_for_presented_atoms", "lower_witness", "upper_witness"])
        for name in distances.METRICS:
            if name in reports:
                r = reports[name]
                w.writerow([name, repr(r.upper), repr(r.lower), r.exact_for_presented_atoms,
                            r.witnesses["lower"], r.witnesses["upper"]])
        sys.stdout.write(buf.getvalue())
    else:
        objs = {k: v.to_json_obj() for k, v in reports.items()}
        out = objs[args.metric] if args.metric != "all" else objs
        print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_suite(args) -> int:
    config = _config(args)
    results = suite.run_suite(config, args.only or None)
    if args.json:
        print(suite.report_json(results, config))
    elif args.csv:
        sys.stdout.write(suite.report_csv(results))
    else:
        print(suite.report_table(results))
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default_seed(),
                        help=f"corpus and search seed (default from ${SEED_ENV}, else 0)")
    common.add_argument("--dim-cap", type=int, default=DIM_CAP)
    common.add_argument("--corpus-len", type=int, default=2, help="exhaustive word length")
    common.add_argument("--restarts", type=int, default=8, help="unitary search restarts")
    common.add_argument("--steps", type=int, default=200, help="unitary search steps per restart")
    common.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help="override a property or group tolerance (group 'eigen')")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="qhamming", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)
    v = sub.add_parser("validate", help="check a representation or mixture file")
    v.add_argument("path")
    v.set_defaults(func=cmd_validate, verbose=False)
    d = sub.add_parser("distance", parents=[common], help="distance report for two mixture files")
    d.add_argument("a")
    d.add_argument("b")
    d.add_argument("--metric", choices=["tensor", "free", "l1", "all"], default="all")
    d.set_defaults(func=cmd_distance)
    s = sub.add_parser("suite", parents=[common], help="run the seeded property suite")
    s.add_argument("--only", action="append", choices=suite.PROPERTY_NAMES, metavar="NAME")
    s.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DimensionOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValidationFailure, SizeMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
