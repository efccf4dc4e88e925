"""Command-line front end.

Commands
--------
certify   decide a bases file, write a certificate document
family    emit the bases (and optionally the frame) of a named family
scan      bisect a family's feasibility boundary
simulate  run a gate circuit ontically and quantumly
verify    run the verification suite and write a JSON report

Angles are radians throughout.  ``QPR_MODE`` (``exact`` or ``float``) sets
the default arithmetic mode.  Exit codes: 0 success/feasible, 1 infeasible or
failed checks, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import certifier, families
from .documents import (
    DocumentError,
    canonical_hash,
    certificate_document,
    dumps,
    family_document,
    load_bases,
)
from .ontic_sim import ContractError, GateRegistrationError, UnknownLabelError, build_model, run_circuit
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


class UsageError(ValueError):
    """Bad command-line input (mapped to exit code 2)."""


def default_mode() -> str:
    mode = os.environ.get("QPR_MODE", "exact").strip().lower()
    if mode not in certifier.MODES:
        raise UsageError(f"QPR_MODE must be one of {certifier.MODES}, got {mode!r}")
    return mode


def _error(message: str) -> None:
    print(f"qpr: {message}", file=sys.stderr)


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed JSON: {exc}") from exc
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc


# --------------------------------------------------------------------------
# commands


def cmd_certify(args) -> int:
    data = _read_json(args.input)
    dim, bases = load_bases(data)
    if dim != 2:
        raise UsageError("certify handles qubit (dim = 2) bases only")
    mode = args.mode or default_mode()
    cert = certifier.certify(bases, mode, symmetric=args.symmetric)
    _write(dumps(certificate_document(cert, canonical_hash(data))), args.out)
    return EXIT_OK if cert.feasible else EXIT_INFEASIBLE


def _gram(bases) -> list:
    vecs = np.array([b.direction.as_array() for b in bases], dtype=float)
    return (vecs @ vecs.T).tolist()


def cmd_family(args) -> int:
    spec = families.FamilySpec(args.kind, args.theta, args.phi, args.q0)
    bases = families.family_bases(spec)
    rep = families.family_rep(spec) if args.emit_frame else None
    doc = family_document(spec, bases, rep)
    doc["gram"] = _gram(bases)
    _write(dumps(doc), args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    fixed = {"theta": args.theta, "phi": args.phi}
    fixed[args.param] = args.lo
    template = families.FamilySpec(args.kind, fixed["theta"], fixed["phi"])
    value = certifier.threshold_scan(template, args.param, args.lo, args.hi, tol=args.tol,
                                     mode=args.mode or "float")
    print(f"{args.param}* = {value:.12g}")
    print(f"sin^2 = {math.sin(value) ** 2:.9f}")
    print(f"cos = {math.cos(value):.9f}")
    return EXIT_OK


def _probabilities(values) -> str:
    return " ".join(f"{(p if abs(p) > 1e-15 else 0.0):.12g}" for p in map(float, values))


def cmd_simulate(args) -> int:
    model = build_model(args.family, args.theta, args.phi, args.q0)
    res = run_circuit(model, args.initial, args.circuit, args.measure)
    print("ontic:   " + _probabilities(res.ontic))
    print("quantum: " + _probabilities(res.quantum))
    print(f"agree: {str(res.agree).lower()}")
    return EXIT_OK if res.agree else EXIT_NUMERICAL


def cmd_verify(args) -> int:
    report = run_suite(args.suite, args.trials, args.seed)
    _write(dumps(report), args.out)
    for check in report["checks"]:
        print(f"{'PASS' if check['pass'] else 'FAIL'} {check['name']}", file=sys.stderr)
    return EXIT_OK if report["all_pass"] else EXIT_INFEASIBLE


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpr", description="Non-negative quasi-probability representations.",
                                     epilog="Angles are in radians. QPR_MODE=exact|float sets the default mode.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="decide whether a set of bases can all be non-negative")
    p.add_argument("input", help="bases JSON document ('-' for stdin)")
    p.add_argument("--mode", choices=certifier.MODES)
    p.add_argument("--symmetric", action="store_true", help="symmetrize a feasible solution")
    p.add_argument("--out", help="certificate path (default: stdout)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("family", help="emit the bases of a named family")
    p.add_argument("kind", choices=families.KINDS)
    p.add_argument("--theta", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--q0", type=float)
    p.add_argument("--emit-frame", action="store_true", help="also emit q, F and G per ontic point")
    p.add_argument("--out")
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("scan", help="bisect a family's feasibility boundary")
    p.add_argument("kind", choices=("d3", "c2", "cuboid", "pair"))
    p.add_argument("--param", choices=("theta", "phi"), default="theta")
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--theta", type=float, help="fixed theta when scanning phi")
    p.add_argument("--phi", type=float, help="fixed phi when scanning theta")
    p.add_argument("--mode", choices=certifier.MODES)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("simulate", help="run a circuit in a non-negative model")
    p.add_argument("--family", default="stabilizer", choices=("stabilizer", "d3", "c2", "cuboid"))
    p.add_argument("--theta", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--q0", type=float)
    p.add_argument("--initial", required=True, help='state label, e.g. "z+" or "b1-"')
    p.add_argument("--circuit", default="", help='gate names in time order, e.g. "H P"')
    p.add_argument("--measure", required=True, help='basis label, e.g. "x" or "b2"')
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


_INVALID = (DocumentError, UsageError, families.FamilyParameterError, families.NoSolutionError,
            certifier.DuplicateBasisError, certifier.NoThresholdError, UnknownLabelError,
            GateRegistrationError, KeyError, ValueError, TypeError)
_NUMERICAL = (certifier.NumericalFailure, families.FrameConstructionError, ContractError, ArithmeticError)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        return args.func(args)
    except certifier.NoThresholdError as exc:
        _error(f"no threshold: {exc}")
        return EXIT_INVALID
    except _NUMERICAL as exc:
        _error(f"numerical failure: {exc}")
        return EXIT_NUMERICAL
    except _INVALID as exc:
        _error(f"invalid input: {exc}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
