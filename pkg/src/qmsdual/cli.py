"""Command line: ``qmsdual {analyze, examples, qubit-build, classical}``.

Exit codes: 0 success, 1 input error, 2 analysis precondition failure,
3 internal inconsistency. Reports go to stdout (or ``--output``), diagnostics
to stderr.
"""
import argparse
import json
import sys

import jsonschema
import numpy as np

from . import __version__
from .balance import classical_reversibility
from .errors import (
    InternalInconsistencyError,
    KernelError,
    NoPrivilegedRepError,
    NotQMSGeneratorError,
    PreconditionError,
    QmsError,
)
from .instances import chain_stationary
from .pipeline import analyze, instance_from_dict, instance_to_dict
from .qubit import QubitParams, diag_state, qubit_family
from .serialize import dumps, validate
from .settings import DEFAULT
from .suite import run_examples, summarize

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 1, 2, 3


class InputError(Exception):
    pass


def _parse_tol(items):
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise InputError(f"--tol expects KEY=VALUE, got {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError as exc:
            raise InputError(f"--tol value for {key!r} is not a number") from exc
    try:
        return DEFAULT.updated(**out)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from exc


def _parse_complex(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise InputError(f"cannot parse complex number {text!r}") from exc


def _read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _write(text, output):
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args, settings):
    data = _read_json(args.path)
    try:
        inst = instance_from_dict(data, settings, args.s)
    except jsonschema.ValidationError as exc:
        raise InputError(f"instance does not match the schema: {exc.message}") from exc
    except (KeyError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    report = analyze(inst)
    _write(dumps(report), args.output)
    return EXIT_OK


def cmd_examples(args, settings):
    checks = run_examples(seed=args.seed, names=args.name)
    ok, fails = summarize(checks, strict=not args.allow_known)
    if args.json:
        payload = {
            "schema": "qmsdual.examples/1",
            "seed": args.seed,
            "strict": not args.allow_known,
            "passed": ok,
            "checks": [c.as_dict() for c in checks],
        }
        validate(payload, "examples")
        _write(dumps(payload), args.output)
    else:
        lines = []
        for c in checks:
            tag = "ok  " if c.passed else ("KNOWN" if c.known_discrepancy else "FAIL")
            lines.append(f"[{tag}] {c.example}: {c.name}  (expected {c.expected!r}, got {c.actual!r})")
        n_known = sum(1 for c in checks if c.known_discrepancy and not c.passed)
        lines.append(f"{len(checks)} checks, {len(fails)} failures, {n_known} known discrepancies")
        _write("\n".join(lines) + "\n", args.output)
    for c in fails:
        print(f"mismatch: {c.example}: {c.name}: expected {c.expected!r}, got {c.actual!r}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_INTERNAL


def cmd_qubit_build(args, settings):
    p = QubitParams(
        nu=args.nu, v0=args.v0, v3=args.v3,
        lam=_parse_complex(args.lam), mu=_parse_complex(args.mu), eta=_parse_complex(args.eta),
    )
    rep = qubit_family(p)
    ident = args.id or f"qubit-family-nu{args.nu:g}"
    out = instance_to_dict(rep, ident, rho=diag_state(args.nu), s_values=args.s)
    validate(out, "instance")
    _write(dumps(out), args.output)
    return EXIT_OK


def cmd_classical(args, settings):
    data = _read_json(args.path)
    try:
        Q = np.asarray(data["Q"], dtype=float)
        pi = np.asarray(data["pi"], dtype=float) if data.get("pi") is not None else chain_stationary(Q)
        reversible, viol = classical_reversibility(Q, pi, settings)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid chain: {exc}") from exc
    scale = float(np.abs(Q).max())
    out = {
        "reversible": reversible,
        "max_violation": viol,
        "relative_violation": viol / scale if scale else 0.0,
        "pi": [float(x) for x in pi],
    }
    _write(dumps(out), args.output)
    return EXIT_OK


def _common_flags(suppress):
    """Global flags; subcommand copies use SUPPRESS so they do not clobber earlier values."""
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", action="append", default=dflt(None), metavar="KEY=VAL",
                   help="override a tolerance (repeatable)")
    p.add_argument("--s", action="append", type=float, default=dflt(None),
                   help="s value for duals and balance (repeatable)")
    p.add_argument("--output", "-o", default=dflt(None), help="write the result to this file instead of stdout")
    p.add_argument("--seed", type=int, default=dflt(0), help="seed for randomized example draws")
    return p


def build_parser():
    parser = argparse.ArgumentParser(prog="qmsdual", description=__doc__.splitlines()[0],
                                     parents=[_common_flags(False)])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_flags(True)

    a = sub.add_parser("analyze", parents=[common], help="analyze an instance file")
    a.add_argument("path", help="instance JSON file, or - for stdin")
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("examples", parents=[common], help="run the worked-example suite")
    e.add_argument("--name", action="append", help="restrict to an example family (repeatable)")
    e.add_argument("--json", action="store_true", help="emit a JSON suite report")
    e.add_argument("--allow-known", action="store_true",
                   help="do not count published values known to be irreproducible as failures")
    e.set_defaults(func=cmd_examples)

    q = sub.add_parser("qubit-build", parents=[common], help="write a qubit-family instance file")
    q.add_argument("--nu", type=float, required=True)
    q.add_argument("--v0", type=float, default=0.0)
    q.add_argument("--v3", type=float, default=0.0)
    q.add_argument("--lam", default="0", help="complex, e.g. 0.5+0.2i")
    q.add_argument("--mu", default="0")
    q.add_argument("--eta", default="0")
    q.add_argument("--id")
    q.set_defaults(func=cmd_qubit_build)

    c = sub.add_parser("classical", parents=[common], help="check reversibility of a Markov chain")
    c.add_argument("path", help='JSON file {"Q": [[...]], "pi": [...]} (pi optional), or -')
    c.set_defaults(func=cmd_classical)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = _parse_tol(args.tol)
        return args.func(args, settings)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotQMSGeneratorError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PreconditionError, NoPrivilegedRepError) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (InternalInconsistencyError, KernelError) as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, QmsError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
