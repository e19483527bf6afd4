"""Command-line front end.

Every analysis command prints a JSON envelope::

    {"tool_version": ..., "envelope_version": 1, "command": ...,
     "input_digest": "sha256:...", "payload": {...}}

Exit codes: 0 success (certify: certified_surjective), 1 validation
findings, 2 parse error, 3 not_certified, 4 certified_not_surjective,
5 analysis precondition failed (e.g. singular at infinity).
"""
import argparse
import json
import re
import sys
from pathlib import Path

from . import __version__
from . import serialize as ser
from .certify import CERTIFIED_NOT_SURJECTIVE, CERTIFIED_SURJECTIVE, certify_surjective
from .degree import (
    DegreeMismatchError,
    IrregularValueError,
    SamplingExhaustedError,
    SingularAtInfinityError,
    _classify,
    global_degree,
    preimages,
)
from .linalg import DimensionError
from .oracle import folding_map_spec, gen_1d, gen_fan_2d, grid_surjectivity_oracle
from .plfunction import validate
from .render import render_svg

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_NOT_CERTIFIED = 3
EXIT_NOT_SURJECTIVE = 4
EXIT_PRECONDITION = 5

_INTERVAL = re.compile(r"\[\s*([^,\]]+)\s*,\s*([^\]]+)\s*\]")


def envelope(command: str, source, payload: dict) -> dict:
    return {
        "tool_version": __version__,
        "envelope_version": 1,
        "command": command,
        "input_digest": ser.digest(source) if source is not None else None,
        "payload": payload,
    }


def emit(env: dict, out=None) -> None:
    text = json.dumps(env, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def parse_box(text: str, n: int):
    """``"[-2,2]"`` (every axis) or ``"[-2,2]x[-1,3]"`` (one interval per axis)."""
    parts = _INTERVAL.findall(text)
    if not parts:
        raise ser.ParseError(f"cannot read box {text!r}; expected e.g. '[-2,2]' or '[-2,2]x[0,1]'", "--box")
    box = [(ser.parse_rational(lo, "--box"), ser.parse_rational(hi, "--box")) for lo, hi in parts]
    if len(box) == 1:
        box = box * n
    if len(box) != n:
        raise ser.ParseError(f"box has {len(box)} intervals, map has dimension {n}", "--box")
    if any(lo >= hi for lo, hi in box):
        raise ser.ParseError("box intervals need lower < upper", "--box")
    return box


def parse_target(text: str):
    return tuple(ser.parse_rational(v.strip(), "--target") for v in text.strip().strip("()[]").split(","))


def _load(path):
    doc = ser.loads(Path(path).read_text())
    return doc, ser.plfunction_from_json(doc)


def _load_validated(command, path):
    """Returns (doc, f, None) or (doc, None, exit code) after emitting a report."""
    doc, f = _load(path)
    report = validate(f)
    if not report.ok:
        emit(envelope(command, doc, {"validation": ser.validation_to_json(report)}))
        return doc, None, EXIT_INVALID
    return doc, f, None


def cmd_validate(args) -> int:
    doc, f = _load(args.path)
    report = validate(f)
    emit(envelope("validate", doc, ser.validation_to_json(report)))
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_certify(args) -> int:
    doc, f, code = _load_validated("certify", args.path)
    if f is None:
        return code
    cert = certify_surjective(f, args.trials, args.seed)
    emit(envelope("certify", doc, ser.certificate_to_json(cert)))
    return {CERTIFIED_SURJECTIVE: EXIT_OK, CERTIFIED_NOT_SURJECTIVE: EXIT_NOT_SURJECTIVE}.get(
        cert.verdict, EXIT_NOT_CERTIFIED
    )


def cmd_degree(args) -> int:
    doc, f, code = _load_validated("degree", args.path)
    if f is None:
        return code
    ev = global_degree(f, args.trials, args.seed)
    emit(envelope("degree", doc, ser.degree_to_json(ev)))
    return EXIT_OK


def cmd_preimages(args) -> int:
    doc, f, code = _load_validated("preimages", args.path)
    if f is None:
        return code
    pre = preimages(f, parse_target(args.target))
    emit(envelope("preimages", doc, ser.preimages_to_json(pre, _classify(pre))))
    return EXIT_OK


def cmd_oracle(args) -> int:
    doc, f, code = _load_validated("oracle", args.path)
    if f is None:
        return code
    resolution = ser.parse_rational(args.resolution, "--resolution")
    if resolution <= 0:
        raise ser.ParseError("resolution must be positive", "--resolution")
    report = grid_surjectivity_oracle(f, parse_box(args.box, f.n), resolution)
    emit(envelope("oracle", doc, ser.oracle_to_json(report)))
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "fold8":
        spec_doc = {"kind": "fold8", "capped": args.capped}
        f = gen_fan_2d(folding_map_spec(args.capped))
    else:
        if not args.spec:
            raise ser.ParseError(f"--spec is required for kind {args.kind}", "--spec")
        spec_doc = ser.loads(Path(args.spec).read_text())
        if args.kind == "1d":
            f = gen_1d(ser.gen_spec_1d_from_json(spec_doc))
        else:
            f = gen_fan_2d(ser.fan_spec_from_json(spec_doc))
    text = ser.canonical(ser.plfunction_to_json(f)) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_render(args) -> int:
    doc, f, code = _load_validated("render", args.path)
    if f is None:
        return code
    if f.n != 2:
        sys.stderr.write(f"render: unsupported dimension {f.n}; only planar maps can be drawn\n")
        return EXIT_PRECONDITION
    svg = render_svg(f, parse_box(args.box, 2))
    if args.out:
        Path(args.out).write_text(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plcert", description="Degree and surjectivity analysis of piecewise affine maps")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the subdivision and continuity")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    for name, func, help_ in (
        ("certify", cmd_certify, "certify surjectivity"),
        ("degree", cmd_degree, "global degree with evidence"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("path")
        p.add_argument("--trials", type=int, default=50)
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)

    p = sub.add_parser("preimages", help="exact preimages of a target")
    p.add_argument("path")
    p.add_argument("--target", required=True, help='comma-separated rationals, e.g. "1/2,3"')
    p.set_defaults(func=cmd_preimages)

    p = sub.add_parser("oracle", help="grid surjectivity oracle")
    p.add_argument("path")
    p.add_argument("--box", required=True)
    p.add_argument("--resolution", default="1")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate a map from a spec")
    p.add_argument("--kind", choices=("1d", "fan2d", "fold8"), required=True)
    p.add_argument("--spec")
    p.add_argument("--capped", action="store_true", help="fold8 only: add bounded triangles")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("render", help="SVG of a planar subdivision")
    p.add_argument("path")
    p.add_argument("--box", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ser.ParseError as exc:
        emit(envelope(args.command, None, {"error": "parse", "message": str(exc)}))
        sys.stderr.write(f"{args.command}: {exc}\n")
        return EXIT_PARSE
    except OSError as exc:
        sys.stderr.write(f"{args.command}: {exc}\n")
        return EXIT_PARSE
    except (SingularAtInfinityError, IrregularValueError, SamplingExhaustedError, DimensionError) as exc:
        emit(envelope(args.command, None, {"error": "precondition", "message": str(exc)}))
        sys.stderr.write(f"{args.command}: {exc}\n")
        return EXIT_PRECONDITION
    except DegreeMismatchError as exc:
        sys.stderr.write(f"{args.command}: internal inconsistency: {exc}\n")
        raise


if __name__ == "__main__":
    sys.exit(main())
