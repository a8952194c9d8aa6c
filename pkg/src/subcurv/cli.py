"""``subcurv`` command line: verify, validate, export-example.

Exit codes: 0 success, 1 a check or identity failed, 2 configuration,
parse or I/O error.
"""

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, ParseError, SubcurvError, UnknownExample
from .gallery import NAMES, export_text
from .submersion import parse_submersion, validate_submersion
from .suite import FAMILIES, FORMATS, RunConfig, exit_code, render, run_suite

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _families(text):
    items = tuple(f.strip() for f in text.split(",") if f.strip())
    bad = [f for f in items if f not in FAMILIES]
    if bad or not items:
        raise argparse.ArgumentTypeError(
            f"unknown families {bad}; choose from {','.join(FAMILIES)}")
    return items


def build_parser():
    p = argparse.ArgumentParser(prog="subcurv",
                                description="Numerical checks of Riemannian submersion curvature relations.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the identity suite")
    v.add_argument("--example", action="append", default=[],
                   help=f"gallery name ({', '.join(NAMES)}) or definition file; repeatable")
    v.add_argument("--file", action="append", default=[], help="definition file; repeatable")
    v.add_argument("--points", type=int, default=100)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--tolerance", type=float, default=1e-8)
    v.add_argument("--families", type=_families, default=FAMILIES,
                   help="comma-separated subset of " + ",".join(FAMILIES))
    v.add_argument("--format", choices=FORMATS, default="text")
    v.add_argument("--output", "-o", help="write the report here instead of stdout")

    c = sub.add_parser("validate", help="check (S1), (S2) and adaptedness of a definition file")
    c.add_argument("file")
    c.add_argument("--points", type=int, default=20)
    c.add_argument("--seed", type=int, default=0)

    e = sub.add_parser("export-example", help="write a gallery entry as a definition file")
    e.add_argument("name")
    e.add_argument("path")
    return p


def _err(msg):
    print(f"subcurv: error: {msg}", file=sys.stderr)


def cmd_verify(args):
    examples, files = [], list(args.file)
    for item in args.example:
        if item not in NAMES and Path(item).is_file():
            files.append(item)
        else:
            examples.append(item)
    cfg = RunConfig(examples=examples, files=files, points=args.points, seed=args.seed,
                    tolerance=args.tolerance, families=args.families, format=args.format,
                    output=args.output)
    try:
        report = run_suite(cfg)
    except ParseError as exc:
        _err(f"parse error: {exc}")
        return EXIT_ERROR
    except SubcurvError as exc:
        _err(str(exc))
        return EXIT_ERROR
    text = render(report, cfg.format)
    if cfg.output:
        try:
            Path(cfg.output).write_text(text)
        except OSError as exc:
            _err(f"cannot write {cfg.output}: {exc}")
            return EXIT_ERROR
    else:
        sys.stdout.write(text)
    return exit_code(report)


def cmd_validate(args):
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        _err(f"cannot read {args.file}: {exc}")
        return EXIT_ERROR
    try:
        spec = parse_submersion(text, validate=False)
    except ParseError as exc:
        _err(f"{args.file}: {exc}")
        return EXIT_ERROR
    except SubcurvError as exc:
        _err(f"{args.file}: {exc}")
        return EXIT_ERROR
    try:
        checks = validate_submersion(spec, points=args.points, seed=args.seed)
    except SubcurvError as exc:
        _err(f"{args.file}: {exc}")
        return EXIT_ERROR
    for ch in checks:
        print(f"{ch.name:<8} {'pass' if ch.passed else 'FAIL'}  {ch.detail}")
    return EXIT_OK if all(ch.passed for ch in checks) else EXIT_FAIL


def cmd_export(args):
    try:
        text = export_text(args.name)
    except UnknownExample as exc:
        _err(str(exc))
        return EXIT_ERROR
    try:
        Path(args.path).write_text(text)
    except OSError as exc:
        _err(f"cannot write {args.path}: {exc}")
        return EXIT_ERROR
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "validate": cmd_validate, "export-example": cmd_export}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse usage errors are configuration errors
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
