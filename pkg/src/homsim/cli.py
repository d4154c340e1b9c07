"""Command-line entry point: ``homsim run|sweep|classify|ensemble|parse-check``."""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import dsl
from .harness import (
    ENGINES,
    ConfigError,
    CrossEngineMismatch,
    EmitError,
    EngineError,
    RunConfig,
    cmd_classify,
    cmd_ensemble,
    cmd_run,
    cmd_sweep,
    emit,
)
from .phase_basis import DegenerateCaseError
from .wave import UndefinedCoincidenceError

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_MISMATCH = 3
DEFAULT_SEED = 0
SEED_ENV = "HOMSIM_SEED"


def angle(text: str) -> float:
    try:
        return dsl.parse_angle(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def seed_value(text: str) -> int:
    try:
        val = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= val < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return val


def load_circuit(spec: str) -> dsl.Circuit:
    """A builtin name or a path to a ``.circ`` file."""
    if spec in dsl.BUILTINS:
        return dsl.builtin(spec)
    path = Path(spec)
    if not path.exists():
        raise ConfigError(f"no builtin or file named {spec!r} (builtins: {', '.join(dsl.BUILTINS)})")
    return dsl.parse(path.read_text(encoding="utf-8"))


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is None:
        return DEFAULT_SEED
    try:
        return seed_value(env)
    except argparse.ArgumentTypeError as exc:
        raise ConfigError(f"{SEED_ENV}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output path (default: standard output)")

    circ = argparse.ArgumentParser(add_help=False)
    circ.add_argument("circuit_pos", nargs="?", metavar="CIRCUIT",
                      help="builtin name (hom, mzi, one_input_bs) or .circ file")
    circ.add_argument("--circuit", help="same as the positional CIRCUIT")
    circ.add_argument("--engine", choices=ENGINES + ("all",), default="wave")
    circ.add_argument("--theta", type=angle)
    circ.add_argument("--zeta", type=angle)

    parser = argparse.ArgumentParser(
        prog="homsim",
        description="Two-photon beam-splitter and Mach-Zehnder interference simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("run", parents=[common, circ], help="evaluate a circuit once")

    sw = sub.add_parser("sweep", parents=[common, circ], help="sweep theta or zeta")
    sw.add_argument("--param", choices=dsl.PARAMETERS, required=True)
    sw.add_argument("--from", dest="start", type=angle, default=0.0)
    sw.add_argument("--to", dest="stop", type=angle, default=dsl.parse_angle("2pi"))
    sw.add_argument("--steps", type=int, default=9)
    sw.add_argument("--workers", type=int, default=1)

    sub.add_parser("classify", parents=[common], help="phase-basis case verdicts")

    en = sub.add_parser("ensemble", parents=[common], help="Monte Carlo phase average")
    en.add_argument("circuit_pos", nargs="?", metavar="SCENARIO", choices=("hom", "mzi"))
    en.add_argument("--circuit", choices=("hom", "mzi"))
    en.add_argument("--n", type=int, default=100_000)
    en.add_argument("--seed", type=seed_value)
    en.add_argument("--theta", type=angle, help="fixed phase instead of a uniform draw")
    en.add_argument("--zeta", type=angle, help="fixed phase for the mzi scenario")
    en.add_argument("--workers", type=int, default=1)

    pc = sub.add_parser("parse-check", help="parse and validate circuit files")
    pc.add_argument("files", nargs="+")
    return parser


def _circuit_arg(args, default=None):
    if args.circuit_pos and args.circuit and args.circuit_pos != args.circuit:
        raise ConfigError("conflicting positional and --circuit values")
    spec = args.circuit or args.circuit_pos or default
    if spec is None:
        raise ConfigError("no circuit given")
    return spec


def _params(args) -> dict:
    return {k: getattr(args, k) for k in ("theta", "zeta") if getattr(args, k) is not None}


def _parse_check(files) -> int:
    status = EXIT_OK
    for name in files:
        try:
            c = load_circuit(name)
            dsl.validate(c)
        except dsl.ParseError as exc:
            print(f"{name}:{exc.line}:{exc.column}: {exc.message}", file=sys.stderr)
            status = EXIT_USAGE
        except (dsl.ValidationError, ConfigError) as exc:
            print(f"{name}: {exc}", file=sys.stderr)
            status = EXIT_USAGE
        else:
            print(f"{name}: ok ({c.name}, {len(c.elements)} elements)")
    return status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "parse-check":
            return _parse_check(args.files)
        if args.command == "classify":
            rows = cmd_classify()
        elif args.command == "ensemble":
            scenario = _circuit_arg(args, default="hom")
            fixed = args.theta if scenario == "hom" else args.zeta
            seed = args.seed if args.seed is not None else _default_seed()
            if args.n < 1:
                raise ConfigError("--n must be at least 1")
            rows = cmd_ensemble(args.n, seed, fixed, scenario, workers=args.workers)
        else:
            config = RunConfig(load_circuit(_circuit_arg(args)), args.engine, _params(args),
                               output_format=args.format, output=args.out)
            if args.command == "run":
                rows = cmd_run(config)
            else:
                rows = cmd_sweep(config, args.param, args.start, args.stop, args.steps,
                                 workers=args.workers)
        emit(rows, args.format, args.out if args.out else sys.stdout)
    except dsl.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, EngineError, dsl.ValidationError, DegenerateCaseError,
            UndefinedCoincidenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CrossEngineMismatch as exc:
        print(f"cross-engine mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except EmitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
