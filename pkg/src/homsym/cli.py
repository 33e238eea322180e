"""``homsym`` command line.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import reports
from .catalog import ParameterDomainError, catalog
from .exact import AlgebraError
from .lie import load_constants

__all__ = ["AnalysisRequest", "main", "build_parser", "EXIT_OK", "EXIT_FAIL", "EXIT_INPUT"]

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass(frozen=True)
class AnalysisRequest:
    type: str | None = None
    q: str | None = None
    constants: str | None = None
    metric: str | None = None
    symbolic: bool = False
    seed: int = reports.DEFAULT_SEED
    tolerance: float = 1e-10

    def __post_init__(self):
        if (self.type is None) == (self.constants is None):
            raise InputError("give exactly one of --type or --constants")
        if self.q is not None and self.type is None:
            raise InputError("--q needs --type")


def _seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("HOMSYM_SEED")
    if env is None:
        return reports.DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise InputError(f"HOMSYM_SEED is not an integer: {env!r}") from None


def _constants(req: AnalysisRequest):
    if req.constants is not None:
        return load_constants(req.constants)
    return catalog(req.type, req.q).constants


def cmd_analyze(req: AnalysisRequest) -> tuple[dict, int]:
    C = _constants(req)
    h = reports.load_metric(req.metric) if req.metric else None
    report = reports.analysis_report(C, h, symbolic=req.symbolic, seed=req.seed, tolerance=req.tolerance)
    ok = report["jacobi"]["passes"] and report.get("expected", {}).get("passes", True)
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_reproduce(symbolic: bool, seed: int) -> tuple[dict, int]:
    table = reports.reproduction_table(symbolic=symbolic, seed=seed)
    return table, EXIT_OK if table["passes"] else EXIT_FAIL


def cmd_verify_realizations(type: str, q, points: int, seed: int, tolerance: float,
                            inject_fault: bool = False) -> tuple[dict, int]:
    summary = reports.realization_summary(type, q, points=points, seed=seed, tolerance=tolerance,
                                          inject_fault=inject_fault)
    return summary, EXIT_OK if summary["passes"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="homsym", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default: $HOMSYM_SEED or a fixed constant)")
    common.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--symbolic", dest="symbolic", action="store_true", help="exact rank over the parameter field")
    mode.add_argument("--sampled", dest="symbolic", action="store_false", help="rank at random rational points (default)")
    common.set_defaults(symbolic=False)

    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="full pipeline on one algebra")
    a.add_argument("--type", help="Bianchi type I..IX")
    a.add_argument("--q", help="parameter for types VI and VII (rational, e.g. 1/2)")
    a.add_argument("--constants", help="structure-constant JSON file")
    a.add_argument("--metric", help="frame-metric JSON file")
    a.add_argument("--tolerance", type=float, default=1e-10)

    r = sub.add_parser("reproduce", parents=[common], help="isometry-dimension table for all catalog rows")
    r.add_argument("--markdown", action="store_true", help="render the table as markdown")

    v = sub.add_parser("verify-realizations", parents=[common], help="check coordinate realizations")
    v.add_argument("--type", required=True)
    v.add_argument("--q")
    v.add_argument("--points", type=int, default=10)
    v.add_argument("--tolerance", type=float, default=1e-9)
    v.add_argument("--inject-fault", action="store_true", help="swap two coframe fields; the check must fail")
    return p


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        seed = _seed(args.seed)
        if args.command == "analyze":
            req = AnalysisRequest(type=args.type, q=args.q, constants=args.constants, metric=args.metric,
                                  symbolic=args.symbolic, seed=seed, tolerance=args.tolerance)
            result, code = cmd_analyze(req)
        elif args.command == "reproduce":
            result, code = cmd_reproduce(args.symbolic, seed)
            if args.markdown:
                _emit(reports.render_markdown(result), args.out)
                return code
        else:
            if args.points < 1:
                raise InputError("--points must be positive")
            result, code = cmd_verify_realizations(args.type, args.q, args.points, seed, args.tolerance,
                                                   args.inject_fault)
        _emit(reports.dumps(result), args.out)
        return code
    except (InputError, ParameterDomainError, AlgebraError, OSError, json.JSONDecodeError,
            KeyError, ValueError) as exc:
        print(f"homsym: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
