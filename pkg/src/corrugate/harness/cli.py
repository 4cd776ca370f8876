"""``corrugate <experiment-kind> --config <path> [--out <path>] [--seed <u64>]``."""
from __future__ import annotations

import argparse
import sys

from ..corrugation import ResolutionError
from ..curvature.engine import SingularMetricError
from ..jets import DomainError, SingularFieldError
from ..loops import UnsupportedDomainError
from ..prescription import FrameError, GeometryError, InfeasibleError
from .config import KINDS, ConfigError, load_config
from .experiments import run_experiment

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

DOMAIN_ERRORS = (ConfigError, InfeasibleError, DomainError, UnsupportedDomainError, ResolutionError, GeometryError,
                 FrameError, SingularMetricError, SingularFieldError)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="corrugate", description="Corrugation and curvature-prescription experiments.")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("--config", required=True, help="flat key = value configuration file")
    p.add_argument("--out", help="CSV output path (default: the configured output, else stdout)")
    p.add_argument("--seed", type=int, help="unsigned 64-bit seed overriding the configuration")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.kind)
        if args.seed is not None:
            cfg = cfg.with_overrides(seed=args.seed)
        report = run_experiment(cfg, args.out)
    except DOMAIN_ERRORS as exc:
        print(f"corrugate: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not (args.out or cfg.raw("output")):
        sys.stdout.write(report.to_csv())
    verdict = "PASS" if report.passed else "FAIL"
    print(f"{args.kind}: {verdict} ({len(report.rows)} rows)", file=sys.stderr)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
