"""``verify --config <path> [--out <dir>] [--h <real>] [--seed <int>]``."""
from __future__ import annotations

import argparse
import sys
import traceback

from .report import ConfigError, ExperimentConfig, run

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATED = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="verify", description="Run rearrangement and Robin torsion verification suites.")
    p.add_argument("--config", required=True, help="experiment config (JSON)")
    p.add_argument("--out", default="verify-out", help="output directory (default: verify-out)")
    p.add_argument("--h", type=float, default=None, help="override the grid spacing")
    p.add_argument("--seed", type=int, default=None, help="override the random field seed")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = ExperimentConfig.load(args.config, h=args.h, seed=args.seed)
    except (ConfigError, TypeError) as exc:
        print(f"verify: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = run(config)
        report.write(args.out)
    except Exception:
        traceback.print_exc()
        return EXIT_ERROR
    for rec in report.records:
        flag = "" if rec.asserted else " (probe)"
        print(f"{rec.verdict:12s} {rec.name}: lhs={rec.lhs:.6g} rhs={rec.rhs:.6g} tol={rec.tolerance:.3g}{flag}")
    print(f"overall: {report.overall}  ->  {args.out}/report.json")
    return EXIT_OK if report.overall == "holds" else EXIT_VIOLATED


if __name__ == "__main__":
    sys.exit(main())
