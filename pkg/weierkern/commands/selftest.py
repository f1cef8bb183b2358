"""``weierkern selftest``: the invariant suite, pass or fail per property."""

import argparse

from ..checks import FAST_CHECKS, SLOW_CHECKS, run_suite
from ..models import SelftestOut
from .common import add_curve_argument, load, require_space


def selftest(args: argparse.Namespace) -> SelftestOut:
    loaded = load(args)
    c = require_space(loaded, "selftest")
    adopted, checks = run_suite(c, args.seed, full=args.full, only=args.only)
    return SelftestOut(curve=adopted.name or loaded.name, seed=args.seed,
                       passed=all(check.passed for check in checks), checks=checks)


def register(subparsers) -> None:
    p = subparsers.add_parser("selftest", help="run the invariant suite")
    add_curve_argument(p)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--full", action="store_true", help="include the quadrature checks (minutes)")
    p.add_argument("--only", nargs="+", choices=[name for name, _ in FAST_CHECKS + SLOW_CHECKS])
    p.set_defaults(handler=selftest)
