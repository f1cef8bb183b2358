"""``weierkern basis``: the holomorphic or quadratic differentials of a template curve."""

import argparse

from ..diffbasis import holomorphic_basis, quadratic_basis
from ..models import BasisElementOut, BasisOut
from .common import add_curve_argument, load, require_space


def listing(args: argparse.Namespace) -> BasisOut:
    c = require_space(load(args), "basis")
    basis = holomorphic_basis(c) if args.weight == 1 else quadratic_basis(c)
    return BasisOut(name=basis.name, weight=basis.weight,
                    elements=[BasisElementOut(**item) for item in basis.describe()])


def register(subparsers) -> None:
    p = subparsers.add_parser("basis", help="list the basis differentials")
    add_curve_argument(p)
    p.add_argument("--weight", type=int, choices=[1, 2], default=1)
    p.set_defaults(handler=listing)
