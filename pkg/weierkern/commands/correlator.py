"""``weierkern correlator``: b-c determinant with its invariance report."""

import argparse

from ..correlator import CorrelatorRequest, bc_correlator, spurious_invariance_check
from ..curvefile import load_points
from ..models import ComplexModel, CorrelatorOut, InvarianceOut, finite_or_none
from .common import add_curve_argument, complex_list, load, require_space


def correlator(args: argparse.Namespace) -> CorrelatorOut:
    c = require_space(load(args), "correlator")
    b_points = load_points(args.b, c)
    c_points = load_points(args.c, c) if args.c else []
    req = CorrelatorRequest(args.lam, b_points, c_points)
    result = bc_correlator(c, req)
    out = CorrelatorOut(lam=args.lam, value=ComplexModel.of(result.value),
                        condition=finite_or_none(result.condition), hadamard_ratio=result.hadamard_ratio,
                        size=result.size, b_weight=result.b_weight, c_weight=result.c_weight)
    if req.c_points and not args.no_invariance:
        report = spurious_invariance_check(c, req, args.seed)
        out.invariance = InvarianceOut(shift=complex_list(report.shift), relative_change=report.relative_change)
    return out


def register(subparsers) -> None:
    p = subparsers.add_parser("correlator", help="determinant correlator G_lambda")
    add_curve_argument(p)
    p.add_argument("--lambda", dest="lam", type=int, choices=[1, 2], required=True)
    p.add_argument("--b", required=True, help="points file with the b insertions")
    p.add_argument("--c", help="points file with the c insertions")
    p.add_argument("--no-invariance", action="store_true", help="skip the column-shift check")
    p.set_defaults(handler=correlator)
