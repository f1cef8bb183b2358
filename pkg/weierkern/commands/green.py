"""``weierkern green``: the third-kind Green function at one point."""

import argparse

from ..correlator import GreenRequest, green_function
from ..curvefile import point_on_curve
from ..models import ComplexModel, GreenOut
from .periods import add_grid_arguments, adopted_curve, grid_from_args


def _optional(z):
    return None if z is None else ComplexModel.of(z)


def green(args: argparse.Namespace) -> GreenOut:
    c = adopted_curve(args)
    req = GreenRequest(point_on_curve(c, args.p), point_on_curve(c, args.q), point_on_curve(c, args.qp),
                       grid_from_args(args))
    result = green_function(c, req, residues=not args.no_residues, periods=not args.no_periods)
    return GreenOut(value=ComplexModel.of(result.value.coeff), normalized=ComplexModel.of(result.normalized),
                    gram_det=ComplexModel.of(result.gram_det), residue_q=_optional(result.residue_q),
                    residue_qp=_optional(result.residue_qp), residue_ratio=_optional(result.residue_ratio),
                    period_residuals=result.period_residuals, gram_norm=result.gram_norm,
                    est_error=result.est_error, converged=result.converged)


def register(subparsers) -> None:
    p = subparsers.add_parser("green", help="Green function G(p) with poles at q and q'")
    p.add_argument("file", help="curve file (JSON)")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--qp", required=True)
    add_grid_arguments(p)
    p.add_argument("--no-residues", action="store_true")
    p.add_argument("--no-periods", action="store_true")
    p.set_defaults(handler=green)
