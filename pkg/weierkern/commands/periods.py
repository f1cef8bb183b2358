"""``weierkern periods``: Gram matrix of the holomorphic differentials."""

import argparse
import logging

import numpy as np

from ..curve import adopt_fixture
from ..diffbasis import holomorphic_basis
from ..models import PeriodsOut
from ..quadrature import GridConfig, gram_matrix
from .common import add_curve_argument, complex_list, load, require_space

logger = logging.getLogger(__name__)


def grid_from_args(args: argparse.Namespace) -> GridConfig:
    return GridConfig(radial_cells=args.grid, angular_cells=args.grid, max_depth=args.depth,
                      target_rel_error=args.tol, exclusion_radius=args.exclusion)


def add_grid_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-4, help="target relative error")
    p.add_argument("--grid", type=int, default=24, help="base cells per polar direction")
    p.add_argument("--depth", type=int, default=8, help="maximum refinement depth")
    p.add_argument("--exclusion", type=float, default=1e-4, help="exclusion disk radius")
    p.add_argument("--adopt", action="store_true",
                   help="replace a singular template curve by its first smooth seeded fallback")


def adopted_curve(args: argparse.Namespace):
    c = require_space(load(args), args.command)
    if args.adopt:
        choice = adopt_fixture(c, args.seed)
        if not choice.adopted_primary:
            logger.warning("running on fallback curve %s", choice.curve.name)
        c = choice.curve
    return c


def periods(args: argparse.Namespace) -> PeriodsOut:
    c = adopted_curve(args)
    result = gram_matrix(c, holomorphic_basis(c), grid_from_args(args))
    eigenvalues = [float(v) for v in result.eigenvalues]
    return PeriodsOut(matrix=[complex_list(row) for row in result.matrix], eigenvalues=eigenvalues,
                      hermitian_defect=result.hermitian_defect, est_error=result.est_error,
                      nodes_used=result.nodes_used, refinement_depth=result.refinement_depth,
                      converged=result.converged, positive_definite=bool(np.min(eigenvalues) > 0))


def register(subparsers) -> None:
    p = subparsers.add_parser("periods", help="Gram matrix (i/2) int omega_i ^ conj(omega_j)")
    add_curve_argument(p)
    add_grid_arguments(p)
    p.set_defaults(handler=periods)
