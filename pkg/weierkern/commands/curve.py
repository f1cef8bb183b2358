"""``weierkern curve ...``: smoothness, fibers, projections, monodromy, fallback curves."""

import argparse

from ..curve import (
    PATH_CLEARANCE,
    Chart,
    SpaceCurve,
    branch_count,
    branch_points,
    circle_path,
    fiber,
    genus4_fallback,
    monodromy_permutation,
    permutation_cycles,
    plane_projection,
    points_at_infinity,
    smoothness_check,
)
from ..curvefile import curve_to_model, parse_complex
from ..models import (
    ComplexModel,
    CurveCheckOut,
    CurveSummaryOut,
    FiberOut,
    InfinityPointOut,
    MonodromyOut,
    ProjectionOut,
    finite_or_none,
)
from ..polyexpr import format_poly
from .common import add_curve_argument, complex_list, load, point_out, require_space


def check(args: argparse.Namespace) -> CurveCheckOut:
    loaded = load(args)
    c = loaded.curve
    report = smoothness_check(c, args.samples, args.seed)
    out = CurveCheckOut(
        name=loaded.name,
        kind=loaded.source.kind,
        degrees=[p.degree() for p in c.equations()],
        fiber_degree=c.fiber_degree,
        smooth=report.smooth,
        min_singular_value=finite_or_none(report.min_singular_value),
        failures=len(report.failures),
        branch_points=complex_list(branch_points(c)),
    )
    if isinstance(c, SpaceCurve):
        out.genus = c.genus
        out.infinity_points = [InfinityPointOut(coords=complex_list(p.coords), multiplicity=p.multiplicity)
                               for p in points_at_infinity(c)]
    elif loaded.hyperelliptic is not None:
        out.genus = loaded.hyperelliptic.genus
    if args.branch_count:
        out.branch_count = branch_count(c)
    return out


def fiber_points(args: argparse.Namespace) -> FiberOut:
    c = load(args).curve
    chart = Chart(args.chart)
    fib = fiber(c, parse_complex(args.x1), chart)
    return FiberOut(base=ComplexModel.of(fib.base), chart=chart.value, degenerate=fib.degenerate,
                    points=[point_out(p) for p in fib.points])


def project(args: argparse.Namespace) -> ProjectionOut:
    c = require_space(load(args), "curve project")
    eliminate = {"x3": 2, "x2": 1}[args.eliminate]
    plane = plane_projection(c, eliminate)
    names = ["x1", "x2"] if eliminate == 2 else ["x1", "x3"]
    return ProjectionOut(eliminated=args.eliminate, polynomial=format_poly(plane.f, names),
                         degrees=[plane.f.degree(), plane.f.degree(1)])


def monodromy(args: argparse.Namespace) -> MonodromyOut:
    c = load(args).curve
    center = parse_complex(args.center)
    perm = monodromy_permutation(c, circle_path(center, args.radius, args.nodes),
                                 clearance=min(PATH_CLEARANCE, 0.5 * args.radius))
    cycles = [list(cycle) for cycle in permutation_cycles(perm) if len(cycle) > 1]
    return MonodromyOut(center=ComplexModel.of(center), radius=args.radius, permutation=perm, cycles=cycles)


def fallback(args: argparse.Namespace) -> CurveSummaryOut:
    c = require_space(load(args), "curve fallback")
    candidate = genus4_fallback(c, args.seed)
    report = smoothness_check(candidate, 16, args.seed)
    return CurveSummaryOut(name=candidate.name, smooth=report.smooth, fallback_seed=args.seed,
                           curve=curve_to_model(candidate))


def register(subparsers) -> None:
    parser = subparsers.add_parser("curve", help="curve geometry")
    actions = parser.add_subparsers(dest="action", required=True)

    p = actions.add_parser("check", help="smoothness, genus, branch points, points at infinity")
    add_curve_argument(p)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--branch-count", action="store_true", help="also count branch points with multiplicity")
    p.set_defaults(handler=check)

    p = actions.add_parser("fiber", help="all points over one base value")
    add_curve_argument(p)
    p.add_argument("--x1", required=True, help="base value: re,im or an expression such as 1-2i")
    p.add_argument("--chart", choices=[c.value for c in Chart], default=Chart.AFFINE.value)
    p.set_defaults(handler=fiber_points)

    p = actions.add_parser("project", help="plane model by resultant elimination")
    add_curve_argument(p)
    p.add_argument("--eliminate", choices=["x3", "x2"], default="x3")
    p.set_defaults(handler=project)

    p = actions.add_parser("monodromy", help="fiber permutation along a circle")
    add_curve_argument(p)
    p.add_argument("--center", required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--nodes", type=int, default=64)
    p.set_defaults(handler=monodromy)

    p = actions.add_parser("fallback", help="seeded perturbation of a genus-4 template curve")
    add_curve_argument(p)
    p.set_defaults(handler=fallback, exclude_none=True)
