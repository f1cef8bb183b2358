"""``weierkern kernel ...``: kernel values, contour residues, Laurent coefficients, asymptotics."""

import argparse
from typing import Callable

from ..curve import Chart, CurvePoint, HyperellipticCurve, PlaneCurve, SpaceCurve
from ..curvefile import LoadedCurve, parse_complex, point_on_curve
from ..errors import UsageError
from ..kernel import (
    DifferentialValue,
    KernelVariant,
    compare_asymptotic,
    divergent_part_report,
    hyperelliptic_tau_points,
    kernel_eval,
    plane_weierstrass,
)
from ..localanalysis import DEFAULT_NODES, DEFAULT_RADIUS, ContourSpec, laurent_coeff
from ..models import AsymptoticOut, ComplexModel, ContourOut, DifferentialOut, DivergenceOut
from .common import add_curve_argument, complex_list, load, require_space

SPACE_VARIANTS = [v.value for v in KernelVariant]
PLANE_VARIANTS = ["plane", "tau"]


def kernel_function(loaded: LoadedCurve, variant: str, y: CurvePoint) -> Callable[..., DifferentialValue]:
    """The kernel as a function of x with its pole at y."""
    c = loaded.curve
    if variant in PLANE_VARIANTS:
        if not isinstance(c, PlaneCurve):
            raise UsageError(f"variant {variant!r} needs a plane or hyperelliptic curve file")
        if variant == "tau":
            h = loaded.hyperelliptic
            if not isinstance(h, HyperellipticCurve):
                raise UsageError("variant 'tau' needs a hyperelliptic curve file")
            return lambda x: DifferentialValue(hyperelliptic_tau_points(h, x, y.x))
        return lambda x: plane_weierstrass(c, x, y)
    if not isinstance(c, SpaceCurve):
        raise UsageError(f"variant {variant!r} needs a space curve file")
    kind = KernelVariant(variant)
    return lambda x: kernel_eval(c, x, y, kind)


def _default_variant(loaded: LoadedCurve, variant) -> str:
    if variant:
        return variant
    if loaded.hyperelliptic is not None:
        return "tau"
    return "plane" if isinstance(loaded.curve, PlaneCurve) else KernelVariant.GENUS4.value


def evaluate(args: argparse.Namespace) -> DifferentialOut:
    loaded = load(args)
    c = loaded.curve
    fn = kernel_function(loaded, _default_variant(loaded, args.variant), point_on_curve(c, args.y))
    value = fn(point_on_curve(c, args.x))
    return DifferentialOut(coeff=ComplexModel.of(value.coeff), weight=value.weight)


def _contour(args: argparse.Namespace, k: int) -> ContourOut:
    loaded = load(args)
    c = loaded.curve
    fn = kernel_function(loaded, _default_variant(loaded, args.variant), point_on_curve(c, args.y))
    anchor = point_on_curve(c, args.anchor)
    spec = ContourSpec(parse_complex(args.center), args.radius, args.nodes, Chart(args.chart), anchor)
    result = laurent_coeff(c, fn, spec, k, args.tol)
    return ContourOut(k=k, value=ComplexModel.of(result.value), error=result.error, nodes=result.nodes,
                      turns=result.turns)


def residue(args: argparse.Namespace) -> ContourOut:
    return _contour(args, -1)


def laurent(args: argparse.Namespace) -> ContourOut:
    return _contour(args, args.k)


def asymptotic(args: argparse.Namespace) -> AsymptoticOut:
    loaded = load(args)
    c = require_space(loaded, "kernel asymptotic")
    report = compare_asymptotic(c, point_on_curve(c, args.y))
    return AsymptoticOut(printed=complex_list(report["printed"]), series=complex_list(report["series"]),
                         relative_difference=report["relative_difference"], mismatched=report["mismatched"])


def divergence(args: argparse.Namespace) -> DivergenceOut:
    loaded = load(args)
    c = require_space(loaded, "kernel divergence")
    report = divergent_part_report(c, point_on_curve(c, args.x), args.coefficients)
    return DivergenceOut(coefficient_set=report.coefficient_set, radii=list(report.radii),
                         exponents=report.exponents, bounded=report.bounded)


def _contour_arguments(p: argparse.ArgumentParser) -> None:
    add_curve_argument(p)
    p.add_argument("--variant", choices=SPACE_VARIANTS + PLANE_VARIANTS)
    p.add_argument("--y", required=True, help="pole of the kernel")
    p.add_argument("--center", required=True, help="contour center in the chart coordinate")
    p.add_argument("--radius", type=float, default=DEFAULT_RADIUS)
    p.add_argument("--nodes", type=int, default=DEFAULT_NODES)
    p.add_argument("--chart", choices=[c.value for c in Chart], default=Chart.AFFINE.value)
    p.add_argument("--anchor", required=True, help="curve point picking the sheet of the contour")
    p.add_argument("--tol", type=float, default=1e-8)


def register(subparsers) -> None:
    parser = subparsers.add_parser("kernel", help="Weierstrass kernels")
    actions = parser.add_subparsers(dest="action", required=True)

    p = actions.add_parser("eval", help="kernel coefficient of dx1 at x with its pole at y")
    add_curve_argument(p)
    p.add_argument("--variant", choices=SPACE_VARIANTS + PLANE_VARIANTS)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.set_defaults(handler=evaluate)

    p = actions.add_parser("residue", help="contour residue of the kernel")
    _contour_arguments(p)
    p.set_defaults(handler=residue)

    p = actions.add_parser("laurent", help="Laurent coefficient of the kernel")
    _contour_arguments(p)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(handler=laurent)

    p = actions.add_parser("asymptotic", help="A1..A4 closed form against the series expansion")
    add_curve_argument(p)
    p.add_argument("--y", required=True)
    p.set_defaults(handler=asymptotic)

    p = actions.add_parser("divergence", help="growth of K - sum omega_i A_i as y runs to infinity")
    add_curve_argument(p)
    p.add_argument("--x", required=True)
    p.add_argument("--coefficients", choices=["series", "printed"], default="series")
    p.set_defaults(handler=divergence)
