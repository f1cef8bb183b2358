"""Helpers shared by the subcommand modules."""

import argparse
from typing import Iterable, List

from ..curve import CurvePoint, SpaceCurve
from ..curvefile import LoadedCurve, load_curve
from ..errors import UsageError
from ..models import ComplexModel, PointOut


def add_curve_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("file", help="curve file (JSON)")


def load(args: argparse.Namespace) -> LoadedCurve:
    return load_curve(args.file)


def require_space(loaded: LoadedCurve, what: str) -> SpaceCurve:
    if not isinstance(loaded.curve, SpaceCurve):
        raise UsageError(f"{what} needs a space curve f = g = 0")
    return loaded.curve


def complex_list(values: Iterable[complex]) -> List[ComplexModel]:
    return [ComplexModel.of(v) for v in values]


def point_out(p: CurvePoint) -> PointOut:
    return PointOut(coords=complex_list(p.x), residual=p.residual)
