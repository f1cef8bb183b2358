"""Generalized Weierstrass kernels on algebraic space curves."""

from .curve import (
    Chart,
    CurvePoint,
    HyperellipticCurve,
    PlaneCurve,
    SpaceCurve,
    adopt_fixture,
    fiber,
    genus,
    genus4_template,
    primary_fixture,
)
from .errors import WeierkernError
from .kernel import DifferentialValue, KernelVariant, kernel_eval
from .polyexpr import MultiPoly, parse

__version__ = "0.1.0"

__all__ = [
    "Chart",
    "CurvePoint",
    "DifferentialValue",
    "HyperellipticCurve",
    "KernelVariant",
    "MultiPoly",
    "PlaneCurve",
    "SpaceCurve",
    "WeierkernError",
    "adopt_fixture",
    "fiber",
    "genus",
    "genus4_template",
    "kernel_eval",
    "parse",
    "primary_fixture",
]
