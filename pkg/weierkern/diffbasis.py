"""
Holomorphic and quadratic differentials on the genus-4 template curve.

A basis element is numerator / (J1)^p times dx1^weight, stored symbolically so
it can be printed and moved between charts exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .curve import (
    Chart,
    CurvePoint,
    SpaceCurve,
    branch_locus,
    template_coefficients,
)
from .errors import BranchPointError, DegenerateError, DimensionError
from .kernel import DifferentialValue, chart_factor
from .localanalysis import ContourSpec, branch_contour, infinity_anchors, laurent_from_lift, lift_contour
from .polyexpr import MultiPoly, format_poly

logger = logging.getLogger(__name__)

HOLOMORPHIC_NUMERATORS = ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))
# x2*x3 is left out: it equals x1 on the curve
QUADRATIC_NUMERATORS = (
    (0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1),
    (2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 0), (1, 0, 1),
)


@dataclass(frozen=True)
class BasisElement:
    numerator: MultiPoly
    j_power: int


@dataclass(frozen=True)
class DifferentialBasis:
    weight: int
    elements: Tuple[BasisElement, ...]
    name: str = "custom"

    def __len__(self):
        return len(self.elements)

    def describe(self, variables: Sequence[str] = ("x1", "x2", "x3")) -> List[Dict[str, object]]:
        return [{"numerator": format_poly(e.numerator, variables), "j_power": e.j_power}
                for e in self.elements]


def _require_template(c: SpaceCurve) -> None:
    if template_coefficients(c) is None:
        raise DegenerateError("built-in bases exist for genus-4 template curves only; "
                              "pass numerators to custom_basis instead")


def holomorphic_basis(c: SpaceCurve) -> DifferentialBasis:
    """omega_i = (1, x1, x2, x3) dx1 / J1."""
    _require_template(c)
    elements = tuple(BasisElement(MultiPoly(3, {e: 1}), 1) for e in HOLOMORPHIC_NUMERATORS)
    return DifferentialBasis(1, elements, "holomorphic")


def quadratic_basis(c: SpaceCurve) -> DifferentialBasis:
    """phi_mu = (monomial of degree <= 2 except x2 x3) dx1^2 / J1^2."""
    _require_template(c)
    elements = tuple(BasisElement(MultiPoly(3, {e: 1}), 2) for e in QUADRATIC_NUMERATORS)
    return DifferentialBasis(2, elements, "quadratic")


def custom_basis(numerators: Sequence[MultiPoly], weight: int, j_power: Optional[int] = None) -> DifferentialBasis:
    if weight not in (1, 2):
        raise DimensionError("differentials here have weight 1 or 2")
    if j_power is None:
        j_power = weight
    if j_power < 0:
        raise DimensionError("the J1 power must be nonnegative")
    for p in numerators:
        if p.nvars != 3:
            raise DimensionError("basis numerators are polynomials in x1, x2, x3")
    return DifferentialBasis(weight, tuple(BasisElement(p, j_power) for p in numerators))


def basis_values(c: SpaceCurve, b: DifferentialBasis, x) -> np.ndarray:
    """Affine coefficients of every element at points x (..., 3); shape (len(b), ...)."""
    coords = tuple(np.asarray(x)[..., v] for v in range(3))
    with np.errstate(all="ignore"):
        j1 = c.jacobian_det(coords)
        powers = {p: j1 ** p for p in {e.j_power for e in b.elements}}
        return np.stack([e.numerator(*coords) / powers[e.j_power] for e in b.elements])


def eval_basis(c: SpaceCurve, b: DifferentialBasis, x, chart: Chart = Chart.AFFINE) -> List[DifferentialValue]:
    x = tuple(complex(v) for v in (x.x if isinstance(x, CurvePoint) else x))
    if len(x) != 3:
        raise DimensionError(f"expected 3 coordinates, got {len(x)}")
    j1 = complex(c.jacobian_det(x))
    if j1 == 0:
        raise BranchPointError(f"J1 vanishes at {x}; the basis is not expressed in x1 there")
    factor = complex(chart_factor(x[0], b.weight, chart)) if chart is not Chart.AFFINE else 1.0
    return [DifferentialValue(complex(e.numerator(*x)) / j1 ** e.j_power * factor, b.weight, chart)
            for e in b.elements]


def element_function(c: SpaceCurve, b: DifferentialBasis, index: int):
    """Single basis element as a point function returning DifferentialValue."""
    element = b.elements[index]

    def value(x) -> DifferentialValue:
        x = tuple(x)
        j1 = complex(c.jacobian_det(x))
        if j1 == 0:
            raise BranchPointError(f"J1 vanishes at {x}")
        return DifferentialValue(complex(element.numerator(*x)) / j1 ** element.j_power, b.weight)
    return value


@dataclass
class Independence:
    matrix: np.ndarray
    determinant: complex
    condition: float

    @property
    def independent(self) -> bool:
        return bool(np.isfinite(self.condition) and self.condition < 1e12)


def independence(c: SpaceCurve, b: DifferentialBasis, points: Sequence) -> Independence:
    """Evaluation matrix E[a, i] = element i at point a, with determinant and condition number."""
    if len(points) != len(b):
        raise DimensionError(f"need {len(b)} points for a {len(b)}-element basis, got {len(points)}")
    rows = [[v.coeff for v in eval_basis(c, b, p)] for p in points]
    matrix = np.array(rows, dtype=complex)
    det = complex(np.linalg.det(matrix))
    cond = float(np.linalg.cond(matrix))
    logger.info("basis evaluation matrix: det %.3g, condition %.3g", abs(det), cond)
    return Independence(matrix, det, cond)


@dataclass
class HolomorphyEntry:
    element: int
    where: str
    base: complex
    residue: complex
    error: float


@dataclass
class HolomorphyReport:
    entries: List[HolomorphyEntry]
    tolerance: float

    @property
    def worst(self) -> float:
        return max((abs(e.residue) for e in self.entries), default=0.0)

    @property
    def holomorphic(self) -> bool:
        return self.worst <= self.tolerance


def holomorphy_report(c: SpaceCurve, b: DifferentialBasis, points: Sequence = (),
                      include_branch: bool = True, include_infinity: bool = True,
                      radius: float = 1e-2, nodes: int = 64, tol: float = 1e-8) -> HolomorphyReport:
    """Contour residues of every element around sample points, branch points and infinity."""
    functions = [element_function(c, b, i) for i in range(len(b))]
    entries: List[HolomorphyEntry] = []

    def record(where: str, spec):
        lifted = lift_contour(c, spec)
        for i, fn in enumerate(functions):
            result = laurent_from_lift(lifted, fn, -1, tol)
            entries.append(HolomorphyEntry(i, where, spec.center, result.value, result.error))

    for p in points:
        p = p if isinstance(p, CurvePoint) else c.make_point(p)
        record("sample", ContourSpec(p.x1, radius, nodes, Chart.AFFINE, p))
    if include_branch:
        for bp in branch_locus(c):
            record("branch", branch_contour(c, bp, radius, nodes))
    if include_infinity:
        for anchor in infinity_anchors(c, radius):
            record("infinity", ContourSpec(0j, radius, nodes, Chart.INFINITY, anchor))
    report = HolomorphyReport(entries, tol)
    logger.info("holomorphy of %s basis: worst residue %.3g over %d contours",
                b.name, report.worst, len(entries) // max(1, len(b)))
    return report
