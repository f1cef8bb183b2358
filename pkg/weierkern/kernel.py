"""
Cauchy-kernel analogues on curves, as coefficients of dx1 (or dx1^2).

Every kernel with a (x_i - y_i) denominator is evaluated through exact
polynomial divided differences, so a removable 0/0 (x and y on different
sheets over the same base value, or sharing one coordinate) is resolved
by a directional limit along the curve instead of cancelling digits.
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass
from enum import Enum
from math import factorial
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .curve import (
    Chart,
    CurvePoint,
    HyperellipticCurve,
    PathSpec,
    PlaneCurve,
    SpaceCurve,
    fiber,
    template_coefficients,
    track,
)
from .errors import BranchPointError, DegenerateError, DimensionError, PoleError
from .polyexpr import MultiPoly

logger = logging.getLogger(__name__)

NEAR_TOL = 1e-7


class KernelVariant(str, Enum):
    SYMMETRIC = "sym"
    COMPACT = "compact"
    BRANCHED_COVER = "cover"
    GENUS4 = "g4"


@dataclass(frozen=True)
class DifferentialValue:
    """Coefficient of dx1 (weight 1) or dx1^2 (weight 2) in a chart."""
    coeff: complex
    weight: int = 1
    chart: Chart = Chart.AFFINE

    def in_chart(self, chart: Chart, x1: complex) -> "DifferentialValue":
        """Re-express at the point with affine base coordinate x1; dx1 = -x1^2 dx1'."""
        if chart is self.chart:
            return self
        factor = (-complex(x1) ** 2) ** self.weight
        if chart is Chart.AFFINE:
            factor = 1.0 / factor
        return DifferentialValue(self.coeff * factor, self.weight, chart)


def chart_factor(x1, weight: int, chart: Chart):
    """Multiplier taking an affine dx1 coefficient into ``chart``."""
    if chart is Chart.AFFINE:
        return np.ones_like(np.asarray(x1, dtype=complex))
    return (-np.asarray(x1, dtype=complex) ** 2) ** weight


def _coords(x) -> Tuple:
    if isinstance(x, CurvePoint):
        return tuple(x.x)
    return tuple(x)


def _near(a, b, scale) -> bool:
    return abs(a - b) < NEAR_TOL * scale


# ---------------------------------------------------------------------------
# plane curves and the Cauchy kernel
# ---------------------------------------------------------------------------

def cauchy(x1: complex, y1: complex) -> DifferentialValue:
    x1, y1 = complex(x1), complex(y1)
    if x1 == y1:
        raise PoleError(f"Cauchy kernel has its pole at x1 = y1 = {x1}")
    return DifferentialValue(1.0 / (x1 - y1))


def plane_weierstrass(c: PlaneCurve, x, y) -> DifferentialValue:
    """f(y1, x2) / ((x2 - y2) f_x2(x) (x1 - y1)), via the divided difference in x2."""
    (x1, x2), (y1, y2) = _coords(x), _coords(y)
    scale = 1.0 + max(abs(x1), abs(x2), abs(y1), abs(y2))
    f2 = c.f2_poly(x1, x2)
    if f2 == 0:
        raise BranchPointError(f"f_x2 vanishes at ({x1}, {x2}); use x2 as the base coordinate")
    if _near(x1, y1, scale):
        if _near(x2, y2, scale):
            raise PoleError("x and y coincide")
        return DifferentialValue(plane_weierstrass_limit(c, x, y))
    numerator = c.f.divided_difference_at(1, (y1, x2), y2)
    return DifferentialValue(numerator / (f2 * (x1 - y1)))


def plane_weierstrass_limit(c: PlaneCurve, x, y) -> complex:
    """Finite value of the plane kernel when y sits over x1 on another sheet."""
    (x1, x2), (_, y2) = _coords(x), _coords(y)
    f1 = c.f.partial(0)(x1, x2)
    return complex(-f1 / ((x2 - y2) * c.f2_poly(x1, x2)))


def plane_weierstrass_values(c: PlaneCurve, x: np.ndarray, y) -> np.ndarray:
    y1, y2 = _coords(y)
    with np.errstate(all="ignore"):
        return c.f.divided_difference_at(1, (y1, x[..., 1]), y2) / (
            c.f2_poly(x[..., 0], x[..., 1]) * (x[..., 0] - y1))


# ---------------------------------------------------------------------------
# hyperelliptic curves
# ---------------------------------------------------------------------------

def hyperelliptic_R(h: HyperellipticCurve, x1, x1p):
    """sum A_2j (x x')^j + sum A_{2j+1} (x + x')/2 (x x')^j; symmetric, R(x, x) = P(x)."""
    product = x1 * x1p
    mean = 0.5 * (x1 + x1p)
    total = 0j
    power = 1.0
    for k, a in enumerate(h.coefficients):
        if k % 2 == 0:
            total = total + a * power
        else:
            total = total + a * mean * power
            power = power * product
    return total


def _tau(h: HyperellipticCurve, x1, x1p, y, yp):
    return -(y * yp + hyperelliptic_R(h, x1, x1p)) / (2 * (x1 - x1p) ** 2 * y * yp)


def hyperelliptic_tau(h: HyperellipticCurve, x1: complex, x1p: complex,
                      sheet_signs: Tuple[int, int] = (1, 1)) -> DifferentialValue:
    """Second-kind differential with its double pole at x1 = x1p, y' meaning y(x1p)."""
    x1, x1p = complex(x1), complex(x1p)
    if x1 == x1p:
        raise PoleError(f"tau has its double pole at x1 = {x1}")
    if any(s not in (1, -1) for s in sheet_signs):
        raise DimensionError("sheet signs are +1 or -1")
    p, pp = h(x1), h(x1p)
    if p == 0 or pp == 0:
        raise BranchPointError("tau is evaluated at a branch point of the hyperelliptic curve")
    y = sheet_signs[0] * cmath.sqrt(p)
    yp = sheet_signs[1] * cmath.sqrt(pp)
    return DifferentialValue(complex(_tau(h, x1, x1p, y, yp)))


def hyperelliptic_tau_points(h: HyperellipticCurve, x, xp) -> complex:
    """tau for points (x1, y) on the plane model y^2 = P(x1); the sheets come from y."""
    (x1, y), (x1p, yp) = _coords(x), _coords(xp)
    return _tau(h, x1, x1p, y, yp)


# ---------------------------------------------------------------------------
# space curves
# ---------------------------------------------------------------------------

def numerators(c: SpaceCurve, x, y) -> Tuple[complex, complex, complex]:
    (x1, x2, x3), (y1, y2, y3) = _coords(x), _coords(y)
    f, g = c.f, c.g
    n1 = f(y1, y2, x3) * g(x1, y2, x3) - f(x1, y2, x3) * g(y1, y2, x3)
    n2 = f(x1, y2, y3) * g(x1, x2, y3) - f(x1, x2, y3) * g(x1, y2, y3)
    n3 = f(y1, x2, y3) * g(y1, x2, x3) - f(y1, x2, x3) * g(y1, x2, y3)
    return complex(n1), complex(n2), complex(n3)


def _is_genus4_shape(c: SpaceCurve) -> bool:
    x1, x2, x3 = (MultiPoly.variable(3, v) for v in range(3))
    return c.g == x2 * x3 - x1


def _check_variant(c: SpaceCurve, variant: KernelVariant) -> None:
    if variant is KernelVariant.GENUS4 and not _is_genus4_shape(c):
        raise DegenerateError("the genus-4 kernel needs g = x2*x3 - x1")
    if variant is KernelVariant.BRANCHED_COVER and (c.f.depends_on(2) or c.g.depends_on(0)):
        raise DegenerateError("the branched-cover kernel needs f(x1, x2) and g(x2, x3)")


def _bracket_1(c: SpaceCurve, variant: KernelVariant) -> Callable:
    """Numerator over (x1 - y1) of the dx1 kernels, N^1 / ((x2 - y2)(x3 - y3))."""
    f, g = c.f, c.g

    def compact(x, y):
        (x1, x2, x3), (y1, y2, y3) = x, y
        return (f.divided_difference_at(1, (x1, x2, x3), y2) * g.divided_difference_at(2, (y1, y2, y3), x3)
                - f.divided_difference_at(2, (y1, y2, y3), x3) * g.divided_difference_at(1, (x1, x2, x3), y2))

    def genus4(x, y):
        (x1, x2, x3), (y1, y2, y3) = x, y
        return (y2 * f.divided_difference_at(1, (x1, x2, x3), y2)
                - x3 * f.divided_difference_at(2, (y1, y2, y3), x3))

    def cover(x, y):
        (x1, x2, x3), (y1, y2, y3) = x, y
        return f.divided_difference_at(1, (x1, x2, x3), y2) * g.divided_difference_at(2, (y1, y2, y3), x3)

    if variant is KernelVariant.GENUS4:
        return genus4
    if variant is KernelVariant.BRANCHED_COVER:
        return cover
    return compact


def _bracket_2(c: SpaceCurve) -> Callable:
    """N^2 / ((x1 - y1)(x3 - y3))."""
    f, g = c.f, c.g

    def bracket(x, y):
        (x1, x2, x3), (y1, y2, y3) = x, y
        return (f.divided_difference_at(2, (x1, x2, x3), y3) * g.divided_difference_at(0, (x1, y2, y3), y1)
                - f.divided_difference_at(0, (x1, y2, y3), y1) * g.divided_difference_at(2, (x1, x2, x3), y3))
    return bracket


def _bracket_3(c: SpaceCurve) -> Callable:
    """N^3 / ((x1 - y1)(x2 - y2))."""
    f, g = c.f, c.g

    def bracket(x, y):
        (x1, x2, x3), (y1, y2, y3) = x, y
        return (f.divided_difference_at(0, (x1, x2, x3), y1) * g.divided_difference_at(1, (y1, x2, y3), y2)
                - f.divided_difference_at(1, (y1, x2, y3), y2) * g.divided_difference_at(0, (x1, x2, x3), y1))
    return bracket


def _ratio(c: SpaceCurve, bracket: Callable, index: int, x, y, scale: float) -> complex:
    """bracket / (x_i - y_i), or its limit along the curve when x_i = y_i."""
    if not _near(x[index], y[index], scale):
        return bracket(x, y) / (x[index] - y[index])
    tangent = np.array(c.jacobians(x), dtype=complex)
    if tangent[index] == 0:
        raise BranchPointError(f"x{index + 1} is not a local coordinate at {x}")
    base = np.array(x, dtype=complex)
    h = 1e-3 * scale / max(np.max(np.abs(tangent)), 1e-300)
    # five-point central difference: exact for brackets of degree <= 4
    samples = [bracket(tuple(base + k * h * tangent), y) for k in (-2, -1, 1, 2)]
    derivative = (samples[0] - 8 * samples[1] + 8 * samples[2] - samples[3]) / (12 * h)
    return derivative / tangent[index]


def kernel_eval(c: SpaceCurve, x, y, variant: KernelVariant = KernelVariant.GENUS4) -> DifferentialValue:
    """Weierstrass-kernel coefficient of dx1 at x with its pole at y."""
    variant = KernelVariant(variant)
    _check_variant(c, variant)
    x, y = tuple(complex(v) for v in _coords(x)), tuple(complex(v) for v in _coords(y))
    scale = 1.0 + max(abs(v) for v in x + y)
    if all(_near(a, b, scale) for a, b in zip(x, y)):
        raise PoleError("x and y coincide: the kernel has its pole there")
    j1 = complex(c.jacobian_det(x))
    if j1 == 0:
        raise BranchPointError(f"J1 vanishes at {x}; use another base coordinate")
    total = _ratio(c, _bracket_1(c, variant), 0, x, y, scale)
    if variant is KernelVariant.SYMMETRIC:
        total = (total + _ratio(c, _bracket_2(c), 1, x, y, scale)
                 + _ratio(c, _bracket_3(c), 2, x, y, scale)) / 3.0
    return DifferentialValue(complex(total / j1))


def kernel_values(c: SpaceCurve, x: np.ndarray, y, variant: KernelVariant = KernelVariant.GENUS4) -> np.ndarray:
    """Vectorized kernel over points x (..., 3) with a fixed pole y; no coincidence handling."""
    variant = KernelVariant(variant)
    _check_variant(c, variant)
    y = tuple(complex(v) for v in _coords(y))
    xs = tuple(x[..., v] for v in range(3))
    with np.errstate(all="ignore"):
        j1 = c.jacobian_det(xs)
        total = _bracket_1(c, variant)(xs, y) / (xs[0] - y[0])
        if variant is KernelVariant.SYMMETRIC:
            total = (total + _bracket_2(c)(xs, y) / (xs[1] - y[1])
                     + _bracket_3(c)(xs, y) / (xs[2] - y[2])) / 3.0
        return total / j1


def third_kind(c: SpaceCurve, x, y, yp, variant: KernelVariant = KernelVariant.GENUS4) -> DifferentialValue:
    """nu_{y,y'}(x) = K(x, y) - K(x, y'): residues +1 at y and -1 at y'."""
    if tuple(_coords(y)) == tuple(_coords(yp)):
        return DifferentialValue(0j)
    return DifferentialValue(kernel_eval(c, x, y, variant).coeff - kernel_eval(c, x, yp, variant).coeff)


def third_kind_values(c: SpaceCurve, x: np.ndarray, y, yp,
                      variant: KernelVariant = KernelVariant.GENUS4) -> np.ndarray:
    if tuple(_coords(y)) == tuple(_coords(yp)):
        return np.zeros(x.shape[:-1], dtype=complex)
    return kernel_values(c, x, y, variant) - kernel_values(c, x, yp, variant)


def quadratic_kernel(c: SpaceCurve, x, y) -> DifferentialValue:
    """K2 = K / J1(x), weight 2: a simple pole at y and weight 2 in x."""
    k = kernel_eval(c, x, y, KernelVariant.GENUS4)
    return DifferentialValue(k.coeff / complex(c.jacobian_det(_coords(x))), weight=2)


# ---------------------------------------------------------------------------
# behaviour as y1 -> infinity
# ---------------------------------------------------------------------------

def series_numerator(c: SpaceCurve, x, y) -> complex:
    """Taylor-sum form P(x, y) of the genus-4 numerator: K = P / (J1(x)(x1 - y1))."""
    (x1, x2, x3), (y1, y2, y3) = _coords(x), _coords(y)
    total = 0j
    d2 = c.f
    for n in range(1, c.f.degree(1) + 1):
        d2 = d2.partial(1)
        total += y2 * d2(x1, x2, x3) * (y2 - x2) ** (n - 1) / factorial(n)
    d3 = c.f
    for n in range(1, c.f.degree(2) + 1):
        d3 = d3.partial(2)
        total -= x3 * d3(y1, y2, y3) * (x3 - y3) ** (n - 1) / factorial(n)
    return complex(total)


def asymptotic_coeffs(c: SpaceCurve, y) -> Tuple[complex, complex, complex, complex]:
    """A1..A4 in the printed closed form (template curves only)."""
    table = template_coefficients(c)
    if table is None:
        raise DegenerateError("closed-form asymptotic coefficients exist for genus-4 template curves only")
    y1, y2, y3 = (complex(v) for v in _coords(y))
    a = lambda i, k, l: table.get((i, k, l), 0j)
    h1 = sum(a(1, k, l) * y1 ** k * y2 ** l for k in range(2) for l in range(2 - k))
    h2 = sum(a(2, k, l) * y1 ** k * y2 ** l for k in range(3) for l in range(3 - k))
    a1 = -(a(3, 0, 3) * y2 ** 3 + a(3, 0, 2) * y2 ** 2) / y1
    a2 = -a(3, 0, 3) * y2 ** 3 / y1 ** 2 - a(3, 1, 2) * y2 ** 2 / y1
    a3 = -a(3, 0, 3) * y2 ** 2 / y1
    a4 = (-a(2, 0, 2) * y2 ** 2 + 7 * y3 ** 2 + 3 * y3 * h1 + h2) / y1
    return a1, a2, a3, a4


def compact_numerator_poly(c: SpaceCurve, y) -> MultiPoly:
    """The Compact numerator M(x, y) as a polynomial in x for a fixed y."""
    y1, y2, y3 = (complex(v) for v in _coords(y))

    def first_node(p: MultiPoly, var: int) -> MultiPoly:
        # D_var p(x; x_var, y_var): second node fixed to y_var
        return p.divided_difference(var).partial_eval({3: (y1, y2, y3)[var]}).drop_variable(3)

    def second_node(p: MultiPoly, var: int) -> MultiPoly:
        # D_var p(y; y_var, x_var): only the second node stays free
        fixed = p.divided_difference(var).partial_eval({0: y1, 1: y2, 2: y3})
        return fixed.embed(3, [0, 1, 2, var])

    return (first_node(c.f, 1) * second_node(c.g, 2)
            - second_node(c.f, 2) * first_node(c.g, 1))


def asymptotic_coeffs_series(c: SpaceCurve, y) -> Tuple[complex, complex, complex, complex]:
    """A1..A4 read off the expansion of M(x, y) / (x1 - y1) in 1/y1, keeping 1, x1, x2, x3."""
    y1 = complex(_coords(y)[0])
    m = compact_numerator_poly(c, y)
    p0 = m.coeff((0, 0, 0))
    return (-p0 / y1,
            -m.coeff((1, 0, 0)) / y1 - p0 / y1 ** 2,
            -m.coeff((0, 1, 0)) / y1,
            -m.coeff((0, 0, 1)) / y1)


@dataclass
class DivergenceReport:
    coefficient_set: str
    radii: Tuple[float, ...]
    exponents: List[float]          # one per branch at infinity
    residuals: List[List[float]]    # |K - sum omega_i A_i| per branch and radius

    @property
    def bounded(self) -> bool:
        return all(e < 0.1 for e in self.exponents)


def divergent_part_report(c: SpaceCurve, x, coefficient_set: str = "series",
                          radii: Sequence[float] = (1e3, 1e4, 1e5),
                          direction: complex = complex(0.6, 0.8)) -> DivergenceReport:
    """Growth of K(x, y) - sum_i omega_i(x) A_i(y) as y runs to infinity along every branch."""
    if coefficient_set not in ("series", "printed"):
        raise DimensionError("coefficient set is 'series' or 'printed'")

    x = tuple(complex(v) for v in _coords(x))
    j1 = complex(c.jacobian_det(x))
    omegas = np.array([1.0, x[0], x[1], x[2]]) / j1
    direction = direction / abs(direction)
    z0 = 1.0 / (radii[0] * direction)
    start = fiber(c, z0, Chart.INFINITY).as_array()
    residuals = [[] for _ in range(len(start))]
    points = start
    previous = z0
    for radius in radii:
        z = 1.0 / (radius * direction)
        if z != previous:
            steps = np.geomspace(abs(previous), abs(z), 17)
            path = PathSpec(tuple(complex(s) / direction for s in steps), Chart.INFINITY,
                            max_step=abs(previous - z))
            points = track(c, points, path)
            previous = z
        for branch, y in enumerate(points):
            coeffs = (asymptotic_coeffs_series(c, y) if coefficient_set == "series"
                      else asymptotic_coeffs(c, y))
            k = kernel_eval(c, x, y, KernelVariant.COMPACT).coeff
            residuals[branch].append(float(abs(k - np.dot(omegas, coeffs))))
    exponents = []
    for values in residuals:
        logs = np.log(np.maximum(values, 1e-300))
        exponents.append(float(np.polyfit(np.log(radii), logs, 1)[0]))
    logger.info("divergent part (%s): growth exponents %s", coefficient_set,
                ", ".join(f"{e:.3f}" for e in exponents))
    return DivergenceReport(coefficient_set, tuple(radii), exponents, residuals)


def compare_asymptotic(c: SpaceCurve, y) -> Dict[str, object]:
    """Printed closed form against the series oracle at one point."""
    printed = asymptotic_coeffs(c, y)
    series = asymptotic_coeffs_series(c, y)
    diffs = [abs(p - s) / max(1.0, abs(s)) for p, s in zip(printed, series)]
    mismatched = [f"A{i + 1}" for i, d in enumerate(diffs) if d > 1e-9]
    if mismatched:
        logger.warning("printed asymptotic coefficients disagree with the series oracle: %s",
                       ", ".join(mismatched))
    return {"printed": printed, "series": series, "relative_difference": diffs, "mismatched": mismatched}
