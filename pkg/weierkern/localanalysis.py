"""
Contour residues and Laurent coefficients of differentials on a curve.

A contour is a circle in one base coordinate (x1, x1' = 1/x1, or x2 / x3 near
branch points of x1). The sheet is picked by an anchor point and followed by
continuation from node to node; the integral is the trapezoidal rule, which
converges geometrically for integrands analytic on an annulus.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Union

import numpy as np

from .curve import (
    BranchPoint,
    Chart,
    Curve,
    CurvePoint,
    PathSpec,
    SpaceCurve,
    branch_points,
    fiber,
    track,
    x1_to_chart,
)
from .errors import BranchPointError, ConvergenceError, DimensionError
from .kernel import DifferentialValue
from .workers import map_ordered

logger = logging.getLogger(__name__)

DEFAULT_RADIUS = 1e-2
DEFAULT_NODES = 64
DEFAULT_TOL = 1e-8
MAX_POLE_ORDER = 6
CLOSURE_TOL = 1e-6

PointFunction = Callable[..., Union[DifferentialValue, complex]]


@dataclass(frozen=True)
class ContourSpec:
    center: complex
    radius: float = DEFAULT_RADIUS
    nodes: int = DEFAULT_NODES
    chart: Chart = Chart.AFFINE
    sheet_anchor: Optional[CurvePoint] = None
    base_index: int = 0          # 0: x1, 1: x2, 2: x3
    multi_sheet: bool = False

    def __post_init__(self):
        if not self.radius > 0:
            raise DimensionError("contour radius must be positive")
        if self.nodes < 16:
            raise DimensionError("contours need at least 16 nodes")
        if self.base_index not in (0, 1, 2):
            raise DimensionError("base coordinate index is 0, 1 or 2")
        if self.base_index and self.chart is not Chart.AFFINE:
            raise DimensionError("alternate base coordinates are affine only")


@dataclass
class LiftedContour:
    """Nodes of the contour lifted to the curve, 2 * nodes per turn."""
    center: complex
    points: Optional[np.ndarray]   # (K, nvars) affine coordinates, None for a bare z-plane contour
    angles: np.ndarray             # (K,) continuous node angles, z_k = center + radius e^{i angle}
    dx1_dz: np.ndarray             # (K,) chart conversion of dx1
    turns: int
    radius: float


@dataclass(frozen=True)
class ContourResult:
    value: complex
    error: float
    nodes: int
    turns: int = 1


def _tracking_curve(c: Curve, base_index: int):
    if base_index == 0:
        return c, [0, 1, 2][:c.nvars]
    if not isinstance(c, SpaceCurve):
        raise DimensionError("alternate base coordinates exist for space curves only")
    order = [base_index] + [v for v in range(3) if v != base_index]
    return c.permuted(order), order


def _close(a: np.ndarray, b: np.ndarray) -> bool:
    return float(np.max(np.abs(a - b))) <= CLOSURE_TOL * (1.0 + float(np.max(np.abs(b))))


def lift_contour(c: Optional[Curve], spec: ContourSpec) -> LiftedContour:
    """Follow the anchored sheet around the circle; more turns only in multi-sheet mode."""
    per_turn = 2 * spec.nodes
    center = complex(spec.center)
    if c is None:
        theta = 2 * np.pi * np.arange(per_turn) / per_turn
        return LiftedContour(center, None, theta, np.ones(per_turn, dtype=complex), 1, spec.radius)
    if spec.sheet_anchor is None:
        raise DimensionError("a sheet anchor is needed to pick the sheet of the contour")
    curve, order = _tracking_curve(c, spec.base_index)
    anchor = np.array(spec.sheet_anchor.x, dtype=complex)[order]
    anchor_base = complex(x1_to_chart(anchor[0], spec.chart))
    offset = anchor_base - center
    theta0 = float(np.angle(offset)) if offset != 0 else 0.0
    start = center + spec.radius * np.exp(1j * theta0)
    distance = abs(start - anchor_base)
    pts = anchor[None, :]
    if distance > 1e-14 * (1 + abs(start)):
        lead = PathSpec((anchor_base, start), spec.chart, max_step=max(spec.radius / 4, distance / 32))
        pts = track(curve, pts, lead)
    first = pts[0].copy()
    max_turns = curve.fiber_degree if spec.multi_sheet else 1
    step = 2 * np.pi / per_turn
    collected: List[np.ndarray] = []
    angles: List[float] = []
    turns = 0
    while True:
        for k in range(per_turn):
            angle = theta0 + (turns * per_turn + k) * step
            collected.append(pts[0].copy())
            angles.append(angle)
            a = center + spec.radius * np.exp(1j * angle)
            b = center + spec.radius * np.exp(1j * (angle + step))
            pts = track(curve, pts, PathSpec((a, b), spec.chart, max_step=abs(b - a)))
        turns += 1
        if _close(pts[0], first):
            break
        if turns >= max_turns:
            if spec.multi_sheet:
                raise ConvergenceError(f"lifted contour did not close after {turns} turns")
            raise BranchPointError(f"the contour around {center} encloses a branch point; "
                                   "use multi-sheet mode or another base coordinate")
    lifted = np.array(collected)
    points = np.empty_like(lifted)
    points[:, order] = lifted
    if spec.chart is Chart.INFINITY:
        dx1_dz = -points[:, 0] ** 2
    elif spec.base_index:
        jac = np.array([c.jacobians(p) for p in points])
        dx1_dz = jac[:, 0] / jac[:, spec.base_index]
    else:
        dx1_dz = np.ones(len(points), dtype=complex)
    logger.debug("lifted contour around %s: %d nodes, %d turn(s)", center, len(points), turns)
    return LiftedContour(center, points, np.array(angles), dx1_dz, turns, spec.radius)


def lift_turns(c: Curve, spec: ContourSpec) -> int:
    """Turns after which the lifted contour closes: nu in x1 - a = t^nu."""
    multi = ContourSpec(spec.center, spec.radius, spec.nodes, spec.chart, spec.sheet_anchor,
                        spec.base_index, multi_sheet=True)
    return lift_contour(c, multi).turns


def _local_values(lifted: LiftedContour, fn: PointFunction):
    """(t, g): nodes of the local coordinate t, z - center = t^turns, and fn's coefficient in dt."""
    if lifted.points is None:
        z = lifted.center + lifted.radius * np.exp(1j * lifted.angles)
        values = np.array([complex(v) for v in map_ordered(fn, list(z))])
        return z - lifted.center, values
    raw = map_ordered(lambda p: fn(tuple(p)), list(lifted.points))
    weights = {v.weight if isinstance(v, DifferentialValue) else 1 for v in raw}
    if len(weights) > 1:
        raise DimensionError("mixed differential weights on one contour")
    weight = weights.pop()
    coeffs = np.array([v.coeff if isinstance(v, DifferentialValue) else complex(v) for v in raw])
    nu = lifted.turns
    t = lifted.radius ** (1.0 / nu) * np.exp(1j * lifted.angles / nu)
    return t, coeffs * (lifted.dx1_dz * nu * t ** (nu - 1)) ** weight


def laurent_from_lift(lifted: LiftedContour, fn: PointFunction, k: int,
                      tol: float = DEFAULT_TOL) -> ContourResult:
    """c_k of fn in the local coordinate of the lifted contour; node doubling gives the error."""
    t, g = _local_values(lifted, fn)
    terms = g * t ** (-k)
    full = complex(np.mean(terms))
    half = complex(np.mean(terms[::2]))
    if not np.isfinite(full):
        raise ConvergenceError("non-finite value on the contour")
    error = abs(full - half)
    rho = float(np.abs(t[0]))
    scale = max(1.0, float(np.max(np.abs(g))) * rho ** (-k))
    if error > 10 * tol * scale:
        raise ConvergenceError(f"trapezoidal rule not converged: doubling changed c_{k} by {error:.3g}")
    return ContourResult(full, error, len(terms), lifted.turns)


def laurent_coeff(c: Optional[Curve], fn: PointFunction, spec: ContourSpec, k: int,
                  tol: float = DEFAULT_TOL) -> ContourResult:
    return laurent_from_lift(lift_contour(c, spec), fn, k, tol)


def contour_residue(c: Optional[Curve], fn: PointFunction, spec: ContourSpec,
                    tol: float = DEFAULT_TOL) -> ContourResult:
    """(1/2 pi i) times the integral of the differential around the contour."""
    return laurent_from_lift(lift_contour(c, spec), fn, -1, tol)


def pole_order(c: Optional[Curve], fn: PointFunction, spec: ContourSpec, tol: float = 1e-6) -> int:
    """Largest m <= 6 with c_{-m} above tol relative to the contour scale; 0 if regular."""
    t, g = _local_values(lift_contour(c, spec), fn)
    rho = float(np.abs(t[0]))
    peak = float(np.max(np.abs(g)))
    order = 0
    for m in range(1, MAX_POLE_ORDER + 2):
        coeff = complex(np.mean(g * t ** m))
        if abs(coeff) >= tol * peak * rho ** m:
            if m > MAX_POLE_ORDER:
                raise ConvergenceError(f"pole order above {MAX_POLE_ORDER} is unresolved")
            order = m
    return order


# ---------------------------------------------------------------------------
# anchors
# ---------------------------------------------------------------------------

def infinity_anchors(c: Curve, radius: float = DEFAULT_RADIUS) -> List[CurvePoint]:
    """One point on every branch over x1' = radius."""
    return list(fiber(c, radius, Chart.INFINITY).points)


def infinity_branches(c: SpaceCurve, radius: float = DEFAULT_RADIUS):
    """Anchors at infinity labelled by the coordinate that diverges along the branch."""
    return [(p, "x3" if abs(p.x3) > abs(p.x2) else "x2") for p in infinity_anchors(c, radius)]


def branch_contour(c: SpaceCurve, bp: BranchPoint, radius: float = DEFAULT_RADIUS,
                   nodes: int = DEFAULT_NODES) -> ContourSpec:
    """Contour around a branch point of x1 in whichever of x2, x3 is a local coordinate there."""
    jac = np.abs(np.array(c.jacobians(bp.point), dtype=complex))
    index = 1 if jac[1] >= jac[2] else 2
    if jac[index] <= 1e-9 * (1.0 + float(np.max(jac))):
        raise BranchPointError(f"no coordinate is a local parameter at {bp.point}: the point is singular")
    anchor = CurvePoint(tuple(bp.point), bp.residual)
    return ContourSpec(bp.point[index], radius, nodes, Chart.AFFINE, anchor, base_index=index)


def residue_ledger(c: SpaceCurve, fn: PointFunction, pole: CurvePoint, radius: float = DEFAULT_RADIUS,
                   nodes: int = DEFAULT_NODES, tol: float = DEFAULT_TOL):
    """Residue at the pole and on every branch at infinity, with their sum."""
    at_pole = contour_residue(c, fn, ContourSpec(pole.x1, radius, nodes, Chart.AFFINE, pole), tol)
    branches = []
    for anchor, label in infinity_branches(c, radius):
        result = contour_residue(c, fn, ContourSpec(0j, radius, nodes, Chart.INFINITY, anchor), tol)
        branches.append((label, result))
    total = at_pole.value + sum(r.value for _, r in branches)
    return {"pole": at_pole, "infinity": branches, "total": total}


def sample_points(c: Curve, count: int, rng: np.random.Generator, spread: float = 1.5,
                  clearance: float = 0.05) -> List[CurvePoint]:
    """Seeded curve points whose x1 stays ``clearance`` away from the branch values."""
    avoid = np.array(branch_points(c), dtype=complex)
    points: List[CurvePoint] = []
    while len(points) < count:
        base = complex(spread * rng.uniform(-1, 1), spread * rng.uniform(-1, 1))
        if len(avoid) and float(np.min(np.abs(avoid - base))) < clearance:
            continue
        fib = fiber(c, base)
        if fib.degenerate:
            continue
        points.append(fib.points[int(rng.integers(len(fib)))])
    return points
