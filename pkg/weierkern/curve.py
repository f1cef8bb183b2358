"""
Curves cut out by f = g = 0 in C^3, plane curves f(x1, x2) = 0 and
hyperelliptic curves x2^2 = P(x1).

Everything here treats x1 as the base coordinate of a branched cover of the
x1-line. Fibers are found by elimination (a resultant in x3 after a generic
shear x2 = u - s*x3), companion-matrix eigenvalues and a Newton polish on the
full system. Sheets carry no global labels: fibers are sorted per base point
and monodromy is reported relative to that order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .errors import (
    BranchPointError,
    DegenerateError,
    DimensionError,
    InvalidDegreesError,
    NewtonError,
    StepUnderflowError,
)
from .polyexpr import MultiPoly, resultant, sylvester_matrix

logger = logging.getLogger(__name__)

ON_CURVE_TOL = 1e-9
NEWTON_ITERATIONS = 50
NEWTON_TARGET = 1e-14
MERGE_TOL = 1e-7
PATH_CLEARANCE = 1e-3
SINGULAR_TOL = 1e-7
BRANCH_ACCEPT = 1e-8
MIN_STEP = 1e-11

# Fixed generic constants: the shear of the fiber projection and the affine
# chart used for the points at infinity. Any values off a measure-zero set work.
SHEAR = complex(0.6180339887498949, 0.4142135623730951)
INFINITY_CHART = (complex(0.3713906763541037, -0.2182178902359924),
                  complex(-0.2887040924136746, 0.4472135954999579))


class Chart(str, Enum):
    AFFINE = "affine"
    INFINITY = "inf"


def chart_to_x1(w, chart: Chart):
    """Base coordinate of a chart to x1 (x1' = 1/x1 in the chart at infinity)."""
    if chart is Chart.AFFINE:
        return w
    if np.any(np.asarray(w) == 0):
        raise DegenerateError("x1' = 0 lies at infinity; use points_at_infinity for that fiber")
    return 1.0 / w


def x1_to_chart(x1, chart: Chart):
    return x1 if chart is Chart.AFFINE else 1.0 / x1


@dataclass(frozen=True)
class CurvePoint:
    x: Tuple[complex, ...]
    residual: float = 0.0

    @property
    def x1(self) -> complex:
        return self.x[0]

    @property
    def x2(self) -> complex:
        return self.x[1]

    @property
    def x3(self) -> complex:
        return self.x[2]

    def as_array(self) -> np.ndarray:
        return np.array(self.x, dtype=complex)


@dataclass(frozen=True)
class PathSpec:
    waypoints: Tuple[complex, ...]
    chart: Chart = Chart.AFFINE
    max_step: float = 0.05

    def reversed(self) -> "PathSpec":
        return PathSpec(tuple(reversed(self.waypoints)), self.chart, self.max_step)

    def then(self, other: "PathSpec") -> "PathSpec":
        if other.chart is not self.chart:
            raise DimensionError("cannot concatenate paths in different charts")
        return PathSpec(self.waypoints + other.waypoints[1:], self.chart,
                        min(self.max_step, other.max_step))


@dataclass(frozen=True)
class Fiber:
    base: complex
    chart: Chart
    points: Tuple[CurvePoint, ...]
    degenerate: bool = False

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, index):
        return self.points[index]

    def as_array(self) -> np.ndarray:
        return np.array([p.x for p in self.points], dtype=complex)


@dataclass
class FiberBatch:
    """Vectorized fibers over many base values; rows that failed are masked, not raised."""
    x1: np.ndarray
    points: np.ndarray        # (N, D, nvars)
    residual: np.ndarray      # (N, D)
    degenerate: np.ndarray    # (N,) clustered points or escaping roots
    converged: np.ndarray     # (N,)

    @property
    def ok(self) -> np.ndarray:
        return ~self.degenerate & self.converged


@dataclass(frozen=True)
class BranchPoint:
    point: Tuple[complex, ...]
    residual: float

    @property
    def value(self) -> complex:
        return self.point[0]


@dataclass(frozen=True)
class Ramification:
    value: complex
    cycles: Tuple[Tuple[int, ...], ...]
    radius: float

    @property
    def multiplicity(self) -> int:
        return sum(len(cycle) - 1 for cycle in self.cycles)


@dataclass(frozen=True)
class InfinityPoint:
    coords: Tuple[complex, complex, complex]   # projective (x1 : x2 : x3), largest entry 1
    multiplicity: int = 1


@dataclass
class SmoothnessReport:
    smooth: bool
    min_singular_value: float
    checked: int
    failures: List[Dict[str, object]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# genus
# ---------------------------------------------------------------------------

def genus(d_f: int, d_g: int) -> int:
    """Genus of a smooth complete intersection of degrees d_f, d_g in P^3."""
    if int(d_f) != d_f or int(d_g) != d_g or d_f < 1 or d_g < 1:
        raise InvalidDegreesError(f"degrees must be positive integers, got ({d_f}, {d_g})")
    twice = d_f * d_g * (d_f + d_g - 4)
    if twice % 2 or twice < -2:
        raise InvalidDegreesError(f"degrees ({d_f}, {d_g}) give no valid genus")
    return 1 + twice // 2


# ---------------------------------------------------------------------------
# numerical helpers
# ---------------------------------------------------------------------------

def _batch_roots(coeffs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Roots of sum_k coeffs[..., k] z^k for every leading index.

    Returns (roots (..., d), bad) where ``bad`` marks rows whose leading
    coefficient is negligible or whose coefficients are not finite.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    d = coeffs.shape[-1] - 1
    scale = np.max(np.abs(coeffs), axis=-1)
    finite = np.all(np.isfinite(coeffs), axis=-1)
    lead = coeffs[..., -1]
    bad = ~finite | (np.abs(lead) <= 1e-14 * scale)
    if d < 1:
        return np.zeros(coeffs.shape[:-1] + (0,), dtype=complex), bad
    safe = np.where(bad[..., None], 1.0, coeffs)
    monic = safe[..., :-1] / safe[..., -1:]
    if d == 1:
        return -monic, bad
    companion = np.zeros(coeffs.shape[:-1] + (d, d), dtype=complex)
    companion[..., 1:, :-1] = np.eye(d - 1)
    companion[..., :, -1] = -monic
    return np.linalg.eigvals(companion), bad


def _relative(values, magnitudes):
    return np.abs(values) / np.maximum(magnitudes, 1.0)


def _min_pair_distance(points: np.ndarray) -> np.ndarray:
    """Smallest distance between two points of each row, points (N, D, k)."""
    n_pts = points.shape[1]
    if n_pts < 2:
        return np.full(points.shape[0], np.inf)
    diff = points[:, :, None, :] - points[:, None, :, :]
    dist = np.sqrt(np.sum(np.abs(diff) ** 2, axis=-1))
    dist[:, np.arange(n_pts), np.arange(n_pts)] = np.inf
    return dist.min(axis=(1, 2))


def canonical_order(points: np.ndarray) -> np.ndarray:
    """Sort by argument, then magnitude, of the last coordinate (ties: the one before)."""
    last = points[:, -1]
    prev = points[:, -2]
    return np.lexsort((np.abs(prev), np.round(np.angle(prev), 9),
                       np.abs(last), np.round(np.angle(last), 9)))


def _pencil_roots(p: MultiPoly, q: MultiPoly, var: int) -> np.ndarray:
    """x1-roots of res_var(p, q) for p, q in (x1, x_var) only.

    The roots are the finite eigenvalues of the companion linearization of
    the Sylvester matrix, a polynomial matrix in x1; the determinant itself is
    never expanded.
    """
    rows = sylvester_matrix(p, q, var)
    n = len(rows)
    top = max(entry.degree(0) for row in rows for entry in row)
    if top <= 0:
        return np.zeros(0, dtype=complex)
    blocks = np.zeros((top + 1, n, n), dtype=complex)
    for i, row in enumerate(rows):
        for j, entry in enumerate(row):
            for exp, c in entry.items():
                blocks[exp[0], i, j] += c
    blocks /= np.max(np.abs(blocks))

    rng = np.random.default_rng(7)
    singular = 0
    for _ in range(2):
        trial = complex(*rng.normal(size=2))
        value = sum(blocks[k] * trial ** k for k in range(top + 1))
        sv = np.linalg.svd(value, compute_uv=False)
        if sv[-1] <= 1e-13 * sv[0]:
            singular += 1
    if singular == 2:
        raise DegenerateError("elimination vanishes identically: not a complete intersection")

    size = n * top
    a = np.zeros((size, size), dtype=complex)
    b = np.eye(size, dtype=complex)
    if top > 1:
        a[: n * (top - 1), n:] = np.eye(n * (top - 1))
    for k in range(top):
        a[n * (top - 1):, k * n:(k + 1) * n] = -blocks[k]
    b[n * (top - 1):, n * (top - 1):] = blocks[top]
    alpha, beta = scipy.linalg.eig(a, b, right=False, homogeneous_eigvals=True)
    finite = np.abs(beta) > 1e-12 * np.abs(alpha)
    roots = alpha[finite] / beta[finite]
    return roots[np.abs(roots) < 1e8]


def _cluster(values: Sequence[complex], tol: float) -> List[List[int]]:
    groups: List[List[int]] = []
    for index, v in enumerate(values):
        for group in groups:
            if abs(values[group[0]] - v) <= tol * (1 + abs(v)):
                group.append(index)
                break
        else:
            groups.append([index])
    return groups


# ---------------------------------------------------------------------------
# curve types
# ---------------------------------------------------------------------------

class Curve:
    """Shared behaviour of curves seen as branched covers of the x1-line."""

    nvars: int
    on_curve_tol: float

    def equations(self) -> Tuple[MultiPoly, ...]:
        raise NotImplementedError

    @cached_property
    def _gradients(self) -> Tuple[Tuple[MultiPoly, ...], ...]:
        return tuple(tuple(p.partial(v) for v in range(self.nvars)) for p in self.equations())

    def residual(self, x: Sequence) -> np.ndarray:
        """Largest equation value, each measured against its term magnitude."""
        worst = 0.0
        for p in self.equations():
            worst = np.maximum(worst, _relative(p(*x), p.term_magnitude(*x)))
        return worst

    def coefficient_scale(self) -> float:
        return max(p.coefficient_scale() for p in self.equations())

    def gradients_at(self, x: Sequence) -> np.ndarray:
        return np.array([[dp(*x) for dp in grads] for grads in self._gradients], dtype=complex)

    def jacobian_det(self, x: Sequence):
        raise NotImplementedError

    def tangent_slopes(self, x: Sequence) -> List:
        raise NotImplementedError

    def fiber_batch(self, x1) -> FiberBatch:
        raise NotImplementedError

    def make_point(self, x: Sequence[complex]) -> CurvePoint:
        x = tuple(complex(v) for v in x)
        if len(x) != self.nvars:
            raise DimensionError(f"expected {self.nvars} coordinates, got {len(x)}")
        return CurvePoint(x, float(self.residual(x)))

    def is_on_curve(self, x: Sequence[complex]) -> bool:
        return float(self.residual(x)) <= self.on_curve_tol

    def _newton_step(self, x: Sequence) -> Sequence:
        raise NotImplementedError

    def _newton(self, x: List[np.ndarray]) -> Tuple[List[np.ndarray], np.ndarray]:
        """Vectorized Newton in the fiber coordinates; a step is kept only where it helps."""
        res = self.residual(x)
        for _ in range(NEWTON_ITERATIONS):
            active = res > NEWTON_TARGET
            if not np.any(active):
                break
            with np.errstate(all="ignore"):
                trial = self._newton_step(x)
                trial_res = self.residual(trial)
            better = active & np.isfinite(trial_res) & (trial_res < res)
            if not np.any(better):
                break
            x = [np.where(better, t, old) for t, old in zip(trial, x)]
            res = np.where(better, trial_res, res)
        return x, res


class SpaceCurve(Curve):
    nvars = 3

    def __init__(self, f: MultiPoly, g: MultiPoly, on_curve_tol: float = ON_CURVE_TOL,
                 name: Optional[str] = None):
        if f.nvars != 3 or g.nvars != 3:
            raise DimensionError("space curves need two polynomials in x1, x2, x3")
        if f.degree() < 1 or g.degree() < 1:
            raise InvalidDegreesError("f and g must be nonconstant")
        self.f = f
        self.g = g
        self.d_f = f.degree()
        self.d_g = g.degree()
        self.genus = genus(self.d_f, self.d_g)
        self.on_curve_tol = on_curve_tol
        self.name = name
        self._cache: Dict[str, object] = {}

    def __repr__(self):
        return f"SpaceCurve(f={self.f}, g={self.g})"

    def equations(self):
        return (self.f, self.g)

    @cached_property
    def j1_poly(self) -> MultiPoly:
        return self.f.partial(1) * self.g.partial(2) - self.f.partial(2) * self.g.partial(1)

    def jacobians(self, x: Sequence):
        (f1, f2, f3), (g1, g2, g3) = self.gradients_at(x)
        return (f2 * g3 - f3 * g2, f3 * g1 - f1 * g3, f1 * g2 - f2 * g1)

    def jacobian_det(self, x):
        return self.jacobians(x)[0]

    def tangent_slopes(self, x):
        j1, j2, j3 = self.jacobians(x)
        return [np.ones_like(j1), j2 / j1, j3 / j1]

    def permuted(self, order: Sequence[int]) -> "SpaceCurve":
        """The same curve with old coordinate order[j] renamed x_{j+1}."""
        if sorted(order) != [0, 1, 2]:
            raise DimensionError(f"{order} is not a permutation of the three coordinates")
        index_map = [list(order).index(v) for v in range(3)]
        return SpaceCurve(self.f.embed(3, index_map), self.g.embed(3, index_map),
                          self.on_curve_tol, self.name)

    # ---- fibers ----

    @cached_property
    def _elimination(self):
        u = MultiPoly.variable(3, 1) - MultiPoly.variable(3, 2).scale(SHEAR)
        f_s = self.f.substitute(1, u)
        g_s = self.g.substitute(1, u)
        eliminant = resultant(f_s, g_s, 2)
        if eliminant.is_zero:
            raise DegenerateError("resultant in x3 vanishes identically: the curve has a vertical component")
        u_coeffs = eliminant.univariate_coeffs(1)
        if len(u_coeffs) < 2:
            raise DegenerateError("the projection to the x1-line is not finite")
        candidates = [p for p in (f_s, g_s) if p.degree(2) > 0]
        primary = min(candidates, key=lambda p: p.degree(2))
        other = g_s if primary is f_s else f_s
        logger.debug("fiber elimination of degree %d in u", len(u_coeffs) - 1)
        return u, f_s, g_s, eliminant, u_coeffs, primary.univariate_coeffs(2), other

    @property
    def fiber_degree(self) -> int:
        return len(self._elimination[4]) - 1

    def _newton_step(self, x):
        x1, x2, x3 = x
        fv, gv = self.f(x1, x2, x3), self.g(x1, x2, x3)
        (_, a, b), (_, c, d) = self.gradients_at((x1, x2, x3))
        det = a * d - b * c
        return [x1, x2 - (d * fv - b * gv) / det, x3 - (a * gv - c * fv) / det]

    def fiber_batch(self, x1) -> FiberBatch:
        _, _, _, _, u_coeffs, x3_coeffs, other = self._elimination
        x1 = np.asarray(x1, dtype=complex).ravel()
        coeffs = np.stack([c(x1, 0, 0) for c in u_coeffs], axis=-1)
        u_roots, lead_bad = _batch_roots(coeffs)
        base = np.repeat(x1[:, None], u_roots.shape[1], axis=1)
        x3_c = np.stack([c(base, u_roots, 0) for c in x3_coeffs], axis=-1)
        cand, cand_bad = _batch_roots(x3_c)
        b3 = base[..., None]
        u3 = u_roots[..., None]
        with np.errstate(all="ignore"):
            miss = _relative(other(b3, u3, cand), other.term_magnitude(b3, u3, cand))
        miss = np.where(np.isfinite(miss), miss, np.inf)
        pick = np.argmin(miss, axis=-1)[..., None]
        x3 = np.take_along_axis(cand, pick, axis=-1)[..., 0]
        x2 = u_roots - SHEAR * x3
        (x1b, x2, x3), res = self._newton([base, x2, x3])
        points = np.stack([x1b, x2, x3], axis=-1)
        spread = 1.0 + np.max(np.abs(points), axis=(1, 2))
        clustered = _min_pair_distance(points[:, :, 1:]) <= np.sqrt(MERGE_TOL) * spread
        degenerate = lead_bad | np.any(cand_bad, axis=-1) | clustered
        converged = np.all(res <= self.on_curve_tol, axis=-1)
        return FiberBatch(x1, points, res, degenerate, converged)


class PlaneCurve(Curve):
    nvars = 2

    def __init__(self, f: MultiPoly, on_curve_tol: float = ON_CURVE_TOL, name: Optional[str] = None):
        if f.nvars != 2:
            raise DimensionError("plane curves need one polynomial in x1, x2")
        if f.degree(1) < 1:
            raise InvalidDegreesError("plane curve must depend on x2")
        self.f = f
        self.on_curve_tol = on_curve_tol
        self.name = name

    def __repr__(self):
        return f"PlaneCurve(f={self.f})"

    def equations(self):
        return (self.f,)

    @cached_property
    def f2_poly(self) -> MultiPoly:
        return self.f.partial(1)

    @property
    def fiber_degree(self) -> int:
        return self.f.degree(1)

    def jacobian_det(self, x):
        return self.f2_poly(*x)

    def tangent_slopes(self, x):
        (f1, f2), = self.gradients_at(x)
        return [np.ones_like(f1), -f1 / f2]

    def _newton_step(self, x):
        x1, x2 = x
        return [x1, x2 - self.f(x1, x2) / self.f2_poly(x1, x2)]

    def fiber_batch(self, x1) -> FiberBatch:
        x1 = np.asarray(x1, dtype=complex).ravel()
        coeffs = np.stack([c(x1, 0) for c in self.f.univariate_coeffs(1)], axis=-1)
        roots, lead_bad = _batch_roots(coeffs)
        base = np.repeat(x1[:, None], roots.shape[1], axis=1)
        (x1b, x2), res = self._newton([base, roots])
        points = np.stack([x1b, x2], axis=-1)
        spread = 1.0 + np.max(np.abs(points), axis=(1, 2))
        clustered = _min_pair_distance(points[:, :, 1:]) <= np.sqrt(MERGE_TOL) * spread
        return FiberBatch(x1, points, res, lead_bad | clustered,
                          np.all(res <= self.on_curve_tol, axis=-1))


class HyperellipticCurve:
    """x2^2 = P(x1) with P = sum_k A[k] x1^k of degree 2g+2 or 2g+1."""

    def __init__(self, coefficients: Sequence[complex]):
        a = [complex(c) for c in coefficients]
        if len(a) < 3 or len(a) % 2 == 0:
            raise InvalidDegreesError("hyperelliptic curves take 2g+3 coefficients A_0..A_{2g+2}")
        if a[-1] == 0 and a[-2] == 0:
            raise InvalidDegreesError("P must have degree 2g+2 or 2g+1")
        self.coefficients = tuple(a)
        self.genus = (len(a) - 3) // 2

    def __call__(self, x1):
        return np.polyval(self.coefficients[::-1], x1)

    def derivative(self, x1):
        return np.polyval(np.polyder(np.array(self.coefficients[::-1])), x1)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1 if self.coefficients[-1] != 0 else len(self.coefficients) - 2

    def plane_curve(self) -> PlaneCurve:
        p = MultiPoly(2, {(k, 0): c for k, c in enumerate(self.coefficients)})
        return PlaneCurve(MultiPoly(2, {(0, 2): 1}) - p, name="hyperelliptic")

    def branch_points(self) -> List[complex]:
        roots = np.roots(np.array(self.coefficients[::-1]))
        return sorted((complex(r) for r in roots), key=lambda z: (z.real, z.imag))


# ---------------------------------------------------------------------------
# genus-4 template
# ---------------------------------------------------------------------------

TEMPLATE_FIXED = {(1, 1, 0): 0.0, (2, 2, 0): 0.0, (3, 3, 0): 1.0}


def template_indices() -> List[Tuple[int, int, int]]:
    """(i, k, l) with h_i = sum a_kl^(i) x1^k x2^l, k + l <= i."""
    return [(i, k, l) for i in (1, 2, 3) for k in range(i + 1) for l in range(i + 1 - k)]


def genus4_template(coeffs: Mapping[Tuple[int, int, int], complex],
                    on_curve_tol: float = ON_CURVE_TOL) -> SpaceCurve:
    """g = x2 x3 - x1, f = x3^3 + h1 x3^2 + h2 x3 + h3."""
    x1, x2, x3 = (MultiPoly.variable(3, v) for v in range(3))
    h = {i: MultiPoly.zero(3) for i in (1, 2, 3)}
    for key, value in coeffs.items():
        i, k, l = key
        if i not in h or k < 0 or l < 0 or k + l > i:
            raise InvalidDegreesError(f"template index a_{k}{l}^({i}) is out of range")
        h[i] = h[i] + (x1 ** k * x2 ** l).scale(value)
    f = x3 ** 3 + h[1] * x3 ** 2 + h[2] * x3 + h[3]
    return SpaceCurve(f, x2 * x3 - x1, on_curve_tol, name="genus4")


def template_coefficients(c: SpaceCurve) -> Optional[Dict[Tuple[int, int, int], complex]]:
    """Read the a_kl^(i) table back from a curve, or None if it is not template shaped."""
    x1, x2, x3 = (MultiPoly.variable(3, v) for v in range(3))
    if c.g != x2 * x3 - x1:
        return None
    cols = c.f.univariate_coeffs(2)
    if len(cols) != 4 or cols[3] != MultiPoly.constant(3, 1):
        return None
    table: Dict[Tuple[int, int, int], complex] = {}
    for i in (1, 2, 3):
        h = cols[3 - i]
        for exp, value in h.items():
            k, l, _ = exp
            if k + l > i:
                return None
            table[(i, k, l)] = value
    return table


def primary_fixture() -> SpaceCurve:
    return genus4_template({(3, 3, 0): 1, (3, 0, 3): 1, (3, 0, 0): 1})


def genus4_fallback(base: SpaceCurve, seed: int, amplitude: float = 0.3) -> SpaceCurve:
    """Seeded perturbation of a template curve.

    a10^(1) = a20^(2) = 0 and a30^(3) = 1 are kept, so the three branches on
    which x3 diverges still have x3 ~ c x1 with c^3 = -1.
    """
    table = template_coefficients(base)
    if table is None:
        raise DegenerateError("fallback curves are generated from genus-4 template curves only")
    rng = np.random.default_rng(seed)
    perturbed: Dict[Tuple[int, int, int], complex] = {}
    for key in template_indices():
        kick = amplitude * complex(*rng.uniform(-1.0, 1.0, size=2))
        if key in TEMPLATE_FIXED:
            perturbed[key] = TEMPLATE_FIXED[key]
        else:
            perturbed[key] = table.get(key, 0j) + kick
    curve = genus4_template(perturbed, base.on_curve_tol)
    curve.name = f"genus4-fallback-{seed}"
    return curve


@dataclass
class FixtureChoice:
    curve: SpaceCurve
    report: SmoothnessReport
    primary_report: SmoothnessReport
    fallback_seed: Optional[int] = None

    @property
    def adopted_primary(self) -> bool:
        return self.fallback_seed is None


def adopt_fixture(primary: SpaceCurve, seed: int = 0, attempts: int = 8,
                  samples: int = 16) -> FixtureChoice:
    """The primary curve if it is smooth, else the first smooth seeded fallback."""
    primary_report = smoothness_check(primary, samples, seed)
    if primary_report.smooth:
        return FixtureChoice(primary, primary_report, primary_report)
    for offset in range(attempts):
        candidate = genus4_fallback(primary, seed + offset)
        report = smoothness_check(candidate, samples, seed)
        if report.smooth:
            logger.warning("primary curve is singular (min singular value %.3g); adopted fallback seed %d",
                           primary_report.min_singular_value, seed + offset)
            return FixtureChoice(candidate, report, primary_report, seed + offset)
    raise DegenerateError(f"no smooth fallback among {attempts} seeds starting at {seed}")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def jacobians(c: SpaceCurve, x: Sequence[complex]) -> Tuple[complex, complex, complex]:
    """J^i = eps^{ikl} df/dx_k dg/dx_l."""
    j = c.jacobians(tuple(complex(v) for v in x))
    return tuple(complex(v) for v in j)


def fiber(c: Curve, x1: complex, chart: Chart = Chart.AFFINE) -> Fiber:
    """All points over one base value, canonically sorted."""
    base = complex(x1)
    value = chart_to_x1(base, chart)
    batch = c.fiber_batch(np.array([value]))
    pts = batch.points[0]
    res = batch.residual[0]
    degenerate = bool(batch.degenerate[0])
    if not batch.converged[0]:
        if not degenerate:
            raise NewtonError(f"Newton polish did not reach {c.on_curve_tol:g} over x1 = {value}",
                              residual=float(np.max(res)))
        logger.warning("degenerate fiber over x1 = %s (residual %.3g)", value, float(np.max(res)))
    elif degenerate:
        logger.warning("degenerate fiber over x1 = %s", value)
    order = canonical_order(pts)
    points = tuple(CurvePoint(tuple(complex(v) for v in pts[i]), float(res[i])) for i in order)
    return Fiber(base, chart, points, degenerate)


def polish_point(c: Curve, x: Sequence[complex], iterations: int = NEWTON_ITERATIONS) -> CurvePoint:
    """Project a nearby triple (or pair) onto the curve by minimal-norm Newton steps."""
    x = np.array([complex(v) for v in x], dtype=complex)
    if len(x) != c.nvars:
        raise DimensionError(f"expected {c.nvars} coordinates, got {len(x)}")
    for _ in range(iterations):
        if float(c.residual(x)) <= NEWTON_TARGET:
            break
        values = np.array([p(*x) for p in c.equations()], dtype=complex)
        jac = c.gradients_at(x)
        step = np.linalg.lstsq(jac, values, rcond=None)[0]
        x = x - step
        if not np.all(np.isfinite(x)):
            raise NewtonError("Newton projection diverged")
    point = c.make_point(x)
    if point.residual > c.on_curve_tol:
        raise NewtonError(f"point does not converge onto the curve (residual {point.residual:.3g})")
    return point


def _advance(c: Curve, pts: np.ndarray, w1: complex, chart: Chart) -> Optional[np.ndarray]:
    """One predictor-corrector step of all tracked points to base value w1."""
    x1_new = chart_to_x1(w1, chart)
    batch = c.fiber_batch(np.array([x1_new]))
    if not batch.ok[0]:
        return None
    cand = batch.points[0]
    with np.errstate(all="ignore"):
        slopes = np.stack(c.tangent_slopes([pts[:, v] for v in range(c.nvars)]), axis=-1)
    pred = pts + slopes * (x1_new - pts[:, :1])
    if not np.all(np.isfinite(pred)):
        return None
    dist = np.sqrt(np.sum(np.abs(pred[:, None, 1:] - cand[None, :, 1:]) ** 2, axis=-1))
    order = np.argsort(dist, axis=1)
    nearest = order[:, 0]
    rows = np.arange(len(pts))
    d1 = dist[rows, nearest]
    d2 = dist[rows, order[:, 1]] if cand.shape[0] > 1 else np.full(len(pts), np.inf)
    if len(set(nearest.tolist())) < len(pts) or np.any(d1 > 0.3 * d2):
        return None
    return cand[nearest]


def track(c: Curve, start: np.ndarray, path: PathSpec) -> np.ndarray:
    """Continue the points ``start`` (k, nvars) along a piecewise-linear path."""
    pts = np.array(start, dtype=complex).reshape(-1, c.nvars)
    waypoints = [complex(w) for w in path.waypoints]
    if len(waypoints) < 2:
        return pts
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        length = abs(b - a)
        if length == 0:
            continue
        h = min(path.max_step, length)
        s = 0.0
        while s < 1.0:
            ds = min(h / length, 1.0 - s)
            last = ds >= 1.0 - s
            w1 = b if last else a + (s + ds) * (b - a)
            moved = _advance(c, pts, w1, path.chart)
            if moved is None:
                h /= 2
                if h < MIN_STEP * (1 + abs(a)):
                    raise StepUnderflowError(f"step underflow near base value {a + s * (b - a)}")
                continue
            pts = moved
            s = 1.0 if last else s + ds
            h = min(2 * h, path.max_step)
    return pts


def require_clearance(c: Curve, path: PathSpec, clearance: float = PATH_CLEARANCE) -> None:
    """Raise BranchPointError when a segment of ``path`` passes within ``clearance`` of a branch value."""
    try:
        values = branch_points(c)
    except DegenerateError as exc:
        logger.debug("no branch locus to check the path against: %s", exc)
        return
    if path.chart is Chart.INFINITY:
        values = [1.0 / v for v in values if v != 0]
    waypoints = [complex(w) for w in path.waypoints]
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        span = b - a
        for v in values:
            t = 0.0 if span == 0 else min(max(((v - a) * span.conjugate()).real / abs(span) ** 2, 0.0), 1.0)
            if abs(a + t * span - v) < clearance:
                raise BranchPointError(f"path segment {a} -> {b} passes within {clearance:g} "
                                       f"of the branch value {x1_to_chart(v, path.chart)}")


def continue_point(c: Curve, start: CurvePoint, path: PathSpec) -> CurvePoint:
    """Analytic continuation of one point along ``path``; the path starts at start's base value."""
    require_clearance(c, path)
    end = track(c, start.as_array()[None, :], path)[0]
    return c.make_point(end)


def circle_path(center: complex, radius: float, nodes: int = 64, chart: Chart = Chart.AFFINE,
                turns: int = 1, start_angle: float = 0.0) -> PathSpec:
    angles = start_angle + 2 * np.pi * np.arange(nodes * turns + 1) / nodes
    waypoints = tuple(complex(center) + radius * np.exp(1j * angles))
    return PathSpec(waypoints, chart, max_step=2 * np.pi * radius / nodes)


def monodromy_permutation(c: Curve, path: PathSpec, clearance: float = PATH_CLEARANCE) -> List[int]:
    """perm[i] = index (in the sorted start fiber) where sheet i ends after the loop."""
    if abs(path.waypoints[0] - path.waypoints[-1]) > 1e-12 * (1 + abs(path.waypoints[0])):
        raise DimensionError("monodromy needs a closed path")
    require_clearance(c, path, clearance)
    start = fiber(c, path.waypoints[0], path.chart)
    if start.degenerate:
        raise DegenerateError("loop starts on a degenerate fiber")
    initial = start.as_array()
    final = track(c, initial, path)
    dist = np.sqrt(np.sum(np.abs(final[:, None, :] - initial[None, :, :]) ** 2, axis=-1))
    perm = np.argmin(dist, axis=1).tolist()
    if sorted(perm) != list(range(len(perm))):
        raise DegenerateError("continued fiber does not match the start fiber")
    return perm


def permutation_cycles(perm: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
    seen = set()
    cycles = []
    for i in range(len(perm)):
        if i in seen:
            continue
        cycle = []
        j = i
        while j not in seen:
            seen.add(j)
            cycle.append(j)
            j = perm[j]
        cycles.append(tuple(cycle))
    return tuple(cycles)


# ---- branch points ----

def _polish_system(polys: Sequence[MultiPoly], grads, x: np.ndarray):
    """Square Newton on (f, g, J1) or (f, f2); returns (point, relative residual)."""
    res = np.inf
    for _ in range(NEWTON_ITERATIONS):
        values = np.array([p(*x) for p in polys], dtype=complex)
        scale = np.array([max(1.0, p.term_magnitude(*x)) for p in polys])
        res = float(np.max(np.abs(values) / scale))
        if res <= 1e-15:
            break
        jac = np.array([[d(*x) for d in row] for row in grads], dtype=complex)
        step = np.linalg.lstsq(jac, values, rcond=None)[0]
        x = x - step
        if not np.all(np.isfinite(x)):
            return None, np.inf
    return x, res


def _branch_system(c: Curve):
    if isinstance(c, SpaceCurve):
        polys = (c.f, c.g, c.j1_poly)
    else:
        polys = (c.f, c.f2_poly)
    grads = [[p.partial(v) for v in range(c.nvars)] for p in polys]
    return polys, grads


def _singular_system(c: Curve):
    """Equations plus all 2x2 minors of the gradient matrix: zero exactly at singular points."""
    if isinstance(c, SpaceCurve):
        f1, f2, f3 = (c.f.partial(v) for v in range(3))
        g1, g2, g3 = (c.g.partial(v) for v in range(3))
        polys = (c.f, c.g, f2 * g3 - f3 * g2, f3 * g1 - f1 * g3, f1 * g2 - f2 * g1)
    else:
        polys = (c.f, c.f.partial(0), c.f.partial(1))
    grads = [[p.partial(v) for v in range(c.nvars)] for p in polys]
    return polys, grads


def _branch_candidates(c: Curve) -> np.ndarray:
    if isinstance(c, PlaneCurve):
        return _pencil_roots(c.f, c.f2_poly, 1)
    u, f_s, g_s, eliminant, _, _, _ = c._elimination
    j1_s = c.j1_poly.substitute(1, u)
    second = None
    for p, q in ((g_s, j1_s), (f_s, j1_s)):
        if q.degree(2) > 0 or p.degree(2) > 0:
            candidate = resultant(p, q, 2)
            if not candidate.is_zero:
                second = candidate
                break
    if second is None:
        raise DegenerateError("J1 elimination vanishes identically")
    return _pencil_roots(eliminant, second, 1)


def _candidate_starts(c: Curve) -> List[np.ndarray]:
    """For each candidate branch value, the fiber point where J1 is relatively smallest."""
    candidates = _branch_candidates(c)
    if not len(candidates):
        return []
    batch = c.fiber_batch(candidates)
    coords = [batch.points[..., v] for v in range(c.nvars)]
    with np.errstate(all="ignore"):
        det = np.abs(c.jacobian_det(coords))
        norm = 1.0 + np.max(np.abs(c.gradients_at(coords)), axis=(0, 1))
    best = np.argmin(np.where(np.isfinite(det), det / norm, np.inf), axis=1)
    starts = [batch.points[row, col] for row, col in enumerate(best)]
    return [s for s in starts if np.all(np.isfinite(s))]


def branch_locus(c: Curve) -> List[BranchPoint]:
    """Finite points with J1 = 0 (f2 = 0 for plane curves), merged within MERGE_TOL."""
    cache = getattr(c, "_cache", None)
    if cache is not None and "branch_locus" in cache:
        return cache["branch_locus"]
    starts = _candidate_starts(c)
    polys, grads = _branch_system(c)
    found: List[BranchPoint] = []
    for start in starts:
        x, res = _polish_system(polys, grads, start.copy())
        if x is None or res > BRANCH_ACCEPT:
            continue
        if any(np.max(np.abs(x - np.array(bp.point))) <= MERGE_TOL * (1 + np.max(np.abs(x)))
               for bp in found):
            continue
        found.append(BranchPoint(tuple(complex(v) for v in x), res))
    found.sort(key=lambda bp: (round(bp.value.real, 9), round(bp.value.imag, 9)))
    logger.info("branch locus: %d points from %d candidates", len(found), len(starts))
    if cache is not None:
        cache["branch_locus"] = found
    return found


def branch_points(c: Curve, coordinate_index: int = 0) -> List[complex]:
    """Distinct finite branch values of the projection to coordinate ``coordinate_index``."""
    if coordinate_index:
        if not isinstance(c, SpaceCurve):
            raise DimensionError("alternate base coordinates exist for space curves only")
        order = [coordinate_index] + [v for v in range(3) if v != coordinate_index]
        return branch_points(c.permuted(order), 0)
    values: List[complex] = []
    for bp in branch_locus(c):
        if not any(abs(bp.value - v) <= MERGE_TOL * (1 + abs(v)) for v in values):
            values.append(bp.value)
    return values


def ramification(c: Curve, value: complex, radius: Optional[float] = None,
                 nodes: int = 32) -> Ramification:
    """Cycle structure of the local monodromy around one branch value."""
    value = complex(value)
    if radius is None:
        others = [abs(v - value) for v in branch_points(c) if abs(v - value) > MERGE_TOL * (1 + abs(value))]
        radius = min([1e-2 * (1 + abs(value))] + [0.3 * d for d in others])
    # the loop itself sits at distance radius from value
    perm = monodromy_permutation(c, circle_path(value, radius, nodes),
                                 clearance=min(PATH_CLEARANCE, 0.5 * radius))
    cycles = tuple(cycle for cycle in permutation_cycles(perm) if len(cycle) > 1)
    return Ramification(value, cycles, radius)


def branch_count(c: Curve) -> int:
    """Total ramification over the finite branch values (Riemann-Hurwitz count)."""
    return sum(ramification(c, v).multiplicity for v in branch_points(c))


# ---- infinity ----

def points_at_infinity(c: SpaceCurve) -> List[InfinityPoint]:
    """Solutions of the top forms F(x, 0) = G(x, 0) in P^2, clustered with multiplicity."""
    top_f, top_g = c.f.top_form(), c.g.top_form()
    x2, x3 = MultiPoly.variable(3, 1), MultiPoly.variable(3, 2)
    mu2, mu3 = INFINITY_CHART
    x1_sub = 1 - x2.scale(mu2) - x3.scale(mu3)
    fa, ga = top_f.substitute(0, x1_sub), top_g.substitute(0, x1_sub)
    u = x2 - x3.scale(SHEAR)
    fs, gs = fa.substitute(1, u), ga.substitute(1, u)
    eliminant = resultant(fs, gs, 2)
    if eliminant.is_zero:
        raise DegenerateError("the system at infinity is not zero-dimensional")
    coeffs = [p.coeff((0, 0, 0)) for p in eliminant.univariate_coeffs(1)]
    roots = np.roots(np.array(coeffs[::-1])) if len(coeffs) > 1 else np.zeros(0)
    candidates = [p for p in (fs, gs) if p.degree(2) > 0]
    primary = min(candidates, key=lambda p: p.degree(2))
    other = gs if primary is fs else fs
    fa2, fa3, ga2, ga3 = fa.partial(1), fa.partial(2), ga.partial(1), ga.partial(2)
    points: List[InfinityPoint] = []
    for group in _cluster(list(roots), 1e-5):
        uu = complex(np.mean(roots[group]))
        x3_c = np.roots(np.array([q(0, uu, 0) for q in primary.univariate_coeffs(2)][::-1]))
        miss = [abs(other(0, uu, z)) for z in x3_c]
        z3 = complex(x3_c[int(np.argmin(miss))])
        z2 = uu - SHEAR * z3
        # multiple roots are left unpolished: Newton is singular there
        for _ in range(20 if len(group) == 1 else 0):
            fv, gv = fa(0, z2, z3), ga(0, z2, z3)
            a, b, cc, d = fa2(0, z2, z3), fa3(0, z2, z3), ga2(0, z2, z3), ga3(0, z2, z3)
            det = a * d - b * cc
            if det == 0 or (fv == 0 and gv == 0):
                break
            z2, z3 = z2 - (d * fv - b * gv) / det, z3 - (a * gv - cc * fv) / det
        coords = np.array([1 - mu2 * z2 - mu3 * z3, z2, z3])
        coords = coords / coords[int(np.argmax(np.abs(coords)))]
        points.append(InfinityPoint(tuple(complex(v) for v in coords), len(group)))
    total = sum(p.multiplicity for p in points)
    if total != c.d_f * c.d_g:
        logger.warning("found %d points at infinity with multiplicity, expected %d", total, c.d_f * c.d_g)
    return points


# ---- smoothness ----

def _smallest_sv(rows: np.ndarray, scales: np.ndarray) -> float:
    """Smallest singular value of the gradient rows, each row in units of its coefficients."""
    return float(np.linalg.svd(rows / scales[:, None], compute_uv=False)[-1])


def _random_points(c: Curve, samples: int, rng: np.random.Generator) -> List[np.ndarray]:
    bases = 2.0 * (rng.uniform(-1, 1, samples) + 1j * rng.uniform(-1, 1, samples))
    try:
        batch = c.fiber_batch(bases)
        return [batch.points[i, j] for i in range(samples) if batch.ok[i]
                for j in range(batch.points.shape[1])]
    except DegenerateError:
        pass
    points = []
    for _ in range(samples):
        guess = rng.normal(size=c.nvars) + 1j * rng.normal(size=c.nvars)
        try:
            points.append(polish_point(c, guess, iterations=200).as_array())
        except NewtonError:
            continue
    return points


def smoothness_check(c: Curve, samples: int = 16, seed: int = 0) -> SmoothnessReport:
    """Rank of the homogeneous Jacobian at sample, branch and infinity points."""
    rng = np.random.default_rng(seed)
    homogeneous = [p.homogenize() for p in c.equations()]
    grads = [[h.partial(v) for v in range(c.nvars + 1)] for h in homogeneous]
    scales = np.array([max(h.coefficient_scale(), 1e-300) for h in homogeneous])
    failures: List[Dict[str, object]] = []
    smallest = np.inf
    checked = 0

    def inspect_at(point, where: str, xi0: complex = 1.0):
        nonlocal smallest, checked
        args = np.array(list(point) + [xi0], dtype=complex)
        args = args / np.linalg.norm(args)
        rows = np.array([[d(*args) for d in row] for row in grads], dtype=complex)
        sv = _smallest_sv(rows, scales)
        checked += 1
        smallest = min(smallest, sv)
        if sv <= SINGULAR_TOL:
            failures.append({"where": where, "point": [complex(v) for v in point], "singular_value": sv})

    for point in _random_points(c, samples, rng):
        inspect_at(point, "sample")
    if checked == 0:
        failures.append({"where": "sample", "point": [], "singular_value": 0.0,
                         "detail": "no curve points could be sampled"})
        smallest = 0.0
    try:
        for bp in branch_locus(c):
            inspect_at(bp.point, "branch")
        # Singular points also satisfy J1 = 0; they sit where every minor vanishes.
        polys, sgrads = _singular_system(c)
        for start in _candidate_starts(c):
            x, res = _polish_system(polys, sgrads, start.copy())
            if x is not None and res <= 1e-10:
                inspect_at(x, "singular")
    except DegenerateError as exc:
        failures.append({"where": "branch", "point": [], "singular_value": 0.0, "detail": exc.detail})
        smallest = 0.0
    if isinstance(c, SpaceCurve):
        try:
            for pt in points_at_infinity(c):
                inspect_at(pt.coords, "infinity", 0.0)
        except DegenerateError as exc:
            failures.append({"where": "infinity", "point": [], "singular_value": 0.0, "detail": exc.detail})
            smallest = 0.0
    report = SmoothnessReport(not failures, float(smallest), checked, failures)
    logger.info("smoothness: %s after %d points (min singular value %.3g)",
                "pass" if report.smooth else "fail", checked, report.min_singular_value)
    return report


# ---- projections ----

def plane_projection(c: SpaceCurve, eliminate: int = 2) -> PlaneCurve:
    """Plane model of the curve in (x1, x_other) after eliminating x3 (2) or x2 (1)."""
    if eliminate not in (1, 2):
        raise DimensionError("eliminate x2 (1) or x3 (2)")
    eliminant = resultant(c.f, c.g, eliminate)
    if eliminant.is_zero:
        raise DegenerateError("projection resultant vanishes identically")
    keep = 1 if eliminate == 2 else 2
    plane = MultiPoly(2, {(exp[0], exp[keep]): value for exp, value in eliminant.items()})
    return PlaneCurve(plane, c.on_curve_tol, name=f"projection-{'x3' if eliminate == 2 else 'x2'}")
