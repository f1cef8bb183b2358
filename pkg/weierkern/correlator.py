"""
Determinant correlators of b-c systems and the third-kind Green function
on the genus-4 template curve.

Rows are indexed by the b insertions p_a, columns by kernels with a pole at
a c insertion followed by the basis differentials. Column operations that
add basis columns to kernel columns leave the determinant unchanged; that
is what makes the ambiguity of the kernel harmless here.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor

from .curve import Chart, CurvePoint, PathSpec, SpaceCurve, branch_points, continue_point
from .diffbasis import basis_values, eval_basis, holomorphic_basis, quadratic_basis
from .errors import DegenerateError, DimensionError, PoleError, QuadratureError
from .kernel import (
    NEAR_TOL,
    DifferentialValue,
    asymptotic_coeffs_series,
    quadratic_kernel,
    third_kind,
    third_kind_values,
)
from .localanalysis import ContourSpec, contour_residue
from .quadrature import GridConfig, build_rule
from .workers import map_ordered

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorrelatorRequest:
    lam: int
    b_points: Tuple[CurvePoint, ...]
    c_points: Tuple[CurvePoint, ...]

    def __post_init__(self):
        object.__setattr__(self, "b_points", tuple(self.b_points))
        object.__setattr__(self, "c_points", tuple(self.c_points))
        if self.lam not in (1, 2):
            raise DimensionError("lambda is 1 or 2")
        m, n = len(self.b_points), len(self.c_points)
        if self.lam == 2 and m - n != 9:
            raise DimensionError(f"lambda = 2 needs m - n = 9, got m = {m}, n = {n}")
        if self.lam == 1:
            if m - n != 3:
                raise DimensionError(f"lambda = 1 needs m - n = 3, got m = {m}, n = {n}")
            if n < 1:
                raise DimensionError("lambda = 1 needs at least one c insertion")

    @property
    def size(self) -> int:
        return len(self.b_points)


@dataclass
class CorrelatorResult:
    value: complex
    condition: float
    hadamard_ratio: float
    size: int
    b_weight: int
    c_weight: int


def _near(p: CurvePoint, q: CurvePoint) -> bool:
    scale = 1.0 + max(abs(v) for v in p.x + q.x)
    return all(abs(a - b) < NEAR_TOL * scale for a, b in zip(p.x, q.x))


def _check_collisions(req: CorrelatorRequest) -> None:
    for a, p in enumerate(req.b_points):
        for b, q in enumerate(req.c_points):
            if _near(p, q):
                raise PoleError(f"b insertion {a} coincides with c insertion {b} at {p.x}: "
                                "the correlator has a pole there")


def correlator_matrix(c: SpaceCurve, req: CorrelatorRequest,
                      shift: Optional[Sequence[complex]] = None,
                      kernel_scale: complex = 1.0) -> np.ndarray:
    """Square matrix of the correlator; ``shift`` adds sum_i shift_i * (basis column) to every kernel column."""
    _check_collisions(req)
    if req.lam == 2:
        basis = quadratic_basis(c)
        poles = list(req.c_points)
    else:
        basis = holomorphic_basis(c)
        poles = list(req.c_points[:-1])
    last = req.c_points[-1] if req.c_points else None

    def row(p: CurvePoint) -> np.ndarray:
        basis_row = [v.coeff for v in eval_basis(c, basis, p)]
        if req.lam == 2:
            kernels = [quadratic_kernel(c, p, q).coeff for q in poles]
        else:
            kernels = [third_kind(c, p, q, last).coeff for q in poles]
        return np.array([kernel_scale * k for k in kernels] + basis_row, dtype=complex)

    matrix = np.array(map_ordered(row, list(req.b_points)), dtype=complex)
    if shift is not None and np.any(np.asarray(shift) != 0):
        matrix = matrix + _shift_columns(c, req, poles, matrix, np.asarray(shift, dtype=complex))
    return matrix


def _shift_columns(c: SpaceCurve, req: CorrelatorRequest, poles: List[CurvePoint],
                   matrix: np.ndarray, shift: np.ndarray) -> np.ndarray:
    """Multiples of the first four basis columns, one combination per kernel column."""
    if len(shift) != 4:
        raise DimensionError("the shift combines the four differentials omega_1..omega_4")
    delta = np.zeros_like(matrix)
    n = len(poles)
    # phi_1..phi_4 = omega_1..omega_4 / J1 for lambda = 2; omega_1..omega_4 for lambda = 1
    base = matrix[:, n:n + 4]
    for beta, q in enumerate(poles):
        weights = shift * np.array(asymptotic_coeffs_series(c, q)) if req.lam == 2 else shift
        delta[:, beta] = base @ weights
    return delta


def _lu_det(matrix: np.ndarray) -> complex:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(matrix)
    sign = -1.0 if np.count_nonzero(piv != np.arange(len(piv))) % 2 else 1.0
    return complex(sign * np.prod(np.diag(lu)))


def determinant_report(matrix: np.ndarray) -> Tuple[complex, float, float]:
    """Determinant, condition number, and |det| over the product of row norms."""
    det = _lu_det(matrix)
    with np.errstate(all="ignore"):
        cond = float(np.linalg.cond(matrix))
    norms = np.prod(np.linalg.norm(matrix, axis=1))
    ratio = float(abs(det) / norms) if norms > 0 else 0.0
    return det, cond, ratio


def bc_correlator(c: SpaceCurve, req: CorrelatorRequest) -> CorrelatorResult:
    matrix = correlator_matrix(c, req)
    det, cond, ratio = determinant_report(matrix)
    if cond > 1e12:
        logger.warning("correlator matrix is ill-conditioned (condition %.3g)", cond)
    logger.info("G_%d with %d b and %d c insertions: |det| %.6g", req.lam, len(req.b_points),
                len(req.c_points), abs(det))
    return CorrelatorResult(det, cond, ratio, req.size, req.lam, 1 - req.lam)


@dataclass
class InvarianceReport:
    shift: Tuple[complex, ...]
    original: complex
    shifted: complex
    relative_change: float

    @property
    def identical(self) -> bool:
        return self.original == self.shifted


def spurious_invariance_check(c: SpaceCurve, req: CorrelatorRequest, seed: int = 0,
                              shift: Optional[Sequence[complex]] = None) -> InvarianceReport:
    """Recompute the determinant after adding basis columns to every kernel column."""
    if shift is None:
        shift = np.random.default_rng(seed).uniform(-1, 1, 4)
    shift = tuple(complex(s) for s in shift)
    original = _lu_det(correlator_matrix(c, req))
    shifted = _lu_det(correlator_matrix(c, req, shift=shift))
    change = abs(shifted - original) / max(abs(original), 1e-300) if shifted != original else 0.0
    logger.info("column-shift invariance: relative change %.3g", change)
    return InvarianceReport(shift, original, shifted, float(change))


@dataclass
class PoleGrowth:
    offsets: Tuple[float, ...]
    values: List[float]
    exponent: float


def pole_growth_fit(c: SpaceCurve, req: CorrelatorRequest, index_pair: Tuple[int, int] = (0, 0),
                    offsets: Sequence[float] = (1e-2, 1e-3, 1e-4),
                    direction: complex = complex(0.8, 0.6)) -> PoleGrowth:
    """Exponent s in |det| ~ |x1(p_a) - y1(q_b)|^(-s) as p_a approaches q_b on its sheet."""
    alpha, beta = index_pair
    if not (0 <= alpha < len(req.b_points) and 0 <= beta < len(req.c_points)):
        raise DimensionError(f"insertion pair {index_pair} is out of range")
    q = req.c_points[beta]
    direction = direction / abs(direction)
    values = []
    for offset in offsets:
        target = q.x1 + offset * direction
        p = continue_point(c, q, PathSpec((q.x1, target), Chart.AFFINE, max_step=offset / 4))
        b_points = req.b_points[:alpha] + (p,) + req.b_points[alpha + 1:]
        moved = replace(req, b_points=b_points)
        values.append(abs(_lu_det(correlator_matrix(c, moved))))
    slope = np.polyfit(np.log(np.asarray(offsets)), np.log(np.maximum(values, 1e-300)), 1)[0]
    logger.info("pole growth exponent %.4f over offsets %s", -slope, list(offsets))
    return PoleGrowth(tuple(offsets), values, float(-slope))


# ---------------------------------------------------------------------------
# Green function
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GreenRequest:
    p: CurvePoint
    q: CurvePoint
    qp: CurvePoint
    quadrature: GridConfig = field(default_factory=GridConfig)


@dataclass
class GreenResult:
    value: DifferentialValue
    normalized: complex
    gram_det: complex
    matrix: np.ndarray                   # 5x5, first row evaluated at p
    cofactors: np.ndarray                # along the first row
    residue_q: Optional[complex] = None
    residue_qp: Optional[complex] = None
    residue_ratio: Optional[complex] = None
    period_residuals: List[float] = field(default_factory=list)
    gram_norm: float = 0.0
    est_error: float = 0.0
    converged: bool = True


def _cofactors(block: np.ndarray) -> np.ndarray:
    """Cofactors of the first row of a 5x5 matrix whose rows 1..4 are ``block``."""
    out = np.empty(block.shape[1], dtype=complex)
    for j in range(block.shape[1]):
        minor = np.delete(block, j, axis=1)
        out[j] = (-1) ** j * _lu_det(minor)
    return out


def green_function(c: SpaceCurve, req: GreenRequest, residues: bool = True,
                   periods: bool = True) -> GreenResult:
    """G(p) = det [[nu(p), omega(p)], [(nu, omega_k), M_ik]] with nu = nu_{q,q'}."""
    if _near(req.p, req.q) or _near(req.p, req.qp):
        raise PoleError("p coincides with a pole of the Green function")
    if req.q.x == req.qp.x:
        logger.info("q = q': the Green function vanishes identically")
        zero = np.zeros(5, dtype=complex)
        return GreenResult(DifferentialValue(0j), 0j, 0j, np.zeros((5, 5), dtype=complex), zero)
    omega = holomorphic_basis(c)
    cfg = req.quadrature
    singular = list(branch_points(c)) + [req.q.x1, req.qp.x1]

    def forms(x):
        nu = third_kind_values(c, x, req.q.x, req.qp.x)
        return np.concatenate([nu[None], basis_values(c, omega, x)])

    rule = build_rule(c, forms, cfg, singular)
    pairing = rule.pairing(forms)
    if not pairing.converged:
        raise QuadratureError("Green function pairings did not reach the target error",
                              est_error=pairing.est_error)
    # block[k, j] = (i/2) int (nu, omega_1..4)_j ^ conj(omega_k)
    block = pairing.matrix[:, 1:].T
    gram = block[:, 1:]
    cof = _cofactors(block)
    gram_det = cof[0]
    if abs(gram_det) <= 1e-12 * float(np.linalg.norm(gram)) ** 4:
        raise DegenerateError("the Gram matrix of the holomorphic differentials is singular")

    def value_at(x) -> DifferentialValue:
        nu = third_kind(c, x, req.q, req.qp).coeff
        om = [v.coeff for v in eval_basis(c, omega, x)]
        return DifferentialValue(complex(np.dot(cof, [nu] + om)))

    first_row = np.array([third_kind(c, req.p, req.q, req.qp).coeff]
                         + [v.coeff for v in eval_basis(c, omega, req.p)], dtype=complex)
    raw = value_at(req.p)
    result = GreenResult(raw, raw.coeff / gram_det, gram_det, np.vstack([first_row, block]), cof,
                         gram_norm=float(np.linalg.norm(gram, 2)), est_error=pairing.est_error,
                         converged=pairing.converged)
    if residues:
        res_q = contour_residue(c, value_at, ContourSpec(req.q.x1, sheet_anchor=req.q)).value
        res_qp = contour_residue(c, value_at, ContourSpec(req.qp.x1, sheet_anchor=req.qp)).value
        result.residue_q, result.residue_qp = res_q, res_qp
        result.residue_ratio = res_q / res_qp if res_qp != 0 else None
    if periods:
        result.period_residuals = green_periods(c, cof / gram_det, req, omega)
    logger.info("Green function at %s: raw %.6g, normalized %.6g", req.p.x, abs(raw.coeff),
                abs(result.normalized))
    return result


def green_periods(c: SpaceCurve, cof: np.ndarray, req: GreenRequest, omega=None) -> List[float]:
    """|(i/2) int G ^ conj(omega_k)| on a rule built independently of the one that fixed G.

    ``cof`` are the first-row cofactors; pass them divided by det(Gram) for the
    normalized function.
    """
    if omega is None:
        omega = holomorphic_basis(c)
    cfg = replace(req.quadrature, split_radius=req.quadrature.split_radius * 1.25)
    singular = list(branch_points(c)) + [req.q.x1, req.qp.x1]

    def green(x):
        nu = third_kind_values(c, x, req.q.x, req.qp.x)
        return np.tensordot(cof, np.concatenate([nu[None], basis_values(c, omega, x)]), axes=1)[None]

    def both(x):
        return basis_values(c, omega, x)

    rule = build_rule(c, lambda x: np.concatenate([green(x), both(x)]), cfg, singular)
    residuals = rule.pairing(green, both).matrix[0]
    return [float(abs(v)) for v in residuals]
