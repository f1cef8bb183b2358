"""
Surface integrals (i/2) int alpha ^ conj(beta) over the compact curve.

P^1 is covered by two closed discs, |x1| <= R and |x1'| <= 1/R with x1' = 1/x1.
Each disc is cut into polar cells carrying Gauss-Legendre nodes in the radius
and midpoint nodes in the angle; cells are split while the two-level
difference exceeds their share of the target error. At every node the
integrand is summed over all sheets of the fiber.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_legendre

from .curve import Chart, Curve, SpaceCurve, branch_points, chart_to_x1
from .diffbasis import DifferentialBasis, basis_values
from .errors import DimensionError
from .workers import map_ordered

logger = logging.getLogger(__name__)

# cells per work item handed to the worker pool
CELL_BATCH = 2048

# forms map points (..., 3) to coefficient arrays (n_forms, ...)
FormSet = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GridConfig:
    radial_cells: int = 24
    angular_cells: int = 24
    max_depth: int = 8
    target_rel_error: float = 1e-4
    exclusion_radius: float = 1e-4
    radial_order: int = 4
    angular_order: int = 4
    split_radius: float = 1.0
    max_cells: int = 400_000

    def __post_init__(self):
        if self.radial_cells < 1 or self.angular_cells < 1:
            raise DimensionError("grid needs at least one cell per direction")
        if self.max_depth < 0:
            raise DimensionError("refinement depth must be nonnegative")
        if not self.target_rel_error > 0:
            raise DimensionError("target error must be positive")
        if self.exclusion_radius < 0:
            raise DimensionError("exclusion radius must be nonnegative")
        if not self.split_radius > 0:
            raise DimensionError("split radius must be positive")


@dataclass
class QuadratureResult:
    value: complex
    est_error: float
    nodes_used: int
    refinement_depth: int
    converged: bool = True


@dataclass
class PairingResult:
    matrix: np.ndarray
    est_error: float
    nodes_used: int
    refinement_depth: int
    converged: bool = True

    @property
    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))


# ---------------------------------------------------------------------------
# polar cells
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return roots_legendre(order)


def _base_cells(cfg: GridConfig, radius: float) -> np.ndarray:
    """(n, 4) rows r0, r1, t0, t1 covering the disc of ``radius``."""
    r = np.linspace(0.0, radius, cfg.radial_cells + 1)
    t = np.linspace(0.0, 2 * np.pi, cfg.angular_cells + 1)
    r0, t0 = np.meshgrid(r[:-1], t[:-1], indexing="ij")
    r1, t1 = np.meshgrid(r[1:], t[1:], indexing="ij")
    return np.stack([r0.ravel(), r1.ravel(), t0.ravel(), t1.ravel()], axis=1)


def _split(cells: np.ndarray) -> np.ndarray:
    """Each cell into 4 children, kept consecutive."""
    r0, r1, t0, t1 = cells.T
    rm, tm = 0.5 * (r0 + r1), 0.5 * (t0 + t1)
    kids = np.stack([
        np.stack([r0, rm, t0, tm], axis=1),
        np.stack([r0, rm, tm, t1], axis=1),
        np.stack([rm, r1, t0, tm], axis=1),
        np.stack([rm, r1, tm, t1], axis=1),
    ], axis=1)
    return kids.reshape(-1, 4)


def _cell_nodes(cells: np.ndarray, cfg: GridConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Chart coordinates (n, q) and area weights (n, q) of every cell's nodes."""
    x, wx = _legendre(cfg.radial_order)
    m = cfg.angular_order
    r0, r1, t0, t1 = (col[:, None] for col in cells.T)
    r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * x[None, :]
    wr = 0.5 * (r1 - r0) * wx[None, :] * r
    t = t0 + (np.arange(m)[None, :] + 0.5) * (t1 - t0) / m
    wt = (t1 - t0) / m
    w = (r[:, :, None] * np.exp(1j * t[:, None, :])).reshape(len(cells), -1)
    weights = (wr[:, :, None] * wt[:, None, :]).reshape(len(cells), -1)
    return w, weights


def _cell_batches(cells: np.ndarray) -> List[np.ndarray]:
    return [cells[i:i + CELL_BATCH] for i in range(0, len(cells), CELL_BATCH)]


def _cell_integrals(density: Callable[[Chart, np.ndarray], np.ndarray], chart: Chart, cells: np.ndarray,
                    cfg: GridConfig, threads: Optional[int]) -> np.ndarray:
    """Per-cell integral of the density; batches of CELL_BATCH cells go to the worker pool."""
    def one(batch: np.ndarray) -> np.ndarray:
        w, weights = _cell_nodes(batch, cfg)
        return np.sum(weights * density(chart, w), axis=1)

    return np.concatenate(map_ordered(one, _cell_batches(cells), threads))


def _cell_area(cells: np.ndarray) -> np.ndarray:
    r0, r1, t0, t1 = cells.T
    return 0.5 * (r1 ** 2 - r0 ** 2) * (t1 - t0)


@dataclass
class _Refinement:
    fine_cells: Dict[Chart, np.ndarray]
    est_rel_error: float
    depth: int
    converged: bool


def _refine(density: Callable[[Chart, np.ndarray], np.ndarray], charts: Dict[Chart, float],
            cfg: GridConfig, threads: Optional[int] = None) -> _Refinement:
    """Split cells until the two-level difference of the density integral fits the budget."""
    active: Dict[Chart, np.ndarray] = {}
    parent: Dict[Chart, np.ndarray] = {}
    for chart, radius in charts.items():
        cells = _base_cells(cfg, radius)
        active[chart] = cells
        parent[chart] = _cell_integrals(density, chart, cells, cfg, threads)
    total_area = {chart: np.pi * radius ** 2 for chart, radius in charts.items()}
    fine: Dict[Chart, List[np.ndarray]] = {chart: [] for chart in charts}
    total = None
    error = 0.0
    depth = 0
    while any(len(cells) for cells in active.values()):
        kids_by_chart = {}
        for chart, cells in active.items():
            if not len(cells):
                continue
            kids = _split(cells)
            kid_q = _cell_integrals(density, chart, kids, cfg, threads)
            kids_by_chart[chart] = (cells, kids, kid_q)
        if total is None:
            total = sum(float(np.sum(np.abs(q))) for _, _, q in kids_by_chart.values())
            total = max(total, 1e-300)
        n_active = sum(len(cells) for cells in active.values())
        next_active: Dict[Chart, np.ndarray] = {}
        for chart, (cells, kids, kid_q) in kids_by_chart.items():
            grouped = kid_q.reshape(-1, 4)
            err = np.abs(grouped.sum(axis=1) - parent[chart])
            budget = cfg.target_rel_error * total * _cell_area(cells) / total_area[chart]
            split = err > budget
            if depth >= cfg.max_depth or 4 * n_active > cfg.max_cells:
                split[:] = False
            keep = ~split
            fine[chart].append(kids.reshape(-1, 4, 4)[keep].reshape(-1, 4))
            error += float(np.sum(err[keep]))
            next_active[chart] = kids.reshape(-1, 4, 4)[split].reshape(-1, 4)
            parent[chart] = grouped[split].ravel()
        if 4 * n_active > cfg.max_cells:
            logger.warning("quadrature cell budget of %d reached at depth %d", cfg.max_cells, depth)
        active = next_active
        depth += 1
    est = error / total
    converged = est <= cfg.target_rel_error
    if not converged:
        logger.warning("quadrature refinement stopped at estimated relative error %.3g (target %.3g)",
                       est, cfg.target_rel_error)
    return _Refinement({chart: np.concatenate(parts) if parts else np.zeros((0, 4))
                        for chart, parts in fine.items()}, est, depth, converged)


# ---------------------------------------------------------------------------
# flat engine
# ---------------------------------------------------------------------------

def disc_integral(fn: Callable[[np.ndarray], np.ndarray], cfg: GridConfig = GridConfig(),
                  radius: float = 1.0, threads: Optional[int] = None) -> QuadratureResult:
    """(i/2) int fn(z) dz ^ dz-bar over |z| <= radius, i.e. the area integral of fn."""
    refinement = _refine(lambda chart, w: np.abs(fn(w)), {Chart.AFFINE: radius}, cfg, threads)
    cells = refinement.fine_cells[Chart.AFFINE]
    w, weights = _cell_nodes(cells, cfg)
    value = complex(np.sum(weights * fn(w)))
    return QuadratureResult(value, refinement.est_rel_error * abs(value), w.size,
                            refinement.depth, refinement.converged)


# ---------------------------------------------------------------------------
# sheet-sum rule on the curve
# ---------------------------------------------------------------------------

def _chart_radii(cfg: GridConfig) -> Dict[Chart, float]:
    return {Chart.AFFINE: cfg.split_radius, Chart.INFINITY: 1.0 / cfg.split_radius}


def _chart_values(values: Sequence[complex], chart: Chart, cfg: GridConfig) -> np.ndarray:
    """Singular base values that lie in ``chart``'s disc, in that chart's coordinate."""
    out = []
    for v in values:
        v = complex(v)
        if chart is Chart.AFFINE and abs(v) <= cfg.split_radius * (1 + 1e-9):
            out.append(v)
        elif chart is Chart.INFINITY and abs(v) >= cfg.split_radius * (1 - 1e-9) and v != 0:
            out.append(1.0 / v)
    return np.array(out, dtype=complex)


def _chart_weight(x1: np.ndarray, chart: Chart) -> np.ndarray:
    """|dx1/dw|^2 for the area element."""
    if chart is Chart.AFFINE:
        return np.ones(x1.shape)
    return np.abs(x1) ** 4


def _safe(values: np.ndarray, usable: np.ndarray) -> np.ndarray:
    out = np.where(usable, values, 0)
    return np.where(np.isfinite(out), out, 0)


@dataclass
class QuadratureRule:
    points: np.ndarray      # (M, D, nvars)
    weights: np.ndarray     # (M,) area weight times the chart factor
    usable: np.ndarray      # (M, D)
    distance: np.ndarray    # (M,) chart distance to the nearest excluded value
    exclusion_radius: float
    est_rel_error: float
    depth: int
    converged: bool
    dropped: int = 0

    @property
    def nodes_used(self) -> int:
        return int(self.points.shape[0])

    def pairing(self, forms_a: FormSet, forms_b: Optional[FormSet] = None) -> PairingResult:
        """P[a, b] = (i/2) int alpha_a ^ conj(beta_b), with the exclusion loss extrapolated away."""
        va = _safe(np.asarray(forms_a(self.points)), self.usable)
        vb = va if forms_b is None else _safe(np.asarray(forms_b(self.points)), self.usable)
        rho = self.exclusion_radius
        w1 = self.weights * (self.distance > rho)
        w2 = self.weights * (self.distance > 2 * rho)
        p1 = np.einsum("amd,bmd,m->ab", va, vb.conj(), w1)
        p2 = np.einsum("amd,bmd,m->ab", va, vb.conj(), w2)
        # the excluded disks lose an amount linear in their radius
        matrix = 2 * p1 - p2 if rho > 0 else p1
        scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
        est = self.est_rel_error * scale + float(np.max(np.abs(p1 - p2))) if matrix.size else 0.0
        return PairingResult(matrix, est, self.nodes_used, self.depth, self.converged)

    def integrate(self, alpha: Callable, beta: Callable) -> QuadratureResult:
        result = self.pairing(lambda x: np.asarray(alpha(x))[None], lambda x: np.asarray(beta(x))[None])
        return QuadratureResult(complex(result.matrix[0, 0]), result.est_error, result.nodes_used,
                                result.refinement_depth, result.converged)


def _sample_chart(c: Curve, chart: Chart, w: np.ndarray, forms: FormSet):
    """Fiber points, usable mask and sheet-summed density at chart nodes w (n, q)."""
    flat = w.ravel()
    x1 = chart_to_x1(flat, chart)
    batch = c.fiber_batch(x1)
    usable = np.repeat(batch.converged[:, None], batch.points.shape[1], axis=1)
    usable &= np.all(np.isfinite(batch.points), axis=-1)
    with np.errstate(all="ignore"):
        values = _safe(np.asarray(forms(batch.points)), usable)
    density = np.sum(np.abs(values) ** 2, axis=(0, 2)) * _chart_weight(x1, chart)
    return batch.points, usable, density.reshape(w.shape)


def build_rule(c: Curve, forms: FormSet, cfg: GridConfig = GridConfig(),
               singular_values: Optional[Sequence[complex]] = None,
               threads: Optional[int] = None) -> QuadratureRule:
    """Adaptive two-chart sheet-sum rule, refined on the summed density of ``forms``.

    Cell batches are sampled on ``threads`` workers (WEIERKERN_THREADS when None).
    """
    if singular_values is None:
        singular_values = branch_points(c)
    excluded = {chart: _chart_values(singular_values, chart, cfg) for chart in _chart_radii(cfg)}

    def density(chart: Chart, w: np.ndarray) -> np.ndarray:
        return _sample_chart(c, chart, w, forms)[2]

    refinement = _refine(density, _chart_radii(cfg), cfg, threads)
    points, weights, usable, distance = [], [], [], []
    for chart, cells in refinement.fine_cells.items():
        if not len(cells):
            continue
        w, area = _cell_nodes(cells, cfg)
        parts = map_ordered(lambda batch, ch=chart: _sample_chart(c, ch, _cell_nodes(batch, cfg)[0], forms),
                            _cell_batches(cells), threads)
        pts = np.concatenate([part[0] for part in parts])
        ok = np.concatenate([part[1] for part in parts])
        flat_w = w.ravel()
        x1 = chart_to_x1(flat_w, chart)
        points.append(pts)
        usable.append(ok)
        weights.append(area.ravel() * _chart_weight(x1, chart))
        if len(excluded[chart]):
            distance.append(np.min(np.abs(flat_w[:, None] - excluded[chart][None, :]), axis=1))
        else:
            distance.append(np.full(flat_w.shape, np.inf))
    points_all = np.concatenate(points)
    usable_all = np.concatenate(usable)
    distance_all = np.concatenate(distance)
    dropped = int(np.sum(~usable_all[:, 0] & (distance_all > cfg.exclusion_radius)))
    if dropped:
        logger.warning("%d quadrature nodes dropped: fiber did not converge", dropped)
    rule = QuadratureRule(points_all, np.concatenate(weights), usable_all, distance_all,
                          cfg.exclusion_radius, refinement.est_rel_error, refinement.depth,
                          refinement.converged, dropped)
    logger.info("quadrature rule: %d nodes, depth %d, estimated relative error %.3g",
                rule.nodes_used, rule.depth, rule.est_rel_error)
    return rule


def surface_integral(c: Curve, alpha: Callable, beta: Callable, cfg: GridConfig = GridConfig(),
                     singular_values: Optional[Sequence[complex]] = None) -> QuadratureResult:
    """(i/2) int alpha ^ conj(beta) for two dx1 coefficient functions of points (..., 3)."""

    def both(x):
        return np.stack([np.asarray(alpha(x)), np.asarray(beta(x))])

    rule = build_rule(c, both, cfg, singular_values)
    result = rule.pairing(both)
    return QuadratureResult(complex(result.matrix[0, 1]), result.est_error, result.nodes_used,
                            result.refinement_depth, result.converged)


def gram_matrix(c: SpaceCurve, basis: DifferentialBasis, cfg: GridConfig = GridConfig(),
                rule: Optional[QuadratureRule] = None) -> PairingResult:
    """M[i, j] = (i/2) int omega_i ^ conj(omega_j) for a weight-1 basis."""
    if basis.weight != 1:
        raise DimensionError("the Gram pairing is defined for weight-1 differentials")

    def forms(x):
        return basis_values(c, basis, x)

    if rule is None:
        rule = build_rule(c, forms, cfg)
    result = rule.pairing(forms)
    if result.hermitian_defect > max(result.est_error, 1e-12 * float(np.max(np.abs(result.matrix)))):
        logger.warning("Gram matrix Hermitian defect %.3g exceeds the error estimate", result.hermitian_defect)
    return result


# ---------------------------------------------------------------------------
# Monte Carlo with a smeared delta function
# ---------------------------------------------------------------------------

def jacobian_factor(c: SpaceCurve, x) -> complex:
    """det d(f, g)/d(x2, x3) at x."""
    return complex(c.jacobian_det(tuple(x)))


@dataclass
class _Mixture:
    affine: float
    infinity: float
    branch: float
    branch_values: np.ndarray
    branch_radius: float

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        choice = rng.uniform(size=n)
        radius = np.sqrt(rng.uniform(size=n))
        angle = np.exp(2j * np.pi * rng.uniform(size=n))
        disc = radius * angle
        with np.errstate(divide="ignore"):
            x1 = np.where(choice < self.affine, disc, 1.0 / disc)
        if len(self.branch_values):
            near = choice >= self.affine + self.infinity
            which = rng.integers(len(self.branch_values), size=n)
            local = self.branch_values[which] + self.branch_radius * rng.uniform(size=n) * angle
            x1 = np.where(near, local, x1)
        return x1

    def density(self, x1: np.ndarray) -> np.ndarray:
        r = np.abs(x1)
        with np.errstate(divide="ignore"):
            p = np.where(r <= 1, self.affine / np.pi, self.infinity / (np.pi * r ** 4))
            if len(self.branch_values):
                share = self.branch / len(self.branch_values)
                d = np.abs(x1[:, None] - self.branch_values[None, :])
                p = p + np.sum(np.where(d < self.branch_radius,
                                        share / (2 * np.pi * self.branch_radius * d), 0.0), axis=1)
        return p


def _mc_chunk(c: SpaceCurve, forms: FormSet, mixture: _Mixture, eps: float,
              seed: np.random.SeedSequence, n: int) -> Tuple[np.ndarray, int]:
    rng = np.random.default_rng(seed)
    x1 = mixture.sample(rng, n)
    batch = c.fiber_batch(x1)
    pts = batch.points                                          # (n, D, 3)
    d = pts.shape[1]
    sheet = rng.integers(d, size=n)
    base = pts[np.arange(n), sheet]                             # (n, 3)
    coords = [pts[..., v] for v in range(3)]
    (_, f2, f3), (_, g2, g3) = c.gradients_at(coords)           # each (n, D)
    a = np.stack([np.stack([f2, f3], -1), np.stack([g2, g3], -1)], -2)   # (n, D, 2, 2)
    u = eps * (rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))) / np.sqrt(2)
    with np.errstate(all="ignore"):
        delta = np.linalg.solve(a[np.arange(n), sheet], u[..., None])[..., 0]
    x = base.copy()
    x[:, 1:] += delta
    norm = 1.0 / (np.pi * eps ** 2) ** 2
    with np.errstate(all="ignore"):
        shift = x[:, None, 1:] - pts[..., 1:]                   # (n, D, 2)
        image = np.einsum("ndij,ndj->ndi", a, shift)
        det = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
        q = np.mean(norm * np.exp(-np.sum(np.abs(image) ** 2, -1) / eps ** 2) * np.abs(det) ** 2, axis=1)
        xs = tuple(x[:, v] for v in range(3))
        fv, gv = c.f(*xs), c.g(*xs)
        smeared = norm * np.exp(-(np.abs(fv) ** 2 + np.abs(gv) ** 2) / eps ** 2)
        values = np.asarray(forms(x))
        numerator = values[0] * np.conj(values[1]) * smeared * np.abs(c.jacobian_det(xs)) ** 2
        weight = numerator / (mixture.density(x1) * q)
    ok = batch.converged & np.isfinite(weight)
    return np.where(ok, weight, 0.0), int(np.sum(~ok))


def surface_integral_mc(c: SpaceCurve, alpha: Callable, beta: Callable, samples: int, eps: float,
                        seed: int = 0, chunk: int = 100_000, branch_share: float = 0.25,
                        branch_radius: float = 0.1, threads: Optional[int] = None) -> QuadratureResult:
    """Estimate of (i/2) int alpha ^ conj(beta) from the 3-dimensional integral with delta(f, g) smeared to width eps."""
    if not eps > 0:
        raise DimensionError("the smearing width must be positive")
    if samples < 1:
        raise DimensionError("at least one sample is needed")
    values = branch_points(c)
    mixture = _Mixture((1 - branch_share) / 2 if values else 0.5,
                       (1 - branch_share) / 2 if values else 0.5,
                       branch_share if values else 0.0,
                       np.array(values, dtype=complex), branch_radius)

    def forms(x):
        return np.stack([np.asarray(alpha(x)), np.asarray(beta(x))])

    sizes = [chunk] * (samples // chunk) + ([samples % chunk] if samples % chunk else [])
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    parts = map_ordered(lambda job: _mc_chunk(c, forms, mixture, eps, *job), list(zip(seeds, sizes)),
                        threads)
    weights = np.concatenate([p[0] for p in parts])
    rejected = sum(p[1] for p in parts)
    value = complex(np.mean(weights))
    stderr = float(np.std(weights) / np.sqrt(len(weights)))
    converged = stderr <= 0.1 * max(abs(value), 1e-300)
    if rejected:
        logger.info("Monte Carlo: %d of %d samples rejected", rejected, samples)
    if not converged and value != 0:
        logger.warning("Monte Carlo standard error %.3g is large against the estimate %.3g; "
                       "eps is too small for %d samples", stderr, abs(value), samples)
    if value == 0 and not np.any(weights):
        converged = True
    return QuadratureResult(value, stderr, samples, 0, converged)
