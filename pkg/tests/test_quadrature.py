import numpy as np
import pytest

from weierkern import quadrature
from weierkern.curve import SpaceCurve
from weierkern.diffbasis import basis_values, holomorphic_basis, quadratic_basis
from weierkern.errors import DimensionError
from weierkern.quadrature import (
    GridConfig,
    disc_integral,
    gram_matrix,
    jacobian_factor,
    surface_integral,
    surface_integral_mc,
)
from weierkern.workers import map_ordered


def test_disc_area() -> None:
    result = disc_integral(lambda w: np.ones(w.shape))

    assert result.value == pytest.approx(np.pi, abs=1e-12)
    assert result.converged


def test_disc_integrals_with_radial_weights() -> None:
    assert disc_integral(lambda w: np.abs(w) ** 2).value == pytest.approx(np.pi / 2, abs=1e-12)
    # integrable singularity at the center
    assert disc_integral(lambda w: 1 / np.abs(w)).value == pytest.approx(2 * np.pi, abs=1e-12)
    assert disc_integral(lambda w: np.ones(w.shape), radius=2.0).value == pytest.approx(4 * np.pi, abs=1e-11)


def test_cell_batches_go_through_the_worker_pool(monkeypatch) -> None:
    calls = []

    def recording(fn, items, threads=None):
        items = list(items)
        calls.append((len(items), threads))
        return map_ordered(fn, items, threads)

    monkeypatch.setattr(quadrature, "CELL_BATCH", 16)
    monkeypatch.setattr(quadrature, "map_ordered", recording)
    cfg = GridConfig(radial_cells=8, angular_cells=8)

    threaded = disc_integral(lambda w: np.abs(w) ** 2, cfg, threads=4)
    serial = disc_integral(lambda w: np.abs(w) ** 2, cfg, threads=1)

    assert calls[0] == (4, 4)
    assert threaded.value == pytest.approx(serial.value, abs=1e-14)
    assert threaded.value == pytest.approx(np.pi / 2, abs=1e-12)


def test_grid_config_validation() -> None:
    with pytest.raises(DimensionError):
        GridConfig(split_radius=0)
    with pytest.raises(DimensionError):
        GridConfig(radial_cells=0)
    with pytest.raises(DimensionError):
        GridConfig(target_rel_error=0)


def test_jacobian_factor(fixture_curve: SpaceCurve) -> None:
    assert jacobian_factor(fixture_curve, (-1, -1, 1)) == pytest.approx(-6)


def test_gram_needs_weight_one(smooth_curve: SpaceCurve) -> None:
    with pytest.raises(DimensionError):
        gram_matrix(smooth_curve, quadratic_basis(smooth_curve))


def test_monte_carlo_argument_checks(smooth_curve: SpaceCurve) -> None:
    alpha = lambda x: basis_values(smooth_curve, holomorphic_basis(smooth_curve), x)[0]

    with pytest.raises(DimensionError):
        surface_integral_mc(smooth_curve, alpha, alpha, samples=10, eps=0)
    with pytest.raises(DimensionError):
        surface_integral_mc(smooth_curve, alpha, alpha, samples=0, eps=1e-3)


@pytest.mark.slow
def test_gram_matrix_is_hermitian_positive(smooth_curve: SpaceCurve) -> None:
    result = gram_matrix(smooth_curve, holomorphic_basis(smooth_curve), GridConfig())

    assert result.matrix.shape == (4, 4)
    assert result.hermitian_defect <= max(result.est_error, 1e-12)
    assert np.min(result.eigenvalues) > 0
    assert result.converged


@pytest.mark.slow
def test_monte_carlo_agrees_with_the_grid(smooth_curve: SpaceCurve) -> None:
    omega = holomorphic_basis(smooth_curve)
    alpha = lambda x: basis_values(smooth_curve, omega, x)[0]
    grid = surface_integral(smooth_curve, alpha, alpha).value
    mc = surface_integral_mc(smooth_curve, alpha, alpha, samples=10_000_000, eps=1e-3, seed=11).value

    assert grid.real > 0
    assert abs(mc - grid) <= 0.05 * abs(grid)
