import numpy as np
import pytest

from weierkern.curve import Chart, SpaceCurve
from weierkern.diffbasis import (
    basis_values,
    custom_basis,
    eval_basis,
    holomorphic_basis,
    holomorphy_report,
    independence,
    quadratic_basis,
)
from weierkern.errors import BranchPointError, DegenerateError, DimensionError
from weierkern.localanalysis import sample_points
from weierkern.polyexpr import parse

Y = (-1, -1, 1)


def test_holomorphic_basis_at_hand_point(fixture_curve: SpaceCurve) -> None:
    values = eval_basis(fixture_curve, holomorphic_basis(fixture_curve), Y)

    assert [v.coeff for v in values] == pytest.approx([-1 / 6, 1 / 6, 1 / 6, -1 / 6])
    assert all(v.weight == 1 for v in values)


def test_basis_sizes_and_description(fixture_curve: SpaceCurve) -> None:
    omega = holomorphic_basis(fixture_curve)
    phi = quadratic_basis(fixture_curve)

    assert len(omega) == 4
    assert len(phi) == 9
    assert [e["numerator"] for e in omega.describe()] == ["1", "x1", "x2", "x3"]
    assert {e["j_power"] for e in phi.describe()} == {2}


def test_quadratic_basis_values(fixture_curve: SpaceCurve) -> None:
    values = basis_values(fixture_curve, quadratic_basis(fixture_curve), np.array(Y, dtype=complex))

    assert values.shape == (9,)
    assert values[0] == pytest.approx(1 / 36)
    assert values[4] == pytest.approx(1 / 36)


def test_values_in_the_infinity_chart(fixture_curve: SpaceCurve) -> None:
    affine = eval_basis(fixture_curve, holomorphic_basis(fixture_curve), (2, -2, -1))
    chart = eval_basis(fixture_curve, holomorphic_basis(fixture_curve), (2, -2, -1), Chart.INFINITY)

    assert chart[0].coeff == pytest.approx(affine[0].coeff * -4)
    assert chart[0].chart is Chart.INFINITY


def test_bases_need_a_template_curve(tower: SpaceCurve) -> None:
    with pytest.raises(DegenerateError):
        holomorphic_basis(tower)
    with pytest.raises(DegenerateError):
        quadratic_basis(tower)


def test_custom_basis_validation() -> None:
    basis = custom_basis([parse("x1 + x2")], 1)
    assert basis.elements[0].j_power == 1

    with pytest.raises(DimensionError):
        custom_basis([parse("x1")], 3)
    with pytest.raises(DimensionError):
        custom_basis([parse("x", ["x"])], 1)


def test_evaluation_at_vanishing_j1(fixture_curve: SpaceCurve) -> None:
    with pytest.raises(BranchPointError):
        eval_basis(fixture_curve, holomorphic_basis(fixture_curve), (1, -1, -1))


def test_independence_at_generic_points(smooth_curve: SpaceCurve, rng: np.random.Generator) -> None:
    omega = holomorphic_basis(smooth_curve)
    result = independence(smooth_curve, omega, sample_points(smooth_curve, 4, rng, clearance=0.1))

    assert result.independent
    assert abs(result.determinant) > 0
    with pytest.raises(DimensionError):
        independence(smooth_curve, omega, sample_points(smooth_curve, 3, rng))


def test_repeated_point_makes_the_matrix_singular(fixture_curve: SpaceCurve) -> None:
    omega = holomorphic_basis(fixture_curve)
    result = independence(fixture_curve, omega, [Y, Y, (2, -2, -1), (3, -1, -3)])

    assert result.determinant == 0 or not result.independent


def test_basis_has_no_residues_at_samples_and_infinity(smooth_curve: SpaceCurve,
                                                      rng: np.random.Generator) -> None:
    points = sample_points(smooth_curve, 2, rng, clearance=0.1)
    report = holomorphy_report(smooth_curve, holomorphic_basis(smooth_curve), points, include_branch=False)

    assert report.holomorphic
    assert any(entry.where == "infinity" for entry in report.entries)


@pytest.mark.slow
def test_holomorphy_including_branch_points(smooth_curve: SpaceCurve, rng: np.random.Generator) -> None:
    points = sample_points(smooth_curve, 2, rng, clearance=0.1)
    for basis in (holomorphic_basis(smooth_curve), quadratic_basis(smooth_curve)):
        assert holomorphy_report(smooth_curve, basis, points).worst <= 1e-8
