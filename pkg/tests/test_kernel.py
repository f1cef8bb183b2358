import numpy as np
import pytest

from weierkern.checks import check_kernel_agreement, run_check
from weierkern.curve import Chart, SpaceCurve, fiber
from weierkern.curvefile import LoadedCurve
from weierkern.errors import BranchPointError, DegenerateError, PoleError
from weierkern.kernel import (
    DifferentialValue,
    KernelVariant,
    asymptotic_coeffs,
    asymptotic_coeffs_series,
    cauchy,
    compare_asymptotic,
    hyperelliptic_R,
    hyperelliptic_tau,
    kernel_eval,
    kernel_values,
    numerators,
    plane_weierstrass,
    plane_weierstrass_values,
    quadratic_kernel,
    series_numerator,
    third_kind,
    third_kind_values,
)

X = (2, -2, -1)
Y = (-1, -1, 1)


@pytest.mark.parametrize("variant", [KernelVariant.GENUS4, KernelVariant.COMPACT])
def test_hand_value(fixture_curve: SpaceCurve, variant: KernelVariant) -> None:
    value = kernel_eval(fixture_curve, X, Y, variant)

    assert value.coeff == pytest.approx(2 / 21, abs=1e-12)
    assert value.weight == 1


@pytest.mark.parametrize("variant", [KernelVariant.GENUS4, KernelVariant.COMPACT])
def test_pair_sharing_x2(fixture_curve: SpaceCurve, variant: KernelVariant) -> None:
    # both points lie on the line x2 = -1, x1 = -x3
    assert kernel_eval(fixture_curve, (-1, -1, 1), (2, -1, -2), variant).coeff == pytest.approx(-1 / 3, abs=1e-12)


def test_numerators_at_hand_pair(fixture_curve: SpaceCurve) -> None:
    assert numerators(fixture_curve, X, Y) == pytest.approx((-12, -30, -30))
    assert numerators(fixture_curve, (-1, -1, 1), (2, -1, -2))[0] == 0


def test_quadratic_kernel(fixture_curve: SpaceCurve) -> None:
    value = quadratic_kernel(fixture_curve, X, Y)

    assert value.coeff == pytest.approx(-2 / 441, abs=1e-12)
    assert value.weight == 2


def test_vectorized_kernel_matches_pointwise(fixture_curve: SpaceCurve) -> None:
    xs = np.array([(-1, -1, 1), (3, -1, -3)], dtype=complex)
    values = kernel_values(fixture_curve, xs, (2, -1, -2), KernelVariant.COMPACT)

    assert values[0] == pytest.approx(-1 / 3, abs=1e-12)
    assert values[1] == pytest.approx(kernel_eval(fixture_curve, (3, -1, -3), (2, -1, -2),
                                                  KernelVariant.COMPACT).coeff)


def test_coincident_points_are_a_pole(fixture_curve: SpaceCurve) -> None:
    with pytest.raises(PoleError):
        kernel_eval(fixture_curve, Y, Y)


def test_vanishing_j1_is_a_branch_point_error(fixture_curve: SpaceCurve) -> None:
    with pytest.raises(BranchPointError):
        kernel_eval(fixture_curve, (1, -1, -1), Y)


def test_variant_shape_requirements(fixture_curve: SpaceCurve, tower: SpaceCurve) -> None:
    with pytest.raises(DegenerateError):
        kernel_eval(tower, (4, 2, np.sqrt(2)), (1, 1, 1), KernelVariant.GENUS4)
    with pytest.raises(DegenerateError):
        kernel_eval(fixture_curve, X, Y, KernelVariant.BRANCHED_COVER)


def test_variants_agree_near_another_sheet(fixture_curve: SpaceCurve) -> None:
    # same x1, different sheet: the x1 bracket is evaluated as a limit
    sheets = fiber(fixture_curve, -1).points
    y = next(p for p in sheets if abs(p.x3 - np.exp(1j * np.pi / 3)) < 1e-8)
    x = next(p for p in sheets if abs(p.x3 - 1) < 1e-8)
    limit = kernel_eval(fixture_curve, x, y, KernelVariant.COMPACT).coeff

    shifted = fiber(fixture_curve, -1 + 1e-6).points
    x_near = min(shifted, key=lambda p: abs(p.x3 - x.x3))
    nearby = kernel_eval(fixture_curve, x_near, y, KernelVariant.COMPACT).coeff
    assert abs(limit - nearby) <= 1e-4 * (1 + abs(limit))


def test_third_kind_vanishes_for_equal_poles(fixture_curve: SpaceCurve) -> None:
    assert third_kind(fixture_curve, X, Y, Y).coeff == 0
    difference = third_kind(fixture_curve, (-1, -1, 1), X, (2, -1, -2)).coeff
    expected = (kernel_eval(fixture_curve, (-1, -1, 1), X).coeff
                - kernel_eval(fixture_curve, (-1, -1, 1), (2, -1, -2)).coeff)
    assert difference == pytest.approx(expected)


def test_differential_chart_change() -> None:
    value = DifferentialValue(1.0, 1)
    at_infinity = value.in_chart(Chart.INFINITY, 2)

    assert at_infinity.coeff == pytest.approx(-4)
    assert at_infinity.in_chart(Chart.AFFINE, 2).coeff == pytest.approx(1)
    assert DifferentialValue(1.0, 2).in_chart(Chart.INFINITY, 2).coeff == pytest.approx(16)


def test_cauchy_kernel() -> None:
    assert cauchy(1, 3).coeff == -0.5
    with pytest.raises(PoleError):
        cauchy(2, 2)


def test_parabola_values(parabola: LoadedCurve) -> None:
    c = parabola.curve

    assert plane_weierstrass(c, (4, 2), (1, 1)).coeff == pytest.approx(0.25)
    assert plane_weierstrass(c, (9, 3), (4, 2)).coeff == pytest.approx(1 / 6)
    values = plane_weierstrass_values(c, np.array([(4, 2), (9, 3)], dtype=complex), (1, 1))
    assert values[0] == pytest.approx(0.25)


def test_parabola_other_sheet_limit(parabola: LoadedCurve) -> None:
    assert plane_weierstrass(parabola.curve, (1, 1), (1, -1)).coeff == pytest.approx(0.25)
    with pytest.raises(PoleError):
        plane_weierstrass(parabola.curve, (1, 1), (1, 1))
    with pytest.raises(BranchPointError):
        plane_weierstrass(parabola.curve, (0, 0), (1, 1))


def test_hyperelliptic_R_identities(hyperelliptic: LoadedCurve) -> None:
    h = hyperelliptic.hyperelliptic

    assert hyperelliptic_R(h, 2, 3) == 37
    assert hyperelliptic_R(h, 0.3 + 0.1j, 1.7) == pytest.approx(hyperelliptic_R(h, 1.7, 0.3 + 0.1j))
    assert hyperelliptic_R(h, 0.4j, 0.4j) == pytest.approx(h(0.4j))


def test_tau_sheet_symmetry_and_pole(hyperelliptic: LoadedCurve) -> None:
    h = hyperelliptic.hyperelliptic
    same = hyperelliptic_tau(h, 0.5, 0.2).coeff
    flipped = hyperelliptic_tau(h, 0.5, 0.2, (-1, -1)).coeff

    assert same == pytest.approx(flipped)
    with pytest.raises(PoleError):
        hyperelliptic_tau(h, 0.5, 0.5)


def test_asymptotic_coefficients(fixture_curve: SpaceCurve) -> None:
    printed = asymptotic_coeffs(fixture_curve, Y)
    series = asymptotic_coeffs_series(fixture_curve, Y)

    assert printed == pytest.approx((-1, 1, 1, -7))
    assert series == pytest.approx((-1, 1, 1, -1))
    assert compare_asymptotic(fixture_curve, Y)["mismatched"] == ["A4"]


def test_printed_coefficients_need_a_template_curve(tower: SpaceCurve) -> None:
    with pytest.raises(DegenerateError):
        asymptotic_coeffs(tower, (4, 2, np.sqrt(2)))


def test_series_numerator_reproduces_the_kernel(fixture_curve: SpaceCurve) -> None:
    # K = P / (J1(x) (x1 - y1)) with J1(x) = -21 and x1 - y1 = 3
    assert series_numerator(fixture_curve, X, Y) == pytest.approx(-6, abs=1e-12)


def test_vectorized_third_kind(fixture_curve: SpaceCurve) -> None:
    xs = np.array([(3, -1, -3)], dtype=complex)
    values = third_kind_values(fixture_curve, xs, X, (2, -1, -2))

    assert values[0] == pytest.approx(third_kind(fixture_curve, (3, -1, -3), X, (2, -1, -2)).coeff)
    assert third_kind_values(fixture_curve, xs, X, X) == pytest.approx([0])


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_compact_and_genus4_agree_on_random_pairs(smooth_curve: SpaceCurve, seed: int) -> None:
    passed, detail = check_kernel_agreement(smooth_curve, np.random.default_rng(seed), pairs=1000)

    assert passed, detail


def test_kernel_agreement_check_reports_through_run_check(smooth_curve: SpaceCurve) -> None:
    out = run_check("kernel-agreement", check_kernel_agreement, smooth_curve, seed=5)

    assert out.name == "kernel-agreement"
    assert out.passed
    assert "1000 pairs" in out.detail
