from typing import List

import numpy as np
import pytest

from weierkern.correlator import (
    CorrelatorRequest,
    GreenRequest,
    bc_correlator,
    correlator_matrix,
    determinant_report,
    green_function,
    pole_growth_fit,
    spurious_invariance_check,
)
from weierkern.curve import CurvePoint, SpaceCurve
from weierkern.diffbasis import holomorphic_basis, independence
from weierkern.errors import DimensionError, PoleError
from weierkern.localanalysis import sample_points


@pytest.fixture(scope="module")
def insertion_points(smooth_curve: SpaceCurve) -> List[CurvePoint]:
    return sample_points(smooth_curve, 13, np.random.default_rng(2024), clearance=0.1)


def test_request_dimension_rules(insertion_points: List[CurvePoint]) -> None:
    b = insertion_points

    assert CorrelatorRequest(2, b[:10], b[10:11]).size == 10
    assert CorrelatorRequest(1, b[:4], b[4:5]).size == 4
    with pytest.raises(DimensionError):
        CorrelatorRequest(2, b[:9], b[9:10])
    with pytest.raises(DimensionError):
        CorrelatorRequest(1, b[:3], [])
    with pytest.raises(DimensionError):
        CorrelatorRequest(3, b[:3], [])


def test_weights_and_size(smooth_curve: SpaceCurve, insertion_points: List[CurvePoint]) -> None:
    result = bc_correlator(smooth_curve, CorrelatorRequest(2, insertion_points[:10], insertion_points[10:11]))

    assert (result.b_weight, result.c_weight) == (2, -1)
    assert result.size == 10
    assert result.value != 0


def test_duplicate_insertion_gives_zero(smooth_curve: SpaceCurve, insertion_points: List[CurvePoint]) -> None:
    b = insertion_points[:9] + [insertion_points[0]]
    result = bc_correlator(smooth_curve, CorrelatorRequest(2, b, insertion_points[10:11]))

    assert result.hadamard_ratio <= 1e-12


def test_lambda_one_without_kernels_is_the_basis_determinant(smooth_curve: SpaceCurve,
                                                             insertion_points: List[CurvePoint]) -> None:
    # n = 1: the only kernel column would be nu_{q,q} = 0, so it is dropped
    b = insertion_points[:4]
    result = bc_correlator(smooth_curve, CorrelatorRequest(1, b, insertion_points[4:5]))
    expected = independence(smooth_curve, holomorphic_basis(smooth_curve), b).determinant

    assert result.value == pytest.approx(expected, rel=1e-10)


def test_basis_column_shift_leaves_the_determinant(smooth_curve: SpaceCurve,
                                                   insertion_points: List[CurvePoint]) -> None:
    req = CorrelatorRequest(2, insertion_points[:10], insertion_points[10:11])

    assert spurious_invariance_check(smooth_curve, req, seed=3).relative_change <= 1e-8
    assert spurious_invariance_check(smooth_curve, req, shift=(0, 0, 0, 0)).identical


def test_lambda_one_shift(smooth_curve: SpaceCurve, insertion_points: List[CurvePoint]) -> None:
    req = CorrelatorRequest(1, insertion_points[:5], insertion_points[5:7])

    assert spurious_invariance_check(smooth_curve, req, seed=4).relative_change <= 1e-10


def test_kernel_scaling(smooth_curve: SpaceCurve, insertion_points: List[CurvePoint]) -> None:
    req = CorrelatorRequest(2, insertion_points[:11], insertion_points[11:13])
    base = determinant_report(correlator_matrix(smooth_curve, req))[0]
    scaled = determinant_report(correlator_matrix(smooth_curve, req, kernel_scale=2.0))[0]

    assert scaled == pytest.approx(4 * base, rel=1e-10)


def test_b_on_c_is_a_pole(smooth_curve: SpaceCurve, insertion_points: List[CurvePoint]) -> None:
    b = insertion_points[:10]
    with pytest.raises(PoleError):
        correlator_matrix(smooth_curve, CorrelatorRequest(2, b, [b[3]]))


def test_simple_pole_growth(smooth_curve: SpaceCurve, insertion_points: List[CurvePoint]) -> None:
    req = CorrelatorRequest(2, insertion_points[:10], insertion_points[10:11])
    growth = pole_growth_fit(smooth_curve, req, (0, 0), offsets=(1e-3, 1e-4, 1e-5))

    assert growth.exponent == pytest.approx(1, abs=0.05)
    with pytest.raises(DimensionError):
        pole_growth_fit(smooth_curve, req, (0, 5))


def test_green_function_vanishes_for_equal_poles(smooth_curve: SpaceCurve,
                                                 insertion_points: List[CurvePoint]) -> None:
    p, q = insertion_points[:2]
    result = green_function(smooth_curve, GreenRequest(p, q, q), residues=False, periods=False)

    assert result.value.coeff == 0


@pytest.mark.slow
def test_green_function_residues_and_periods(smooth_curve: SpaceCurve) -> None:
    p, q, qp = sample_points(smooth_curve, 3, np.random.default_rng(17), clearance=0.2)
    result = green_function(smooth_curve, GreenRequest(p, q, qp))

    assert result.residue_ratio == pytest.approx(-1, abs=1e-6)
    assert max(result.period_residuals) <= 1e-3 * result.gram_norm
