import numpy as np
import pytest

from weierkern.curve import Chart, HyperellipticCurve, SpaceCurve
from weierkern.errors import BranchPointError, DimensionError
from weierkern.kernel import KernelVariant, hyperelliptic_tau_points, kernel_eval
from weierkern.localanalysis import (
    ContourSpec,
    contour_residue,
    laurent_coeff,
    lift_contour,
    lift_turns,
    pole_order,
    residue_ledger,
    sample_points,
)


def test_bare_contour_residue() -> None:
    result = contour_residue(None, lambda z: 1 / (z - 2), ContourSpec(2, 0.5, 64))

    assert result.value == pytest.approx(1, abs=1e-10)
    assert result.turns == 1


def test_bare_double_pole_coefficient() -> None:
    spec = ContourSpec(0, 0.1, 64)

    assert laurent_coeff(None, lambda z: 1 / z ** 2, spec, -2).value == pytest.approx(1, abs=1e-10)
    assert abs(laurent_coeff(None, lambda z: 1 / z ** 2, spec, -1).value) < 1e-10


def test_pole_order_on_a_bare_contour() -> None:
    spec = ContourSpec(0, 0.1, 64)

    assert pole_order(None, lambda z: 1 / z ** 3 + 1 / z, spec) == 3
    assert pole_order(None, lambda z: np.exp(z), spec) == 0


def test_contour_spec_validation() -> None:
    with pytest.raises(DimensionError):
        ContourSpec(0, 0.0)
    with pytest.raises(DimensionError):
        ContourSpec(0, 0.1, 8)
    with pytest.raises(DimensionError):
        ContourSpec(0, 0.1, 64, Chart.INFINITY, base_index=1)


def test_curve_contour_needs_an_anchor(fixture_curve: SpaceCurve) -> None:
    with pytest.raises(DimensionError):
        lift_contour(fixture_curve, ContourSpec(-1, 0.1))


@pytest.mark.parametrize("variant", [KernelVariant.GENUS4, KernelVariant.COMPACT, KernelVariant.SYMMETRIC])
def test_kernel_residue_at_its_pole(smooth_curve: SpaceCurve, variant: KernelVariant) -> None:
    y = sample_points(smooth_curve, 1, np.random.default_rng(3), clearance=0.1)[0]
    spec = ContourSpec(y.x1, 1e-2, 64, Chart.AFFINE, y)
    result = contour_residue(smooth_curve, lambda x: kernel_eval(smooth_curve, x, y, variant), spec)

    assert result.value == pytest.approx(1, abs=1e-8)


def test_kernel_residues_at_infinity(smooth_curve: SpaceCurve) -> None:
    y = sample_points(smooth_curve, 1, np.random.default_rng(5), clearance=0.1)[0]
    ledger = residue_ledger(smooth_curve, lambda x: kernel_eval(smooth_curve, x, y), y)
    x3 = [result.value for label, result in ledger["infinity"] if label == "x3"]

    assert len(ledger["infinity"]) == 6
    assert len(x3) == 3
    assert x3 == pytest.approx([-1 / 3] * 3, abs=1e-6)
    assert abs(ledger["total"]) < 1e-6


def test_tau_has_a_bare_double_pole() -> None:
    h = HyperellipticCurve([1, 0, 0, 0, 1])
    plane = h.plane_curve()
    x1p = complex(0.3, 0.2)
    xp = (x1p, complex(np.sqrt(h(x1p))))
    spec = ContourSpec(x1p, 1e-2, 64, Chart.AFFINE, plane.make_point(xp))

    def tau(x):
        return hyperelliptic_tau_points(h, x, xp)

    assert laurent_coeff(plane, tau, spec, -2).value == pytest.approx(-1, abs=1e-8)
    assert abs(laurent_coeff(plane, tau, spec, -1).value) < 1e-8


def test_lift_turns_around_a_branch_point(parabola) -> None:
    c = parabola.curve
    anchor = c.make_point((0.1, np.sqrt(0.1)))

    assert lift_turns(c, ContourSpec(0, 0.1, 32, Chart.AFFINE, anchor)) == 2
    assert lift_turns(c, ContourSpec(1, 0.1, 32, Chart.AFFINE, c.make_point((1.1, np.sqrt(1.1))))) == 1
    with pytest.raises(BranchPointError):
        lift_contour(c, ContourSpec(0, 0.1, 32, Chart.AFFINE, anchor))
