import numpy as np
import pytest

from weierkern.curve import (
    Chart,
    HyperellipticCurve,
    PathSpec,
    SpaceCurve,
    branch_count,
    branch_points,
    chart_to_x1,
    circle_path,
    continue_point,
    fiber,
    genus,
    genus4_template,
    jacobians,
    monodromy_permutation,
    permutation_cycles,
    plane_projection,
    points_at_infinity,
    polish_point,
    primary_fixture,
    ramification,
    smoothness_check,
    template_coefficients,
    x1_to_chart,
)
from weierkern.errors import BranchPointError, DimensionError, InvalidDegreesError, NewtonError


def _far_from(values, radius: float) -> complex:
    for a in np.linspace(-1.5, 1.5, 7):
        for b in np.linspace(-1.5, 1.5, 7):
            z = complex(a, b)
            if not values or min(abs(z - v) for v in values) > radius:
                return z
    raise AssertionError("no base point away from the branch values")


def test_genus_of_complete_intersections() -> None:
    assert genus(3, 2) == 4
    assert genus(2, 2) == 1
    assert genus(1, 1) == 0
    with pytest.raises(InvalidDegreesError):
        genus(0, 2)


def test_fixture_curve_has_genus_four(fixture_curve: SpaceCurve) -> None:
    assert fixture_curve.genus == 4
    assert fixture_curve.fiber_degree == 6
    assert fixture_curve.name == "genus4-fixture"


def test_fiber_over_minus_one(fixture_curve: SpaceCurve) -> None:
    fib = fiber(fixture_curve, -1)

    assert len(fib) == 6
    assert not fib.degenerate
    for p in fib:
        assert p.residual <= 1e-9
        assert abs(p.x1 + 1) < 1e-12
        assert abs(p.x3 ** 6 - 1) < 1e-8
        assert abs(p.x2 * p.x3 + 1) < 1e-8
    for k in range(6):
        root = np.exp(1j * np.pi * k / 3)
        assert min(abs(p.x3 - root) for p in fib) < 1e-8


def test_jacobians_at_hand_points(fixture_curve: SpaceCurve) -> None:
    assert jacobians(fixture_curve, (-1, -1, 1)) == pytest.approx((-6, 0, 6))
    assert fixture_curve.jacobian_det((2, -2, -1)) == pytest.approx(-21)


def test_polish_point_projects_onto_the_curve(fixture_curve: SpaceCurve) -> None:
    exact = polish_point(fixture_curve, (-1, -1, 1))
    assert exact.x == (-1, -1, 1)

    moved = polish_point(fixture_curve, (-1.001, -0.999, 1.002))
    assert moved.residual <= fixture_curve.on_curve_tol
    assert fixture_curve.is_on_curve(moved.x)

    with pytest.raises(DimensionError):
        polish_point(fixture_curve, (1, 2))


def test_polish_point_refuses_a_far_point() -> None:
    curve = genus4_template({(3, 3, 0): 1, (3, 0, 0): 1})
    with pytest.raises(NewtonError):
        polish_point(curve, (1e6, 1e6, 1e6), iterations=1)


def test_chart_round_trip() -> None:
    assert chart_to_x1(0.5, Chart.INFINITY) == 2
    assert x1_to_chart(2, Chart.INFINITY) == 0.5
    assert chart_to_x1(0.5, Chart.AFFINE) == 0.5


def test_projection_eliminating_x3(fixture_curve: SpaceCurve) -> None:
    plane = plane_projection(fixture_curve, 2)

    assert plane.f.degree(1) == 6
    assert abs(plane.f(-1, -1)) < 1e-12
    assert abs(plane.f(2, -2)) < 1e-9
    with pytest.raises(DimensionError):
        plane_projection(fixture_curve, 0)


def test_template_round_trip(fixture_curve: SpaceCurve, tower: SpaceCurve) -> None:
    table = template_coefficients(fixture_curve)

    assert table == {(3, 3, 0): 1, (3, 0, 3): 1, (3, 0, 0): 1}
    assert template_coefficients(tower) is None
    assert genus4_template(table).f == fixture_curve.f


def test_primary_curve_is_singular() -> None:
    report = smoothness_check(primary_fixture())

    assert not report.smooth
    assert report.failures


def test_fallback_is_smooth_and_keeps_fixed_coefficients(smooth_curve: SpaceCurve) -> None:
    table = template_coefficients(smooth_curve)

    assert smooth_curve.name.startswith("genus4-fallback-")
    assert smoothness_check(smooth_curve).smooth
    assert table[(3, 3, 0)] == 1
    assert table.get((1, 1, 0), 0) == 0
    assert table.get((2, 2, 0), 0) == 0


def test_hyperelliptic_curve() -> None:
    h = HyperellipticCurve([1, 0, 0, 0, 1])

    assert h.genus == 1
    assert h.degree == 4
    assert h(2) == 17
    assert all(abs(abs(e) - 1) < 1e-12 for e in h.branch_points())
    assert h.plane_curve().fiber_degree == 2
    with pytest.raises(InvalidDegreesError):
        HyperellipticCurve([1, 0, 0, 1])


def test_trivial_loop_has_identity_monodromy(smooth_curve: SpaceCurve) -> None:
    center = _far_from(branch_points(smooth_curve), 0.5)
    perm = monodromy_permutation(smooth_curve, circle_path(center, 0.1))

    assert perm == list(range(6))


def test_simple_branch_point_swaps_two_sheets(smooth_curve: SpaceCurve) -> None:
    values = branch_points(smooth_curve)
    ram = ramification(smooth_curve, values[0])

    assert [len(cycle) for cycle in ram.cycles] == [2]
    assert ram.multiplicity == 1


def test_branch_count_matches_riemann_hurwitz(smooth_curve: SpaceCurve) -> None:
    assert branch_count(smooth_curve) == 2 * 4 - 2 + 2 * 6


def test_points_at_infinity(smooth_curve: SpaceCurve) -> None:
    points = points_at_infinity(smooth_curve)

    assert sum(p.multiplicity for p in points) == 6


def test_permutation_cycles() -> None:
    assert permutation_cycles([1, 0, 2]) == ((0, 1), (2,))


def test_paths_too_close_to_a_branch_value_are_refused(smooth_curve: SpaceCurve) -> None:
    values = branch_points(smooth_curve)
    base = _far_from(values, 0.5)
    start = fiber(smooth_curve, base).points[0]

    with pytest.raises(BranchPointError):
        continue_point(smooth_curve, start, PathSpec((base, values[0] + 5e-4)))
    with pytest.raises(BranchPointError):
        monodromy_permutation(smooth_curve, circle_path(values[0], 5e-4))


def test_parabola_continues_around_its_branch_value(parabola) -> None:
    c = parabola.curve
    end = continue_point(c, c.make_point((1, 1)), PathSpec((1, 1j, -1)))

    assert end.x2 == pytest.approx(1j, abs=1e-8)
    assert end.residual <= 1e-9


def test_concatenated_paths_compose(smooth_curve: SpaceCurve) -> None:
    center = _far_from(branch_points(smooth_curve), 0.5)
    a, b, c = center + 0.2, center + 0.2j, center - 0.2
    start = fiber(smooth_curve, a).points[0]
    first, second = PathSpec((a, b)), PathSpec((b, c))

    whole = continue_point(smooth_curve, start, first.then(second))
    stepwise = continue_point(smooth_curve, continue_point(smooth_curve, start, first), second)
    back = continue_point(smooth_curve, whole, first.then(second).reversed())

    assert whole.x == pytest.approx(stepwise.x, abs=1e-8)
    assert back.x == pytest.approx(start.x, abs=1e-8)


def test_path_charts_must_match() -> None:
    with pytest.raises(DimensionError):
        PathSpec((1, 2)).then(PathSpec((2, 3), Chart.INFINITY))


def test_reversed_and_doubled_loops_invert_and_square(smooth_curve: SpaceCurve) -> None:
    value = branch_points(smooth_curve)[0]
    ram = ramification(smooth_curve, value)
    circle = circle_path(value, ram.radius, 32)
    # closed exactly so the reversed loop starts on the same fiber
    loop = PathSpec(circle.waypoints[:-1] + circle.waypoints[:1], circle.chart, circle.max_step)
    clearance = 0.5 * ram.radius

    perm = monodromy_permutation(smooth_curve, loop, clearance)
    back = monodromy_permutation(smooth_curve, loop.reversed(), clearance)
    twice = monodromy_permutation(smooth_curve, loop.then(loop), clearance)

    assert perm != list(range(len(perm)))
    assert [back[perm[i]] for i in range(len(perm))] == list(range(len(perm)))
    assert twice == [perm[perm[i]] for i in range(len(perm))]
