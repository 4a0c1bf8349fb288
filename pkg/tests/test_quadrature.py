import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from core.errors import ValidationError
from core.quadrature import breakpoint_grid, check_grid, integrate_with_error, richardson


@pytest.mark.parametrize("grid", [8, 100, 2 ** 11 + 1, 16.0, True])
def test_grid_must_be_power_of_two(grid):
    with pytest.raises(ValidationError):
        check_grid(grid)


def test_breakpoints_are_grid_points():
    grid = breakpoint_grid([0.0, 0.3, 1.0], 64)
    assert grid.s[0] == 0.0 and grid.s[-1] == 1.0
    for start, stop in grid.segments:
        assert (stop - start) % 2 == 0
        assert np.all(np.diff(grid.s[start:stop + 1]) > 0)
    (_, closing), (opening, _) = grid.segments
    assert opening == closing + 1
    assert grid.s[closing] == grid.s[opening] == pytest.approx(0.3, abs=1e-15)
    assert_array_equal(grid.segment_index[closing:opening + 1], [0, 1])


def test_report_index_keeps_one_node_per_s():
    grid = breakpoint_grid([0.0, 0.5, 1.0], 16)
    fine = grid.refine()
    reported = fine.s[fine.report_index]
    assert len(reported) == 17
    assert np.all(np.diff(reported) > 0)
    assert_array_equal(fine.segment_index[fine.report_index][8:10], [1, 1])
    assert_array_equal(fine.s[fine.coarse_index], grid.s)


def test_one_sided_samples_at_a_kink_keep_fourth_order():
    # values jump at the breakpoint: each segment sees its own limit
    exact = 0.5 + 2.0 * (np.exp(1.5) - 1.0) / 3.0
    errors = []
    for size in (16, 32):
        grid = breakpoint_grid([0.0, 0.5, 1.0], size).refine()
        values = np.where(grid.segment_index == 0, 1.0, 2.0 * np.exp(3.0 * (grid.s - 0.5)))
        total, estimate = integrate_with_error(grid, values)
        assert abs(total - exact) < 4 * estimate
        errors.append(abs(total - exact))
    assert errors[0] / errors[1] > 12.0


def test_simpson_is_exact_for_cubics_with_a_kink():
    grid = breakpoint_grid([0.0, 0.5, 1.0], 32)
    values = np.where(grid.s < 0.5, grid.s ** 3, 0.125 + 3.0 * (grid.s - 0.5))
    assert grid.integrate(values) == pytest.approx(0.5 ** 4 / 4 + 0.125 * 0.5 + 1.5 * 0.25, abs=1e-15)


def test_refine_and_coarsen_are_inverse():
    grid = breakpoint_grid([0.0, 0.5, 1.0], 16)
    fine = grid.refine()
    assert fine.panels == 2 * grid.panels
    assert_array_equal(fine.coarsen().s, grid.s)
    assert fine.coarsen().segments == grid.segments


def test_richardson_estimate_bounds_the_error():
    grid = breakpoint_grid([0.0, 1.0], 16).refine()
    values = np.exp(3.0 * grid.s)
    total, error = integrate_with_error(grid, values)
    exact = (np.exp(3.0) - 1.0) / 3.0
    assert abs(total - exact) < 4 * error
    assert error > 0
    assert_allclose(richardson(1.0, 0.85), 0.01)


def test_integrates_stacked_rows():
    grid = breakpoint_grid([0.0, 1.0], 16)
    stacked = np.stack([np.ones_like(grid.s), grid.s, grid.s ** 2])
    assert_allclose(grid.integrate(stacked), [1.0, 0.5, 1.0 / 3.0], atol=1e-15)
