import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdbeam.geometry import (
    CoverageRegion,
    Direction,
    UpaGeometry,
    array_response_matrix,
    coverage_region_grid,
    upa_array_response,
)


def test_direction_canonicalization():
    assert Direction(190.0, 0.0).azimuth_deg == -170.0
    assert Direction(-190.0, 0.0).azimuth_deg == 170.0
    d = Direction(10.0, 100.0)  # folds over the pole
    assert d.elevation_deg == 80.0
    assert d.azimuth_deg == -170.0


def test_broadside_is_all_ones():
    geom = UpaGeometry(8, 8, 0.5, 0.01)
    a = upa_array_response(geom, Direction(0, 0))
    assert np.array_equal(a, np.ones(64, dtype=complex))


def test_two_element_steering_hand_value():
    geom = UpaGeometry(1, 2, 0.5, 0.01)
    a = upa_array_response(geom, Direction(30, 0))
    expected = np.array([1.0, np.exp(1j * np.pi * np.sin(np.deg2rad(30)))])
    assert np.allclose(a, expected, atol=1e-12)
    assert np.allclose(a, [1.0, 1j], atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    az=st.floats(-180, 180),
    el=st.floats(-90, 90),
    rows=st.integers(1, 6),
    cols=st.integers(1, 6),
)
def test_response_norm_and_unit_modulus(az, el, rows, cols):
    geom = UpaGeometry(rows, cols, 0.5, 0.01)
    a = upa_array_response(geom, Direction(az, el))
    n = rows * cols
    assert np.allclose(np.abs(a), 1.0, atol=1e-12)
    assert abs(np.vdot(a, a).real - n) <= 1e-9 * n


def test_conjugate_symmetry_in_azimuth():
    geom = UpaGeometry(4, 6, 0.5, 0.01)
    a_pos = upa_array_response(geom, Direction(37.0, 0.0))
    a_neg = upa_array_response(geom, Direction(-37.0, 0.0))
    assert np.allclose(a_neg, np.conj(a_pos), atol=1e-12)


def test_symmetry_about_pm90():
    geom = UpaGeometry(8, 8, 0.5, 0.01)
    a1 = upa_array_response(geom, Direction(60.0, 0.0))
    a2 = upa_array_response(geom, Direction(120.0, 0.0))
    assert np.allclose(a1, a2, atol=1e-12)


def test_inner_product_peaks_only_at_matching_grid_direction():
    geom = UpaGeometry(8, 8, 0.5, 0.01)
    region = coverage_region_grid(-60, 60, 15, -30, 30, 15)
    a_mat = array_response_matrix(geom, region)
    n = geom.num_elements
    gram = np.abs(a_mat.conj().T @ a_mat)
    assert np.all(gram <= n + 1e-9)
    off_diag = gram - np.diag(np.diag(gram))
    assert np.all(np.diag(gram) >= n - 1e-9)
    assert np.max(off_diag) < n - 1e-6


def test_grid_counts_and_order():
    region = coverage_region_grid(-60, 60, 15, -30, 30, 15)
    assert len(region) == 45
    # elevation outer, azimuth inner
    assert region[0] == Direction(-60, -30)
    assert region[1] == Direction(-45, -30)
    assert region[9] == Direction(-60, -15)

    single = coverage_region_grid(0, 0, 1, 0, 0, 1)
    assert len(single) == 1

    fine = coverage_region_grid(-60, 60, 1, -10, 10, 1)
    assert len(fine) == 121 * 21


def test_empty_grid_errors():
    with pytest.raises(ValueError):
        coverage_region_grid(10, -10, 1, 0, 0, 1)
    with pytest.raises(ValueError):
        coverage_region_grid(0, 0, -1, 0, 0, 1)


def test_duplicate_directions_rejected():
    with pytest.raises(ValueError):
        CoverageRegion((Direction(0, 0), Direction(0, 0)))


def test_response_matrix_shape_and_energy():
    geom = UpaGeometry(8, 8, 0.5, 0.01)
    region = coverage_region_grid(-60, 60, 15, -30, 30, 15)
    a_mat = array_response_matrix(geom, region)
    assert a_mat.shape == (64, 45)
    assert np.isclose(np.linalg.norm(a_mat, "fro") ** 2, 64 * 45)

    single = coverage_region_grid(0, 0, 1, 0, 0, 1)
    col = array_response_matrix(geom, single)
    assert col.shape == (64, 1)
    assert np.array_equal(col[:, 0], np.ones(64, dtype=complex))


def test_element_positions_centered():
    geom = UpaGeometry(3, 5, 0.5, 0.02)
    pos = geom.element_positions()
    assert pos.shape == (15, 3)
    assert np.allclose(pos.mean(axis=0), 0.0, atol=1e-15)
    assert np.all(pos[:, 0] == 0.0)
