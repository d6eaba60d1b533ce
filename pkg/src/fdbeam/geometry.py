"""Planar-array geometry, steering directions and array response vectors.

Angle convention (shared by every module in the package):

* The array lies in the y-z plane and radiates toward +x (broadside).
* Azimuth ``theta`` is measured from broadside within the horizontal
  (x-y) plane; positive azimuth points toward +y.
* Elevation ``phi`` is measured from the horizontal plane toward +z.
* The unit propagation vector is
  ``u = [cos(phi) cos(theta), cos(phi) sin(theta), sin(phi)]``
  and element ``n`` at position ``p_n`` contributes the phase
  ``exp(+j * 2*pi/lambda * (p_n - p_0) . u)``.

Element positions are centered on the array centroid (used by the
near-field channel generator); the response phase is referenced to the
first element so a 1x2 half-wavelength array steered to (30, 0) degrees
yields exactly ``[1, exp(j*pi*sin(30 deg))]``.  Broadside is therefore
the all-ones vector for any planar array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def canonical_azimuth_deg(az: float) -> float:
    """Wrap an azimuth into [-180, 180)."""
    return float((az + 180.0) % 360.0 - 180.0)


def _canonicalize(az: float, el: float) -> tuple[float, float]:
    el = float((el + 180.0) % 360.0 - 180.0)
    if el > 90.0:
        el = 180.0 - el
        az = az + 180.0
    elif el < -90.0:
        el = -180.0 - el
        az = az + 180.0
    return canonical_azimuth_deg(az), el


@dataclass(frozen=True)
class Direction:
    """A steering direction in degrees, canonicalized on construction.

    Azimuth ends up in [-180, 180), elevation in [-90, 90]; elevations
    beyond +/-90 are folded over the pole (the azimuth flips by 180).
    """

    azimuth_deg: float
    elevation_deg: float

    def __post_init__(self):
        az, el = _canonicalize(self.azimuth_deg, self.elevation_deg)
        object.__setattr__(self, "azimuth_deg", az)
        object.__setattr__(self, "elevation_deg", el)

    def unit_vector(self) -> np.ndarray:
        """Unit propagation vector under the documented convention."""
        th = np.deg2rad(self.azimuth_deg)
        ph = np.deg2rad(self.elevation_deg)
        return np.array(
            [np.cos(ph) * np.cos(th), np.cos(ph) * np.sin(th), np.sin(ph)]
        )


@dataclass(frozen=True)
class UpaGeometry:
    """Uniform planar array: ``rows`` x ``cols`` elements on a fixed grid.

    Rows run along the vertical (z) axis, columns along the horizontal
    (y) axis.  Element ``n`` maps to row ``n // cols`` and column
    ``n % cols``.
    """

    rows: int
    cols: int
    spacing_wavelengths: float = 0.5
    carrier_wavelength_m: float = 0.01

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be positive")
        if self.spacing_wavelengths <= 0 or self.carrier_wavelength_m <= 0:
            raise ValueError("spacing and wavelength must be positive")

    @property
    def num_elements(self) -> int:
        return self.rows * self.cols

    def element_positions(self) -> np.ndarray:
        """(N, 3) element positions in meters, origin at the array centroid."""
        d = self.spacing_wavelengths * self.carrier_wavelength_m
        r = np.arange(self.rows) - (self.rows - 1) / 2.0
        c = np.arange(self.cols) - (self.cols - 1) / 2.0
        pos = np.zeros((self.num_elements, 3))
        rr, cc = np.meshgrid(r, c, indexing="ij")
        pos[:, 1] = cc.ravel() * d
        pos[:, 2] = rr.ravel() * d
        return pos


@dataclass(frozen=True)
class CoverageRegion:
    """Ordered list of steering directions; order fixes the beam index order."""

    directions: tuple[Direction, ...]

    def __post_init__(self):
        dirs = tuple(self.directions)
        if len(set((d.azimuth_deg, d.elevation_deg) for d in dirs)) != len(dirs):
            raise ValueError("coverage region contains duplicate directions")
        object.__setattr__(self, "directions", dirs)

    def __len__(self) -> int:
        return len(self.directions)

    def __getitem__(self, i: int) -> Direction:
        return self.directions[i]

    def __iter__(self):
        return iter(self.directions)


def upa_array_response(geom: UpaGeometry, direction: Direction) -> np.ndarray:
    """Array response (steering) vector of a UPA toward ``direction``.

    Every entry has unit magnitude and the squared norm equals the
    element count.  The phase reference is the first element.
    """
    pos = geom.element_positions()
    rel = pos - pos[0]
    k = 2.0 * np.pi / geom.carrier_wavelength_m
    phases = k * (rel @ direction.unit_vector())
    return np.exp(1j * phases)


def _axis_values(start: float, stop: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("grid step must be positive")
    if start > stop:
        raise ValueError("empty grid: start exceeds stop")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def coverage_region_grid(
    az_start: float,
    az_stop: float,
    az_step: float,
    el_start: float,
    el_stop: float,
    el_step: float,
) -> CoverageRegion:
    """Rectangular grid of directions, elevation outer and azimuth inner.

    Endpoints are inclusive when the step divides the range evenly.
    """
    azs = _axis_values(az_start, az_stop, az_step)
    els = _axis_values(el_start, el_stop, el_step)
    dirs = [Direction(az, el) for el in els for az in azs]
    return CoverageRegion(tuple(dirs))


def array_response_matrix(geom: UpaGeometry, region: CoverageRegion) -> np.ndarray:
    """N x M matrix whose columns are the array responses over ``region``."""
    if len(region) == 0:
        raise ValueError("coverage region is empty")
    cols = [upa_array_response(geom, d) for d in region]
    return np.column_stack(cols)
