import numpy as np
import pytest

from fdbeam.channel import ChannelEstimate, spherical_wave_channel
from fdbeam.design import DesignConfig, design_codebooks
from fdbeam.geometry import UpaGeometry, array_response_matrix, coverage_region_grid
from fdbeam.quant import QuantizationSpec

SPEED_OF_LIGHT = 299792458.0
WAVELENGTH_30GHZ = SPEED_OF_LIGHT / 30e9


@pytest.fixture(scope="session")
def ref_geom():
    return UpaGeometry(8, 8, 0.5, WAVELENGTH_30GHZ)


@pytest.fixture(scope="session")
def ref_region():
    return coverage_region_grid(-60, 60, 15, -30, 30, 15)


@pytest.fixture(scope="session")
def ref_response(ref_geom, ref_region):
    return array_response_matrix(ref_geom, ref_region)


@pytest.fixture(scope="session")
def ref_channel(ref_geom):
    wl = ref_geom.carrier_wavelength_m
    return spherical_wave_channel(ref_geom, ref_geom, np.array([0.0, 0.0, 10 * wl]), wl)


@pytest.fixture(scope="session")
def spec88():
    return QuantizationSpec(8, 8, 0.5)


@pytest.fixture(scope="session")
def ref_design(ref_region, ref_response, ref_channel, spec88):
    """The 8x8 / 45-beam reference design at sigma^2 = 10^-1.5, 8+8 bits."""
    cfg = DesignConfig.tied(10**-1.5, spec=spec88)
    est = ChannelEstimate(ref_channel, 0.0)
    return cfg, design_codebooks(cfg, est, ref_response, ref_response, ref_region, ref_region)
