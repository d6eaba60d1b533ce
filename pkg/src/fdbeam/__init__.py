"""Self-interference-aware analog beamforming codebooks for full-duplex mmWave arrays.

The package provides:

* planar-array geometry, steering vectors and coverage grids (``geometry``),
* self-interference MIMO channel generators (``channel``),
* phase-shifter/attenuator quantization (``quant``),
* codebook containers and conventional baselines (``codebook``),
* the coupling-aware codebook design (``design``) and its convex
  machinery (``solverkit``),
* link-budget metrics (``metrics``) and a Monte Carlo harness
  (``montecarlo``),
* a measurement-backed statistical self-interference generator
  (``simodel``),
* a command-line front end (``cli``).

Hot numeric kernels are numba-compiled by default; set
``FDBEAM_BACKEND=numpy`` to force the pure-numpy fallback.
"""

from fdbeam.geometry import (
    Direction,
    UpaGeometry,
    CoverageRegion,
    upa_array_response,
    coverage_region_grid,
    array_response_matrix,
)
from fdbeam.quant import QuantizationSpec, project_weight, project_codebook
from fdbeam.codebook import Codebook, cbf_codebook, taylor_codebook
from fdbeam.channel import ChannelEstimate, spherical_wave_channel
from fdbeam.metrics import LinkBudget, LinkReport
from fdbeam.design import DesignConfig, DesignResult, design_codebooks
from fdbeam.simodel import SiModelParams, default_params, draw_inr

__all__ = [
    "Direction",
    "UpaGeometry",
    "CoverageRegion",
    "upa_array_response",
    "coverage_region_grid",
    "array_response_matrix",
    "QuantizationSpec",
    "project_weight",
    "project_codebook",
    "Codebook",
    "cbf_codebook",
    "taylor_codebook",
    "ChannelEstimate",
    "spherical_wave_channel",
    "LinkBudget",
    "LinkReport",
    "DesignConfig",
    "DesignResult",
    "design_codebooks",
    "SiModelParams",
    "default_params",
    "draw_inr",
]

__version__ = "0.1.0"
