"""Hardware-realizable beamforming weights and projection onto them.

A weight is realizable when its magnitude is an attenuator setting
``10**(-delta*(i-1)/20), i = 1..2**amp_bits`` and its phase a shifter
setting ``(i-1)*2*pi/2**phase_bits - pi, i = 1..2**phase_bits``.
Projection quantizes amplitude and phase independently: the amplitude
to the nearest codepoint in value, the phase to the codepoint whose
unit phasor is nearest in the complex plane.

Conventions:

* exact ties pick the smaller codepoint index (the larger amplitude,
  the more-negative phase);
* magnitudes above 1 clamp to the largest codepoint (solver iterates
  may transiently exceed 1 by rounding);
* ``arg(0)`` is taken as 0, and a zero weight maps to the smallest
  amplitude codepoint (attenuators cannot realize an exact zero).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fdbeam import _kernels


@dataclass(frozen=True)
class QuantizationSpec:
    """Resolution of the phase shifters and attenuators.

    ``atten_step_db`` is the attenuation per least-significant bit.
    """

    phase_bits: int
    amp_bits: int
    atten_step_db: float = 0.5

    def __post_init__(self):
        if self.phase_bits < 0 or self.amp_bits < 0:
            raise ValueError("bit counts must be nonnegative")
        if self.atten_step_db <= 0:
            raise ValueError("atten_step_db must be positive")

    @property
    def num_phase(self) -> int:
        return 2**self.phase_bits

    @property
    def num_amp(self) -> int:
        return 2**self.amp_bits


def amplitude_codepoints(spec: QuantizationSpec) -> np.ndarray:
    """Realizable amplitudes, descending from 1."""
    i = np.arange(spec.num_amp)
    return 10.0 ** (-spec.atten_step_db * i / 20.0)


def phase_codepoints(spec: QuantizationSpec) -> np.ndarray:
    """Realizable phases in radians, ascending from -pi."""
    if spec.phase_bits < 1:
        raise ValueError("phase_bits must be at least 1")
    k = np.arange(spec.num_phase)
    return k * 2.0 * np.pi / spec.num_phase - np.pi


def _values_from_indices(amp_idx, phase_idx, spec: QuantizationSpec) -> np.ndarray:
    amps = amplitude_codepoints(spec)
    delta = 2.0 * np.pi / spec.num_phase
    return amps[amp_idx] * np.exp(1j * (phase_idx * delta - np.pi))


def project_codebook(matrix: np.ndarray, spec: QuantizationSpec) -> np.ndarray:
    """Elementwise projection of a weight matrix onto the realizable set."""
    arr = np.asarray(matrix, dtype=np.complex128)
    amp_idx, phase_idx = _kernels.quantize_indices(
        arr, amplitude_codepoints(spec), spec.atten_step_db, spec.num_phase
    )
    return _values_from_indices(amp_idx, phase_idx, spec).reshape(arr.shape)


def project_weight(w: complex, spec: QuantizationSpec) -> complex:
    """Project a single complex weight onto the realizable set."""
    return complex(project_codebook(np.array([w]), spec)[0])


def is_quantized(matrix: np.ndarray, spec: QuantizationSpec) -> bool:
    """True when every entry already equals a realizable codepoint exactly."""
    arr = np.asarray(matrix, dtype=np.complex128)
    return bool(np.array_equal(project_codebook(arr, spec), arr))
