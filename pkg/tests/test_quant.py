import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdbeam.quant import (
    QuantizationSpec,
    amplitude_codepoints,
    is_quantized,
    phase_codepoints,
    project_codebook,
    project_weight,
)


def enumeration_project(w: complex, spec: QuantizationSpec) -> complex:
    """Independent oracle: full scan of both codepoint sets.

    Amplitude: nearest in value.  Phase: nearest unit phasor (squared
    chord distance, monotone-equivalent to the chord itself).  argmin
    picks the first (smallest) index on ties.
    """
    amps = amplitude_codepoints(spec)
    i = int(np.argmin(np.abs(amps - abs(w))))
    ks = np.arange(2**spec.phase_bits)
    delta = 2 * np.pi / 2**spec.phase_bits
    thetas = ks * delta - np.pi
    x = np.angle(w)
    d = (np.cos(thetas) - np.cos(x)) ** 2 + (np.sin(thetas) - np.sin(x)) ** 2
    k = int(np.argmin(d))
    return complex(amps[i] * np.exp(1j * (k * delta - np.pi)))


def test_amplitude_codepoints():
    assert np.allclose(
        amplitude_codepoints(QuantizationSpec(1, 1, 0.5)), [1.0, 10 ** (-0.025)]
    )
    assert np.array_equal(amplitude_codepoints(QuantizationSpec(1, 0, 0.5)), [1.0])
    pts = amplitude_codepoints(QuantizationSpec(1, 8, 0.5))
    assert pts.shape == (256,)
    assert np.isclose(pts[-1], 10 ** (-255 * 0.5 / 20))
    assert np.all(np.diff(pts) < 0)


def test_phase_codepoints():
    assert np.allclose(
        phase_codepoints(QuantizationSpec(2, 0, 0.5)),
        [-np.pi, -np.pi / 2, 0.0, np.pi / 2],
    )
    assert np.allclose(phase_codepoints(QuantizationSpec(1, 0, 0.5)), [-np.pi, 0.0])
    for b in (1, 3, 6):
        pts = phase_codepoints(QuantizationSpec(b, 0, 0.5))
        assert np.allclose(np.diff(pts), 2 * np.pi / 2**b)
    with pytest.raises(ValueError):
        phase_codepoints(QuantizationSpec(0, 0, 0.5))


def test_project_weight_values():
    spec = QuantizationSpec(8, 8, 0.5)
    assert project_weight(1.0 + 0j, spec) == 1.0 + 0j
    # amplitude snaps to the nearest attenuator setting in linear value:
    # 0.95 sits between 1 and 10^(-0.025) ~ 0.944061, closer to the latter
    q = project_weight(0.95 * np.exp(1j * 0.01), spec)
    assert np.isclose(abs(q), 10 ** (-0.025), atol=1e-12)
    assert np.isclose(np.angle(q), 0.0, atol=1e-12)
    # zero weight: smallest amplitude codepoint at phase arg(0) = 0
    q0 = project_weight(0.0, spec)
    assert np.isclose(abs(q0), 10 ** (-255 * 0.5 / 20))
    assert np.angle(q0) == 0.0


def test_magnitude_above_one_clamps():
    spec = QuantizationSpec(4, 4, 0.5)
    q = project_weight(3.7 * np.exp(0.4j), spec)
    assert abs(q) == 1.0


def test_project_matches_enumeration_oracle():
    rng = np.random.default_rng(11)
    w = (rng.standard_normal(3000) + 1j * rng.standard_normal(3000)) * rng.uniform(
        0, 1.4, 3000
    )
    for bits in ((1, 1), (2, 4), (8, 8), (4, 1)):
        spec = QuantizationSpec(bits[0], bits[1], 0.5)
        got = project_codebook(w, spec)
        want = np.array([enumeration_project(x, spec) for x in w])
        assert np.array_equal(got, want)


def test_projection_idempotent_and_bounded():
    spec = QuantizationSpec(8, 8, 0.5)
    rng = np.random.default_rng(5)
    f = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    q = project_codebook(f, spec)
    assert np.array_equal(project_codebook(q, spec), q)
    assert np.max(np.abs(q)) <= 1.0
    assert is_quantized(q, spec)


def test_unit_modulus_matrix_phase_error_bound():
    spec = QuantizationSpec(8, 8, 0.5)
    rng = np.random.default_rng(17)
    a = np.exp(1j * rng.uniform(-np.pi, np.pi, (16, 5)))
    q = project_codebook(a, spec)
    err = np.abs(np.angle(q * np.conj(a)))
    assert np.max(err) <= np.pi / 256 + 1e-12
    assert np.allclose(np.abs(q), 1.0)


@settings(max_examples=100, deadline=None)
@given(
    re=st.floats(-2, 2, allow_nan=False),
    im=st.floats(-2, 2, allow_nan=False),
    b_phs=st.integers(1, 8),
    b_amp=st.integers(0, 8),
)
def test_projection_properties(re, im, b_phs, b_amp):
    spec = QuantizationSpec(b_phs, b_amp, 0.5)
    w = complex(re, im)
    q = project_weight(w, spec)
    assert abs(q) <= 1.0
    assert project_weight(q, spec) == q
    if abs(w) <= 1.0:
        amps = amplitude_codepoints(spec)
        gaps = np.abs(amps - abs(w))
        assert abs(abs(q) - abs(w)) <= gaps.min() + 1e-12
