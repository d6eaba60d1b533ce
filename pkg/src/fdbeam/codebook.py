"""Codebook containers, gain/coverage metrics, and conventional baselines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import windows

from fdbeam.geometry import (
    CoverageRegion,
    Direction,
    UpaGeometry,
    array_response_matrix,
    upa_array_response,
)
from fdbeam.quant import QuantizationSpec, is_quantized, project_codebook

_MAG_TOL = 1e-9


@dataclass(frozen=True)
class Codebook:
    """Beamforming matrix (beam i in column i) tied to its coverage region.

    ``spec`` is None for an unquantized codebook; otherwise every entry
    must lie on the realizable amplitude/phase grid.
    """

    matrix: np.ndarray
    region: CoverageRegion
    spec: QuantizationSpec | None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[1] != len(self.region):
            raise ValueError("matrix columns must match the coverage region")
        if np.max(np.abs(m)) > 1.0 + _MAG_TOL:
            raise ValueError("beamforming weight magnitude exceeds 1")
        object.__setattr__(self, "matrix", m)

    @property
    def num_beams(self) -> int:
        return self.matrix.shape[1]

    @property
    def num_elements(self) -> int:
        return self.matrix.shape[0]

    def beam(self, i: int) -> np.ndarray:
        return self.matrix[:, i]

    def validate_quantized(self) -> bool:
        if self.spec is None:
            return True
        return is_quantized(self.matrix, self.spec)


def cbf_codebook(
    geom: UpaGeometry, region: CoverageRegion, spec: QuantizationSpec | None
) -> Codebook:
    """Matched-filter codebook: beam i is the projected array response."""
    a = array_response_matrix(geom, region)
    if spec is None:
        return Codebook(a, region, None)
    return Codebook(project_codebook(a, spec), region, spec)


def taylor_window_2d(geom: UpaGeometry, sll_db: float, nbar: int) -> np.ndarray:
    """Separable row x column Taylor taper, normalized to unit peak."""

    def axis_window(n: int) -> np.ndarray:
        if n == 1:
            return np.ones(1)
        return windows.taylor(n, nbar=nbar, sll=sll_db, norm=False)

    w_rows = axis_window(geom.rows)
    w_cols = axis_window(geom.cols)
    v = np.outer(w_rows, w_cols).ravel()
    return v / np.max(v)


def taylor_codebook(
    geom: UpaGeometry,
    region: CoverageRegion,
    spec: QuantizationSpec | None,
    sll_db: float = 25.0,
    nbar: int = 4,
) -> Codebook:
    """Matched-filter beams tapered by a Taylor window for side lobe control."""
    if sll_db <= 0:
        raise ValueError("sll_db must be positive")
    a = array_response_matrix(geom, region)
    v = taylor_window_2d(geom, sll_db, nbar)
    tapered = a * v[:, None]
    if spec is None:
        return Codebook(tapered, region, None)
    return Codebook(project_codebook(tapered, spec), region, spec)


def beam_gain(a: np.ndarray, beam: np.ndarray) -> float:
    """Power gain ``|a* f|^2`` of a beam toward the response direction."""
    a = np.asarray(a)
    beam = np.asarray(beam)
    if a.shape != beam.shape:
        raise ValueError("array response and beam dimensions disagree")
    return float(np.abs(np.vdot(a, beam)) ** 2)


def coverage_variance(cb: Codebook, a_matrix: np.ndarray) -> float:
    """Mean squared shortfall from maximum gain, normalized to N^2.

    ``(1/M) * sum_i |N - |a_i* f_i||^2 / N^2`` over the beam/direction
    pairs shared by the codebook and the response matrix.
    """
    a_matrix = np.asarray(a_matrix)
    if a_matrix.shape != cb.matrix.shape:
        raise ValueError("response matrix and codebook dimensions disagree")
    n = cb.num_elements
    g = np.abs(np.einsum("nm,nm->m", a_matrix.conj(), cb.matrix))
    return float(np.mean(np.abs(n - g) ** 2) / n**2)


def beam_pattern_cut(
    geom: UpaGeometry,
    beam: np.ndarray,
    cut: str = "azimuth",
    fixed_angle_deg: float = 0.0,
    sample_step_deg: float = 1.0,
    span_deg: tuple[float, float] = (-90.0, 90.0),
) -> list[tuple[float, float]]:
    """Sample ``|a(angle)* f|^2`` across an azimuth or elevation cut."""
    if cut not in ("azimuth", "elevation"):
        raise ValueError("cut must be 'azimuth' or 'elevation'")
    if sample_step_deg <= 0:
        raise ValueError("sample_step_deg must be positive")
    lo, hi = span_deg
    n = int(np.floor((hi - lo) / sample_step_deg + 1e-9)) + 1
    angles = lo + sample_step_deg * np.arange(n)
    out = []
    for ang in angles:
        if cut == "azimuth":
            d = Direction(ang, fixed_angle_deg)
        else:
            d = Direction(fixed_angle_deg, ang)
        out.append((float(ang), beam_gain(upa_array_response(geom, d), beam)))
    return out


# ----------------------------------------------------------------------
# File format: CSV with header beam,element,re,im plus a sidecar
# metadata file (key = value lines) describing the region and the
# quantization spec.
# ----------------------------------------------------------------------


def sidecar_path(path) -> str:
    return str(path) + ".meta"


def write_codebook_csv(path, cb: Codebook, geom: UpaGeometry | None = None) -> None:
    lines = ["beam,element,re,im"]
    for b in range(cb.num_beams):
        for e in range(cb.num_elements):
            v = cb.matrix[e, b]
            lines.append(f"{b},{e},{float(v.real)!r},{float(v.imag)!r}")
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")

    meta = []
    if geom is not None:
        meta.append(f"rows = {geom.rows}")
        meta.append(f"cols = {geom.cols}")
        meta.append(f"spacing_wavelengths = {geom.spacing_wavelengths!r}")
        meta.append(f"carrier_wavelength_m = {geom.carrier_wavelength_m!r}")
    dirs = ";".join(
        f"{d.azimuth_deg!r}:{d.elevation_deg!r}" for d in cb.region
    )
    meta.append(f"directions = {dirs}")
    if cb.spec is None:
        meta.append("quantized = false")
    else:
        meta.append("quantized = true")
        meta.append(f"phase_bits = {cb.spec.phase_bits}")
        meta.append(f"amp_bits = {cb.spec.amp_bits}")
        meta.append(f"atten_step_db = {cb.spec.atten_step_db!r}")
    with open(sidecar_path(path), "w", newline="\n") as f:
        f.write("\n".join(meta) + "\n")


def read_codebook_csv(path) -> Codebook:
    with open(path) as f:
        header = f.readline().strip()
        if header != "beam,element,re,im":
            raise ValueError(f"unexpected codebook CSV header: {header!r}")
        rows = []
        for line in f:
            line = line.strip()
            if not line:
                continue
            b, e, re, im = line.split(",")
            rows.append((int(b), int(e), float(re), float(im)))
    if not rows:
        raise ValueError("codebook CSV contains no entries")
    n_beams = max(r[0] for r in rows) + 1
    n_elem = max(r[1] for r in rows) + 1
    m = np.zeros((n_elem, n_beams), dtype=np.complex128)
    for b, e, re, im in rows:
        m[e, b] = re + 1j * im

    meta = {}
    with open(sidecar_path(path)) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            meta[key.strip()] = value.strip()
    dirs = []
    for tok in meta["directions"].split(";"):
        az, _, el = tok.partition(":")
        dirs.append(Direction(float(az), float(el)))
    region = CoverageRegion(tuple(dirs))
    spec = None
    if meta.get("quantized") == "true":
        spec = QuantizationSpec(
            phase_bits=int(meta["phase_bits"]),
            amp_bits=int(meta["amp_bits"]),
            atten_step_db=float(meta["atten_step_db"]),
        )
    return Codebook(m, region, spec)
