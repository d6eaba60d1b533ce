"""Self-interference MIMO channel generators and the estimation-error model.

Generated model channels are normalized to a squared Frobenius norm of
``Nt * Nr``.  The complex Gaussian convention throughout: a variance
``v`` is the total per-entry variance, split evenly between independent
real and imaginary parts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fdbeam.geometry import UpaGeometry


@dataclass(frozen=True)
class ChannelEstimate:
    """Channel estimate plus the variance of its iid Gaussian error."""

    h_bar: np.ndarray
    eps_sq: float

    def __post_init__(self):
        if self.eps_sq < 0:
            raise ValueError("eps_sq must be nonnegative")
        object.__setattr__(self, "h_bar", np.asarray(self.h_bar, dtype=np.complex128))


def complex_gaussian_matrix(shape, var: float, rng: np.random.Generator) -> np.ndarray:
    """iid circularly-symmetric complex Gaussian entries, total variance ``var``."""
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def spherical_wave_channel(
    tx: UpaGeometry,
    rx: UpaGeometry,
    rx_offset_m,
    wavelength_m: float,
) -> np.ndarray:
    """Near-field channel between two co-located arrays.

    Entry (m, n) is ``(rho / r_nm) * exp(-j*2*pi*r_nm/lambda)`` with
    ``r_nm`` the distance from transmit element n to receive element m
    and ``rho`` fixed afterwards so the squared Frobenius norm equals
    ``Nt * Nr``.  The receive array is a translated copy of its own
    centered layout (both panels face the same direction); the default
    deployment stacks the panels along the vertical axis.
    """
    p_tx = tx.element_positions()
    p_rx = rx.element_positions() + np.asarray(rx_offset_m, dtype=float)
    diff = p_rx[:, None, :] - p_tx[None, :, :]
    r = np.sqrt(np.sum(diff * diff, axis=2))
    if np.any(r <= 0.0):
        raise ValueError("transmit and receive elements coincide")
    h = (1.0 / r) * np.exp(-2j * np.pi * r / wavelength_m)
    nt = tx.num_elements
    nr = rx.num_elements
    rho = np.sqrt(nt * nr) / np.linalg.norm(h, "fro")
    return rho * h


def rayleigh_mixture_channel(
    h_sw: np.ndarray, zeta_sq: float, rng: np.random.Generator
) -> np.ndarray:
    """Mix a structured channel with an iid Rayleigh component.

    ``zeta_sq`` is the per-entry variance of the Gaussian part; the sum
    is renormalized to squared Frobenius norm ``Nt * Nr``.
    """
    h_sw = np.asarray(h_sw, dtype=np.complex128)
    if zeta_sq < 0:
        raise ValueError("zeta_sq must be nonnegative")
    if zeta_sq == 0.0:
        return h_sw.copy()
    h_ray = complex_gaussian_matrix(h_sw.shape, zeta_sq, rng)
    total = h_sw + h_ray
    nr, nt = h_sw.shape
    return total * (np.sqrt(nt * nr) / np.linalg.norm(total, "fro"))


def draw_true_channel(est: ChannelEstimate, rng: np.random.Generator) -> np.ndarray:
    """Realize ``H = H_bar + Delta`` with iid Gaussian error of variance eps_sq."""
    if est.eps_sq == 0.0:
        return est.h_bar.copy()
    return est.h_bar + complex_gaussian_matrix(est.h_bar.shape, est.eps_sq, rng)


def write_channel_csv(path, h: np.ndarray) -> None:
    """Write a channel matrix as ``m,n,re,im`` rows (0-based indices)."""
    h = np.asarray(h, dtype=np.complex128)
    lines = ["m,n,re,im"]
    for m in range(h.shape[0]):
        for n in range(h.shape[1]):
            v = h[m, n]
            lines.append(f"{m},{n},{float(v.real)!r},{float(v.imag)!r}")
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def read_channel_csv(path) -> np.ndarray:
    """Read a channel matrix written by :func:`write_channel_csv`."""
    with open(path) as f:
        header = f.readline().strip()
        if header != "m,n,re,im":
            raise ValueError(f"unexpected channel CSV header: {header!r}")
        rows = []
        for line in f:
            line = line.strip()
            if not line:
                continue
            m, n, re, im = line.split(",")
            rows.append((int(m), int(n), float(re), float(im)))
    if not rows:
        raise ValueError("channel CSV contains no entries")
    nr = max(r[0] for r in rows) + 1
    nt = max(r[1] for r in rows) + 1
    h = np.zeros((nr, nt), dtype=np.complex128)
    for m, n, re, im in rows:
        h[m, n] = re + 1j * im
    return h
