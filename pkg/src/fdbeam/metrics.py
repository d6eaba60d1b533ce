"""Link-budget quantities: SNR, INR, SINR, rates and normalized sums.

All functions work in linear units; rates are bits/s/Hz.  Experiments
parameterize the budget through three dB knobs (best-case transmit and
receive SNR, worst-case self-interference INR) plus a direct cross-link
INR, from which the raw power/gain fields are back-solved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def db_to_lin(x_db: float) -> float:
    """dB to linear; -inf maps to 0."""
    return float(10.0 ** (np.asarray(x_db, dtype=float) / 10.0))


def lin_to_db(x: float) -> float:
    """Linear to dB; 0 maps to -inf."""
    with np.errstate(divide="ignore"):
        return float(10.0 * np.log10(x))


@dataclass(frozen=True)
class LinkBudget:
    """Raw powers and large-scale gains entering the link metrics."""

    p_tx_bs: float = 1.0
    p_tx_ue: float = 1.0
    p_noise_bs: float = 1.0
    p_noise_ue: float = 1.0
    g_tx_sq: float = 1.0
    g_rx_sq: float = 1.0
    g_si_sq: float = 0.0
    inr_tx: float = 0.0

    def __post_init__(self):
        for name in ("p_tx_bs", "p_tx_ue", "p_noise_bs", "p_noise_ue",
                     "g_tx_sq", "g_rx_sq", "g_si_sq", "inr_tx"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    @classmethod
    def from_targets(
        cls,
        snrbar_tx_db: float,
        snrbar_rx_db: float,
        inrbar_db: float,
        inr_tx_db: float,
        n_tx: int,
        n_rx: int,
    ) -> "LinkBudget":
        """Back-solve gains from best-case SNRs and worst-case INR (dB)."""
        return cls(
            g_tx_sq=db_to_lin(snrbar_tx_db) / n_tx,
            g_rx_sq=db_to_lin(snrbar_rx_db) / n_rx,
            g_si_sq=db_to_lin(inrbar_db) / (n_tx * n_rx),
            inr_tx=db_to_lin(inr_tx_db),
        )


@dataclass(frozen=True)
class LinkReport:
    """Per-trial link metrics (linear, except the rates)."""

    snr_tx: float
    snr_rx: float
    inr_rx: float
    inr_tx: float
    sinr_tx: float
    sinr_rx: float
    r_tx: float
    r_rx: float
    gamma_sum: float


def snr_tx(f: np.ndarray, h_tx: np.ndarray, budget: LinkBudget) -> float:
    """Transmit-link SNR; dividing by Nt handles power splitting."""
    n_t = len(f)
    num = budget.p_tx_bs * budget.g_tx_sq * np.abs(np.vdot(h_tx, f)) ** 2
    return float(num / (n_t * budget.p_noise_ue))


def snr_rx(w: np.ndarray, h_rx: np.ndarray, budget: LinkBudget) -> float:
    """Receive-link SNR; dividing by ||w||^2 handles noise combining."""
    wn = float(np.vdot(w, w).real)
    if wn == 0.0:
        raise ValueError("receive beam has zero norm")
    num = budget.p_tx_ue * budget.g_rx_sq * np.abs(np.vdot(w, h_rx)) ** 2
    return float(num / (wn * budget.p_noise_bs))


def inr_rx(f: np.ndarray, w: np.ndarray, h: np.ndarray, budget: LinkBudget) -> float:
    """Self-interference INR coupled by a transmit/receive beam pair."""
    wn = float(np.vdot(w, w).real)
    if wn == 0.0:
        raise ValueError("receive beam has zero norm")
    n_t = len(f)
    coupl = np.abs(np.vdot(w, h @ f)) ** 2
    return float(budget.p_tx_bs * budget.g_si_sq * coupl / (n_t * wn * budget.p_noise_bs))


def max_inr(budget: LinkBudget, n_tx: int, n_rx: int) -> float:
    """Worst-case INR over unit-entry beams and a norm-Nt*Nr channel."""
    return float(budget.p_tx_bs * budget.g_si_sq * n_tx * n_rx / budget.p_noise_bs)


def sinr_and_rates(
    snr_tx_lin: float, snr_rx_lin: float, inr_rx_lin: float, inr_tx_lin: float
) -> tuple[float, float, float, float]:
    """(sinr_tx, sinr_rx, r_tx, r_rx), treating interference as noise."""
    sinr_t = snr_tx_lin / (1.0 + inr_tx_lin)
    sinr_r = snr_rx_lin / (1.0 + inr_rx_lin)
    return sinr_t, sinr_r, float(np.log2(1.0 + sinr_t)), float(np.log2(1.0 + sinr_r))


def gamma_sum(r_tx: float, r_rx: float, snr_tx_cbf: float, snr_rx_cbf: float) -> float:
    """Achieved sum rate normalized by the matched-filter codebook capacities."""
    denom = float(np.log2(1.0 + snr_tx_cbf) + np.log2(1.0 + snr_rx_cbf))
    if denom == 0.0:
        raise ValueError("codebook capacities are zero")
    return (r_tx + r_rx) / denom


def inr_matrix(F: np.ndarray, W: np.ndarray, h: np.ndarray, budget: LinkBudget) -> np.ndarray:
    """Per-pair INR table: entry (j, i) couples transmit beam i into receive beam j."""
    F = np.asarray(F)
    W = np.asarray(W)
    n_t = F.shape[0]
    coupl = np.abs(W.conj().T @ h @ F) ** 2
    w_norms = np.sum(np.abs(W) ** 2, axis=0)
    if np.any(w_norms == 0.0):
        raise ValueError("receive beam has zero norm")
    scale = budget.p_tx_bs * budget.g_si_sq / (n_t * budget.p_noise_bs)
    return scale * coupl / w_norms[:, None]
