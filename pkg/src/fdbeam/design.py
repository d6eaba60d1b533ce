"""Self-interference-aware codebook design by projected alternating minimization.

Both codebooks start as projected matched filters.  Each round fixes
one codebook, solves the convex coverage-constrained subproblem for the
other (the expectation of the coupled power admits the closed form
``||W* Hbar F||_F^2 + eps_sq ||F||_F^2 ||W||_F^2``), and projects the
solution back onto the realizable weight grid.  A beam-by-beam variant
alternates between single transmit and receive beams with per-beam
coverage constraints, folding quantization in progressively.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from fdbeam.channel import ChannelEstimate
from fdbeam.codebook import Codebook
from fdbeam.geometry import CoverageRegion
from fdbeam.metrics import LinkBudget
from fdbeam.quant import QuantizationSpec, project_codebook
from fdbeam.solverkit import QcqpProblem, SolveReport, solve_qcqp


@dataclass(frozen=True)
class DesignConfig:
    """Design knobs: coverage variances, error variance, iteration budget."""

    sigma_tx_sq: float
    sigma_rx_sq: float
    eps_sq: float = 0.0
    outer_iters: int = 4
    solver_tol: float = 1e-4
    spec: QuantizationSpec = field(default_factory=lambda: QuantizationSpec(8, 8, 0.5))

    def __post_init__(self):
        if self.sigma_tx_sq < 0 or self.sigma_rx_sq < 0 or self.eps_sq < 0:
            raise ValueError("variances must be nonnegative")
        if self.outer_iters < 1:
            raise ValueError("outer_iters must be at least 1")
        if self.solver_tol <= 0:
            raise ValueError("solver_tol must be positive")

    @classmethod
    def tied(cls, sigma_sq: float, **kwargs) -> "DesignConfig":
        """Equal transmit/receive coverage variances (the common case)."""
        return cls(sigma_tx_sq=sigma_sq, sigma_rx_sq=sigma_sq, **kwargs)


@dataclass(frozen=True)
class DesignResult:
    f_cb: Codebook
    w_cb: Codebook
    objective_trace: tuple[float, ...]
    constraint_residuals: tuple[float, float]
    warnings: tuple[str, ...] = ()


def expected_coupling_objective(F: np.ndarray, W: np.ndarray, est: ChannelEstimate) -> float:
    """Expected coupled power over the channel-error distribution (closed form)."""
    F = np.asarray(F)
    W = np.asarray(W)
    if W.shape[0] != est.h_bar.shape[0] or F.shape[0] != est.h_bar.shape[1]:
        raise ValueError("codebook and channel dimensions disagree")
    direct = float(np.sum(np.abs(W.conj().T @ est.h_bar @ F) ** 2))
    return direct + est.eps_sq * float(np.sum(np.abs(F) ** 2)) * float(np.sum(np.abs(W) ** 2))


def avg_inr_surrogate(F: np.ndarray, W: np.ndarray, h: np.ndarray, budget: LinkBudget) -> float:
    """Average coupled INR across all beam pairs (the design objective's scale).

    Note this omits the power-splitting and noise-combining factors of
    the per-pair receive-link INR; the two normalizations coexist by
    construction.
    """
    F = np.asarray(F)
    W = np.asarray(W)
    m_tx = F.shape[1]
    m_rx = W.shape[1]
    coupl = float(np.sum(np.abs(W.conj().T @ h @ F) ** 2))
    return budget.p_tx_bs * budget.g_si_sq * coupl / (budget.p_noise_bs * m_tx * m_rx)


def _coverage_lhs(a: np.ndarray, x: np.ndarray, n: float) -> float:
    d = n - np.einsum("nm,nm->m", a.conj(), x)
    return float(np.sum(np.abs(d) ** 2))


def solve_subproblem_F(
    W: np.ndarray,
    est: ChannelEstimate,
    a_tx: np.ndarray,
    sigma_tx_sq: float,
    tol: float,
    x0: np.ndarray | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """Optimal continuous transmit codebook for a fixed receive codebook.

    The KKT residual in the report is normalized by the projected
    gradient's step bound (the problem scale).
    """
    W = np.asarray(W, dtype=np.complex128)
    a_tx = np.asarray(a_tx, dtype=np.complex128)
    n_t, m_tx = a_tx.shape
    b = W.conj().T @ est.h_bar
    ridge = est.eps_sq * float(np.sum(np.abs(W) ** 2))
    p = QcqpProblem(
        quad_map=b,
        ridge=ridge,
        cov_matrix=a_tx,
        n_target=float(n_t),
        cov_bound=sigma_tx_sq * n_t**2 * m_tx,
    )
    if x0 is None:
        x0 = a_tx.copy()
    return solve_qcqp(p, x0, tol=tol)


def solve_subproblem_W(
    F: np.ndarray,
    est: ChannelEstimate,
    a_rx: np.ndarray,
    sigma_rx_sq: float,
    tol: float,
    x0: np.ndarray | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """Mirror of :func:`solve_subproblem_F` with the roles swapped."""
    F = np.asarray(F, dtype=np.complex128)
    a_rx = np.asarray(a_rx, dtype=np.complex128)
    n_r, m_rx = a_rx.shape
    b = (est.h_bar @ F).conj().T
    ridge = est.eps_sq * float(np.sum(np.abs(F) ** 2))
    p = QcqpProblem(
        quad_map=b,
        ridge=ridge,
        cov_matrix=a_rx,
        n_target=float(n_r),
        cov_bound=sigma_rx_sq * n_r**2 * m_rx,
    )
    if x0 is None:
        x0 = a_rx.copy()
    return solve_qcqp(p, x0, tol=tol)


def _coverage_residual(a: np.ndarray, x: np.ndarray, sigma_sq: float) -> float:
    n, m = a.shape
    cov = _coverage_lhs(a, x, float(n)) / (n**2 * m)
    return max(0.0, cov - sigma_sq)


def _subproblem_feasible(a: np.ndarray, x: np.ndarray, sigma_sq: float, tol: float) -> bool:
    n, m = a.shape
    return _coverage_lhs(a, x, float(n)) <= sigma_sq * n**2 * m * (1 + tol) + tol


def _finalize(
    F, W, cfg, regions, trace, notes
) -> DesignResult:
    region_tx, region_rx, a_tx, a_rx = regions
    return DesignResult(
        f_cb=Codebook(F, region_tx, cfg.spec),
        w_cb=Codebook(W, region_rx, cfg.spec),
        objective_trace=tuple(trace),
        constraint_residuals=(
            _coverage_residual(a_tx, F, cfg.sigma_tx_sq),
            _coverage_residual(a_rx, W, cfg.sigma_rx_sq),
        ),
        warnings=tuple(notes),
    )


def design_codebooks(
    cfg: DesignConfig,
    est: ChannelEstimate,
    a_tx: np.ndarray,
    a_rx: np.ndarray,
    region_tx: CoverageRegion,
    region_rx: CoverageRegion,
) -> DesignResult:
    """Full-matrix projected alternating minimization.

    Subproblem non-convergence and post-projection monotonicity slips
    are collected as warnings; the routine never discards a partial
    result.
    """
    a_tx = np.asarray(a_tx, dtype=np.complex128)
    a_rx = np.asarray(a_rx, dtype=np.complex128)
    F = project_codebook(a_tx, cfg.spec)
    W = project_codebook(a_rx, cfg.spec)
    trace = [expected_coupling_objective(F, W, est)]
    notes: list[str] = []
    regions = (region_tx, region_rx, a_tx, a_rx)

    if trace[0] <= cfg.solver_tol:
        return _finalize(F, W, cfg, regions, trace, notes)

    for it in range(cfg.outer_iters):
        f_star, rep_f = solve_subproblem_F(
            W, est, a_tx, cfg.sigma_tx_sq, cfg.solver_tol, x0=F
        )
        if not rep_f.converged:
            notes.append(f"iter {it}: transmit subproblem: {rep_f.message}")
        before = expected_coupling_objective(F, W, est)
        after = expected_coupling_objective(f_star, W, est)
        # a feasible incoming iterate can never be beaten upward
        if after > before + cfg.solver_tol * max(1.0, before) and _subproblem_feasible(
            a_tx, F, cfg.sigma_tx_sq, cfg.solver_tol
        ):
            notes.append(f"iter {it}: transmit solve increased the objective")
        F = project_codebook(f_star, cfg.spec)
        trace.append(expected_coupling_objective(F, W, est))

        w_star, rep_w = solve_subproblem_W(
            F, est, a_rx, cfg.sigma_rx_sq, cfg.solver_tol, x0=W
        )
        if not rep_w.converged:
            notes.append(f"iter {it}: receive subproblem: {rep_w.message}")
        before = expected_coupling_objective(F, W, est)
        after = expected_coupling_objective(F, w_star, est)
        if after > before + cfg.solver_tol * max(1.0, before) and _subproblem_feasible(
            a_rx, W, cfg.sigma_rx_sq, cfg.solver_tol
        ):
            notes.append(f"iter {it}: receive solve increased the objective")
        W = project_codebook(w_star, cfg.spec)
        trace.append(expected_coupling_objective(F, W, est))

    for note in notes:
        warnings.warn(note, RuntimeWarning, stacklevel=2)
    return _finalize(F, W, cfg, regions, trace, notes)


def design_codebooks_beamwise(
    cfg: DesignConfig,
    est: ChannelEstimate,
    a_tx: np.ndarray,
    a_rx: np.ndarray,
    region_tx: CoverageRegion,
    region_rx: CoverageRegion,
) -> DesignResult:
    """Beam-by-beam variant: sweeps alternating single-beam solves.

    Beam i of the transmit codebook and beam i of the receive codebook
    are solved in turn under per-beam coverage constraints, each
    projected before the next solve so later beams absorb the
    quantization imposed on earlier ones.  The sweep repeats
    ``outer_iters`` times.
    """
    a_tx = np.asarray(a_tx, dtype=np.complex128)
    a_rx = np.asarray(a_rx, dtype=np.complex128)
    F = project_codebook(a_tx, cfg.spec)
    W = project_codebook(a_rx, cfg.spec)
    trace = [expected_coupling_objective(F, W, est)]
    notes: list[str] = []
    regions = (region_tx, region_rx, a_tx, a_rx)

    if trace[0] <= cfg.solver_tol:
        return _finalize(F, W, cfg, regions, trace, notes)

    n_t, m_tx = a_tx.shape
    n_r, m_rx = a_rx.shape
    w_energy = float(np.sum(np.abs(W) ** 2))
    f_energy = float(np.sum(np.abs(F) ** 2))

    for sweep in range(cfg.outer_iters):
        for i in range(max(m_tx, m_rx)):
            if i < m_tx:
                b = W.conj().T @ est.h_bar
                p = QcqpProblem(
                    quad_map=b,
                    ridge=est.eps_sq * w_energy,
                    cov_matrix=a_tx[:, i : i + 1],
                    n_target=float(n_t),
                    cov_bound=cfg.sigma_tx_sq * n_t**2,
                )
                f_star, rep = solve_qcqp(p, F[:, i : i + 1], tol=cfg.solver_tol)
                if not rep.converged:
                    notes.append(f"sweep {sweep} transmit beam {i}: {rep.message}")
                f_energy -= float(np.sum(np.abs(F[:, i]) ** 2))
                F[:, i] = project_codebook(f_star, cfg.spec)[:, 0]
                f_energy += float(np.sum(np.abs(F[:, i]) ** 2))
                trace.append(expected_coupling_objective(F, W, est))
            if i < m_rx:
                b = (est.h_bar @ F).conj().T
                p = QcqpProblem(
                    quad_map=b,
                    ridge=est.eps_sq * f_energy,
                    cov_matrix=a_rx[:, i : i + 1],
                    n_target=float(n_r),
                    cov_bound=cfg.sigma_rx_sq * n_r**2,
                )
                w_star, rep = solve_qcqp(p, W[:, i : i + 1], tol=cfg.solver_tol)
                if not rep.converged:
                    notes.append(f"sweep {sweep} receive beam {i}: {rep.message}")
                w_energy -= float(np.sum(np.abs(W[:, i]) ** 2))
                W[:, i] = project_codebook(w_star, cfg.spec)[:, 0]
                w_energy += float(np.sum(np.abs(W[:, i]) ** 2))
                trace.append(expected_coupling_objective(F, W, est))

    for note in notes:
        warnings.warn(note, RuntimeWarning, stacklevel=2)
    return _finalize(F, W, cfg, regions, trace, notes)
