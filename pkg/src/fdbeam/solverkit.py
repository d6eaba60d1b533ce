"""Numerical primitives behind the codebook design subproblems.

The workhorse solves convex problems of the form

    min_X  ||B X||_F^2 + c ||X||_F^2
    s.t.   || n*1 - diag(A* X) ||^2 <= cov_bound
           |X_ij| <= 1

The objective and the entry bound separate per column; the single
coverage constraint couples the columns through one scalar sum only.
Dual bisection runs on the coverage multiplier: for each multiplier the
columns decouple into regularized least-squares problems with per-entry
disc constraints, solved by projected gradient with fixed step 1/L.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fdbeam import _kernels

INNER_ITER_CAP = 5000  # per column per multiplier value


def spectral_norm_bound(b: np.ndarray, iters: int = 50, rtol: float = 1e-6) -> float:
    """Upper bound on the largest singular value via power iteration.

    Runs up to ``iters`` power steps on B*B (relative tolerance
    ``rtol``) and inflates the estimate by 1%.
    """
    b = np.asarray(b, dtype=np.complex128)
    n = b.shape[1]
    rng = np.random.Generator(np.random.Philox(0x5EED))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    s = 0.0
    for _ in range(iters):
        u = b.conj().T @ (b @ v)
        s_new = float(np.linalg.norm(u))
        if s_new == 0.0:
            return 0.0
        v = u / s_new
        if abs(s_new - s) <= rtol * s_new:
            s = s_new
            break
        s = s_new
    return float(np.sqrt(s) * 1.01)


@dataclass(frozen=True)
class QcqpProblem:
    """One coverage-constrained quadratic: see the module docstring.

    ``quad_map`` is B, ``ridge`` is c, ``cov_matrix`` is A with target
    ``n_target`` per diagonal entry, ``cov_bound`` the right-hand side
    of the coverage constraint.  The entry bound is fixed at 1.
    """

    quad_map: np.ndarray
    ridge: float
    cov_matrix: np.ndarray
    n_target: float
    cov_bound: float

    def __post_init__(self):
        if self.ridge < 0 or self.cov_bound < 0:
            raise ValueError("ridge and cov_bound must be nonnegative")


@dataclass(frozen=True)
class SolveReport:
    objective: float
    kkt_residual: float
    constraint_residual: float
    inner_iterations: int
    converged: bool = True
    message: str = ""


def _objective(p: QcqpProblem, x: np.ndarray) -> float:
    bx = p.quad_map @ x
    return float(np.sum(np.abs(bx) ** 2) + p.ridge * np.sum(np.abs(x) ** 2))


def _coverage_lhs(p: QcqpProblem, x: np.ndarray) -> float:
    d = p.n_target - np.einsum("nm,nm->m", p.cov_matrix.conj(), x)
    return float(np.sum(np.abs(d) ** 2))


def _kkt_residual(p: QcqpProblem, q0: np.ndarray, x: np.ndarray, lam: float, step: float) -> float:
    s = np.einsum("nm,nm->m", p.cov_matrix.conj(), x) - p.n_target
    g = q0 @ x + lam * (p.cov_matrix * s[None, :])
    x_new = x - g / step
    mag = np.abs(x_new)
    over = mag > 1.0
    x_new[over] /= mag[over]
    return float(step * np.max(np.abs(x_new - x)))


def _polish_to_boundary(p: QcqpProblem, x: np.ndarray, rounds: int = 8) -> np.ndarray:
    """Move the iterate onto the active coverage boundary.

    With a positive multiplier the constraint is active at the optimum;
    the inner solves leave the residual at their noise floor, which a
    large multiplier amplifies into an objective bias.  Walking along
    the constraint normal (d scales by 1 - tau) cancels that bias to
    first order; disc clipping is re-absorbed over a few rounds.
    """
    a = p.cov_matrix
    for _ in range(rounds):
        d = p.n_target - np.einsum("nm,nm->m", a.conj(), x)
        lhs = float(np.sum(np.abs(d) ** 2))
        if lhs <= 0.0 or abs(lhs - p.cov_bound) <= 1e-13 * p.cov_bound:
            break
        tau = 1.0 - np.sqrt(p.cov_bound / lhs)
        x = x + tau * (a * (d / p.n_target)[None, :])
        mag = np.abs(x)
        over = mag > 1.0
        if over.any():
            x[over] /= mag[over]
    return x


def solve_qcqp(
    p: QcqpProblem,
    x0: np.ndarray,
    tol: float = 1e-6,
    max_iters: int = INNER_ITER_CAP,
) -> tuple[np.ndarray, SolveReport]:
    """Dual bisection on the coverage multiplier with warm-started inner solves.

    ``x0`` must satisfy the entry bound.  Returns the best iterate with
    a report even when the iteration budget runs out (non-fatal).
    """
    a = np.asarray(p.cov_matrix, dtype=np.complex128)
    n, m = a.shape
    x0 = np.asarray(x0, dtype=np.complex128)
    if x0.shape != (n, m):
        raise ValueError("x0 shape does not match the coverage matrix")
    if np.max(np.abs(x0)) > 1.0 + tol:
        raise ValueError("x0 violates the entry bound")

    # cov_bound == 0 forces diag(A* X) = n exactly; with ||a_i||^2 = n and
    # unit entry bounds, Cauchy-Schwarz pins each column to a_i itself.
    if p.cov_bound <= 0.0:
        x = a.copy()
        rep = SolveReport(
            objective=_objective(p, x),
            kkt_residual=0.0,
            constraint_residual=0.0,
            inner_iterations=0,
        )
        return x, rep

    b = np.asarray(p.quad_map, dtype=np.complex128)
    q0 = b.conj().T @ b
    if p.ridge > 0.0:
        q0 = q0 + p.ridge * np.eye(n)
    s_max = spectral_norm_bound(b) ** 2 + p.ridge
    a_norm_sq = float(np.max(np.sum(np.abs(a) ** 2, axis=0)))

    # the inner precision must outpace the outer tolerance: the duality
    # gap of the returned point scales with the multiplier times the
    # residual noise of the per-column solves
    inner_tol = min(tol * 1e-2, tol**1.5)
    gap_tol = tol**0.5
    total_iters = 0

    def inner(lam: float, x_start: np.ndarray) -> tuple[np.ndarray, bool]:
        nonlocal total_iters
        step = s_max + lam * a_norm_sq
        if step <= 0.0:
            return x_start.copy(), True
        x, it, hit_tol = _kernels.pgd_columns(
            q0, a, p.n_target, lam, step, x_start, inner_tol, max_iters
        )
        total_iters += it
        return x, hit_tol

    def residual(x: np.ndarray) -> float:
        return _coverage_lhs(p, x) - p.cov_bound

    # multiplier 0: the unconstrained columns.  A capped slow descent can
    # sit inside the coverage bound without being optimal, so acceptance
    # also requires approximate stationarity at zero multiplier.
    x_lo, conv0 = inner(0.0, x0)
    g_lo = residual(x_lo)
    lo_stationary = conv0 or _kkt_residual(p, q0, x_lo, 0.0, s_max) <= tol * s_max
    if g_lo <= tol * p.cov_bound and lo_stationary:
        lam_final, x = 0.0, x_lo
    else:
        # grow the multiplier until the coverage constraint holds
        lam_hi = (s_max + p.ridge + 1.0) / max(p.n_target, 1.0)
        x_hi, _ = inner(lam_hi, x_lo)
        g_hi = residual(x_hi)
        doublings = 0
        while g_hi > 0.0 and doublings < 60:
            lam_hi *= 4.0
            x_hi, _ = inner(lam_hi, x_hi)
            g_hi = residual(x_hi)
            doublings += 1
        lam_lo = 0.0
        x = x_hi
        lam_final = lam_hi
        while True:
            g_cur = residual(x)
            # lam * |g| bounds the suboptimality of a feasible Lagrangian
            # minimizer (weak duality), so the constraint tolerance alone
            # is not enough when the multiplier is large
            gap = lam_final * abs(g_cur)
            if abs(g_cur) <= tol * p.cov_bound and gap <= gap_tol * (
                _objective(p, x) + 1e-30
            ):
                break
            if lam_hi - lam_lo <= 16.0 * np.finfo(float).eps * lam_hi:
                break  # multiplier resolved to float resolution
            lam_mid = 0.5 * (lam_lo + lam_hi)
            x_mid, _ = inner(lam_mid, x)
            g_mid = residual(x_mid)
            if g_mid > 0.0:
                lam_lo = lam_mid
            else:
                lam_hi = lam_mid
                x_hi = x_mid
            x, lam_final = x_mid, lam_mid
        if residual(x) > tol * p.cov_bound:
            # fall back to the feasible bracket end
            x, lam_final = x_hi, lam_hi
        if residual(x) >= -0.1 * p.cov_bound:
            # active-constraint regime: snap onto the boundary
            x = _polish_to_boundary(p, x)

    step = s_max + lam_final * a_norm_sq
    kkt = _kkt_residual(p, q0, x, lam_final, step) if step > 0 else 0.0
    g_final = residual(x)
    converged = g_final <= tol * p.cov_bound and kkt <= tol * step
    rep = SolveReport(
        objective=_objective(p, x),
        kkt_residual=kkt,
        constraint_residual=max(0.0, g_final),
        inner_iterations=total_iters,
        converged=bool(converged),
        message="" if converged else "iteration budget exhausted or residual above tolerance",
    )
    return x, rep
