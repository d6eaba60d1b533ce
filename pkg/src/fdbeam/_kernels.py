"""Hot numeric kernels with numba and pure-numpy implementations.

The backend is chosen once at import time from the ``FDBEAM_BACKEND``
environment variable: ``numba`` (default when importable), ``numpy``,
or ``auto``.  Both implementations compute the same quantities; within
one backend results are bit-reproducible run to run.

Kernels:

* ``pgd_columns`` -- projected-gradient descent on the per-column
  regularized least-squares problems that arise inside the dual
  bisection of the codebook design solver.
* ``quantize_indices`` -- elementwise nearest-codepoint search on the
  phase-shifter/attenuator grid.
"""

from __future__ import annotations

import math
import os

import numpy as np

_REQUESTED = os.environ.get("FDBEAM_BACKEND", "auto").lower()
if _REQUESTED not in ("auto", "numba", "numpy"):
    raise ValueError(f"FDBEAM_BACKEND must be auto, numba or numpy, got {_REQUESTED!r}")

_HAVE_NUMBA = False
if _REQUESTED in ("auto", "numba"):
    try:
        from numba import config as _numba_config
        from numba import njit, prange

        if os.environ.get("NUMBA_THREADING_LAYER") is None:
            # the TBB layer probe warns on older TBB builds; workqueue is
            # always available and deterministic
            _numba_config.THREADING_LAYER = "workqueue"
        _HAVE_NUMBA = True
    except ImportError:
        if _REQUESTED == "numba":
            raise


def backend_name() -> str:
    return "numba" if _HAVE_NUMBA else "numpy"


# ----------------------------------------------------------------------
# Projected gradient on per-column quadratics.
#
# For each column j the iteration minimizes
#     f* Q0 f + lam * |n_target - a_j* f|^2        s.t. |f_k| <= 1
# via  f <- clip(f - (Q0 f + lam * a_j (a_j* f - n_target)) / step)
# where clip scales any entry with |f_k| > 1 back onto the unit disc.
# ----------------------------------------------------------------------


def _pgd_columns_numpy(q0, a_mat, n_target, lam, step, x0, tol, max_iter):
    x = np.array(x0, copy=True)
    total = 0
    delta = np.inf
    for _ in range(max_iter):
        s = np.einsum("nm,nm->m", a_mat.conj(), x) - n_target
        g = q0 @ x + lam * (a_mat * s[None, :])
        x_new = x - g / step
        mag = np.abs(x_new)
        over = mag > 1.0
        if over.any():
            x_new[over] /= mag[over]
        total += 1
        delta = np.max(np.abs(x_new - x))
        x = x_new
        if delta <= tol:
            break
    return x, total, bool(delta <= tol)


if _HAVE_NUMBA:

    @njit(cache=True, parallel=True)
    def _pgd_columns_numba(q0, a_mat, n_target, lam, step, x0, tol, max_iter):  # pragma: no cover - exercised via wrapper
        n, m = x0.shape
        out = x0.copy()
        iters = np.zeros(m, dtype=np.int64)
        hit_tol = np.zeros(m, dtype=np.int64)
        for j in prange(m):
            f = out[:, j].copy()
            a = a_mat[:, j].copy()
            for it in range(max_iter):
                s = -n_target + 0.0j
                for k in range(n):
                    s += np.conj(a[k]) * f[k]
                g = np.dot(q0, f)  # BLAS matvec
                delta = 0.0
                for k in range(n):
                    v = f[k] - (g[k] + lam * a[k] * s) / step
                    mag = abs(v)
                    if mag > 1.0:
                        v /= mag
                    d = abs(v - f[k])
                    if d > delta:
                        delta = d
                    f[k] = v
                if delta <= tol:
                    iters[j] = it + 1
                    hit_tol[j] = 1
                    break
            else:
                iters[j] = max_iter
            out[:, j] = f
        return out, int(np.sum(iters)), bool(np.all(hit_tol == 1))


def pgd_columns(q0, a_mat, n_target, lam, step, x0, tol, max_iter):
    """Solve the per-column disc-constrained quadratics for a fixed multiplier.

    Returns the stacked solution matrix, the total inner iteration
    count, and whether every column met the displacement tolerance
    before the iteration cap.  The numba kernel exits each column
    independently, which dominates the batched-BLAS numpy path on the
    real workload (columns converge at very different rates inside the
    dual bisection).
    """
    q0 = np.ascontiguousarray(q0, dtype=np.complex128)
    a_mat = np.ascontiguousarray(a_mat, dtype=np.complex128)
    x0 = np.ascontiguousarray(x0, dtype=np.complex128)
    if _HAVE_NUMBA:
        return _pgd_columns_numba(
            q0, a_mat, float(n_target), float(lam), float(step), x0, float(tol), max_iter
        )
    return _pgd_columns_numpy(
        q0, a_mat, float(n_target), float(lam), float(step), x0, float(tol), max_iter
    )


# ----------------------------------------------------------------------
# Nearest-codepoint index search.
#
# Amplitude codepoints amp_table[i] = 10**(-delta*i/20) are monotone
# decreasing, so the nearest-in-value index brackets the continuous
# index -20*log10(|w|)/delta; phases live on the uniform grid
# theta_k = k*2*pi/K - pi.  Candidate indices are compared with the
# same distances the enumeration oracle uses (squared chord distance
# for phases); ties pick the smaller index (larger amplitude,
# more-negative phase).  The kernels return indices; codepoint values
# are reconstructed once in fdbeam.quant.
# ----------------------------------------------------------------------


def _quantize_indices_numpy(flat, amp_table, atten_step_db, phase_count):
    n_amp = amp_table.shape[0]
    amp = np.abs(flat)

    with np.errstate(divide="ignore"):
        idx_real = np.where(
            amp > 0.0, -20.0 * np.log10(np.maximum(amp, 1e-300)) / atten_step_db, np.inf
        )
    i0 = np.floor(idx_real)
    i0 = np.where(np.isfinite(i0), i0, n_amp - 1)
    i0 = np.clip(i0, 0, n_amp - 1).astype(np.int64)
    best_i = np.zeros(flat.shape[0], dtype=np.int64)
    best_da = np.full(flat.shape[0], np.inf)
    for off in (-1, 0, 1):
        cand = np.clip(i0 + off, 0, n_amp - 1)
        d = np.abs(amp_table[cand] - amp)
        better = (d < best_da) | ((d == best_da) & (cand < best_i))
        best_i = np.where(better, cand, best_i)
        best_da = np.where(better, d, best_da)

    delta = 2.0 * np.pi / phase_count
    ang = np.angle(flat)
    cr, ci = np.cos(ang), np.sin(ang)
    k0 = np.floor((ang + np.pi) / delta).astype(np.int64)
    best_k = np.zeros(flat.shape[0], dtype=np.int64)
    best_dp = np.full(flat.shape[0], np.inf)
    cands = np.stack([(k0 + off) % phase_count for off in (-1, 0, 1)])
    cands.sort(axis=0)
    for row in cands:
        th = row * delta - np.pi
        d = (np.cos(th) - cr) ** 2 + (np.sin(th) - ci) ** 2
        better = d < best_dp
        best_k = np.where(better, row, best_k)
        best_dp = np.where(better, d, best_dp)
    return best_i, best_k


if _HAVE_NUMBA:

    @njit(cache=True)
    def _quantize_indices_numba(flat, amp_table, atten_step_db, phase_count):  # pragma: no cover - exercised via wrapper
        n = flat.shape[0]
        n_amp = amp_table.shape[0]
        amp_idx = np.empty(n, dtype=np.int64)
        phs_idx = np.empty(n, dtype=np.int64)
        delta = 2.0 * np.pi / phase_count
        for t in range(n):
            w = flat[t]
            amp = abs(w)
            if amp > 0.0:
                idx_real = -20.0 * math.log10(amp) / atten_step_db
                if idx_real > n_amp:
                    i0 = n_amp - 1
                elif idx_real < 0.0:
                    i0 = 0
                else:
                    i0 = int(math.floor(idx_real))
                    if i0 > n_amp - 1:
                        i0 = n_amp - 1
            else:
                i0 = n_amp - 1
            best_i = -1
            best_d = np.inf
            for off in range(-1, 2):
                cand = i0 + off
                if cand < 0:
                    cand = 0
                elif cand > n_amp - 1:
                    cand = n_amp - 1
                d = abs(amp_table[cand] - amp)
                if d < best_d or (d == best_d and cand < best_i):
                    best_i = cand
                    best_d = d
            amp_idx[t] = best_i

            ang = math.atan2(w.imag, w.real)
            cr = math.cos(ang)
            ci = math.sin(ang)
            k0 = int(math.floor((ang + math.pi) / delta))
            c0 = (k0 - 1) % phase_count
            c1 = k0 % phase_count
            c2 = (k0 + 1) % phase_count
            # scan candidates in ascending index order so ties keep the
            # smaller index, matching a full linear argmin
            if c1 < c0:
                c0, c1 = c1, c0
            if c2 < c1:
                c1, c2 = c2, c1
                if c1 < c0:
                    c0, c1 = c1, c0
            best_k = -1
            best_d = np.inf
            for cand in (c0, c1, c2):
                th = cand * delta - math.pi
                d = (math.cos(th) - cr) ** 2 + (math.sin(th) - ci) ** 2
                if d < best_d:
                    best_k = cand
                    best_d = d
            phs_idx[t] = best_k
        return amp_idx, phs_idx


def quantize_indices(values, amp_table, atten_step_db, phase_count):
    """Nearest amplitude/phase codepoint indices for each complex weight.

    Returns ``(amp_idx, phase_idx)`` flat int64 arrays aligned with
    ``values.ravel()``.
    """
    flat = np.ascontiguousarray(np.asarray(values, dtype=np.complex128).ravel())
    table = np.ascontiguousarray(np.asarray(amp_table, dtype=np.float64))
    if _HAVE_NUMBA:
        return _quantize_indices_numba(flat, table, float(atten_step_db), int(phase_count))
    return _quantize_indices_numpy(flat, table, float(atten_step_db), int(phase_count))
