"""Backend parity: the numba kernels and the numpy fallbacks agree."""

import numpy as np
import pytest

from fdbeam import _kernels
from fdbeam.quant import QuantizationSpec, amplitude_codepoints


def test_backend_name():
    assert _kernels.backend_name() in ("numba", "numpy")


def make_pgd_instance(seed):
    rng = np.random.default_rng(seed)
    n, m = 6, 4
    b = rng.standard_normal((5, n)) + 1j * rng.standard_normal((5, n))
    q0 = b.conj().T @ b + 0.1 * np.eye(n)
    a = np.exp(1j * rng.uniform(-np.pi, np.pi, (n, m)))
    x0 = 0.5 * np.exp(1j * rng.uniform(-np.pi, np.pi, (n, m)))
    step = float(np.linalg.svd(q0, compute_uv=False)[0] + 2.0 * n)
    return q0, a, x0, step


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_pgd_backends_agree(seed):
    q0, a, x0, step = make_pgd_instance(seed)
    x_np, it_np, _ = _kernels._pgd_columns_numpy(q0, a, 6.0, 2.0, step, x0, 1e-10, 3000)
    if not _kernels._HAVE_NUMBA:
        pytest.skip("numba backend not active")
    x_nb, it_nb, _ = _kernels._pgd_columns_numba(
        np.ascontiguousarray(q0), np.ascontiguousarray(a), 6.0, 2.0, step,
        np.ascontiguousarray(x0), 1e-10, 3000,
    )
    assert np.allclose(x_np, x_nb, atol=1e-8)


@pytest.mark.parametrize("bits", [(1, 1), (3, 2), (8, 8)])
def test_quantize_backends_agree(bits):
    if not _kernels._HAVE_NUMBA:
        pytest.skip("numba backend not active")
    spec = QuantizationSpec(bits[0], bits[1], 0.5)
    rng = np.random.default_rng(9)
    w = (rng.standard_normal(5000) + 1j * rng.standard_normal(5000)) * rng.uniform(0, 1.3, 5000)
    w[0] = 0.0
    w[1] = -1.0
    w[2] = 1.0
    table = amplitude_codepoints(spec)
    ai_np, pi_np = _kernels._quantize_indices_numpy(w, table, 0.5, spec.num_phase)
    ai_nb, pi_nb = _kernels._quantize_indices_numba(
        np.ascontiguousarray(w), np.ascontiguousarray(table), 0.5, spec.num_phase
    )
    assert np.array_equal(ai_np, ai_nb)
    assert np.array_equal(pi_np, pi_nb)


def test_pgd_reduces_lagrangian():
    q0, a, x0, step = make_pgd_instance(5)

    def lagrangian(x, lam):
        s = np.einsum("nm,nm->m", a.conj(), x) - 6.0
        return float(
            np.sum(np.real(np.einsum("nm,nk,km->m", x.conj(), q0, x)))
            + lam * np.sum(np.abs(s) ** 2)
        )

    lam = 2.0
    x1, _, _ = _kernels.pgd_columns(q0, a, 6.0, lam, step, x0, 1e-12, 1)
    x50, _, _ = _kernels.pgd_columns(q0, a, 6.0, lam, step, x0, 1e-12, 50)
    assert lagrangian(x1, lam) <= lagrangian(x0, lam) + 1e-10
    assert lagrangian(x50, lam) <= lagrangian(x1, lam) + 1e-10
    assert np.max(np.abs(x50)) <= 1.0 + 1e-12
