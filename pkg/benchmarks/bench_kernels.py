"""Timing comparison of the numba kernels against the numpy fallbacks.

Run as:

    python benchmarks/bench_kernels.py

The backend the package picked at import time is reported first; the
benchmark itself always times both implementations directly and checks
they agree.
"""

import time

import numpy as np

from fdbeam import _kernels
from fdbeam.quant import QuantizationSpec, amplitude_codepoints


def time_fn(fn, *args, repeats=5):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_pgd():
    rng = np.random.default_rng(0)
    rows = [
        ("design-size (64x45)", 64, 45, 45),
        ("small (8x4)", 8, 4, 6),
    ]
    print("\nprojected-gradient column solves (300 iterations, no tolerance exit)")
    for label, n, m, k in rows:
        b = rng.standard_normal((k, n)) + 1j * rng.standard_normal((k, n))
        q0 = np.ascontiguousarray(b.conj().T @ b + 0.05 * np.eye(n))
        a = np.ascontiguousarray(np.exp(1j * rng.uniform(-np.pi, np.pi, (n, m))))
        x0 = np.ascontiguousarray(0.5 * np.exp(1j * rng.uniform(-np.pi, np.pi, (n, m))))
        step = float(np.linalg.svd(q0, compute_uv=False)[0] + 2.0 * n)
        args = (q0, a, float(n), 2.0, step, x0, 0.0, 300)

        t_np, (x_np, *_) = time_fn(_kernels._pgd_columns_numpy, *args)
        if _kernels._HAVE_NUMBA:
            _kernels._pgd_columns_numba(*args)  # compile
            t_nb, (x_nb, *_) = time_fn(_kernels._pgd_columns_numba, *args)
            agree = np.allclose(x_np, x_nb, atol=1e-10)
            print(f"  {label:22s} numpy {t_np*1e3:8.2f} ms   numba {t_nb*1e3:8.2f} ms"
                  f"   speedup {t_np/t_nb:5.2f}x   agree={agree}")
            assert agree
        else:
            print(f"  {label:22s} numpy {t_np*1e3:8.2f} ms   (numba unavailable)")


def bench_quantize():
    rng = np.random.default_rng(1)
    w = (rng.standard_normal(200_000) + 1j * rng.standard_normal(200_000)) * rng.uniform(
        0, 1.3, 200_000
    )
    spec = QuantizationSpec(8, 8, 0.5)
    table = np.ascontiguousarray(amplitude_codepoints(spec))
    args = (np.ascontiguousarray(w), table, 0.5, spec.num_phase)

    print("\nnearest-codepoint index search (200k weights, 8+8 bits)")
    t_np, (ai_np, pi_np) = time_fn(_kernels._quantize_indices_numpy, *args)
    if _kernels._HAVE_NUMBA:
        _kernels._quantize_indices_numba(*args)  # compile
        t_nb, (ai_nb, pi_nb) = time_fn(_kernels._quantize_indices_numba, *args)
        agree = np.array_equal(ai_np, ai_nb) and np.array_equal(pi_np, pi_nb)
        print(f"  {'':22s} numpy {t_np*1e3:8.2f} ms   numba {t_nb*1e3:8.2f} ms"
              f"   speedup {t_np/t_nb:5.2f}x   agree={agree}")
        assert agree
    else:
        print(f"  {'':22s} numpy {t_np*1e3:8.2f} ms   (numba unavailable)")


if __name__ == "__main__":
    print(f"active backend: {_kernels.backend_name()}  "
          "(set FDBEAM_BACKEND=numpy to force the fallback)")
    bench_pgd()
    bench_quantize()
