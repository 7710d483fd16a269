"""Compare the numba and pure-numpy kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times the Hermitian Jacobi solver on random matrices of the sizes that show
up in practice (mode Grams and block Grams) and the simplex pivot on dense
tableaux.  Both paths are checked to agree before timing.
"""
import argparse
import timeit

import numpy as np

from mlspectra import kernels
from mlspectra._accel import HAS_NUMBA
from mlspectra.spectra import JACOBI_MAX_SWEEPS, JACOBI_TOL


def hermitian(n, rng):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return X + X.conj().T


def bench_jacobi(sizes, repeat, rng):
    rows = []
    for n in sizes:
        H = hermitian(n, rng)
        w_np = np.sort(kernels.jacobi_hermitian_numpy(H, JACOBI_TOL, JACOBI_MAX_SWEEPS)[0])
        w_nb = np.sort(kernels.jacobi_hermitian_numba(H, JACOBI_TOL, JACOBI_MAX_SWEEPS)[0])
        assert np.allclose(w_np, w_nb, atol=1e-10 * np.linalg.norm(H))
        number = max(1, 200 // n)
        t_np = min(timeit.repeat(lambda: kernels.jacobi_hermitian_numpy(H, JACOBI_TOL, JACOBI_MAX_SWEEPS),
                                 number=number, repeat=repeat)) / number
        t_nb = min(timeit.repeat(lambda: kernels.jacobi_hermitian_numba(H, JACOBI_TOL, JACOBI_MAX_SWEEPS),
                                 number=number, repeat=repeat)) / number
        rows.append((f"jacobi n={n}", t_np, t_nb))
    return rows


def bench_pivot(shapes, repeat, rng):
    rows = []
    for m, n in shapes:
        tab = rng.standard_normal((m, n)) + 5.0
        a, b = tab.copy(), tab.copy()
        kernels.pivot_numpy(a, 1, 2)
        kernels.pivot_numba(b, 1, 2)
        assert np.allclose(a, b)
        number = 2000
        t_np = min(timeit.repeat(lambda: kernels.pivot_numpy(tab.copy(), 1, 2), number=number, repeat=repeat)) / number
        t_nb = min(timeit.repeat(lambda: kernels.pivot_numba(tab.copy(), 1, 2), number=number, repeat=repeat)) / number
        rows.append((f"pivot {m}x{n}", t_np, t_nb))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(args.seed)
    rows = bench_jacobi((4, 8, 16, 32, 64), args.repeat, rng)
    rows += bench_pivot(((8, 16), (20, 40), (60, 120)), args.repeat, rng)
    print(f"{'kernel':<16}{'numpy (us)':>14}{'numba (us)':>14}{'speedup':>10}")
    for name, t_np, t_nb in rows:
        print(f"{name:<16}{t_np * 1e6:>14.1f}{t_nb * 1e6:>14.1f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
