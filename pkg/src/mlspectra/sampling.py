"""Random inputs for property tests and verification campaigns."""
from __future__ import annotations

import numpy as np

from .feasibility import Prescription, Verdict, check_sufficient_3, check_sufficient_N_cubic
from .horn import DegenerateData

DISTRIBUTIONS = ("complex-gaussian", "real-gaussian", "nonnegative-uniform")


def trial_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent stream per ``(seed, keys...)``, independent of call order."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


def random_tensor(dims, rng: np.random.Generator, distribution: str = "complex-gaussian") -> np.ndarray:
    """Unit-norm random tensor."""
    dims = tuple(dims)
    if distribution == "complex-gaussian":
        T = rng.standard_normal(dims) + 1j * rng.standard_normal(dims)
    elif distribution == "real-gaussian":
        T = rng.standard_normal(dims).astype(np.complex128)
    elif distribution == "nonnegative-uniform":
        T = rng.uniform(0.0, 1.0, dims).astype(np.complex128)
    else:
        raise ValueError(f"unknown distribution {distribution!r}; choose from {DISTRIBUTIONS}")
    return T / np.linalg.norm(T)


def random_psd(n: int, rank: int, rng: np.random.Generator, complex_: bool = True) -> np.ndarray:
    X = rng.standard_normal((n, rank))
    if complex_:
        X = X + 1j * rng.standard_normal((n, rank))
    H = X @ X.conj().T
    return 0.5 * (H + H.conj().T)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_degenerate(dims, rng: np.random.Generator, boundary_prob: float = 0.2) -> DegenerateData:
    """Random ``(L, A, B)`` with admissible ranks, scaled to unit norm.

    With probability ``boundary_prob`` ``L`` sits exactly at
    ``lambda_max(A + B)``.
    """
    I1, I2, I3 = dims
    n = I3 - 1
    rA = int(rng.integers(0, min(I1, I3) - 1 + 1))
    rB = int(rng.integers(0, min(I2 - 1, n) + 1))
    A = random_psd(n, rA, rng) if rA else np.zeros((n, n), dtype=np.complex128)
    B = random_psd(n, rB, rng) if rB else np.zeros((n, n), dtype=np.complex128)
    top = float(np.linalg.eigvalsh(A + B)[-1]) if n else 0.0
    L = top if (rng.uniform() < boundary_prob and top > 0) else top + rng.uniform(0.1, 2.0)
    s = L + np.trace(A).real + np.trace(B).real
    return DegenerateData(L / s, A / s, B / s, tuple(dims))


def random_sufficient_prescription(dims, rng: np.random.Generator, max_tries: int = 10_000) -> Prescription:
    """Rejection-sample a unit-norm prescription inside the sufficient region.

    Sampling is uniform in the squared values over the box ``[1/I_n, 1]``.
    """
    dims = tuple(dims)
    cubic = len(set(dims)) == 1
    lo = np.array([1.0 / d for d in dims])
    for _ in range(max_tries):
        sq = rng.uniform(lo, 1.0)
        p = Prescription.from_squares(dims, sq, 1.0)
        if len(dims) == 3:
            ok = check_sufficient_3(p).verdict is Verdict.SUFFICIENT_PROVEN
        elif cubic:
            ok = check_sufficient_N_cubic(p).verdict is Verdict.SUFFICIENT_PROVEN
        else:
            raise ValueError("sufficient region known only for N = 3 or cubic dims")
        if ok:
            return p
    raise RuntimeError(f"no sufficient prescription found for {dims} in {max_tries} tries")
