"""Hermitian eigenproblems, mode-n singular values and the MLSVD."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .tensor import as_tensor, frobenius_norm, mode_n_product, unfold

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 60
HERMITIAN_TOL = 1e-12
CLAMP_TOL = 1e-12


class EigenSolverError(ArithmeticError):
    """The Jacobi iteration did not reach the off-diagonal tolerance."""


def hermitian_eig(H: np.ndarray, *, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi.

    Returns ``(w, V)`` with eigenvalues in descending order and a unitary
    ``V`` such that ``H @ V == V @ diag(w)``.
    """
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    scale = np.linalg.norm(H)
    asym = np.max(np.abs(H - H.conj().T)) if H.size else 0.0
    if asym > HERMITIAN_TOL * max(scale, np.finfo(float).tiny):
        raise ValueError(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    H = np.ascontiguousarray(0.5 * (H + H.conj().T))
    w, V, sweeps = kernels.jacobi_hermitian(H, tol, max_sweeps)
    if sweeps < 0:
        raise EigenSolverError(f"Jacobi did not converge in {max_sweeps} sweeps")
    order = np.argsort(-w, kind="stable")
    return w[order], V[:, order]


def eigvalsh_desc(H: np.ndarray) -> np.ndarray:
    return hermitian_eig(H)[0]


def lambda_max(H: np.ndarray) -> float:
    return float(hermitian_eig(H)[0][0])


def _clamp(w: np.ndarray, scale: float) -> np.ndarray:
    w = w.copy()
    w[(w < 0) & (w >= -CLAMP_TOL * scale)] = 0.0
    return w


def gram_eigenvalues(M: np.ndarray) -> np.ndarray:
    """Descending eigenvalues of ``M @ M^H`` (length = rows of M).

    The smaller Gram side is diagonalised and padded with zeros; roundoff
    negatives down to ``-1e-12 * ||G||`` are clamped to zero.
    """
    M = np.asarray(M, dtype=np.complex128)
    rows, cols = M.shape
    G = M @ M.conj().T if rows <= cols else M.conj().T @ M
    w = _clamp(eigvalsh_desc(G), float(np.linalg.norm(G)))
    if rows > cols:
        w = np.concatenate([w, np.zeros(rows - cols)])
    return w


def mode_singular_values(T: np.ndarray, n: int) -> np.ndarray:
    """Descending mode-n singular values, length I_n."""
    w = gram_eigenvalues(unfold(as_tensor(T), n))
    return np.sqrt(np.maximum(w, 0.0))


def largest_ml_singular_values(T: np.ndarray) -> np.ndarray:
    T = as_tensor(T)
    return np.array([mode_singular_values(T, n)[0] for n in range(1, T.ndim + 1)])


@dataclass(frozen=True)
class ModeSpectrum:
    values: tuple[np.ndarray, ...]
    frobenius_norm: float

    @classmethod
    def of(cls, T: np.ndarray) -> "ModeSpectrum":
        T = as_tensor(T)
        vals = tuple(mode_singular_values(T, n) for n in range(1, T.ndim + 1))
        return cls(vals, frobenius_norm(T))

    @property
    def largest(self) -> np.ndarray:
        return np.array([v[0] for v in self.values])

    def squared(self) -> list[np.ndarray]:
        return [v**2 for v in self.values]

    def to_json(self) -> list[dict]:
        return [
            {"mode": n, "values": [float(x) for x in v]}
            for n, v in enumerate(self.values, start=1)
        ]


@dataclass(frozen=True)
class MLSVDResult:
    core: np.ndarray
    factors: tuple[np.ndarray, ...]
    spectrum: ModeSpectrum

    def reconstruct(self) -> np.ndarray:
        T = self.core
        for n, U in enumerate(self.factors, start=1):
            T = mode_n_product(T, U, n)
        return T


def _fix_phases(V: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each column made real positive
    idx = np.argmax(np.abs(V), axis=0)
    piv = V[idx, np.arange(V.shape[1])]
    return V * (np.abs(piv) / piv)


def mlsvd(T: np.ndarray) -> MLSVDResult:
    """Full multilinear SVD ``T = S x_1 U_1 ... x_N U_N``."""
    T = as_tensor(T)
    factors = []
    values = []
    for n in range(1, T.ndim + 1):
        M = unfold(T, n)
        G = M @ M.conj().T
        w, U = hermitian_eig(G)
        w = _clamp(w, float(np.linalg.norm(G)))
        factors.append(_fix_phases(U))
        values.append(np.sqrt(np.maximum(w, 0.0)))
    S = T
    for n, U in enumerate(factors, start=1):
        S = mode_n_product(S, U.conj().T, n)
    return MLSVDResult(S, tuple(factors), ModeSpectrum(tuple(values), frobenius_norm(T)))


@dataclass(frozen=True)
class AllOrthogonality:
    holds: bool
    max_offdiag: tuple[float, ...]

    def __bool__(self) -> bool:
        return self.holds


def is_all_orthogonal(T: np.ndarray, tol: float = 1e-12) -> AllOrthogonality:
    """True iff every mode Gram matrix is diagonal up to ``tol * ||T||^2``."""
    T = as_tensor(T)
    scale = frobenius_norm(T) ** 2
    off = []
    for n in range(1, T.ndim + 1):
        M = unfold(T, n)
        G = M @ M.conj().T
        np.fill_diagonal(G, 0.0)
        off.append(float(np.max(np.abs(G))) if G.size else 0.0)
    return AllOrthogonality(all(o <= tol * scale for o in off), tuple(off))


def block(H: np.ndarray, i: int, j: int, size: int) -> np.ndarray:
    """Block (i, j), 0-based, of a matrix partitioned into size x size blocks."""
    return H[i * size : (i + 1) * size, j * size : (j + 1) * size]


def phi(H: np.ndarray, size: int) -> np.ndarray:
    """Matrix of block traces, ``phi(H)[i, j] = tr(H_ij)``."""
    k = H.shape[0] // size
    return H.reshape(k, size, k, size).trace(axis1=1, axis2=3)


@dataclass(frozen=True)
class BlockBound:
    lhs: float
    rhs: float
    slack: float
    trace: float

    @property
    def holds(self) -> bool:
        return self.slack >= -1e-10 * max(self.trace, np.finfo(float).tiny)


def lemma6_check(H: np.ndarray, block_size: int, blocks: int) -> BlockBound:
    """Block inequality for a PSD matrix of order ``blocks * block_size``.

    ``lhs = lambda_max(sum_k H_kk) + lambda_max(H)`` and
    ``rhs = tr(H) + lambda_max(phi(H))``; the slack ``rhs - lhs`` is
    nonnegative for every PSD ``H``.
    """
    H = np.asarray(H, dtype=np.complex128)
    if H.shape != (blocks * block_size, blocks * block_size):
        raise ValueError(
            f"matrix of shape {H.shape} is not a {blocks}x{blocks} grid of "
            f"{block_size}x{block_size} blocks"
        )
    w = eigvalsh_desc(H)
    tr = float(np.trace(H).real)
    if w[-1] < -1e-10 * max(tr, abs(w[0]), np.finfo(float).tiny):
        raise ValueError(f"matrix is not positive semidefinite (lambda_min = {w[-1]:.3e})")
    diag_sum = sum(block(H, k, k, block_size) for k in range(blocks))
    lhs = lambda_max(diag_sum) + float(w[0])
    rhs = tr + lambda_max(phi(H, block_size))
    return BlockBound(lhs, rhs, rhs - lhs, tr)


def mode2_gram_blocks(T: np.ndarray) -> np.ndarray:
    """``H = unfold(T, 2)^T conj(unfold(T, 2))`` with blocks ``T_i T_j^H``."""
    M = unfold(as_tensor(T), 2)
    return M.T @ M.conj()


def numeric_rank(M: np.ndarray, scale: float | None = None, rtol: float = 1e-10) -> int:
    """Number of singular values above ``rtol * scale`` (default: the largest).

    Uses a direct SVD: Gram eigenvalues cannot resolve a 1e-10 relative
    singular value.
    """
    M = np.asarray(M)
    s = np.linalg.svd(M, compute_uv=False) if M.size else np.zeros(0)
    if s.size == 0:
        return 0
    ref = s[0] if scale is None else scale
    if ref == 0:
        return 0
    return int(np.sum(s > rtol * ref))


def spectral_norm_sq(M: np.ndarray) -> float:
    return float(gram_eigenvalues(np.asarray(M))[0])


__all__ = [
    "AllOrthogonality",
    "EigenSolverError",
    "BlockBound",
    "MLSVDResult",
    "ModeSpectrum",
    "block",
    "eigvalsh_desc",
    "gram_eigenvalues",
    "hermitian_eig",
    "is_all_orthogonal",
    "lambda_max",
    "largest_ml_singular_values",
    "lemma6_check",
    "mlsvd",
    "mode2_gram_blocks",
    "mode_singular_values",
    "numeric_rank",
    "phi",
    "spectral_norm_sq",
]
