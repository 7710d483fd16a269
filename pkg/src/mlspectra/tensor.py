"""Dense complex tensors: unfoldings, n-mode products and reshapes.

Tensors are plain ``numpy.ndarray`` objects of dtype ``complex128`` (real
input is promoted).  Flat storage order is lexicographic with ``i_1``
varying fastest, i.e. ``order="F"``, so ``vec(T)`` and the mode-1 unfolding
are pure reshapes.  Mode indices in the public API are 1-based.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

MAX_ENTRIES = 10**6


class TensorFormatError(ValueError):
    """Raised for malformed tensor files or inconsistent shapes."""


def as_tensor(data, dims: Sequence[int] | None = None) -> np.ndarray:
    """Validate and return ``data`` as an N-way complex array, N >= 2.

    A flat sequence of length prod(dims) is interpreted in storage order.
    """
    arr = np.asarray(data, dtype=np.complex128)
    if dims is not None:
        dims = tuple(int(d) for d in dims)
        if any(d < 1 for d in dims):
            raise TensorFormatError(f"dimensions must be positive, got {dims}")
        if arr.size != math.prod(dims):
            raise TensorFormatError(
                f"{arr.size} entries do not match dims {dims} (need {math.prod(dims)})"
            )
        arr = arr.reshape(dims, order="F")
    if arr.ndim < 2:
        raise TensorFormatError(f"a tensor needs at least two modes, got ndim={arr.ndim}")
    if arr.size > MAX_ENTRIES:
        raise TensorFormatError(f"{arr.size} entries exceed the supported {MAX_ENTRIES}")
    return arr


def _check_mode(ndim: int, n: int) -> int:
    if not 1 <= n <= ndim:
        raise ValueError(f"mode {n} out of range 1..{ndim}")
    return n - 1


def unfold(T: np.ndarray, n: int) -> np.ndarray:
    """Mode-n unfolding: I_n x prod_{k != n} I_k, remaining indices i_1-first."""
    T = np.asarray(T)
    ax = _check_mode(T.ndim, n)
    return np.moveaxis(T, ax, 0).reshape(T.shape[ax], -1, order="F")


def fold(M: np.ndarray, n: int, dims: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`unfold`."""
    dims = tuple(int(d) for d in dims)
    ax = _check_mode(len(dims), n)
    M = np.asarray(M)
    rest = dims[:ax] + dims[ax + 1 :]
    if M.shape != (dims[ax], math.prod(rest)):
        raise ValueError(
            f"matrix of shape {M.shape} cannot be folded along mode {n} into {dims}"
        )
    return np.moveaxis(M.reshape((dims[ax],) + rest, order="F"), 0, ax)


def frobenius_norm(T: np.ndarray) -> float:
    T = np.asarray(T)
    return float(math.sqrt(np.sum(T.real**2 + T.imag**2)))


def mode_n_product(T: np.ndarray, U: np.ndarray, n: int) -> np.ndarray:
    """``T x_n U``; satisfies ``unfold(result, n) == U @ unfold(T, n)``."""
    T = np.asarray(T)
    U = np.asarray(U)
    ax = _check_mode(T.ndim, n)
    if U.ndim != 2 or U.shape[1] != T.shape[ax]:
        raise ValueError(
            f"matrix with {U.shape[-1]} columns cannot act on mode {n} of size {T.shape[ax]}"
        )
    dims = list(T.shape)
    dims[ax] = U.shape[0]
    return fold(U @ unfold(T, n), n, dims)


def kron(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.kron(np.atleast_2d(A), np.atleast_2d(B))


def reshape_third_order(T: np.ndarray, n: int) -> np.ndarray:
    """Third-order reshape (I_1...I_n) x I_{n+1} x (I_{n+2}...I_N), 1 <= n <= N-2.

    Grouped indices are merged with the earliest index fastest, so that
    ``unfold(result, 2) == unfold(T, n + 1)`` and the mode-3 unfolding of
    the n-th reshape is the transposed mode-1 unfolding of the (n+1)-th.
    """
    T = np.asarray(T)
    N = T.ndim
    if N < 3:
        raise ValueError("third-order reshapes need N >= 3")
    if not 1 <= n <= N - 2:
        raise ValueError(f"reshape index {n} out of range 1..{N - 2}")
    head = math.prod(T.shape[:n])
    tail = math.prod(T.shape[n + 1 :])
    return T.reshape((head, T.shape[n], tail), order="F")


def entrywise_pow(T: np.ndarray, p: float) -> np.ndarray:
    """Entrywise square (p=2) or square root (p=1/2, nonnegative real input)."""
    T = np.asarray(T)
    if p == 2:
        return T * T
    if p == 0.5:
        if np.any(T.imag != 0) or np.any(T.real < 0):
            raise ValueError("entrywise square root needs real nonnegative entries")
        return np.sqrt(T.real).astype(np.complex128)
    raise ValueError(f"unsupported entrywise power {p!r}; use 2 or 0.5")


def delta_tensor(dims: Sequence[int]) -> np.ndarray:
    """Tensor with a single unit entry at (1, ..., 1)."""
    T = np.zeros(tuple(dims), dtype=np.complex128)
    T[(0,) * len(dims)] = 1.0
    return T


def tensor_to_json(T: np.ndarray) -> dict:
    T = np.asarray(T, dtype=np.complex128)
    flat = T.reshape(-1, order="F")
    return {
        "dims": [int(d) for d in T.shape],
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }


def tensor_from_json(obj: dict) -> np.ndarray:
    try:
        dims = [int(d) for d in obj["dims"]]
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise TensorFormatError(f"tensor object needs 'dims' and 'entries': {exc}") from exc
    if len(entries) != math.prod(dims):
        raise TensorFormatError(
            f"{len(entries)} entries do not match dims {dims} (need {math.prod(dims)})"
        )
    try:
        flat = np.array([complex(float(re), float(im)) for re, im in entries])
    except (TypeError, ValueError) as exc:
        raise TensorFormatError(f"entries must be [re, im] pairs: {exc}") from exc
    return as_tensor(flat, dims)


def load_tensor(path: str | Path) -> np.ndarray:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TensorFormatError(f"{path}: invalid JSON: {exc}") from exc
    return tensor_from_json(obj)


def save_tensor(T: np.ndarray, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(tensor_to_json(T), fh)
