"""Nonnegative all-orthogonal tensors with prescribed largest ML singular values.

Unit-norm base tensors sharing one zero pattern (at most one nonzero per
column of each unfolding) are mixed as ``T = sqrt(sum_b t_b * B**2)``.  The
mixture stays all-orthogonal and its squared largest singular values are the
same nonnegative combination of the base values, with ``sum t_b = |T|^2``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .feasibility import (
    Prescription,
    Verdict,
    check_sufficient_3,
    check_sufficient_N_cubic,
)
from .simplex import convex_weights
from .tensor import fold

CLAMP = 1e-12


class InfeasiblePrescription(ValueError):
    """The prescription lies outside the region a construction covers."""


def _clamp_sqrt(x: float, what: str) -> float:
    if x < -CLAMP:
        raise InfeasiblePrescription(f"negative radicand {x:.3e} in {what}")
    return math.sqrt(max(x, 0.0))


def construct_2x2x2(s1: float, s2: float, s3: float, norm: float = 1.0) -> np.ndarray:
    """Closed-form 2x2x2 tensor whose largest ML singular values are (s1, s2, s3)."""
    a, b, c = (s / norm for s in (s1, s2, s3))
    a2, b2, c2 = a * a, b * b, c * c
    if min(a2, b2, c2) < 0.5 - CLAMP:
        raise InfeasiblePrescription("every sigma must be at least |T|/sqrt(2)")
    T = np.zeros((2, 2, 2))
    r = math.sqrt(0.5)
    T[0, 0, 0] = r * _clamp_sqrt(a2 + b2 + c2 - 1, "s1^2+s2^2+s3^2-1")
    T[0, 1, 1] = r * _clamp_sqrt(1 + a2 - b2 - c2, "1+s1^2-s2^2-s3^2")
    T[1, 1, 0] = r * _clamp_sqrt(1 + c2 - a2 - b2, "1+s3^2-s1^2-s2^2")
    T[1, 0, 1] = r * _clamp_sqrt(1 + b2 - a2 - c2, "1+s2^2-s1^2-s3^2")
    return (norm * T).astype(np.complex128)


def _cycle_power(i: int, k: int, I1: int) -> int:
    """0-based image of i under the k-th power of 1 -> I1 -> I1-1 -> ... -> 2 -> 1."""
    return (i - k) % I1


BASE_NAMES = ("S2", "X2", "Y2", "Z2", "N")


@dataclass(frozen=True)
class BaseTensorSet3:
    dims: tuple[int, int, int]
    tensors: dict[str, np.ndarray]

    @property
    def vertices(self) -> dict[str, tuple[float, float, float]]:
        I1, I2, _ = self.dims
        return {
            "S2": (1 / I1, 1 / I1, 1 / I1),
            "X2": (1.0, 1 / I2, 1 / I2),
            "Y2": (1 / I1, 1.0, 1 / I1),
            "Z2": (1 / I1, 1 / I1, 1.0),
            "N": (1.0, 1.0, 1.0),
        }

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]


def _check_sorted3(dims: Sequence[int]) -> tuple[int, int, int]:
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3 or not (2 <= dims[0] <= dims[1] <= dims[2]):
        raise ValueError(f"need 2 <= I1 <= I2 <= I3, got {dims}")
    return dims


def base_tensors_3(dims: Sequence[int]) -> BaseTensorSet3:
    """The five unit-norm base tensors for sorted dims I1 <= I2 <= I3."""
    I1, I2, I3 = dims = _check_sorted3(dims)
    S2 = np.zeros(dims)
    X2 = np.zeros(dims)
    Y2 = np.zeros(dims)
    Z2 = np.zeros(dims)
    N = np.zeros(dims)
    for i in range(I1):
        for k in range(I1):
            j = _cycle_power(i, k, I1)
            S2[i, j, k] = 1 / I1
            if i == 0:
                X2[i, j, k] = 1 / math.sqrt(I2)
            if j == 0:
                Y2[i, j, k] = 1 / math.sqrt(I1)
            if k == 0:
                Z2[i, j, k] = 1 / math.sqrt(I1)
    for j in range(I1, I2):
        X2[0, j, j] = 1 / math.sqrt(I2)
    N[0, 0, 0] = 1.0
    return BaseTensorSet3(dims, {"S2": S2, "X2": X2, "Y2": Y2, "Z2": Z2, "N": N})


@dataclass(frozen=True)
class ConstructionWeights:
    """Nonnegative weights over base tensors; they sum to ``norm**2``."""

    weights: dict
    norm: float

    @property
    def total(self) -> float:
        return float(sum(self.weights.values()))

    @property
    def normalized(self) -> dict:
        return {k: t / self.norm**2 for k, t in self.weights.items()}

    def realized_squares(self, vertices: dict) -> np.ndarray:
        """Squared largest singular values of the mixture."""
        return sum(t * np.asarray(vertices[k], dtype=float) for k, t in self.weights.items())


def tetrahedron_indicator(s: Sequence[float], I1: int, I2: int) -> float:
    """Sign picks the tetrahedron X2 Y2 Z2 N (>= 0) or X2 Y2 Z2 S2 (<= 0)."""
    s1, s2, s3 = s
    return (
        (I1 * I2 + I2 - 2 * I1) * s1
        + (I1 - 1) * I2 * s2
        + (I1 - 1) * I2 * s3
        + (2 - I1 * I2 - I2)
    )


def _weights_upper(s, I1, I2):
    s1, s2, s3 = s
    f = tetrahedron_indicator(s, I1, I2)
    return {
        "S2": 0.0,
        "X2": I2 / (2 * (I2 - 1)) * (1 + s1 - s2 - s3),
        "Y2": I1 / (2 * (I1 - 1)) * (1 + s2 - s1 - s3),
        "Z2": I1 / (2 * (I1 - 1)) * (1 + s3 - s1 - s2),
        "N": f / (2 * (I1 - 1) * (I2 - 1)),
    }


def _weights_lower(s, I1, I2):
    s1, s2, s3 = s
    f = tetrahedron_indicator(s, I1, I2)
    u1 = s1 - 1 / I1
    shift = (I2 - I1) * I1 / ((I1 - 1) ** 2 * I2) * u1
    return {
        "S2": -f * I1 / (I2 * (I1 - 1) ** 2),
        "X2": I1 / (I1 - 1) * u1,
        "Y2": I1 / (I1 - 1) * (s2 - 1 / I1) + shift,
        "Z2": I1 / (I1 - 1) * (s3 - 1 / I1) + shift,
        "N": 0.0,
    }


def weights_3(squares: Sequence[float], dims: Sequence[int], norm: float = 1.0) -> ConstructionWeights:
    """Explicit convex weights over S2, X2, Y2, Z2, N (sorted dims).

    ``squares`` are the target squared values at norm ``norm``.
    """
    I1, I2, _ = dims = _check_sorted3(dims)
    p = Prescription.from_squares(dims, squares, norm)
    if check_sufficient_3(p).verdict is not Verdict.SUFFICIENT_PROVEN:
        raise InfeasiblePrescription(f"{p} is outside the sufficient polytope")
    s = tuple(float(x) for x in p.normalized_squares)
    if tetrahedron_indicator(s, I1, I2) >= 0:
        w = _weights_upper(s, I1, I2)
    else:
        w = _weights_lower(s, I1, I2)
    for k, t in w.items():
        if t < -CLAMP:
            raise InfeasiblePrescription(f"weight {k} = {t:.3e} is negative")
        # roundoff weights would turn into 1e-8 entries under the square root
        w[k] = (t if t > CLAMP else 0.0) * norm**2
    return ConstructionWeights(w, float(norm))


def mix(bases: dict, weights: dict) -> np.ndarray:
    """``sqrt(sum_b t_b * B_b**2)`` entrywise over unit-norm real bases."""
    acc = sum(t * np.asarray(bases[k]).real ** 2 for k, t in weights.items() if t)
    return np.sqrt(acc).astype(np.complex128)


def construct_3(sigmas: Sequence[float], dims: Sequence[int], norm: float = 1.0) -> np.ndarray:
    """Third-order construction for any prescription in the sufficient polytope.

    Dims need not be sorted; the tensor is built in the sorted frame and its
    modes are permuted back.
    """
    p = Prescription(tuple(dims), norm, tuple(sigmas))
    if p.order != 3:
        raise ValueError("construct_3 needs three dims")
    perm = np.argsort(p.dims, kind="stable")
    sdims = tuple(p.dims[i] for i in perm)
    squares = [p.squares[i] for i in perm]
    w = weights_3(squares, sdims, norm)
    T = mix(base_tensors_3(sdims).tensors, w.weights)
    return np.transpose(T, np.argsort(perm))


def vertex_set_V(N: int, I: int) -> list[tuple[float, ...]]:
    """Vertices of the cubic feasibility polytope, lexicographic in {1/I, 1}.

    All tuples with at least two coordinates 1/I, plus (1, ..., 1); there
    are 2^N - N of them.
    """
    if N < 3 or I < 2:
        raise ValueError(f"need N >= 3 and I >= 2, got N={N}, I={I}")
    out = []
    for bits in itertools.product((0, 1), repeat=N):
        ones = sum(bits)
        if ones <= N - 2 or ones == N:
            out.append(tuple(1.0 if b else 1.0 / I for b in bits))
    return out


def base_tensor_N(alpha: Sequence[float], N: int, I: int) -> np.ndarray:
    """Unit-norm all-orthogonal I^N tensor with squared largest values ``alpha``."""
    alpha = tuple(float(a) for a in alpha)
    if len(alpha) != N:
        raise ValueError(f"alpha has {len(alpha)} entries, expected {N}")
    is_one = [abs(a - 1.0) <= 1e-12 for a in alpha]
    is_small = [abs(a - 1.0 / I) <= 1e-12 for a in alpha]
    if not all(o or s for o, s in zip(is_one, is_small)):
        raise ValueError(f"alpha entries must be 1/I or 1, got {alpha}")
    k = sum(is_one)
    if all(is_one):
        T = np.zeros((I,) * N)
        T[(0,) * N] = 1.0
        return T.astype(np.complex128)
    if N - k < 2:
        raise ValueError("alpha needs at least two coordinates equal to 1/I")
    idx = np.indices((I,) * N)
    support = idx[1] == (idx[0] - idx[2:].sum(axis=0)) % I
    for n in range(N):
        if is_one[n]:
            support &= idx[n] == 0
    T = np.where(support, I ** (-(N - 1 - k) / 2), 0.0)
    return T.astype(np.complex128)


def weights_N(squares: Sequence[float], N: int, I: int, norm: float = 1.0) -> ConstructionWeights:
    """Convex weights over the cubic vertex set, found by the simplex method."""
    p = Prescription.from_squares((I,) * N, squares, norm)
    if check_sufficient_N_cubic(p).verdict is not Verdict.SUFFICIENT_PROVEN:
        raise InfeasiblePrescription(f"{p} violates the cubic feasibility conditions")
    V = vertex_set_V(N, I)
    target = np.clip(p.normalized_squares, 1.0 / I, 1.0)
    w = convex_weights(np.array(V), target)
    return ConstructionWeights({v: float(t) * norm**2 for v, t in zip(V, w)}, float(norm))


def construct_N(sigmas: Sequence[float], N: int, I: int, norm: float = 1.0) -> np.ndarray:
    """Cubic order-N construction; the I-1 trailing singular values per mode are equal."""
    if len(sigmas) != N:
        raise ValueError(f"{len(sigmas)} sigmas for order {N}")
    w = weights_N([s * s for s in sigmas], N, I, norm)
    used = {v: t for v, t in w.weights.items() if t}
    return mix({v: base_tensor_N(v, N, I) for v in used}, used)


def scaled_allorthonormal_234() -> np.ndarray:
    """Unit-norm 2x3x4 tensor with Gram matrices I/2, I/3, I/4 in modes 1, 2, 3.

    Built from its mode-3 unfolding; the prefactor 1/(4 sqrt 3) makes every
    row of that unfolding have squared norm 1/4.
    """
    r = math.sqrt(3)
    M3 = np.array(
        [
            [1 + r, 0, 0, 1 - r, -2, 0],
            [0, 1 + r, 1 - r, 0, 0, 2],
            [0, 1 - r, 1 + r, 0, 0, 2],
            [1 - r, 0, 0, 1 + r, -2, 0],
        ]
    ) / (4 * r)
    return fold(M3.astype(np.complex128), 3, (2, 3, 4))
