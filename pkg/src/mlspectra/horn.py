"""Horn inequalities and full mode spectra in the degenerate equality case.

A third-order tensor with ``s1^2 + s2^2 == |T|^2 + s3^2`` (largest values)
has mode-2 Gram blocks ``H = M M^H`` with ``M = [vec(W_1), G (x) x]``.  The
remaining spectra are then described by a triple ``(L, A, B)`` and the Horn
inequalities for ``(A, B, A + B)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .spectra import (
    block,
    eigvalsh_desc,
    hermitian_eig,
    lemma6_check,
    mode2_gram_blocks,
    mode_singular_values,
    numeric_rank,
    phi,
)
from .tensor import as_tensor, fold, frobenius_norm, unfold

HORN_TOL = 1e-9
SUBCONDITIONS = ("leq", "eq")


@dataclass(frozen=True, order=True)
class HornTriple:
    I: tuple[int, ...]
    J: tuple[int, ...]
    K: tuple[int, ...]

    def __post_init__(self):
        r = len(self.I)
        if len(self.J) != r or len(self.K) != r:
            raise ValueError("I, J and K must have equal cardinality")
        for s in (self.I, self.J, self.K):
            if any(a >= b for a, b in zip(s, s[1:])) or (s and s[0] < 1):
                raise ValueError(f"index set {s} must be strictly increasing from 1")

    @property
    def r(self) -> int:
        return len(self.I)

    def slack(self, alpha, beta, gamma) -> float:
        """``sum alpha_I + sum beta_J - sum gamma_K`` (1-based sets)."""
        a = sum(alpha[i - 1] for i in self.I)
        b = sum(beta[j - 1] for j in self.J)
        c = sum(gamma[k - 1] for k in self.K)
        return float(a + b - c)

    def to_json(self) -> list:
        return [list(self.I), list(self.J), list(self.K)]


def _sub_ok(Iset, Jset, Kset, sub: HornTriple, p: int, mode: str) -> bool:
    lhs = sum(Iset[u - 1] for u in sub.I) + sum(Jset[v - 1] for v in sub.J)
    rhs = sum(Kset[w - 1] for w in sub.K) + p * (p + 1) // 2
    return lhs <= rhs if mode == "leq" else lhs == rhs


@lru_cache(maxsize=None)
def _generate(r: int, n: int, mode: str) -> tuple[HornTriple, ...]:
    if r == 1:
        return tuple(
            HornTriple((i,), (j,), (i + j - 1,))
            for i in range(1, n + 1)
            for j in range(1, n + 1)
            if i + j - 1 <= n
        )
    subs = [(p, _generate(p, r, mode)) for p in range(1, r)]
    target = r * (r + 1) // 2
    out = []
    combos = list(itertools.combinations(range(1, n + 1), r))
    for Iset in combos:
        for Jset in combos:
            for Kset in combos:
                if sum(Iset) + sum(Jset) != sum(Kset) + target:
                    continue
                if all(_sub_ok(Iset, Jset, Kset, t, p, mode) for p, ts in subs for t in ts):
                    out.append(HornTriple(Iset, Jset, Kset))
    return tuple(out)


def generate_T(r: int, n: int, subcondition: str = "leq") -> tuple[HornTriple, ...]:
    """Index triples of cardinality ``r`` in ``{1..n}``, built recursively.

    ``subcondition`` selects how lower-order triples constrain the
    candidates: ``"leq"`` (inequality, the standard set) or ``"eq"``.
    Results are memoised per ``(r, n, subcondition)``.
    """
    if subcondition not in SUBCONDITIONS:
        raise ValueError(f"subcondition must be one of {SUBCONDITIONS}")
    if n < 2 or not 1 <= r <= n - 1:
        raise ValueError(f"need 1 <= r <= n-1, got r={r}, n={n}")
    return _generate(int(r), int(n), subcondition)


@dataclass(frozen=True)
class SubconditionDivergence:
    r: int
    n: int
    only_leq: tuple[HornTriple, ...]
    only_eq: tuple[HornTriple, ...]

    @property
    def differs(self) -> bool:
        return bool(self.only_leq or self.only_eq)


def subcondition_divergence(r: int, n: int) -> SubconditionDivergence:
    """Triples on which the two sub-condition variants disagree."""
    leq = set(generate_T(r, n, "leq"))
    eq = set(generate_T(r, n, "eq"))
    return SubconditionDivergence(r, n, tuple(sorted(leq - eq)), tuple(sorted(eq - leq)))


def horn_triples(n: int, subcondition: str = "leq"):
    """All triples for every ``r`` in ``1..n-1``."""
    for r in range(1, n):
        yield from generate_T(r, n, subcondition)


@dataclass
class HornResult:
    feasible: bool
    trace_gap: float
    min_slack: float
    checked: int
    violated: list = field(default_factory=list)
    tol: float = 0.0

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "trace_gap": self.trace_gap,
            "min_slack": self.min_slack,
            "checked": self.checked,
            "tol": self.tol,
            "violated": [t.to_json() for t in self.violated],
        }


def _spectrum(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if np.any(np.diff(v) > HORN_TOL * max(1.0, float(np.abs(v).max(initial=0.0)))):
        raise ValueError(f"{name} must be sorted in descending order")
    return v


def check_horn(alpha, beta, gamma, *, rel_tol: float = HORN_TOL, subcondition: str = "leq") -> HornResult:
    """Can ``(alpha, beta, gamma)`` be the spectra of ``A``, ``B``, ``A + B``?

    Checks the trace equality and every inequality
    ``sum gamma_K <= sum alpha_I + sum beta_J`` over all triple sets.
    """
    a = _spectrum(alpha, "alpha")
    b = _spectrum(beta, "beta")
    c = _spectrum(gamma, "gamma")
    n = a.size
    if b.size != n or c.size != n:
        raise ValueError(f"spectra lengths differ: {a.size}, {b.size}, {c.size}")
    scale = max(np.abs(a).sum() + np.abs(b).sum() + np.abs(c).sum(), np.finfo(float).tiny)
    tol = rel_tol * scale
    gap = float(a.sum() + b.sum() - c.sum())
    min_slack = np.inf
    violated = []
    count = 0
    for t in horn_triples(n, subcondition) if n >= 2 else ():
        s = t.slack(a, b, c)
        count += 1
        min_slack = min(min_slack, s)
        if s < -tol:
            violated.append(t)
    ok = bool(abs(gap) <= tol) and not violated
    return HornResult(ok, gap, float(min_slack), count, violated, float(tol))


def weyl_check(alpha, beta, gamma, *, rel_tol: float = HORN_TOL) -> HornResult:
    """The three inequalities for 2x2 matrices, written out."""
    a = _spectrum(alpha, "alpha")
    b = _spectrum(beta, "beta")
    c = _spectrum(gamma, "gamma")
    if not a.size == b.size == c.size == 2:
        raise ValueError("weyl_check needs spectra of length 2")
    tol = rel_tol * max(np.abs(a).sum() + np.abs(b).sum() + np.abs(c).sum(), np.finfo(float).tiny)
    cases = [
        (HornTriple((1,), (1,), (1,)), a[0] + b[0] - c[0]),
        (HornTriple((1,), (2,), (2,)), a[0] + b[1] - c[1]),
        (HornTriple((2,), (1,), (2,)), a[1] + b[0] - c[1]),
    ]
    gap = float(a.sum() + b.sum() - c.sum())
    violated = [t for t, s in cases if s < -tol]
    return HornResult(
        bool(abs(gap) <= tol) and not violated,
        gap,
        float(min(s for _, s in cases)),
        len(cases),
        violated,
        float(tol),
    )


@dataclass
class EqualityCaseResult:
    feasible: bool
    reasons: list
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    horn: HornResult | None

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "reasons": list(self.reasons),
            "alpha": self.alpha.tolist(),
            "beta": self.beta.tolist(),
            "gamma": self.gamma.tolist(),
            "horn": None if self.horn is None else self.horn.to_json(),
        }


class EqualityHypothesisError(ValueError):
    """The largest values do not satisfy s1^2 + s2^2 == |T|^2 + s3^2."""


def spectra_to_horn(sigmas: Sequence, dims: Sequence[int]):
    """Map three full mode spectra to ``(alpha, beta, gamma)`` of length I3-1."""
    I1, I2, I3 = dims
    n = I3 - 1
    sq = [np.asarray(s, dtype=float) ** 2 for s in sigmas]
    alpha = np.array([sq[0][i] if i < I1 else 0.0 for i in range(1, n + 1)])
    beta = np.array([sq[1][i] if i < I2 else 0.0 for i in range(1, n + 1)])
    gamma = sq[2][1:].copy()
    return alpha, beta, gamma


def check_thm7_spectra(sigmas: Sequence, dims: Sequence[int], norm: float = 1.0, *, rel_tol: float = HORN_TOL) -> EqualityCaseResult:
    """Are these the full mode spectra of some tensor in the equality case?"""
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3 or len(sigmas) != 3:
        raise ValueError("need three dims and three spectra")
    sig = [np.asarray(s, dtype=float) for s in sigmas]
    for n, (s, d) in enumerate(zip(sig, dims), start=1):
        if s.size != d:
            raise ValueError(f"mode-{n} spectrum has {s.size} values, expected {d}")
        if np.any(np.diff(s) > 0) or np.any(s < 0):
            raise ValueError(f"mode-{n} spectrum must be nonnegative and descending")
    I1, I2, I3 = dims
    nsq = float(norm) ** 2
    tol = rel_tol * nsq
    eq_gap = sig[0][0] ** 2 + sig[1][0] ** 2 - nsq - sig[2][0] ** 2
    if abs(eq_gap) > tol:
        raise EqualityHypothesisError(
            f"s1^2+s2^2-|T|^2-s3^2 = {eq_gap:.3e} is not zero"
        )
    reasons = []
    for n, s in enumerate(sig, start=1):
        if abs(float(np.sum(s**2)) - nsq) > tol:
            reasons.append(f"mode-{n} squares sum to {np.sum(s**2):.12g}, not |T|^2")
    if np.any(sig[0][min(I1, I3):] ** 2 > tol):
        reasons.append(f"mode-1 values beyond index {min(I1, I3)} must vanish")
    if np.any(sig[1][min(I2, I3):] ** 2 > tol):
        reasons.append(f"mode-2 values beyond index {min(I2, I3)} must vanish")
    alpha, beta, gamma = spectra_to_horn(sig, dims)
    horn = None
    if I3 >= 2:
        horn = check_horn(alpha, beta, gamma, rel_tol=rel_tol)
        if not horn.feasible:
            reasons.append(
                f"Horn system fails (trace gap {horn.trace_gap:.3e}, "
                f"{len(horn.violated)} violated inequalities)"
            )
    return EqualityCaseResult(not reasons, reasons, alpha, beta, gamma, horn)


@dataclass(frozen=True)
class DegenerateData:
    """``L > 0`` and PSD ``A``, ``B`` of order ``I3 - 1``."""

    L: float
    A: np.ndarray
    B: np.ndarray
    dims: tuple[int, int, int]

    @property
    def R(self) -> int:
        return numeric_rank(self.B) + 1

    def validate(self, rel_tol: float = 1e-10) -> None:
        I1, I2, I3 = self.dims
        n = I3 - 1
        if self.L <= 0:
            raise ValueError("L must be positive")
        for name, M in (("A", self.A), ("B", self.B)):
            if M.shape != (n, n):
                raise ValueError(f"{name} must be {n}x{n}, got {M.shape}")
        scale = self.L + abs(np.trace(self.A)) + abs(np.trace(self.B))
        wA = eigvalsh_desc(self.A) if n else np.zeros(0)
        wB = eigvalsh_desc(self.B) if n else np.zeros(0)
        if n and min(wA[-1], wB[-1]) < -rel_tol * scale:
            raise ValueError("A and B must be positive semidefinite")
        rA = numeric_rank(self.A) if n else 0
        if rA > min(I1, I3) - 1:
            raise ValueError(f"rank(A) = {rA} exceeds min(I1, I3) - 1 = {min(I1, I3) - 1}")
        if self.R - 1 > I2 - 1:
            raise ValueError(f"rank(B) = {self.R - 1} exceeds I2 - 1 = {I2 - 1}")
        if n and self.L < eigvalsh_desc(self.A + self.B)[0] - rel_tol * scale:
            raise ValueError("L must be at least lambda_max(A + B)")


def _psd_factor(M: np.ndarray, k: int) -> np.ndarray:
    """``F`` with ``k`` rows and ``F^H F == M`` from the top eigenpairs."""
    w, Q = hermitian_eig(M)
    w = np.maximum(w, 0.0)
    F = np.zeros((k, M.shape[0]), dtype=np.complex128)
    m = min(k, w.size)
    F[:m] = np.sqrt(w[:m])[:, None] * Q[:, :m].conj().T
    return F


@dataclass(frozen=True)
class DegenerateParts:
    W1: np.ndarray
    G: np.ndarray
    x: np.ndarray
    V: np.ndarray
    tensor: np.ndarray


def degenerate_parts(d: DegenerateData) -> DegenerateParts:
    d.validate()
    I1, I2, I3 = d.dims
    n = I3 - 1
    W1 = np.zeros((I1, I3), dtype=np.complex128)
    W1[0, 0] = np.sqrt(d.L)
    if n and I1 > 1:
        W1[1:, 1:] = _psd_factor(d.A, I1 - 1)
    R = d.R
    G = np.zeros((I3, R - 1), dtype=np.complex128)
    if R > 1:
        w, U = hermitian_eig(d.B)
        # conj(G) G^T must equal blockdiag(0, B)
        G[1:] = U[:, : R - 1].conj() * np.sqrt(np.maximum(w[: R - 1], 0.0))
    x = np.zeros(I1, dtype=np.complex128)
    x[0] = 1.0
    V = np.eye(I2)[:, :R]
    M = np.column_stack([W1.reshape(-1, order="F"), np.kron(G, x[:, None])])
    T = fold(V.conj() @ M.T, 2, d.dims)
    return DegenerateParts(W1, G, x, V, T)


def degenerate_construct(d: DegenerateData) -> np.ndarray:
    """Tensor in the equality case whose spectra are fixed by ``(L, A, B)``."""
    return degenerate_parts(d).tensor


def predicted_spectra(d: DegenerateData) -> list[np.ndarray]:
    """Squared full mode spectra of :func:`degenerate_construct` output."""
    I1, I2, I3 = d.dims
    n = I3 - 1
    lA = np.maximum(eigvalsh_desc(d.A), 0.0) if n else np.zeros(0)
    lB = np.maximum(eigvalsh_desc(d.B), 0.0) if n else np.zeros(0)
    lAB = np.maximum(eigvalsh_desc(d.A + d.B), 0.0) if n else np.zeros(0)
    trA, trB = float(lA.sum()), float(lB.sum())
    R = d.R

    def pad(v, size):
        v = np.sort(np.asarray(v, dtype=float))[::-1][:size]
        return np.concatenate([v, np.zeros(size - v.size)])

    return [
        pad(np.concatenate([[d.L + trB], lA[: I1 - 1]]), I1),
        pad(np.concatenate([[d.L + trA], lB[: R - 1]]), I2),
        pad(np.concatenate([[d.L], lAB]), I3),
    ]


@dataclass
class PrincipalPairResult:
    conditions: dict
    block_slack: float | None
    identities: dict

    @property
    def holds(self) -> bool:
        return all(self.conditions.values()) and all(self.identities.values())


def lemma9_verify(W1: np.ndarray, G: np.ndarray, x: np.ndarray, *, rel_tol: float = 1e-10) -> PrincipalPairResult:
    """Check the four conditions making ``H = M M^H`` an equality case.

    ``M = [vec(W1), G (x) x]``.  When all conditions hold, ``H`` is
    assembled and the block inequality is confirmed tight; the three
    spectral identities linking ``H`` to ``W1``, ``G`` and ``x`` are
    recorded as well.
    """
    W1 = np.asarray(W1, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128).ravel()
    I1, I3 = W1.shape
    G = np.asarray(G, dtype=np.complex128).reshape(I3, -1)
    if x.size != I1:
        raise ValueError(f"x has length {x.size}, W1 has {I1} rows")
    if abs(np.linalg.norm(x) - 1) > 1e-12:
        raise ValueError("x must be a unit vector")
    scale = max(np.linalg.norm(W1) ** 2 + np.linalg.norm(G) ** 2, np.finfo(float).tiny)
    tol = rel_tol * scale

    WW = W1 @ W1.conj().T
    lmax = eigvalsh_desc(WW)[0]
    gg = G.conj().T @ G
    cond = {
        "principal_x": bool(np.linalg.norm(WW @ x - lmax * x) <= tol),
        "orthogonal_G": bool(np.max(np.abs(gg - np.diag(np.diag(gg))), initial=0.0) <= tol),
        "G_perp_W1x": bool(np.linalg.norm(G.T @ (W1.conj().T @ x)) <= tol),
        "same_lambda_max": bool(
            abs(
                eigvalsh_desc(W1.conj().T @ W1)[0]
                - eigvalsh_desc(W1.conj().T @ W1 + G.conj() @ G.T)[0]
            )
            <= tol
        ),
    }
    if not all(cond.values()):
        return PrincipalPairResult(cond, None, {})

    M = np.column_stack([W1.reshape(-1, order="F"), np.kron(G, x[:, None])])
    H = M @ M.conj().T
    res = lemma6_check(H, I1, I3)
    diag_sum = sum(block(H, k, k, I1) for k in range(I3))
    gnorm = np.linalg.norm(G) ** 2
    col_norms = np.concatenate([[np.linalg.norm(W1) ** 2], np.sum(np.abs(G) ** 2, axis=0)])

    def close(u, v):
        u, v = np.sort(u)[::-1], np.sort(v)[::-1]
        k = max(u.size, v.size)
        u = np.concatenate([u, np.zeros(k - u.size)])
        v = np.concatenate([v, np.zeros(k - v.size)])
        return bool(np.max(np.abs(u - v), initial=0.0) <= tol)

    ident = {
        "mode1": close(eigvalsh_desc(diag_sum), eigvalsh_desc(WW + gnorm * np.outer(x, x.conj()))),
        "mode2": close(eigvalsh_desc(H), col_norms),
        "mode3": close(eigvalsh_desc(phi(H, I1)), eigvalsh_desc(W1.conj().T @ W1 + G.conj() @ G.T)),
        "tight": abs(res.slack) <= tol,
    }
    return PrincipalPairResult(cond, res.slack, ident)


class DecompositionError(ArithmeticError):
    """The two-part split could not be recovered within tolerance."""


@dataclass
class RankSplit:
    W: np.ndarray
    G: np.ndarray
    x: np.ndarray
    ranks: dict
    residual: float

    def to_json(self) -> dict:
        return {"ranks": self.ranks, "residual": self.residual}


def _mode_ranks(T: np.ndarray, scale: float) -> tuple[int, int, int]:
    return tuple(numeric_rank(unfold(T, n), scale=scale) for n in (1, 2, 3))


def thm6_decompose_verify(T: np.ndarray, *, rel_tol: float = 1e-8, rank_tol: float = 1e-10) -> RankSplit:
    """Split an equality-case tensor as ``W + G`` and check the rank pattern.

    ``W`` has mode-2 rank at most one and equal mode-1/mode-3 ranks; ``G``
    has mode-1 rank at most one and equal mode-2/mode-3 ranks.
    """
    T = as_tensor(T)
    if T.ndim != 3:
        raise ValueError("the split is defined for third-order tensors")
    I1, I2, I3 = T.shape
    nT = frobenius_norm(T)
    if nT == 0:
        raise ValueError("zero tensor")
    s = [mode_singular_values(T, n)[0] for n in (1, 2, 3)]
    gap = s[0] ** 2 + s[1] ** 2 - nT**2 - s[2] ** 2
    if abs(gap) > rel_tol * nT**2:
        raise EqualityHypothesisError(f"s1^2+s2^2-|T|^2-s3^2 = {gap:.3e} is not zero")

    Y = unfold(T, 2).T  # columns span the range of H
    w, Q = hermitian_eig(mode2_gram_blocks(T))
    d = int(np.sum(w >= w[0] - rel_tol * nT**2))
    E = Q[:, :d]
    thr = rank_tol * nT

    rest = Y - E @ (E.conj().T @ Y)
    if np.linalg.norm(rest) > thr:
        R1 = unfold(fold(rest.T, 2, T.shape), 1)
        u, _, _ = np.linalg.svd(R1)
        x = u[:, 0]
    else:
        _, U1 = hermitian_eig(unfold(T, 1) @ unfold(T, 1).conj().T)
        x = U1[:, 0]

    if d == 1:
        w1 = E[:, 0]
    else:
        Px = np.kron(np.eye(I3), np.outer(x, x.conj()))
        _, sv, Vh = np.linalg.svd(E - Px @ E)
        outside = int(np.sum(sv > thr))
        if outside > 1:
            raise DecompositionError(
                f"top eigenspace has {outside} directions outside range(I (x) x)"
            )
        w1 = E @ Vh[0].conj() if outside == 1 else E[:, 0]

    YW = np.outer(w1, w1.conj() @ Y)
    Wt = fold(YW.T, 2, T.shape)
    Gt = T - Wt
    G1 = unfold(Gt, 1)
    off = G1 - np.outer(x, x.conj() @ G1)
    if np.linalg.norm(off) > rel_tol * nT:
        raise DecompositionError(
            f"remainder is not proportional to x in mode 1 (residual {np.linalg.norm(off):.3e})"
        )
    rw = _mode_ranks(Wt, nT)
    rg = _mode_ranks(Gt, nT)
    residual = frobenius_norm(Wt + Gt - T) / nT
    ranks = {"W": list(rw), "G": list(rg)}
    checks = [
        rw[1] <= 1,
        rg[0] <= 1,
        rw[0] == rw[2] <= min(I1, I3),
        rg[1] == rg[2] <= min(I2 - 1, I3),
        residual <= rel_tol,
    ]
    if not all(checks):
        raise DecompositionError(f"rank pattern violated: {ranks}, residual {residual:.3e}")
    return RankSplit(Wt, Gt, x, ranks, float(residual))
