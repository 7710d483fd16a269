"""Where does a prescription of largest ML singular values sit?

All inequalities are evaluated on squared values, relative to the target
norm, and recorded as ``slack = rhs - lhs`` (nonnegative when satisfied).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .spectra import largest_ml_singular_values, spectral_norm_sq
from .tensor import as_tensor, frobenius_norm, reshape_third_order, unfold

REL_TOL = 1e-9


class Verdict(str, enum.Enum):
    NECESSARY_VIOLATED = "NECESSARY_VIOLATED"
    NECESSARY_HOLDS = "NECESSARY_HOLDS"
    SUFFICIENT_PROVEN = "SUFFICIENT_PROVEN"
    GAP = "GAP"
    SPECIAL_RULE_INFEASIBLE = "SPECIAL_RULE_INFEASIBLE"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Prescription:
    """Target dims, Frobenius norm and largest ML singular values (not squared)."""

    dims: tuple[int, ...]
    norm: float
    sigmas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "sigmas", tuple(float(s) for s in self.sigmas))
        object.__setattr__(self, "norm", float(self.norm))
        if len(self.dims) < 2:
            raise ValueError("a prescription needs at least two modes")
        if any(d < 1 for d in self.dims):
            raise ValueError(f"dimensions must be positive, got {self.dims}")
        if len(self.sigmas) != len(self.dims):
            raise ValueError(f"{len(self.sigmas)} sigmas for {len(self.dims)} modes")
        if not self.norm > 0:
            raise ValueError("target norm must be positive")
        if any(s < 0 or not math.isfinite(s) for s in self.sigmas):
            raise ValueError("sigmas must be finite and nonnegative")

    @property
    def order(self) -> int:
        return len(self.dims)

    @property
    def squares(self) -> np.ndarray:
        return np.array(self.sigmas) ** 2

    @property
    def normalized_squares(self) -> np.ndarray:
        return self.squares / self.norm**2

    @classmethod
    def from_json(cls, obj: dict) -> "Prescription":
        return cls(tuple(obj["dims"]), obj["norm"], tuple(obj["sigmas"]))

    @classmethod
    def from_squares(cls, dims, squares, norm: float = 1.0) -> "Prescription":
        return cls(tuple(dims), norm, tuple(math.sqrt(max(s, 0.0)) for s in squares))

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "norm": self.norm, "sigmas": list(self.sigmas)}


@dataclass(frozen=True)
class Inequality:
    name: str
    kind: str
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
        }


@dataclass
class FeasibilityReport:
    prescription: Prescription
    records: list[Inequality]
    verdict: Verdict
    tol: float
    permutation: tuple[int, ...] | None = None
    special_rule: "RuleVerdict | None" = None
    notes: list[str] = field(default_factory=list)

    @property
    def tight(self) -> list[str]:
        return [r.name for r in self.records if abs(r.slack) <= self.tol]

    @property
    def violated(self) -> list[Inequality]:
        return [r for r in self.records if r.slack < -self.tol]

    def record(self, name: str) -> Inequality:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def by_kind(self, kind: str) -> list[Inequality]:
        return [r for r in self.records if r.kind == kind]

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "prescription": self.prescription.to_json(),
            "tolerance": self.tol,
            "records": [r.to_json() for r in self.records],
            "tight": self.tight,
        }
        if self.permutation is not None:
            out["permutation"] = [p + 1 for p in self.permutation]
        if self.special_rule is not None:
            out["special_rule"] = self.special_rule.to_json()
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _tol(p: Prescription, rel_tol: float) -> float:
    return rel_tol * p.norm**2


def necessary_records(p: Prescription) -> list[Inequality]:
    N = p.order
    s = p.squares
    nsq = p.norm**2
    recs = []
    total = float(np.sum(s))
    for n in range(N - 1, -1, -1):
        others = "+".join(f"s{m + 1}^2" for m in range(N) if m != n)
        name = f"{others} <= {N - 2}*|T|^2+s{n + 1}^2" if N != 3 else f"{others} <= |T|^2+s{n + 1}^2"
        recs.append(Inequality(name, "cyclic", total - s[n], (N - 2) * nsq + s[n]))
    for n in range(N):
        recs.append(
            Inequality(f"s{n + 1}^2 >= |T|^2/{p.dims[n]}", "lower", nsq / p.dims[n], s[n])
        )
    for n in range(N):
        recs.append(Inequality(f"s{n + 1}^2 <= |T|^2", "upper", s[n], nsq))
    return recs


def check_necessary_N(p: Prescription, rel_tol: float = REL_TOL) -> FeasibilityReport:
    """Necessary conditions for any order N >= 2.

    For each mode n: sum of the other squared values <= (N-2)|T|^2 + s_n^2,
    and |T|^2 / I_n <= s_n^2 <= |T|^2.
    """
    tol = _tol(p, rel_tol)
    recs = necessary_records(p)
    bad = any(r.slack < -tol for r in recs)
    return FeasibilityReport(
        p, recs, Verdict.NECESSARY_VIOLATED if bad else Verdict.NECESSARY_HOLDS, tol
    )


def check_necessary_3(p: Prescription, rel_tol: float = REL_TOL) -> FeasibilityReport:
    if p.order != 3:
        raise ValueError(f"third-order check called with N={p.order}")
    return check_necessary_N(p, rel_tol)


def sort_dims(p: Prescription) -> tuple[Prescription, tuple[int, ...]]:
    """Prescription with nondecreasing dims; ``perm[k]`` is the original mode."""
    perm = tuple(int(i) for i in np.argsort(p.dims, kind="stable"))
    q = Prescription(tuple(p.dims[i] for i in perm), p.norm, tuple(p.sigmas[i] for i in perm))
    return q, perm


def sufficient_records_3(q: Prescription) -> list[Inequality]:
    """Extra conditions for sorted dims I_1 <= I_2 <= I_3."""
    I1, I2, _ = q.dims
    s1, s2, s3 = q.squares
    nsq = q.norm**2
    return [
        Inequality(f"s1^2 >= |T|^2/{I1}", "sufficient", nsq / I1, s1),
        Inequality(
            "(I2-I1)s1^2+(I1*I2-I2)s3^2+(1-I2)|T|^2 >= 0",
            "sufficient",
            0.0,
            (I2 - I1) * s1 + (I1 * I2 - I2) * s3 + (1 - I2) * nsq,
        ),
        Inequality(
            "(I2-I1)s1^2+(I1*I2-I2)s2^2+(1-I2)|T|^2 >= 0",
            "sufficient",
            0.0,
            (I2 - I1) * s1 + (I1 * I2 - I2) * s2 + (1 - I2) * nsq,
        ),
    ]


def check_sufficient_3(p: Prescription, rel_tol: float = REL_TOL) -> FeasibilityReport:
    """Necessary conditions plus the sufficient polytope for third order.

    Dims are sorted internally (sigmas follow); the report keeps the
    permutation and lists records in the sorted frame.  Verdicts:
    NECESSARY_VIOLATED, SUFFICIENT_PROVEN or GAP.
    """
    if p.order != 3:
        raise ValueError(f"third-order check called with N={p.order}")
    q, perm = sort_dims(p)
    tol = _tol(q, rel_tol)
    recs = necessary_records(q) + sufficient_records_3(q)
    if any(r.slack < -tol for r in recs if r.kind != "sufficient"):
        verdict = Verdict.NECESSARY_VIOLATED
    elif all(r.slack >= -tol for r in recs):
        verdict = Verdict.SUFFICIENT_PROVEN
    else:
        verdict = Verdict.GAP
    return FeasibilityReport(q, recs, verdict, tol, permutation=perm)


def check_sufficient_N_cubic(p: Prescription, rel_tol: float = REL_TOL) -> FeasibilityReport:
    """Cubic tensors: the necessary conditions are also sufficient."""
    if len(set(p.dims)) != 1 or p.dims[0] < 2:
        raise ValueError(f"cubic dims with I >= 2 required, got {p.dims}")
    rep = check_necessary_N(p, rel_tol)
    if rep.verdict is Verdict.NECESSARY_HOLDS:
        rep.verdict = Verdict.SUFFICIENT_PROVEN
    return rep


@dataclass(frozen=True)
class PolytopeVertices:
    dims: tuple[int, int, int]
    norm: float
    points: dict[str, tuple[float, float, float]]

    def __getitem__(self, name: str) -> tuple[float, float, float]:
        return self.points[name]

    def to_csv(self) -> str:
        lines = ["name,s1_sq,s2_sq,s3_sq"]
        for k, (a, b, c) in self.points.items():
            lines.append(f"{k},{a!r},{b!r},{c!r}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "norm": self.norm,
            "points": {k: list(v) for k, v in self.points.items()},
        }


def polytope_vertices(dims: Sequence[int], norm: float = 1.0) -> PolytopeVertices:
    """Labelled corner points in (s1^2, s2^2, s3^2) space, scaled by norm^2."""
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3 or list(dims) != sorted(dims):
        raise ValueError(f"need three nondecreasing dims, got {dims}")
    I1, I2, I3 = dims
    raw = {
        "S": (1 / I1, 1 / I2, 1 / I3),
        "X1": (1 - 1 / I2 + 1 / I3, 1 / I2, 1 / I3),
        "X2": (1.0, 1 / I2, 1 / I2),
        "Y1": (1 / I1, 1 - 1 / I1 + 1 / I3, 1 / I3),
        "Y2": (1 / I1, 1.0, 1 / I1),
        "Z1": (1 / I1, 1 / I2, 1 - 1 / I1 + 1 / I2),
        "Z2": (1 / I1, 1 / I1, 1.0),
        "N": (1.0, 1.0, 1.0),
        "S2": (1 / I1, 1 / I1, 1 / I1),
    }
    nsq = float(norm) ** 2
    return PolytopeVertices(dims, float(norm), {k: tuple(nsq * c for c in v) for k, v in raw.items()})


def cubic_polytope_volume(I: int) -> float:
    """Volume of the feasible set for I x I x I tensors at unit norm."""
    return 0.5 * (1 - 1 / I) ** 3


@dataclass(frozen=True)
class RuleVerdict:
    point: str
    status: str  # "feasible" | "infeasible" | "unknown"
    reason: str

    def to_json(self) -> dict:
        return {"point": self.point, "status": self.status, "reason": self.reason}


SPECIAL_POINTS = ("S", "X1", "Y1", "SX1", "SY1")


def special_point_rules(dims: Sequence[int], point: str) -> RuleVerdict:
    """Known (in)feasibility of S, X1, Y1 and the open segments SX1, SY1.

    Rules for sorted dims I1 <= I2 <= I3:

    * I3 == I1*I2: S is feasible; X1, Y1 and every other point of the
      plane s3^2 = 1/I3 (hence both segments) are not.
    * I3 == I1*I2 - 1 and I1 != I2: S is infeasible; so is every point of
      SX1 (mode-2 and mode-3 Gram matrices cannot both be scalar).
    * (2, 3, 4): S is feasible via an explicit scaled all-orthonormal tensor.
    * Points inside the sufficient polytope are feasible.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3:
        raise ValueError("special point rules concern third-order tensors")
    if point not in SPECIAL_POINTS:
        raise ValueError(f"unknown point {point!r}; choose from {SPECIAL_POINTS}")
    dims = tuple(sorted(dims))
    I1, I2, I3 = dims
    if I3 == I1 * I2:
        if point == "S":
            return RuleVerdict(point, "feasible", "I3 = I1*I2: square mode-3 unfolding is a scaled unitary")
        return RuleVerdict(point, "infeasible", "I3 = I1*I2: s3^2 = 1/I3 forces s1^2 = 1/I1 and s2^2 = 1/I2")
    if I3 == I1 * I2 - 1 and I1 != I2:
        if point == "S":
            return RuleVerdict(point, "infeasible", "I3 = I1*I2-1 with I1 != I2")
        if point in ("X1", "SX1"):
            return RuleVerdict(point, "infeasible", "I3 = I1*I2-1: scalar mode-2 and mode-3 Grams need I2 <= I1")
    if dims == (2, 3, 4) and point == "S":
        return RuleVerdict(point, "feasible", "explicit 2x3x4 scaled all-orthonormal tensor")
    if point in ("S", "X1", "Y1"):
        coords = polytope_vertices(dims)[point]
        q = Prescription.from_squares(dims, coords)
        if check_sufficient_3(q).verdict is Verdict.SUFFICIENT_PROVEN:
            return RuleVerdict(point, "feasible", "inside the sufficient polytope")
    return RuleVerdict(point, "unknown", "not covered by known results")


def locate_special_point(q: Prescription, rel_tol: float = REL_TOL) -> str | None:
    """Name of the special point/segment a sorted third-order prescription lies on."""
    s = q.normalized_squares
    verts = polytope_vertices(q.dims)
    tol = rel_tol

    def near(a, b):
        return abs(a - b) <= tol

    for name in ("S", "X1", "Y1"):
        if all(near(a, b) for a, b in zip(s, verts[name])):
            return name
    S, X1, Y1 = verts["S"], verts["X1"], verts["Y1"]
    if near(s[1], S[1]) and near(s[2], S[2]) and S[0] < s[0] < X1[0]:
        return "SX1"
    if near(s[0], S[0]) and near(s[2], S[2]) and S[1] < s[1] < Y1[1]:
        return "SY1"
    return None


def assess(p: Prescription, rel_tol: float = REL_TOL) -> FeasibilityReport:
    """Best available verdict for any prescription.

    Third order: sufficient polytope, then special-point rules inside the
    gap.  Cubic order N: exact.  Otherwise only the necessary conditions
    are decisive and a passing prescription is UNKNOWN.
    """
    if p.order == 3:
        rep = check_sufficient_3(p, rel_tol)
        if rep.verdict is Verdict.GAP:
            where = locate_special_point(rep.prescription, rel_tol)
            if where is not None:
                rule = special_point_rules(rep.prescription.dims, where)
                rep.special_rule = rule
                if rule.status == "infeasible":
                    rep.verdict = Verdict.SPECIAL_RULE_INFEASIBLE
                elif rule.status == "feasible":
                    rep.notes.append(f"point {where} is feasible: {rule.reason}")
        return rep
    if len(set(p.dims)) == 1 and p.dims[0] >= 2:
        return check_sufficient_N_cubic(p, rel_tol)
    rep = check_necessary_N(p, rel_tol)
    if rep.verdict is Verdict.NECESSARY_HOLDS and p.order > 2:
        rep.verdict = Verdict.UNKNOWN
    return rep


@dataclass(frozen=True)
class ChainResult:
    """Per-reshape third-order slacks and their telescoped total."""

    slacks: tuple[float, ...]
    total: float
    mode_N_slack: float
    norm_sq: float

    def telescopes(self, tol: float = 1e-9) -> bool:
        return abs(self.total - self.mode_N_slack) <= tol * max(self.norm_sq, np.finfo(float).tiny)


def verify_thm4_chain(T: np.ndarray) -> ChainResult:
    """Chain the third-order inequality through the reshapes T^[1..N-2].

    For each reshape the slack ``|T|^2 + s_max^2(mode 3) - s_max^2(mode 1)
    - s_max^2(mode 2)`` is nonnegative; their sum equals the order-N slack
    ``(N-2)|T|^2 + s_N^2 - (s_1^2 + ... + s_{N-1}^2)``.
    """
    T = as_tensor(T)
    N = T.ndim
    if N < 3:
        raise ValueError("the reshape chain needs N >= 3")
    nsq = frobenius_norm(T) ** 2
    slacks = []
    for n in range(1, N - 1):
        R = reshape_third_order(T, n)
        a, b, c = (spectral_norm_sq(unfold(R, k)) for k in (1, 2, 3))
        slacks.append(nsq + c - a - b)
    sq = [spectral_norm_sq(unfold(T, n)) for n in range(1, N + 1)]
    mode_N = (N - 2) * nsq + sq[-1] - sum(sq[:-1])
    return ChainResult(tuple(slacks), float(sum(slacks)), float(mode_N), nsq)


def actual_prescription(T: np.ndarray) -> Prescription:
    """The prescription realised by a tensor."""
    T = as_tensor(T)
    return Prescription(T.shape, frobenius_norm(T), tuple(largest_ml_singular_values(T)))
