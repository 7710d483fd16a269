"""Randomised verification campaigns over the necessary inequalities.

Each ``(shape, trial)`` pair draws its tensor from its own seeded stream,
so results do not depend on scheduling and runs can be split across
processes.  Failing cases carry a full tensor dump that :func:`replay`
re-checks.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .feasibility import (
    Prescription,
    actual_prescription,
    assess,
    check_necessary_N,
    verify_thm4_chain,
)
from .sampling import DISTRIBUTIONS, random_tensor, trial_rng
from .spectra import lemma6_check, mode2_gram_blocks
from .tensor import tensor_from_json, tensor_to_json

CHECKS = ("necessary", "block", "chain", "telescope")


@dataclass(frozen=True)
class VerifyConfig:
    shapes: tuple
    trials: int = 100
    seed: int = 0
    distribution: str = "complex-gaussian"
    tol: float = 1e-9
    workers: int = 1
    inject: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "shapes", tuple(tuple(int(d) for d in s) for s in self.shapes))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {DISTRIBUTIONS}")
        if not self.shapes:
            raise ValueError("at least one shape is required")
        for s in self.shapes:
            if len(s) < 3:
                raise ValueError(f"campaign shapes need N >= 3, got {s}")


def check_tensor(T: np.ndarray, tol: float) -> dict:
    """Minimum slack of each applicable check (relative to |T|^2)."""
    p = actual_prescription(T)
    nsq = p.norm**2
    out = {}
    rep = check_necessary_N(p, rel_tol=tol)
    out["necessary"] = min(r.slack for r in rep.records) / nsq
    if T.ndim == 3:
        I1, _, I3 = T.shape
        res = lemma6_check(mode2_gram_blocks(T), I1, I3)
        out["block"] = res.slack / nsq
    chain = verify_thm4_chain(T)
    out["chain"] = min(chain.slacks) / nsq
    # telescoping error enters as a nonpositive slack
    out["telescope"] = -abs(chain.total - chain.mode_N_slack) / nsq
    return out


def _run_trial(args) -> tuple:
    seed, shape_idx, trial_idx, shape, dist, tol = args
    T = random_tensor(shape, trial_rng(seed, shape_idx, trial_idx), dist)
    return shape_idx, trial_idx, check_tensor(T, tol)


@dataclass
class CampaignReport:
    config: VerifyConfig
    passes: dict
    totals: dict
    min_slack: dict
    failures: list
    injected: list = field(default_factory=list)
    wall_clock: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self, include_clock: bool = True) -> dict:
        out = {
            "config": {
                "shapes": [list(s) for s in self.config.shapes],
                "trials": self.config.trials,
                "seed": self.config.seed,
                "distribution": self.config.distribution,
                "tol": self.config.tol,
            },
            "passes": self.passes,
            "totals": self.totals,
            "min_slack": self.min_slack,
            "failures": self.failures,
            "injected": self.injected,
        }
        if include_clock:
            out["wall_clock"] = self.wall_clock
        return out

    def dumps(self, include_clock: bool = True) -> str:
        return json.dumps(self.to_json(include_clock), sort_keys=True, indent=2)


def run_campaign(cfg: VerifyConfig) -> CampaignReport:
    t0 = time.perf_counter()
    jobs = [
        (cfg.seed, si, ti, shape, cfg.distribution, cfg.tol)
        for si, shape in enumerate(cfg.shapes)
        for ti in range(cfg.trials)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            results = list(ex.map(_run_trial, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    else:
        results = [_run_trial(j) for j in jobs]
    results.sort(key=lambda r: (r[0], r[1]))

    passes, totals, mins, failures = {}, {}, {}, []
    for si, ti, slacks in results:
        key = "x".join(map(str, cfg.shapes[si]))
        for name, s in slacks.items():
            k = f"{key}:{name}"
            totals[k] = totals.get(k, 0) + 1
            mins[k] = min(mins.get(k, np.inf), s)
            if s >= -cfg.tol:
                passes[k] = passes.get(k, 0) + 1
            else:
                passes.setdefault(k, 0)
                T = random_tensor(cfg.shapes[si], trial_rng(cfg.seed, si, ti), cfg.distribution)
                failures.append(
                    {
                        "shape_index": si,
                        "trial": ti,
                        "check": name,
                        "slack": s,
                        "tensor": tensor_to_json(T),
                    }
                )
    injected = []
    for obj in cfg.inject:
        p = obj if isinstance(obj, Prescription) else Prescription.from_json(obj)
        rep = assess(p, cfg.tol)
        injected.append({"prescription": p.to_json(), "verdict": rep.verdict.value,
                         "violated": [r.name for r in rep.violated]})
    return CampaignReport(
        cfg,
        passes,
        totals,
        {k: float(v) for k, v in mins.items()},
        failures,
        injected,
        time.perf_counter() - t0,
    )


def replay(failure: dict, tol: float = 1e-9) -> dict:
    """Re-run the checks on a dumped failing case; returns the slacks."""
    T = tensor_from_json(failure["tensor"])
    return check_tensor(T, tol)

