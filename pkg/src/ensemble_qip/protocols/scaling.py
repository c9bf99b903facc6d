"""Monte Carlo of divide-and-conquer cluster-chain assembly with probabilistic CPF.

An ``n``-chain is made by fusing two ``n/2``-chains; a failed fusion destroys
both halves, which must be rebuilt. Single ensembles in |+> are free. For each
trial the number of fusion attempts at every level is drawn exactly: needing
``S`` chains of a size takes ``S + NegBin(S, p)`` attempts, and every attempt
consumes one chain of each half-size.

Two time accountings are reported:

``serial``
    every CPF attempt takes ``t0`` and attempts never overlap:
    ``t0 * (total attempts)``. At ``p = 1`` this is ``t0 (n - 1)``.
``parallel``
    one fusion station per adjacent pair at the lowest level, upper merges
    pipelined behind them; the build time is the per-station workload of the
    lowest level, ``t0 * attempts_1 / (n/2)``. Its mean is exactly
    ``t0 (1/p)^log2(n)``, the analytic estimate. Requires ``n`` a power of two.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ClusterSpec:
    n: int
    p: float
    t0: float = 1.0

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ValueError("p must be in (0, 1]")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not self.t0 > 0:
            raise ValueError("t0 must be > 0")


@dataclass(frozen=True, eq=False)
class BuildTimeResult:
    spec: ClusterSpec
    accounting: str
    mean: float
    std: float
    analytic: float
    samples: np.ndarray = field(repr=False)


def analytic_build_time(spec: ClusterSpec) -> float:
    """``t0 (1/p)^log2(n)``."""
    return spec.t0 * (1 / spec.p) ** math.log2(spec.n)


def _attempts(rng, need, p):
    extra = np.zeros_like(need)
    mask = need > 0
    if p < 1 and mask.any():
        extra[mask] = rng.negative_binomial(need[mask], p)
    return need + extra


def sample_attempts(n: int, p: float, trials: int, rng: np.random.Generator) -> dict:
    """Per-trial fusion attempts keyed by chain size being produced.

    Sizes follow the halving recursion ``s -> (ceil(s/2), floor(s/2))``.
    """
    need = {n: np.ones(trials, dtype=np.int64)}
    attempts = {}
    # process sizes from largest to smallest; each size appears once per level
    while need:
        s = max(need)
        count = need.pop(s)
        if s == 1:
            continue
        a = _attempts(rng, count, p)
        attempts[s] = attempts.get(s, 0) + a
        for half in (math.ceil(s / 2), s // 2):
            need[half] = need.get(half, 0) + a
    return attempts


def simulate_build_time(spec: ClusterSpec, trials: int, seed: int, accounting: str = "parallel") -> BuildTimeResult:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    attempts = sample_attempts(spec.n, spec.p, trials, rng)
    if accounting == "serial":
        total = sum(attempts.values())
        samples = spec.t0 * total.astype(float)
    elif accounting == "parallel":
        if spec.n & (spec.n - 1):
            raise ValueError("parallel accounting needs n to be a power of two")
        samples = spec.t0 * attempts[2].astype(float) / (spec.n // 2)
    else:
        raise ValueError(f"unknown accounting {accounting!r}")
    return BuildTimeResult(spec, accounting, float(samples.mean()), float(samples.std()), analytic_build_time(spec), samples)


def scaling_exponent(ns, means) -> float:
    """Least-squares slope of log(mean) against log(n)."""
    return float(np.polyfit(np.log(ns), np.log(means), 1)[0])
