"""Monte-Carlo census of embeddability over uniformly random 4x4 Markov matrices."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .matrices import StochasticMatrix, exp_residual, validate_markov
from .solver import decide
from .tolerances import DEFAULT_TOL, ToleranceConfig

RNG_ALGORITHM = "numpy.random.Philox"
SHARD_SIZE = 10_000
SETS = ("Delta", "Delta_Id", "Delta_dlc", "Delta_dd")
FULL_SAMPLE_COUNT = 10_000_000


def make_rng(seed: int, shard: int = 0) -> np.random.Generator:
    """Independent stream for one shard, derived only from ``(seed, shard)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(shard,))))


def sample_rows(rng: np.random.Generator, count: int, n: int = 4) -> np.ndarray:
    """``count`` matrices whose rows are uniform on the simplex, shape ``(count, n, n)``.

    Each row is the gap sequence of ``n - 1`` sorted uniforms on ``[0, 1]``.
    """
    cuts = np.sort(rng.random((count, n, n - 1)), axis=-1)
    zeros = np.zeros((count, n, 1))
    ones = np.ones((count, n, 1))
    return np.diff(np.concatenate([zeros, cuts, ones], axis=-1), axis=-1)


def sample_markov_uniform(rng: np.random.Generator, n: int = 4) -> StochasticMatrix:
    """One Markov matrix with independent simplex-uniform rows."""
    return validate_markov(sample_rows(rng, 1, n)[0])


@dataclass(frozen=True)
class MembershipFlags:
    in_Id: bool
    in_dlc: bool
    in_dd: bool


def classify_membership(M) -> MembershipFlags:
    """Positive determinant, diagonal largest in column, diagonal at least one half."""
    a = np.asarray(M, dtype=float)
    diag = np.diag(a)
    return MembershipFlags(
        in_Id=bool(np.linalg.det(a) > 0),
        in_dlc=bool(np.all(diag >= a.max(axis=0))),
        in_dd=bool(np.all(diag >= 0.5)),
    )


@dataclass(frozen=True)
class CensusConfig:
    sample_count: int
    seed: int
    tol: ToleranceConfig = DEFAULT_TOL
    workers: int = 1

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass
class SetCount:
    samples: int = 0
    embeddable: int = 0

    @property
    def percentage(self) -> float:
        return 100.0 * self.embeddable / self.samples if self.samples else 0.0

    def to_dict(self) -> dict:
        return {"samples": self.samples, "embeddable": self.embeddable,
                "percentage": self.percentage}


@dataclass
class CensusResult:
    """Per-set sample and embeddable counts; ``max_exp_residual`` covers every embeddable sample."""

    sample_count: int
    seed: int
    counts: Dict[str, SetCount] = field(default_factory=lambda: {s: SetCount() for s in SETS})
    max_exp_residual: float = 0.0
    unsupported: int = 0
    runtime_s: float = 0.0
    rng_algorithm: str = RNG_ALGORITHM
    shard_size: int = SHARD_SIZE

    def merge(self, other: "CensusResult") -> None:
        for s in SETS:
            self.counts[s].samples += other.counts[s].samples
            self.counts[s].embeddable += other.counts[s].embeddable
        self.max_exp_residual = max(self.max_exp_residual, other.max_exp_residual)
        self.unsupported += other.unsupported

    def same_counts(self, other: "CensusResult") -> bool:
        return (self.seed == other.seed and self.sample_count == other.sample_count
                and all(self.counts[s] == other.counts[s] for s in SETS)
                and self.max_exp_residual == other.max_exp_residual
                and self.unsupported == other.unsupported)

    def to_dict(self) -> dict:
        return {
            "schema_version": "1",
            "sample_count": self.sample_count, "seed": self.seed,
            "rng_algorithm": self.rng_algorithm, "shard_size": self.shard_size,
            "sets": {s: self.counts[s].to_dict() for s in SETS},
            "max_exp_residual": self.max_exp_residual, "unsupported": self.unsupported,
            "runtime_s": self.runtime_s,
        }


def _run_shard(args) -> CensusResult:
    seed, shard, count, tol = args
    rng = make_rng(seed, shard)
    batch = sample_rows(rng, count)
    out = CensusResult(sample_count=count, seed=seed)
    for a in batch:
        flags = classify_membership(a)
        embeddable = False
        if flags.in_Id:
            m = validate_markov(a, tol)
            try:
                verdict, _ = decide(m, tol)
            except Exception:  # unsupported or numerically degenerate draw
                out.unsupported += 1
                verdict = None
            if verdict is not None and verdict.embeddable:
                embeddable = True
                res = max(exp_residual(g.matrix, a) for g in verdict.generators)
                out.max_exp_residual = max(out.max_exp_residual, res)
        members = (True, flags.in_Id, flags.in_dlc, flags.in_dd)
        for name, inside in zip(SETS, members):
            if inside:
                out.counts[name].samples += 1
                out.counts[name].embeddable += embeddable
    return out


def _shards(cfg: CensusConfig) -> List[tuple]:
    jobs, start, shard = [], 0, 0
    while start < cfg.sample_count:
        count = min(SHARD_SIZE, cfg.sample_count - start)
        jobs.append((cfg.seed, shard, count, cfg.tol))
        start += count
        shard += 1
    return jobs


def run_census(cfg: CensusConfig) -> CensusResult:
    """Sample, classify membership, decide embeddability, aggregate.

    Results depend only on ``(sample_count, seed)``: the sample index space
    is cut into fixed-size shards, each with its own derived stream, so the
    worker count does not change the outcome.
    """
    t0 = time.perf_counter()
    jobs = _shards(cfg)
    total = CensusResult(sample_count=cfg.sample_count, seed=cfg.seed)
    if cfg.workers == 1 or len(jobs) == 1:
        parts = map(_run_shard, jobs)
        for part in parts:
            total.merge(part)
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for part in pool.map(_run_shard, jobs):
                total.merge(part)
    total.runtime_s = time.perf_counter() - t0
    return total


def binomial_interval(p: float, n: int, z: float = 2.5758293035489004) -> tuple:
    """Normal-approximation interval for the count of successes in ``n`` trials."""
    mean = n * p
    half = z * math.sqrt(n * p * (1.0 - p))
    return mean - half, mean + half


# published embeddable percentages from a 10^7-sample run, per set
REFERENCE_PERCENT = {"Delta": 0.05774, "Delta_Id": 0.11553, "Delta_dlc": 3.67987, "Delta_dd": 12.06132}


def census_summary(result: CensusResult, reference: Optional[Dict[str, float]] = None) -> str:
    """Plain-text table of per-set counts, optionally beside reference percentages."""
    lines = [f"samples: {result.sample_count}  seed: {result.seed}  rng: {result.rng_algorithm}"]
    for s in SETS:
        c = result.counts[s]
        line = (f"{s:<10} samples {c.samples:>9}  embeddable {c.embeddable:>7}  "
                f"percent {c.percentage:.6g}")
        if reference and s in reference:
            line += f"  reference {reference[s]:.6g}"
        lines.append(line)
    lines.append(f"max exp residual: {result.max_exp_residual:.3g}")
    if result.unsupported:
        lines.append(f"unsupported draws: {result.unsupported}")
    lines.append(f"runtime: {result.runtime_s:.3g} s")
    return "\n".join(lines)
