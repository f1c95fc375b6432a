"""Numeric tolerance bundle used by every solver."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields, replace

ENV_VAR = "EMBEDSCAN_TOL"


@dataclass(frozen=True)
class ToleranceConfig:
    """Tolerances for float comparisons.

    Attributes
    ----------
    row_sum_tol : float
        Allowed deviation of a row sum from 1 (stochastic) or 0 (rate).
    nonneg_tol : float
        Allowed negativity of entries that should be non-negative.
    eig_distinct_rel_tol : float
        Relative gap below which two eigenvalues are merged.
    defect_rank_tol : float
        Relative singular-value threshold for geometric multiplicity.
    reconstruct_tol : float
        Frobenius tolerance for exp/log round trips and imaginary residues.
    jordan_merge_tol : float
        Looser relative gap under which eigenvalues with nearly parallel
        eigenvectors are merged; a Jordan block of size m splits by about
        eps**(1/m), far above ``eig_distinct_rel_tol``.
    """

    row_sum_tol: float = 1e-10
    nonneg_tol: float = 1e-9
    eig_distinct_rel_tol: float = 1e-8
    defect_rank_tol: float = 1e-9
    reconstruct_tol: float = 1e-8
    jordan_merge_tol: float = 1e-4

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and value > 0):
                raise ValueError(f"{f.name} must be strictly positive, got {value!r}")
        if self.nonneg_tol < self.row_sum_tol:
            raise ValueError("nonneg_tol must be >= row_sum_tol")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ToleranceConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown tolerance fields: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})

    @classmethod
    def parse(cls, text: str, base: "ToleranceConfig | None" = None) -> "ToleranceConfig":
        """Build from a scalar or a JSON object.

        A bare number sets both ``row_sum_tol`` and ``nonneg_tol``; a JSON
        object overrides the named fields of `base`.
        """
        base = base or cls()
        text = text.strip()
        if text.startswith("{"):
            data = json.loads(text)
            merged = base.to_dict()
            merged.update(data)
            return cls.from_dict(merged)
        eps = float(text)
        return replace(base, row_sum_tol=eps, nonneg_tol=eps)


def resolve_tolerance(flag: str | None = None, environ=None) -> ToleranceConfig:
    """Precedence: explicit flag, then ``EMBEDSCAN_TOL``, then defaults."""
    environ = os.environ if environ is None else environ
    if flag is not None:
        return ToleranceConfig.parse(flag)
    env = environ.get(ENV_VAR)
    if env:
        return ToleranceConfig.parse(env)
    return ToleranceConfig()


DEFAULT_TOL = ToleranceConfig()
