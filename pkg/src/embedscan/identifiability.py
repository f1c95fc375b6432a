"""Rate identifiability: how many Markov generators an embeddable matrix has."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

UNIQUE = "UniqueGenerator"
FINITE = "FiniteCount"
INFINITE = "InfiniteFamily"
UNKNOWN = "UnknownAtLeastOne"
NOT_EMBEDDABLE = "NotEmbeddable"

# equal-input matrices above this determinant have a single generator
EQUAL_INPUT_DET = math.exp(-6.0 * math.pi)


@dataclass(frozen=True)
class IdentifiabilityClass:
    """Identifiability tag; ``count`` is set for ``FiniteCount`` only (and is >= 2)."""

    tag: str
    count: Optional[int] = None
    basis_facts: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.tag == FINITE and (self.count is None or self.count < 2):
            raise ValueError("FiniteCount needs a count of at least 2")

    def to_dict(self) -> dict:
        return {"tag": self.tag, "count": self.count, "basis_facts": list(self.basis_facts)}

    @classmethod
    def from_dict(cls, data: dict) -> "IdentifiabilityClass":
        return cls(data["tag"], data.get("count"), list(data.get("basis_facts", [])))

    def describe(self) -> str:
        return f"{self.tag}({self.count})" if self.tag == FINITE else self.tag


def _from_count(count: int, facts: List[str]) -> IdentifiabilityClass:
    if count <= 0:
        return IdentifiabilityClass(NOT_EMBEDDABLE, basis_facts=facts)
    if count == 1:
        return IdentifiabilityClass(UNIQUE, basis_facts=facts)
    return IdentifiabilityClass(FINITE, count, facts)


def classify_identifiability(report) -> Optional[IdentifiabilityClass]:
    """Identifiability class of a finished report.

    Returns None for unsupported input, where no verdict exists.
    """
    if report.embeddable is None:
        return None
    facts: List[str] = []
    if not report.embeddable:
        return IdentifiabilityClass(NOT_EMBEDDABLE, basis_facts=[f"case rule: {report.case}"])

    case = report.case
    if report.bounds.get("det_shortcut"):
        facts.append("determinant above the uniqueness threshold")
    dd = report.diagonally_dominant
    if dd:
        facts.append("diagonal entries all >= 0.5")

    if case in ("CaseI", "Defective2Blocks", "Defective3Block", "GeneralRepeated"):
        facts.append(f"case rule: {case} has a single candidate logarithm")
        return IdentifiabilityClass(UNIQUE, basis_facts=facts)
    if case == "CaseII":
        lo, hi = report.bounds["L"], report.bounds["U"]
        facts.append(f"case rule: CaseII count U - L + 1 with L={lo}, U={hi}")
        return _from_count(hi - lo + 1, facts)
    if case == "CaseIV":
        if report.det > EQUAL_INPUT_DET:
            facts.append("case rule: CaseIV with det > exp(-6 pi)")
            return IdentifiabilityClass(UNIQUE, basis_facts=facts)
        if dd:
            return IdentifiabilityClass(UNIQUE, basis_facts=facts)
        facts.append("case rule: CaseIV with det <= exp(-6 pi), only the principal log is listed")
        return IdentifiabilityClass(UNKNOWN, basis_facts=facts)
    if case == "CaseIII":
        classes = [s["cardinality_class"] for s in report.solutions]
        if "Infinite" in classes:
            facts.append("case rule: CaseIII sheet cuts a polyhedron")
            return IdentifiabilityClass(INFINITE, basis_facts=facts)
        count = sum(len(s["points"]) for s in report.solutions)
        facts.append("case rule: CaseIII tangency points summed over k")
        return _from_count(count, facts)
    if case == "GeneralDistinct":
        count = len(report.generators)
        bound = report.bounds.get("generator_count_bound")
        facts.append(f"case rule: all branches enumerated, determinant bound {bound}")
        return _from_count(count, facts)
    raise ValueError(f"no identifiability rule for case {case!r}")
