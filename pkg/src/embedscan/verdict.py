"""Solver outcome shared by every embeddability path."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

from .matrices import GeneratorCandidate


@dataclass
class Verdict:
    """Outcome of one solver path before identifiability is attached.

    ``solutions`` holds per-k records for the repeated-eigenvalue case;
    ``confidence`` drops to ``"low"`` when a basis is ill-conditioned.
    """

    case: str
    embeddable: bool
    generators: List[GeneratorCandidate] = field(default_factory=list)
    bounds: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    solutions: list = field(default_factory=list)
    confidence: str = "normal"
