"""Machine-readable embeddability reports and their text rendering."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, List, Optional

import numpy as np

from .identifiability import IdentifiabilityClass, classify_identifiability
from .matrices import Branch, exp_residual
from .spectral import det_shortcut, det_threshold
from .tolerances import DEFAULT_TOL, ToleranceConfig

SCHEMA_VERSION = "1"


def plain(obj: Any) -> Any:
    """Convert numpy values and tuples to JSON-ready Python; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return [plain(obj.real), plain(obj.imag)]
    return obj


@dataclass
class GeneratorRecord:
    """A generator as reported: entries, origin and ``||exp(Q) - M||_F``."""

    matrix: List[List[float]]
    branch: Branch
    exp_residual: float

    def to_dict(self) -> dict:
        return {"matrix": self.matrix, "branch": self.branch.to_dict(),
                "exp_residual": self.exp_residual}

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorRecord":
        return cls(data["matrix"], Branch.from_dict(data["branch"]), data["exp_residual"])

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)


@dataclass
class EmbeddabilityReport:
    """Verdict for one input matrix.

    ``embeddable`` is None when the input falls outside what the solvers
    support; ``case`` then reads ``"Unsupported"``.
    """

    matrix: List[List[float]]
    n: int
    det: float
    case: str
    embeddable: Optional[bool]
    generators: List[GeneratorRecord] = field(default_factory=list)
    identifiability: Optional[IdentifiabilityClass] = None
    solutions: List[dict] = field(default_factory=list)
    eigenvalues: List[List[float]] = field(default_factory=list)
    bounds: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    confidence: str = "normal"
    diagonally_dominant: bool = False
    schema_version: str = SCHEMA_VERSION

    def generator_arrays(self) -> List[np.ndarray]:
        return [g.as_array() for g in self.generators]

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "input": {"matrix": self.matrix, "n": self.n, "det": self.det},
            "case": self.case,
            "embeddable": self.embeddable,
            "generators": [g.to_dict() for g in self.generators],
            "identifiability": self.identifiability.to_dict() if self.identifiability else None,
            "solutions": self.solutions,
            "eigenvalues": self.eigenvalues,
            "bounds": self.bounds,
            "diagnostics": self.diagnostics,
            "warnings": self.warnings,
            "confidence": self.confidence,
            "diagonally_dominant": self.diagonally_dominant,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EmbeddabilityReport":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema version {version!r}")
        ident = data.get("identifiability")
        return cls(
            matrix=data["input"]["matrix"], n=data["input"]["n"], det=data["input"]["det"],
            case=data["case"], embeddable=data["embeddable"],
            generators=[GeneratorRecord.from_dict(g) for g in data["generators"]],
            identifiability=IdentifiabilityClass.from_dict(ident) if ident else None,
            solutions=data.get("solutions", []), eigenvalues=data.get("eigenvalues", []),
            bounds=data.get("bounds", {}), diagnostics=data.get("diagnostics", {}),
            warnings=data.get("warnings", []), confidence=data.get("confidence", "normal"),
            diagonally_dominant=data.get("diagonally_dominant", False),
            schema_version=version)

    def to_json(self, indent: Optional[int] = 2) -> str:
        # json writes floats with repr, the shortest string that round-trips exactly
        return json.dumps(self.to_dict(), indent=indent, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> "EmbeddabilityReport":
        return cls.from_dict(json.loads(text))


def build_report(M, verdict, tol: ToleranceConfig = DEFAULT_TOL,
                 eigenvalues=None) -> EmbeddabilityReport:
    """Assemble a report from a solver verdict (or None for unsupported input)."""
    a = np.asarray(M, dtype=float)
    n = a.shape[0]
    det = float(np.linalg.det(a))
    if eigenvalues is None:
        eigenvalues = np.linalg.eigvals(a)
    report = EmbeddabilityReport(
        matrix=plain(a), n=n, det=plain(det), case="Unsupported", embeddable=None,
        eigenvalues=[plain(complex(v)) for v in eigenvalues],
        diagonally_dominant=bool(np.all(np.diag(a) >= 0.5)))
    report.bounds["det_threshold"] = det_threshold(n)
    report.bounds["det_shortcut"] = bool(det_shortcut(a))
    report.diagnostics["tolerance"] = tol.to_dict()
    if verdict is None:
        return report

    report.case = verdict.case
    report.embeddable = bool(verdict.embeddable)
    report.confidence = verdict.confidence
    report.warnings = list(verdict.warnings)
    report.bounds.update(plain(verdict.bounds))
    report.diagnostics.update(plain(verdict.diagnostics))
    report.solutions = [plain(s.to_dict()) for s in verdict.solutions]
    for g in verdict.generators:
        res = exp_residual(g.matrix, a)
        if res >= tol.reconstruct_tol:
            report.warnings.append(f"generator {g.branch.to_dict()} has exp residual {res:.3e}")
        report.generators.append(GeneratorRecord(plain(g.matrix), g.branch, res))
    report.identifiability = classify_identifiability(report)
    return report


def _fmt(v) -> str:
    return "nan" if v is None else f"{v:.6g}"


def render_text(report: EmbeddabilityReport, all_generators: bool = False) -> str:
    """Human-readable summary with 6 significant digits."""
    if report.embeddable is None:
        verdict = "unsupported"
    else:
        verdict = "embeddable" if report.embeddable else "not embeddable"
    lines = [f"verdict: {verdict}", f"case: {report.case}",
             f"n: {report.n}  det: {_fmt(report.det)}"]
    if report.identifiability is not None:
        lines.append(f"identifiability: {report.identifiability.describe()}")
    for key in ("L", "U", "k_range", "branch_bounds", "generator_count_bound"):
        if key in report.bounds:
            lines.append(f"{key}: {report.bounds[key]}")
    if report.case == "CaseIII":
        for s in report.solutions:
            lines.append(f"k={s['k']}: {s['cardinality_class']}")
    shown = report.generators if all_generators else report.generators[:1]
    for g in shown:
        lines.append(f"generator {g.branch.to_dict()}  exp residual {g.exp_residual:.3g}")
        lines.extend("  " + " ".join(f"{_fmt(v):>12}" for v in row) for row in g.matrix)
    hidden = len(report.generators) - len(shown)
    if hidden > 0:
        lines.append(f"({hidden} more generators; use --all-generators)")
    if report.case == "CaseIII" and all_generators and report.generators:
        lines.append("note: one representative per k; a cut polyhedron holds infinitely many")
    if report.confidence != "normal":
        lines.append(f"confidence: {report.confidence}")
    lines.extend(f"warning: {w}" for w in report.warnings)
    return "\n".join(lines)
