"""Reading Markov matrices from CSV or JSON text."""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path
from typing import List, Optional, TextIO, Union

from .errors import ParseError
from .matrices import StochasticMatrix, validate_markov
from .tolerances import DEFAULT_TOL, ToleranceConfig

FORMATS = ("csv", "json")


def _number(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token.strip()!r}", line) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value: {token.strip()!r}", line)
    return value


def parse_csv(text: str) -> List[List[float]]:
    """Rows of comma-separated decimals; blank lines and ``#`` comments are skipped."""
    rows, width = [], None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        row = [_number(tok, lineno) for tok in line.split(",")]
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"row has {len(row)} entries, expected {width}", lineno)
        rows.append(row)
    if not rows:
        raise ParseError("no matrix rows found")
    return rows


def parse_json(text: str) -> List[List[float]]:
    """An object ``{"matrix": [[...], ...]}``; a bare list of rows is also accepted."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    rows = data.get("matrix") if isinstance(data, dict) else data
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError('expected {"matrix": [[...], ...]}')
    width = len(rows[0])
    out = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"row {i} has {len(row)} entries, expected {width}")
        vals = []
        for v in row:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ParseError(f"row {i}: not a finite number: {v!r}")
            vals.append(float(v))
        out.append(vals)
    return out


def detect_format(path: Optional[Union[str, Path]], text: str) -> str:
    if path is not None and str(path) != "-":
        suffix = Path(path).suffix.lower()
        if suffix == ".json":
            return "json"
        if suffix in (".csv", ".txt"):
            return "csv"
    return "json" if text.lstrip().startswith(("{", "[")) else "csv"


def parse_matrix(source: Union[str, Path, TextIO, None] = None, format: Optional[str] = None,
                 tol: ToleranceConfig = DEFAULT_TOL) -> StochasticMatrix:
    """Read and validate a Markov matrix.

    Parameters
    ----------
    source : path, ``"-"``, file object or None
        ``"-"`` and None read standard input.
    format : {"csv", "json"}, optional
        Guessed from the file extension, then from the content.
    tol : ToleranceConfig

    Raises
    ------
    ParseError
        Malformed text, ragged rows or non-numeric entries.
    ValidationError
        The parsed matrix is not Markov.
    """
    path = None
    if source is None or str(source) == "-":
        text = sys.stdin.read()
    elif hasattr(source, "read"):
        text = source.read()
    else:
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    fmt = format or detect_format(path, text)
    if fmt not in FORMATS:
        raise ParseError(f"unknown format {fmt!r}")
    rows = parse_csv(text) if fmt == "csv" else parse_json(text)
    return validate_markov(rows, tol)
