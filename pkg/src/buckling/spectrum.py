"""Validated eigenvalue spectra and their JSON / CSV file formats.

JSON layout::

    {"problem": "buckling", "geometry": "euclidean", "dimension": 2,
     "values": [14.68, 26.37], "meta": {...}}

CSV layout: optional ``# key=value`` header lines (problem, geometry,
dimension, meta as a JSON object) followed by one value per line.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    EmptyInput,
    NonPositiveEigenvalue,
    ParseError,
    SchemaError,
    SpectrumIOError,
)

PROBLEMS = ("buckling", "membrane")
GEOMETRIES = ("euclidean", "sphere")
DEFAULT_MULTIPLICITY_TOLERANCE = 1e-8


@dataclass(frozen=True)
class Spectrum:
    """Ascending, strictly positive eigenvalues with their problem tags.

    Build instances through :func:`validate_spectrum`; the constructor does
    not sort or check anything.
    """

    values: tuple
    problem: str = "buckling"
    geometry: str = "euclidean"
    dimension: int = 2
    multiplicity_tolerance: float = DEFAULT_MULTIPLICITY_TOLERANCE
    provenance: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.values)

    @property
    def above_sphere_threshold(self) -> bool:
        """False when a sphere spectrum with n >= 3 has some value <= n - 2."""
        if self.geometry != "sphere" or self.dimension < 3:
            return True
        return all(v > self.dimension - 2 for v in self.values)

    @property
    def clusters(self) -> list:
        """Multiplicity clusters as tuples of 1-based indices (size >= 2)."""
        return multiplicity_clusters(self.values, self.multiplicity_tolerance)

    def prefix(self, k: int) -> "SpectrumPrefix":
        return SpectrumPrefix(self, k)


@dataclass(frozen=True)
class SpectrumPrefix:
    """The leading ``k`` eigenvalues of a spectrum."""

    parent: Spectrum
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= len(self.parent.values):
            raise ValueError(
                f"prefix length k={self.k} outside 1..{len(self.parent.values)}")

    @property
    def values(self) -> tuple:
        return self.parent.values[: self.k]

    @property
    def dimension(self) -> int:
        return self.parent.dimension

    @property
    def geometry(self) -> str:
        return self.parent.geometry

    @property
    def problem(self) -> str:
        return self.parent.problem

    @property
    def last(self) -> float:
        return self.parent.values[self.k - 1]

    @property
    def next_value(self):
        """Lambda_{k+1} when the parent holds it, else None."""
        if self.k < len(self.parent.values):
            return self.parent.values[self.k]
        return None


def multiplicity_clusters(values: Sequence[float], rtol: float) -> list:
    clusters = []
    current = [1]
    for i in range(1, len(values)):
        lo, hi = values[i - 1], values[i]
        if (hi - lo) < rtol * hi:
            current.append(i + 1)
        else:
            if len(current) > 1:
                clusters.append(tuple(current))
            current = [i + 1]
    if len(current) > 1:
        clusters.append(tuple(current))
    return clusters


def validate_spectrum(
    values,
    problem: str = "buckling",
    geometry: str = "euclidean",
    dimension: int = 2,
    multiplicity_tolerance: float = DEFAULT_MULTIPLICITY_TOLERANCE,
    provenance: dict | None = None,
) -> Spectrum:
    """Sort, check and tag raw eigenvalues.

    A :class:`Spectrum` may be passed in place of ``values``; its tags are
    kept, which makes the function idempotent.
    """
    if isinstance(values, Spectrum):
        src = values
        values = src.values
        problem, geometry, dimension = src.problem, src.geometry, src.dimension
        multiplicity_tolerance = src.multiplicity_tolerance
        provenance = dict(src.provenance) if provenance is None else provenance

    if problem not in PROBLEMS:
        raise SchemaError(f"problem must be one of {PROBLEMS}, got {problem!r}")
    if geometry not in GEOMETRIES:
        raise SchemaError(f"geometry must be one of {GEOMETRIES}, got {geometry!r}")
    if isinstance(dimension, bool) or int(dimension) != dimension or dimension < 2:
        raise SchemaError(f"dimension must be an integer >= 2, got {dimension!r}")
    if not multiplicity_tolerance >= 0:
        raise ValueError("multiplicity_tolerance must be non-negative")

    vals = [float(v) for v in values]
    if not vals:
        raise EmptyInput("spectrum has no values")
    for i, v in enumerate(vals):
        if not math.isfinite(v):
            raise NonPositiveEigenvalue(f"value #{i + 1} is not finite: {v!r}")
        if v <= 0.0:
            raise NonPositiveEigenvalue(f"value #{i + 1} is not positive: {v!r}")
    vals.sort()
    return Spectrum(
        values=tuple(vals),
        problem=problem,
        geometry=geometry,
        dimension=int(dimension),
        multiplicity_tolerance=float(multiplicity_tolerance),
        provenance=dict(provenance or {}),
    )


def _infer_format(path: Path, fmt):
    if fmt is not None:
        fmt = fmt.lower()
        if fmt not in ("json", "csv"):
            raise ValueError(f"unknown spectrum format {fmt!r}")
        return fmt
    return "csv" if path.suffix.lower() == ".csv" else "json"


def spectrum_to_dict(spectrum: Spectrum) -> dict:
    out = {
        "problem": spectrum.problem,
        "geometry": spectrum.geometry,
        "dimension": spectrum.dimension,
        "values": list(spectrum.values),
    }
    if spectrum.provenance:
        out["meta"] = spectrum.provenance
    return out


def spectrum_from_dict(doc) -> Spectrum:
    if not isinstance(doc, dict):
        raise SchemaError("spectrum document must be a JSON object")
    for key in ("problem", "geometry", "dimension", "values"):
        if key not in doc:
            raise SchemaError(f"missing required key {key!r}")
    values = doc["values"]
    if not isinstance(values, list):
        raise SchemaError("'values' must be an array")
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError("non-numeric eigenvalue", field=f"values[{i}]")
    meta = doc.get("meta") or {}
    if not isinstance(meta, dict):
        raise SchemaError("'meta' must be an object")
    return validate_spectrum(
        values,
        problem=doc["problem"],
        geometry=doc["geometry"],
        dimension=doc["dimension"],
        provenance=meta,
    )


def dumps_spectrum(spectrum: Spectrum, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(spectrum_to_dict(spectrum), indent=2, sort_keys=True) + "\n"
    lines = [
        f"# problem={spectrum.problem}",
        f"# geometry={spectrum.geometry}",
        f"# dimension={spectrum.dimension}",
    ]
    if spectrum.provenance:
        lines.append("# meta=" + json.dumps(spectrum.provenance, sort_keys=True))
    lines.append("value")
    # repr() is the shortest string that round-trips a double exactly
    lines.extend(repr(float(v)) for v in spectrum.values)
    return "\n".join(lines) + "\n"


def _parse_csv(text: str) -> Spectrum:
    tags = {}
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" not in body:
                continue
            key, _, val = body.partition("=")
            tags[key.strip()] = val.strip()
            continue
        cell = line.split(",")[0].strip()
        try:
            values.append(float(cell))
        except ValueError:
            if not values and cell.lower() in ("value", "values", "eigenvalue"):
                continue
            raise ParseError(f"cannot parse {cell!r} as a number", line=lineno,
                             field="value") from None
    for key in ("problem", "geometry", "dimension"):
        if key not in tags:
            raise SchemaError(f"CSV header is missing '# {key}=...'")
    try:
        dimension = int(tags["dimension"])
    except ValueError:
        raise ParseError("dimension is not an integer", field="dimension") from None
    meta = {}
    if "meta" in tags:
        try:
            meta = json.loads(tags["meta"])
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad meta JSON: {exc.msg}", field="meta") from None
    return validate_spectrum(values, problem=tags["problem"],
                             geometry=tags["geometry"], dimension=dimension,
                             provenance=meta)


def loads_spectrum(text: str, fmt: str = "json") -> Spectrum:
    if fmt == "csv":
        return _parse_csv(text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", line=exc.lineno,
                         field=f"column {exc.colno}") from None
    return spectrum_from_dict(doc)


def read_spectrum_file(path, format: str | None = None) -> Spectrum:
    path = Path(path)
    fmt = _infer_format(path, format)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpectrumIOError(f"cannot read {path}: {exc}") from exc
    return loads_spectrum(text, fmt)


def write_spectrum_file(spectrum: Spectrum, path, format: str | None = None) -> None:
    path = Path(path)
    fmt = _infer_format(path, format)
    try:
        path.write_text(dumps_spectrum(spectrum, fmt))
    except OSError as exc:
        raise SpectrumIOError(f"cannot write {path}: {exc}") from exc


def merge_mode_values(per_mode: Iterable[tuple]) -> list:
    """Flatten ``(m, values)`` pairs into one ascending list.

    Values of modes m >= 1 are emitted twice (cos / sin pair).
    """
    merged = []
    for m, vals in per_mode:
        reps = 1 if m == 0 else 2
        for v in vals:
            merged.extend([float(v)] * reps)
    merged.sort()
    return merged
