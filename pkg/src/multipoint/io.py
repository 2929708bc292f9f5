"""On-disk formats: JSON scenes, datasets and reports; CSV tables.

Scene schema (version 1)::

    {
      "schema_version": 1,
      "dimension": 2,
      "scatterers": [{"y": [0.3, -0.2], "alpha": [1.0, 0.5]}, ...],
      "labels": ["a", ...]            # optional
    }

Complex numbers are stored as [re, im] pairs in JSON and as paired
``<name>_re``/``<name>_im`` columns in CSV.
"""

from __future__ import annotations

import csv
import datetime as _dt
import json
import math
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from .direct import ScattererSet
from .inverse import GAMMA_CONVENTION_ID, AmplitudeDataset, ReconstructionReport

__all__ = [
    "SCHEMA_VERSION",
    "SchemaError",
    "NonFiniteOutput",
    "RunManifest",
    "code_version",
    "scene_from_dict",
    "scene_to_dict",
    "load_scene",
    "save_scene",
    "dataset_to_dict",
    "dataset_from_dict",
    "load_dataset",
    "save_dataset",
    "report_to_dict",
    "write_json",
    "write_csv",
]

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    """Input file does not match the documented schema."""


class NonFiniteOutput(ArithmeticError):
    """A NaN or Inf reached an output table."""


def code_version() -> str:
    try:
        return metadata.version("multipoint")
    except metadata.PackageNotFoundError:
        return "unknown"


@dataclass
class RunManifest:
    command: str
    parameters: dict = field(default_factory=dict)
    code_version: str = field(default_factory=code_version)
    timestamp: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))

    def to_dict(self) -> dict:
        return asdict(self)


def _complex_pair(value, where: str) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise SchemaError(f"{where} must be a [re, im] pair of numbers")
    return complex(float(value[0]), float(value[1]))


def scene_from_dict(data) -> ScattererSet:
    if not isinstance(data, dict):
        raise SchemaError("scene must be a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {data.get('schema_version')!r}; expected {SCHEMA_VERSION}")
    d = data.get("dimension")
    if d not in (1, 2, 3):
        raise SchemaError("dimension must be 1, 2 or 3")
    items = data.get("scatterers")
    if not isinstance(items, list):
        raise SchemaError("scatterers must be a list")
    points, alphas = [], []
    for i, item in enumerate(items):
        if not isinstance(item, dict) or set(item) - {"y", "alpha"} or {"y", "alpha"} - set(item):
            raise SchemaError(f"scatterers[{i}] must have exactly the keys 'y' and 'alpha'")
        y = item["y"]
        if not isinstance(y, list) or len(y) != d or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in y):
            raise SchemaError(f"scatterers[{i}].y must be a list of {d} numbers")
        points.append([float(v) for v in y])
        alphas.append(_complex_pair(item["alpha"], f"scatterers[{i}].alpha"))
    labels = data.get("labels", [])
    if not isinstance(labels, list) or (labels and len(labels) != len(items)):
        raise SchemaError("labels must be a list with one entry per scatterer")
    try:
        return ScattererSet(d, np.reshape(points, (-1, d)), np.asarray(alphas, dtype=complex), tuple(map(str, labels)))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def scene_to_dict(s: ScattererSet) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "dimension": s.dimension,
        "scatterers": [
            {"y": [float(v) for v in y], "alpha": [float(a.real), float(a.imag)]}
            for y, a in zip(s.points, s.strengths)
        ],
    }
    if s.labels:
        out["labels"] = list(s.labels)
    return out


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc


def load_scene(path) -> ScattererSet:
    return scene_from_dict(_read_json(path))


def save_scene(s: ScattererSet, path) -> None:
    write_json(path, scene_to_dict(s))


def dataset_to_dict(ds: AmplitudeDataset, manifest: RunManifest | None = None) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "kind": "amplitude_dataset",
        "dimension": ds.dimension,
        "gamma_convention": ds.gamma_convention,
        "p_grid": ds.p_grid.tolist(),
        "energies": ds.energies.tolist(),
        "samples_re": ds.samples.real.tolist(),
        "samples_im": ds.samples.imag.tolist(),
    }
    if manifest is not None:
        out["manifest"] = manifest.to_dict()
    return out


def dataset_from_dict(data) -> AmplitudeDataset:
    if not isinstance(data, dict) or data.get("kind") != "amplitude_dataset":
        raise SchemaError("not an amplitude dataset")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {data.get('schema_version')!r}")
    try:
        samples = np.asarray(data["samples_re"], dtype=float) + 1j * np.asarray(data["samples_im"], dtype=float)
        return AmplitudeDataset(
            int(data["dimension"]),
            np.asarray(data["p_grid"], dtype=float),
            np.asarray(data["energies"], dtype=float),
            samples,
            str(data.get("gamma_convention", "")),
        )
    except KeyError as exc:
        raise SchemaError(f"dataset is missing field {exc}") from exc


def load_dataset(path) -> AmplitudeDataset:
    ds = dataset_from_dict(_read_json(path))
    if ds.gamma_convention != GAMMA_CONVENTION_ID:
        raise SchemaError(f"dataset uses gamma convention {ds.gamma_convention!r}, expected {GAMMA_CONVENTION_ID!r}")
    return ds


def save_dataset(ds: AmplitudeDataset, path, manifest: RunManifest | None = None) -> None:
    write_json(path, dataset_to_dict(ds, manifest))


def _jsonable(value):
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.complexfloating):
        return [float(value.real), float(value.imag)]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def report_to_dict(report: ReconstructionReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "reconstruction_report",
        "recovered": scene_to_dict(report.recovered),
        "stage_residuals": _jsonable(report.stage_residuals),
        "localization": _jsonable(report.localization),
        "diagnostics": _jsonable(report.diagnostics),
        "warnings": list(report.warnings),
    }


def _check_finite(obj, where="output"):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise NonFiniteOutput(f"non-finite value in {where}")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check_finite(v, f"{where}.{k}")
    elif isinstance(obj, list):
        for v in obj:
            _check_finite(v, where)


def write_json(path, data, *, require_finite: bool = True) -> None:
    data = _jsonable(data)
    if require_finite:
        _check_finite(data)
    text = json.dumps(data, indent=2, sort_keys=True, allow_nan=not require_finite) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def _fmt(value) -> str:
    value = float(value)
    if not math.isfinite(value):
        raise NonFiniteOutput("non-finite value in CSV table")
    return repr(value)


def write_csv(path, header, rows, comments=()) -> None:
    """Deterministic CSV: ``# comment`` lines, a header row, then ``repr`` floats."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
