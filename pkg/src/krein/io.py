"""JSON files for strings, spectra and manifests; deterministic CSV output."""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import jsonschema
import numpy as np

from .errors import InvalidSpectrum, InvalidString
from .scales import Power, PowerLog, ScaleFunction, Tabulated
from .spectral import SpectralMeasure
from .strings import StieltjesString

__all__ = [
    "string_from_dict",
    "string_to_dict",
    "load_string",
    "save_string",
    "spectrum_from_dict",
    "spectrum_to_dict",
    "load_spectrum",
    "save_spectrum",
    "MANIFEST_SCHEMA",
    "load_manifest",
    "scale_from_dict",
    "parse_grid",
    "format_csv",
]

_NUM = {"type": "number"}
_INF = {"anyOf": [_NUM, {"enum": ["inf"]}]}

STRING_SCHEMA = {
    "type": "object",
    "properties": {
        "label": {"type": "string"},
        "atoms": {"type": "array", "minItems": 1, "items": {
            "type": "object", "properties": {"x": _NUM, "w": _NUM},
            "required": ["x", "w"], "additionalProperties": False}},
        "l": _INF,
    },
    "required": ["atoms"],
    "additionalProperties": False,
}

SPECTRUM_SCHEMA = {
    "type": "object",
    "properties": {
        "atoms": {"type": "array", "items": {
            "type": "object", "properties": {"xi": _NUM, "w": _NUM},
            "required": ["xi", "w"], "additionalProperties": False}},
        "a": _NUM,
    },
    "required": ["atoms"],
    "additionalProperties": False,
}

SCALE_SCHEMA = {
    "oneOf": [
        {"type": "object", "properties": {"kind": {"const": "power"}, "alpha": _NUM},
         "required": ["kind", "alpha"], "additionalProperties": False},
        {"type": "object", "properties": {"kind": {"const": "powerlog"}, "alpha": _NUM, "c": _NUM},
         "required": ["kind", "alpha", "c"], "additionalProperties": False},
        {"type": "object", "properties": {"kind": {"const": "tabulated"},
                                          "xs": {"type": "array", "items": _NUM},
                                          "ys": {"type": "array", "items": _NUM}},
         "required": ["kind", "xs", "ys"], "additionalProperties": False},
    ]
}

_NUM_LIST = {"type": "array", "items": _NUM}

MANIFEST_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"const": "1"},
        "operation": {"enum": ["converge"]},
        "inputs": {
            "type": "object",
            "properties": {
                "strings": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "spectra": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                "limit": {"type": "string"},
            },
            "oneOf": [{"required": ["strings"]}, {"required": ["spectra"]}],
            "additionalProperties": False,
        },
        "conditions": {"type": "array", "minItems": 1,
                       "items": {"enum": ["A", "B", "C", "D", "A'", "C'", "D'", "A''", "C''", "D''"]}},
        "phi": SCALE_SCHEMA,
        "parameters": {
            "type": "object",
            "properties": {
                "tol": _NUM,
                "boundary": _NUM,
                "grid": _NUM_LIST,
                "x_ladder": _NUM_LIST,
                "xi_grid": _NUM_LIST,
                "t_grid": _NUM_LIST,
                "lam_grid": _NUM_LIST,
                "N_ladder": _NUM_LIST,
                "eps_ladder": _NUM_LIST,
            },
            "additionalProperties": False,
        },
        "output": {"type": "string"},
    },
    "required": ["operation", "inputs", "conditions"],
    "additionalProperties": False,
}


def _read_json(path, exc):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise exc(f"{path}: {e}") from e


def _validate(doc, schema, exc, where=""):
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as e:
        raise exc(f"{where}{e.message}") from e


def string_from_dict(d: dict) -> StieltjesString:
    _validate(d, STRING_SCHEMA, InvalidString)
    l = d.get("l", "inf")
    l = math.inf if l == "inf" else float(l)
    xs = [a["x"] for a in d["atoms"]]
    ws = [a["w"] for a in d["atoms"]]
    return StieltjesString(xs, ws, l, d.get("label", ""))


def string_to_dict(s: StieltjesString) -> dict:
    return {
        "label": s.label,
        "atoms": [{"x": float(x), "w": float(w)} for x, w in zip(s.positions, s.masses)],
        "l": "inf" if math.isinf(s.l) else float(s.l),
    }


def load_string(path) -> StieltjesString:
    return string_from_dict(_read_json(path, InvalidString))


def save_string(s: StieltjesString, path) -> None:
    Path(path).write_text(json.dumps(string_to_dict(s), indent=2) + "\n")


def spectrum_from_dict(d: dict) -> SpectralMeasure:
    _validate(d, SPECTRUM_SCHEMA, InvalidSpectrum)
    xi = [a["xi"] for a in d["atoms"]]
    w = [a["w"] for a in d["atoms"]]
    return SpectralMeasure(xi, w, None, d.get("a"))


def spectrum_to_dict(sigma: SpectralMeasure) -> dict:
    out = {"atoms": [{"xi": float(x), "w": float(w)} for x, w in zip(sigma.xi, sigma.weights)]}
    if sigma.boundary is not None:
        out["a"] = float(sigma.boundary)
    return out


def load_spectrum(path) -> SpectralMeasure:
    return spectrum_from_dict(_read_json(path, InvalidSpectrum))


def save_spectrum(sigma: SpectralMeasure, path) -> None:
    Path(path).write_text(json.dumps(spectrum_to_dict(sigma), indent=2) + "\n")


def scale_from_dict(d: dict) -> ScaleFunction:
    _validate(d, SCALE_SCHEMA, ValueError, "scale function: ")
    kind = d["kind"]
    if kind == "power":
        return Power(float(d["alpha"]))
    if kind == "powerlog":
        return PowerLog(float(d["alpha"]), float(d["c"]))
    return Tabulated(tuple(d["xs"]), tuple(d["ys"]))


def load_manifest(path) -> dict:
    """Validated manifest with input paths resolved against the manifest's directory."""
    doc = _read_json(path, ValueError)
    _validate(doc, MANIFEST_SCHEMA, ValueError, "manifest: ")
    base = Path(path).resolve().parent
    inputs = doc["inputs"]
    for key in ("strings", "spectra"):
        if key in inputs:
            inputs[key] = [str(base / p) for p in inputs[key]]
    if "limit" in inputs:
        inputs["limit"] = str(base / inputs["limit"])
    if "output" in doc:
        doc["output"] = str(base / doc["output"])
    return doc


def parse_grid(spec: str) -> np.ndarray:
    """``lo:hi:n`` (linear), ``geom:lo:hi:n`` (geometric) or a comma list."""
    spec = spec.strip()
    try:
        if spec.startswith("geom:"):
            lo, hi, n = spec[5:].split(":")
            return np.geomspace(float(lo), float(hi), int(n))
        if ":" in spec:
            lo, hi, n = spec.split(":")
            return np.linspace(float(lo), float(hi), int(n))
        return np.array([float(v) for v in spec.split(",") if v.strip()])
    except ValueError as e:
        raise ValueError(f"bad grid spec {spec!r}: {e}") from e


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def format_csv(header, rows) -> str:
    """CSV text with a header row; floats use ``repr`` so output is exact and stable."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()
