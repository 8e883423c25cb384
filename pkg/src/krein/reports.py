"""Result records returned by verifiers and harnesses."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = "1"


def _plain(v):
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v) or math.isinf(v):
            return repr(v)  # JSON has no inf/nan
        return v
    return v


@dataclass
class Report:
    """Outcome of one check: named margins (``>= 0`` means satisfied) plus details."""

    name: str
    passed: bool
    margins: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "passed": bool(self.passed),
            "margins": _plain(self.margins),
            "details": _plain(self.details),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary(self) -> str:
        worst = min(self.margins.values(), default=float("nan"))
        return f"{self.name}: {'PASS' if self.passed else 'FAIL'} (min margin {worst:.3g})"
