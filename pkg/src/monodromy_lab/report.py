"""Versioned JSON run reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

SCHEMA_ID = "monodromy-lab/run-report/1"


def _plain(obj):
    """Recursively convert numpy scalars/arrays and tuples into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


@dataclass
class RunReport:
    command: list
    system: str | None
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_json(self) -> dict:
        return _plain({
            "schema": SCHEMA_ID,
            "command": list(self.command),
            "system": self.system,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "diagnostics": self.diagnostics,
            "wall_time": self.wall_time,
        })

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def load_schema() -> dict:
    text = resources.files("monodromy_lab").joinpath("schema/run_report.schema.json").read_text("utf-8")
    return json.loads(text)
