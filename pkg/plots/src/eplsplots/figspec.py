"""Figure specifications and their JSON form.

A figures file is either a single spec object, a list of them, or
``{"figures": [...]}``. Each spec names a figure kind, the CSV input(s),
the output image path, and optional panel labels that end up in the title:

    {
      "kind": "CoordinateEnvelope",
      "inputs": ["results/panel_indep_gamma0.1_tau-0.1.csv"],
      "output": "figures/envelope.png",
      "labels": {"gamma": 0.1, "tau": -0.1, "kappa": 0.5}
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

KINDS = ("CoordinateEnvelope", "MeanRank", "TailCovBand")

_FIELDS = {"kind", "inputs", "input", "output", "labels"}


class SpecError(ValueError):
    """A figure spec that cannot be rendered as written."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown figure kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if not self.inputs or any(not isinstance(p, str) or not p for p in self.inputs):
            raise SpecError("inputs must be one or more non-empty CSV paths")
        if self.kind != "CoordinateEnvelope" and len(self.inputs) != 1:
            raise SpecError(f"{self.kind} takes exactly one input CSV, got {len(self.inputs)}")
        if not isinstance(self.output, str) or not self.output:
            raise SpecError("output image path required")
        if not isinstance(self.labels, dict):
            raise SpecError("labels must be an object")


def spec_from_mapping(obj) -> FigureSpec:
    """Build a FigureSpec from one parsed JSON object."""
    if not isinstance(obj, dict):
        raise SpecError(f"figure spec must be an object, got {type(obj).__name__}")
    unknown = set(obj) - _FIELDS
    if unknown:
        raise SpecError(f"unknown figure spec fields: {', '.join(sorted(unknown))}")
    if "inputs" in obj and "input" in obj:
        raise SpecError("give either 'input' or 'inputs', not both")
    inputs = obj.get("inputs", obj.get("input", ()))
    if isinstance(inputs, str):
        inputs = (inputs,)
    elif isinstance(inputs, list):
        inputs = tuple(inputs)
    else:
        raise SpecError("inputs must be a path or a list of paths")
    return FigureSpec(
        kind=obj.get("kind", ""),
        inputs=inputs,
        output=obj.get("output", ""),
        labels=obj.get("labels", {}),
    )


def load_specs(path) -> list[FigureSpec]:
    """Parse a figures file into the list of specs it describes."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if isinstance(payload, dict) and "figures" in payload:
        items = payload["figures"]
        if not isinstance(items, list):
            raise SpecError("'figures' must be a list of figure specs")
    elif isinstance(payload, list):
        items = payload
    else:
        items = [payload]
    if not items:
        raise SpecError(f"{path}: no figure specs found")
    return [spec_from_mapping(item) for item in items]
