"""Action-spec files and the bundled presets."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .action import ActionSpec, build_action
from .field import DEFAULT_PRECISION, build_field, parse_element

PRESETS = ("octic", "cubic-cartan")


def load_spec(data: dict, precision: int | None = None) -> ActionSpec:
    if "min_poly" not in data or "generators" not in data:
        raise ValueError("action spec needs 'min_poly' and 'generators'")
    prec = int(precision or data.get("precision", DEFAULT_PRECISION))
    field = build_field([int(c) for c in data["min_poly"]], prec)
    gens = [parse_element(field, g) for g in data["generators"]]
    return build_action(field, gens)


def read_preset(name: str) -> dict:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    text = resources.files("rigidlab.presets").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def load_preset(name: str, precision: int | None = None) -> ActionSpec:
    return load_spec(read_preset(name), precision)


def load_action_file(path: str | Path, precision: int | None = None) -> ActionSpec:
    return load_spec(json.loads(Path(path).read_text()), precision)
