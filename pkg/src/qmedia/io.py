"""Loading bundled fixtures and JSON files."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Union

from .words import GPPresentation, presentation_from_json

GRAPH_PRODUCT_FIXTURES = ["z3", "p4_z2", "triangle_z3", "c4_z2", "free_z2_z3", "path3_mixed"]


def fixture_path(name: str) -> Path:
    if not name.endswith(".json"):
        name += ".json"
    return Path(str(resources.files("qmedia") / "fixtures" / name))


def load_json(path: Union[str, Path]) -> dict:
    with open(path) as fh:
        return json.load(fh)


def load_fixture(name: str) -> dict:
    return load_json(fixture_path(name))


def resolve(name_or_path: Union[str, Path]) -> Path:
    """An existing file, else the bundled fixture with the same base name."""
    path = Path(name_or_path)
    if path.exists():
        return path
    bundled = fixture_path(path.name)
    if bundled.exists():
        return bundled
    raise FileNotFoundError(f"no such file or bundled fixture: {name_or_path}")


def load_input(name_or_path: Union[str, Path]) -> dict:
    return load_json(resolve(name_or_path))


def load_presentation(name_or_path: Union[str, Path]) -> GPPresentation:
    return presentation_from_json(load_input(name_or_path))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)
