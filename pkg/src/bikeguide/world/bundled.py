"""Access to the map fixtures shipped inside the package."""

from __future__ import annotations

from importlib import resources
from typing import Tuple

from .mapdoc import parse_map
from .model import MapSpec

_MAPS_PACKAGE = __package__ + ".maps"


def bundled_map_names() -> Tuple[str, ...]:
    root = resources.files(_MAPS_PACKAGE)
    names = sorted(entry.name[:-len(".map")]
                   for entry in root.iterdir()
                   if entry.name.endswith(".map"))
    return tuple(names)


def load_bundled_map(name: str) -> MapSpec:
    root = resources.files(_MAPS_PACKAGE)
    candidate = root / f"{name}.map"
    if not candidate.is_file():
        known = ", ".join(bundled_map_names())
        raise KeyError(f"no bundled map {name!r} (have: {known})")
    return parse_map(candidate.read_text(encoding="utf-8"))
