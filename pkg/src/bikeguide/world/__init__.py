"""Bike-collection world: map schema, text format, compilation, generation."""

from .model import (
    Bike,
    Landmark,
    MapSpec,
    MapValidationError,
    PartialReport,
)
from .mapdoc import MapDocumentError, load_map, parse_map, serialize_map
from .compile import CompiledMap, compile_map
from .generate import GenerationError, generate_map
from .bundled import bundled_map_names, load_bundled_map

__all__ = [
    "Bike",
    "CompiledMap",
    "GenerationError",
    "Landmark",
    "MapDocumentError",
    "MapSpec",
    "MapValidationError",
    "PartialReport",
    "bundled_map_names",
    "compile_map",
    "generate_map",
    "load_bundled_map",
    "load_map",
    "parse_map",
    "serialize_map",
]
