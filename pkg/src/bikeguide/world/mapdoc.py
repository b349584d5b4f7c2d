"""The sectioned text format maps are stored in.

Line-oriented and human-editable; see docs/map-format.md for the field
reference. `serialize_map` emits a canonical ordering (sorted ids), so a
given MapSpec always produces the same bytes. Parsing is strict: every
diagnostic carries the offending line number.
"""

from __future__ import annotations

from pathlib import Path
from typing import List, Tuple

from .model import Bike, Landmark, MapSpec, PartialReport

FORMAT_NAME = "bikeguide-map"
FORMAT_VERSION = 1

_SECTIONS = ("landmarks", "roads", "base", "bikes", "reports", "visibility")


class MapDocumentError(ValueError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _num(token: str, line_no: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise MapDocumentError(line_no, f"not a number: {token!r}")


def parse_map(text: str) -> MapSpec:
    """Parse a map document; raises MapDocumentError / MapValidationError."""
    lines = text.splitlines()
    if not lines:
        raise MapDocumentError(0, "empty document")
    header = lines[0].split()
    if len(header) != 2 or header[0] != FORMAT_NAME:
        raise MapDocumentError(1, f"expected {FORMAT_NAME!r} header")
    if header[1] != str(FORMAT_VERSION):
        raise MapDocumentError(1, f"unsupported version {header[1]!r}")

    name = None
    section = None
    landmarks: List[Landmark] = []
    roads: List[Tuple[str, str]] = []
    base = None
    bikes: List[Bike] = []
    reports: List[PartialReport] = []
    visibility: List[Tuple[str, str]] = []

    for i, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1]
            if section not in _SECTIONS:
                raise MapDocumentError(i, f"unknown section {section!r}")
            continue
        parts = line.split()
        if section is None:
            if parts[0] == "name" and len(parts) == 2:
                name = parts[1]
                continue
            raise MapDocumentError(i, f"unexpected line before sections: {raw!r}")
        if section == "landmarks":
            if len(parts) != 5:
                raise MapDocumentError(
                    i, "landmark needs: id type color x,y district")
            coords = parts[3].split(",")
            if len(coords) != 2:
                raise MapDocumentError(i, f"bad coordinates {parts[3]!r}")
            landmarks.append(Landmark(
                id=parts[0], type=parts[1], color=parts[2],
                x=_num(coords[0], i), y=_num(coords[1], i),
                district=parts[4]))
        elif section == "roads":
            if len(parts) != 2:
                raise MapDocumentError(i, "road needs: id id")
            roads.append((parts[0], parts[1]))
        elif section == "base":
            if len(parts) != 1:
                raise MapDocumentError(i, "base needs a single landmark id")
            if base is not None:
                raise MapDocumentError(i, "base declared twice")
            base = parts[0]
        elif section == "bikes":
            if len(parts) != 2:
                raise MapDocumentError(i, "bike needs: id landmark")
            bikes.append(Bike(id=parts[0], location=parts[1]))
        elif section == "reports":
            if len(parts) != 2:
                raise MapDocumentError(i, "report needs: bike district")
            reports.append(PartialReport(bike=parts[0], district=parts[1]))
        elif section == "visibility":
            if len(parts) != 2:
                raise MapDocumentError(i, "visibility needs: landmark bike")
            visibility.append((parts[0], parts[1]))

    if name is None:
        raise MapDocumentError(1, "missing 'name' line")
    if base is None:
        raise MapDocumentError(len(lines), "missing [base] section")
    return MapSpec(name=name, landmarks=tuple(landmarks), roads=tuple(roads),
                   base=base, bikes=tuple(bikes), reports=tuple(reports),
                   visibility=tuple(visibility))


def _coord(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def serialize_map(spec: MapSpec) -> str:
    """Render a MapSpec to canonical document text (stable byte-for-byte)."""
    out = [f"{FORMAT_NAME} {FORMAT_VERSION}", f"name {spec.name}", ""]
    out.append("[landmarks]")
    for lm in spec.landmarks:
        out.append(f"{lm.id} {lm.type} {lm.color} "
                   f"{_coord(lm.x)},{_coord(lm.y)} {lm.district}")
    out.append("")
    out.append("[roads]")
    for a, b in spec.roads:
        out.append(f"{a} {b}")
    out.append("")
    out.append("[base]")
    out.append(spec.base)
    out.append("")
    out.append("[bikes]")
    for bike in spec.bikes:
        out.append(f"{bike.id} {bike.location}")
    out.append("")
    out.append("[reports]")
    for rep in spec.reports:
        out.append(f"{rep.bike} {rep.district}")
    out.append("")
    out.append("[visibility]")
    for lid, bid in spec.visibility:
        out.append(f"{lid} {bid}")
    return "\n".join(out) + "\n"


def load_map(path) -> MapSpec:
    return parse_map(Path(path).read_text(encoding="utf-8"))
