"""Utterance kinds and the text templates that render them.

Templates live in templates.txt next to this module so wording can be
edited without touching code. The loader validates the file: every
required template must be present, and each may use only its declared
placeholders.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from importlib import resources
from typing import Dict, Optional, Tuple


class UtteranceKind:
    INSTRUCTION = "Instruction"
    ELABORATION = "Elaboration"
    PRE_TARGET = "PreTarget"
    TARGET_JUSTIFICATION = "TargetJustification"
    POSITION_TARGET = "PositionTarget"
    INEFFICIENCY_JUSTIFICATION = "InefficiencyJustification"
    INITIATIVE_OFFER = "InitiativeOffer"
    ACKNOWLEDGEMENT = "Acknowledgement"


ALL_KINDS = (
    UtteranceKind.INSTRUCTION,
    UtteranceKind.ELABORATION,
    UtteranceKind.PRE_TARGET,
    UtteranceKind.TARGET_JUSTIFICATION,
    UtteranceKind.POSITION_TARGET,
    UtteranceKind.INEFFICIENCY_JUSTIFICATION,
    UtteranceKind.INITIATIVE_OFFER,
    UtteranceKind.ACKNOWLEDGEMENT,
)


@dataclass(frozen=True)
class Utterance:
    """One rendered line of agent speech.

    `subject` is a machine-readable reference: the action string for
    instructions/elaborations, a target reference ("bike:b2",
    "holding:b2", "at:L4") for target announcements.
    """

    kind: str
    text: str
    subject: Optional[str] = None


class TemplateError(ValueError):
    """The template file is missing names or uses bad placeholders."""


# name -> (utterance kind, allowed placeholders)
REQUIRED_TEMPLATES: Dict[str, Tuple[str, frozenset]] = {
    "instruction.move": (UtteranceKind.INSTRUCTION, frozenset({"type"})),
    "instruction.move.visited": (UtteranceKind.INSTRUCTION,
                                 frozenset({"type"})),
    "instruction.pickup": (UtteranceKind.INSTRUCTION, frozenset()),
    "elaboration.color": (UtteranceKind.ELABORATION, frozenset({"color"})),
    "pretarget.knowledge": (UtteranceKind.PRE_TARGET, frozenset({"label"})),
    "pretarget.position.pickup": (UtteranceKind.PRE_TARGET,
                                  frozenset({"label"})),
    "pretarget.position.base": (UtteranceKind.PRE_TARGET, frozenset()),
    "target.knowledge": (UtteranceKind.TARGET_JUSTIFICATION,
                         frozenset({"label"})),
    "target.position.pickup": (UtteranceKind.POSITION_TARGET,
                               frozenset({"label"})),
    "target.position.base": (UtteranceKind.POSITION_TARGET, frozenset()),
    "inefficiency.responsive": (UtteranceKind.INEFFICIENCY_JUSTIFICATION,
                                frozenset()),
    "inefficiency.predictive": (UtteranceKind.INEFFICIENCY_JUSTIFICATION,
                                frozenset()),
    "initiative.offer": (UtteranceKind.INITIATIVE_OFFER, frozenset()),
    "ack.pickup": (UtteranceKind.ACKNOWLEDGEMENT, frozenset()),
    "ack.wrong_way": (UtteranceKind.ACKNOWLEDGEMENT, frozenset()),
    "ack.done": (UtteranceKind.ACKNOWLEDGEMENT, frozenset()),
}


def _placeholders(fmt: str) -> frozenset:
    names = set()
    for _, field, _, _ in string.Formatter().parse(fmt):
        if field is None:
            continue
        if field == "" or not field.isidentifier():
            raise TemplateError(f"bad placeholder {{{field}}} in {fmt!r}")
        names.add(field)
    return frozenset(names)


class TemplateSet:
    """Validated name -> format-string table."""

    def __init__(self, table: Dict[str, str]):
        missing = sorted(set(REQUIRED_TEMPLATES) - set(table))
        if missing:
            raise TemplateError(f"missing templates: {', '.join(missing)}")
        unknown = sorted(set(table) - set(REQUIRED_TEMPLATES))
        if unknown:
            raise TemplateError(f"unknown templates: {', '.join(unknown)}")
        for name, fmt in table.items():
            allowed = REQUIRED_TEMPLATES[name][1]
            used = _placeholders(fmt)
            if not used <= allowed:
                extra = ", ".join(sorted(used - allowed))
                raise TemplateError(
                    f"template {name} uses unknown placeholders: {extra}")
        self._table = dict(table)

    def kind_of(self, name: str) -> str:
        return REQUIRED_TEMPLATES[name][0]

    def render(self, name: str, subject: Optional[str] = None,
               **values: str) -> Utterance:
        fmt = self._table[name]
        return Utterance(kind=self.kind_of(name), text=fmt.format(**values),
                         subject=subject)


def parse_templates(text: str) -> TemplateSet:
    table: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise TemplateError(f"line {lineno}: expected 'name = text'")
        name, _, fmt = line.partition("=")
        name = name.strip()
        fmt = fmt.strip()
        if not name or not fmt:
            raise TemplateError(f"line {lineno}: empty name or text")
        if name in table:
            raise TemplateError(f"line {lineno}: duplicate template {name}")
        table[name] = fmt
    return TemplateSet(table)


def load_templates(path: Optional[str] = None) -> TemplateSet:
    """Load templates from `path`, or the packaged default file."""
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_templates(fh.read())
    text = (resources.files(__package__) / "templates.txt").read_text(
        encoding="utf-8")
    return parse_templates(text)
