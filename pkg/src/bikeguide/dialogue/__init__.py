"""Instruction and explanation generation for the two agents."""

from .agents import (
    PREDICTIVE,
    RESPONSIVE,
    AgentConfig,
    BehaviourTemplate,
    PredictiveAgent,
    ResponsiveAgent,
    TargetNamer,
    action_ref,
    build_agent,
    ku_shortcut,
)
from .inefficiency import (
    InefficiencyConfig,
    InefficiencyWitness,
    detect_local_inefficiency,
    enumerate_witnesses,
)
from .targets import KNOWLEDGE, POSITION, TargetDescriptor, extract_target
from .utterances import (
    ALL_KINDS,
    TemplateError,
    TemplateSet,
    Utterance,
    UtteranceKind,
    load_templates,
    parse_templates,
)

__all__ = [
    "PREDICTIVE",
    "RESPONSIVE",
    "AgentConfig",
    "BehaviourTemplate",
    "PredictiveAgent",
    "ResponsiveAgent",
    "TargetNamer",
    "action_ref",
    "build_agent",
    "ku_shortcut",
    "InefficiencyConfig",
    "InefficiencyWitness",
    "detect_local_inefficiency",
    "enumerate_witnesses",
    "KNOWLEDGE",
    "POSITION",
    "TargetDescriptor",
    "extract_target",
    "ALL_KINDS",
    "TemplateError",
    "TemplateSet",
    "Utterance",
    "UtteranceKind",
    "load_templates",
    "parse_templates",
]
