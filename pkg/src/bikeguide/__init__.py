"""Instruction-giving agents for a collaborative bike-collection map task."""

__version__ = "0.1.0"
