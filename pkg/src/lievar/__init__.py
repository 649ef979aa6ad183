"""Symbolic computation in truncated free Lie rings and their relatively free quotients."""

from .coeffring import CoeffDomain
from .freelie import FreeLieContext, LieElement, ResourceGuardError, build_context
from .variety import RelativelyFreeRing, VarietySpec, free_nilpotent, relatively_free
from .wordlang import Identity, parse, parse_identity, to_string

__all__ = [
    "CoeffDomain",
    "FreeLieContext",
    "Identity",
    "LieElement",
    "RelativelyFreeRing",
    "ResourceGuardError",
    "VarietySpec",
    "build_context",
    "free_nilpotent",
    "parse",
    "parse_identity",
    "relatively_free",
    "to_string",
]

__version__ = "0.1.0"
