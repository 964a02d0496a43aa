"""Exhaustive union-closed family enumeration and k|l-separation analysis."""
from .core import (
    ExactFraction,
    Family,
    FamilyError,
    GroundSet,
    SeparationParams,
    best_cover,
    conjecture_bound,
    cover_count,
    format_family,
    is_separated,
    is_union_closed,
    is_weakly_separated,
    max_frequency,
    parse_family,
    union_closure,
)

__version__ = "0.1.0"

__all__ = [
    "ExactFraction",
    "Family",
    "FamilyError",
    "GroundSet",
    "SeparationParams",
    "best_cover",
    "conjecture_bound",
    "cover_count",
    "format_family",
    "is_separated",
    "is_union_closed",
    "is_weakly_separated",
    "max_frequency",
    "parse_family",
    "union_closure",
]
