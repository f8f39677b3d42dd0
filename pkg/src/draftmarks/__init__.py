"""Document provenance engine: versioned trees, trace analysis, process schemas."""

from .model import (
    Author,
    DocumentHistory,
    NodeKind,
    PromptRecord,
    Provenance,
    Trigger,
)

__all__ = [
    "Author",
    "DocumentHistory",
    "NodeKind",
    "PromptRecord",
    "Provenance",
    "Trigger",
]
