"""Replay parsed session logs into version-controlled documents."""

from __future__ import annotations

from .events import (
    UNKNOWN_PASTE_INSTRUCTION,
    AIFeedback,
    AIGenerate,
    KeyDelete,
    KeyInsert,
    Paste,
    SessionEvent,
    SessionLog,
)
from .model import (
    DEFAULT_DELETION_THRESHOLD,
    Author,
    DocumentHistory,
    NodeKind,
    PromptRecord,
    StructuralNode,
)

_BLOCKS = {
    "paragraph": NodeKind.PARAGRAPH,
    "heading": NodeKind.HEADING,
    "list-item": NodeKind.LIST_ITEM,
}


class ReplayError(Exception):
    """A structurally valid log that cannot be applied to the document."""


def _resolve_block(history: DocumentHistory, anchor: tuple[int, int],
                   block: str | None) -> NodeKind | None:
    """Wrap kind for node-creating insertions.

    Explicit "none" means a bare text child; absent defaults to a paragraph
    wrap only when the slot is the document root, where bare text would be
    a block-less document.
    """
    if block == "none":
        return None
    if block is not None:
        return _BLOCKS[block]
    if anchor[0] == history.root_lineage:
        return NodeKind.PARAGRAPH
    return None


def _document_end(history: DocumentHistory) -> tuple[int, int]:
    root = history.current_record(history.root_lineage)
    assert isinstance(root, StructuralNode)
    return (history.root_lineage, len(root.children))


def apply_event(history: DocumentHistory, event: SessionEvent) -> DocumentHistory:
    if isinstance(event, KeyInsert):
        rec = history.current_record(event.anchor[0])
        block = None
        if isinstance(rec, StructuralNode):
            block = _resolve_block(history, event.anchor, event.block)
        return history.insert_text(event.anchor, event.text, Author.HUMAN, block=block)
    if isinstance(event, KeyDelete):
        if event.scope == "node":
            assert event.node is not None
            return history.remove_node(event.node)
        assert event.anchor is not None
        return history.delete_text(event.anchor, event.length)
    if isinstance(event, Paste):
        rec = history.current_record(event.anchor[0])
        block = None
        if isinstance(rec, StructuralNode):
            block = _resolve_block(history, event.anchor, event.block)
        if event.source == "local_app":
            return history.insert_text(event.anchor, event.text, Author.HUMAN, block=block)
        # Non-local pastes carry no recorded prompt; the origin is all we know.
        prompt = PromptRecord(instruction=UNKNOWN_PASTE_INSTRUCTION)
        return history.insert_text(event.anchor, event.text, Author.AI,
                                   prompt=prompt, generated=event.text, block=block)
    if isinstance(event, AIGenerate):
        prompt = PromptRecord(instruction=event.instruction, context=event.context)
        if event.inserted == "":
            if event.generated:
                # Unused output still matters later; keep it off the canvas.
                history.record_orphan(event.generated, prompt, target=None)
            return history
        anchor = event.anchor if event.anchor is not None else _document_end(history)
        block = _resolve_block(history, anchor, event.block)
        return history.insert_text(anchor, event.inserted, Author.AI,
                                   prompt=prompt, generated=event.generated, block=block)
    if isinstance(event, AIFeedback):
        prompt = PromptRecord(instruction=event.instruction, context=event.context)
        history.record_orphan(event.generated, prompt, target=event.target)
        return history
    raise ReplayError(f"unsupported event type {type(event).__name__}")


def replay_session(log: SessionLog,
                   deletion_threshold: int = DEFAULT_DELETION_THRESHOLD) -> DocumentHistory:
    """Apply every event of a consented log to a fresh document."""
    if not log.consent:
        raise ReplayError("consent required")
    history = DocumentHistory(deletion_threshold=deletion_threshold)
    for event in log.events:
        apply_event(history, event)
    return history
