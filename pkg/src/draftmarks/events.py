"""Editor session logs: event types, parsing, and authorship attribution.

A log is JSON Lines: one header object, then one object per event in seq
order. Unknown fields are ignored so newer recorders stay readable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

from .model import Author

# Instruction recorded for AI text that arrived by paste from outside the
# editor: there is no prompt to show, only the fact of external origin.
UNKNOWN_PASTE_INSTRUCTION = "unknown (external paste)"

SETUPS = ("split_context", "integrated_tool", "ambient_assistant")
BLOCK_KINDS = ("paragraph", "heading", "list-item", "none")


class LogFormatError(Exception):
    """Raised when a session log violates the line format or its invariants."""


@dataclass(frozen=True)
class KeyInsert:
    seq: int
    t: float
    anchor: tuple[int, int]
    text: str
    block: str | None = None


@dataclass(frozen=True)
class KeyDelete:
    seq: int
    t: float
    scope: str  # "range" | "node"
    anchor: tuple[int, int] | None = None
    length: int = 0
    node: int | None = None


@dataclass(frozen=True)
class Paste:
    seq: int
    t: float
    anchor: tuple[int, int]
    text: str
    source: str  # "local_app" | "external"
    block: str | None = None


@dataclass(frozen=True)
class AIGenerate:
    seq: int
    t: float
    anchor: tuple[int, int] | None
    instruction: str
    generated: str
    inserted: str
    context: str | None = None
    block: str | None = None


@dataclass(frozen=True)
class AIFeedback:
    seq: int
    t: float
    target: int | None
    instruction: str
    generated: str
    context: str | None = None


SessionEvent = Union[KeyInsert, KeyDelete, Paste, AIGenerate, AIFeedback]


@dataclass(frozen=True)
class SessionLog:
    consent: bool
    setup: str
    events: tuple[SessionEvent, ...]


def attribute_provenance(event: SessionEvent) -> Author:
    """Who authored the text an event contributes.

    Keystroke-mapped input is human; content arriving without local keystroke
    mapping (external pastes, generations, feedback) is AI-attributed.
    """
    if isinstance(event, (KeyInsert, KeyDelete)):
        return Author.HUMAN
    if isinstance(event, Paste):
        return Author.HUMAN if event.source == "local_app" else Author.AI
    return Author.AI


def _anchor(obj: dict, line: int, key: str = "anchor", required: bool = True):
    raw = obj.get(key)
    if raw is None:
        if required:
            raise LogFormatError(f"missing {key} at line {line}")
        return None
    if (not isinstance(raw, (list, tuple)) or len(raw) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in raw)):
        raise LogFormatError(f"malformed {key} at line {line}")
    return (raw[0], raw[1])


def _require(obj: dict, key: str, types, line: int):
    value = obj.get(key)
    if not isinstance(value, types) or isinstance(value, bool) and types is not bool:
        raise LogFormatError(f"missing or malformed '{key}' at line {line}")
    return value


def _optional_str(obj: dict, key: str, line: int) -> str | None:
    value = obj.get(key)
    if value is None:
        return None
    if not isinstance(value, str):
        raise LogFormatError(f"malformed '{key}' at line {line}")
    return value


def _block(obj: dict, line: int) -> str | None:
    value = obj.get("block")
    if value is None:
        return None
    if value not in BLOCK_KINDS:
        raise LogFormatError(f"unknown block kind '{value}' at line {line}")
    return value


def parse_session_log(data: bytes | str) -> SessionLog:
    """Parse and validate a JSON Lines session log."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    header: dict | None = None
    events: list[SessionEvent] = []
    last_seq: int | None = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError:
            raise LogFormatError(f"invalid JSON at line {line_no}") from None
        if not isinstance(obj, dict):
            raise LogFormatError(f"expected an object at line {line_no}")
        if header is None:
            if obj.get("version") != "1":
                raise LogFormatError("unsupported log version")
            if obj.get("consent") is not True:
                raise LogFormatError("consent required")
            if obj.get("setup") not in SETUPS:
                raise LogFormatError(f"unknown setup '{obj.get('setup')}'")
            header = obj
            continue
        seq = _require(obj, "seq", int, line_no)
        if last_seq is not None and seq <= last_seq:
            raise LogFormatError(f"non-monotonic seq at line {line_no}")
        last_seq = seq
        t = float(_require(obj, "t", (int, float), line_no))
        kind = _require(obj, "kind", str, line_no)
        if kind == "key_insert":
            events.append(KeyInsert(
                seq=seq, t=t, anchor=_anchor(obj, line_no),
                text=_require(obj, "text", str, line_no), block=_block(obj, line_no)))
        elif kind == "key_delete":
            scope = obj.get("scope", "range")
            if scope == "range":
                events.append(KeyDelete(
                    seq=seq, t=t, scope=scope, anchor=_anchor(obj, line_no),
                    length=_require(obj, "length", int, line_no)))
            elif scope == "node":
                events.append(KeyDelete(
                    seq=seq, t=t, scope=scope,
                    node=_require(obj, "node", int, line_no)))
            else:
                raise LogFormatError(f"unknown delete scope '{scope}' at line {line_no}")
        elif kind == "paste":
            source = _require(obj, "source", str, line_no)
            if source not in ("local_app", "external"):
                raise LogFormatError(f"unknown paste source '{source}' at line {line_no}")
            events.append(Paste(
                seq=seq, t=t, anchor=_anchor(obj, line_no),
                text=_require(obj, "text", str, line_no), source=source,
                block=_block(obj, line_no)))
        elif kind == "ai_generate":
            events.append(AIGenerate(
                seq=seq, t=t, anchor=_anchor(obj, line_no, required=False),
                instruction=_require(obj, "instruction", str, line_no),
                context=_optional_str(obj, "context", line_no),
                generated=_require(obj, "generated", str, line_no),
                inserted=_require(obj, "inserted", str, line_no),
                block=_block(obj, line_no)))
        elif kind == "ai_feedback":
            target = obj.get("target")
            if target is not None and (not isinstance(target, int) or isinstance(target, bool)):
                raise LogFormatError(f"malformed 'target' at line {line_no}")
            events.append(AIFeedback(
                seq=seq, t=t, target=target,
                instruction=_require(obj, "instruction", str, line_no),
                context=_optional_str(obj, "context", line_no),
                generated=_require(obj, "generated", str, line_no)))
        else:
            raise LogFormatError(f"unknown event kind '{kind}' at line {line_no}")
    if header is None:
        raise LogFormatError("empty log: missing header")
    return SessionLog(consent=True, setup=header["setup"], events=tuple(events))
