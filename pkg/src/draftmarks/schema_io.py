"""Process schema wire format: canonical JSON, checksums, static HTML export.

The byte form is canonical (sorted keys, no whitespace, UTF-8, marks in
document order) so equal schemas serialize identically; an envelope carries
a sha256 checksum over the canonical schema bytes.
"""

from __future__ import annotations

import hashlib
import html
import json
from typing import Any, Mapping

from .profiles import MARK_VOCABULARY, intent_profile
from .schema import (
    DocumentBlock,
    DocumentRun,
    MarginAnchor,
    Mark,
    ProcessSchema,
    SchemaDocument,
    SpanAnchor,
    document_text,
    sort_marks,
)

FORMAT_VERSION = "1"


class SchemaValidationError(Exception):
    pass


def canonical_json_bytes(obj: Any) -> bytes:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False,
                      separators=(",", ":")).encode("utf-8")


# ----------------------------------------------------------------------
# dict conversion


def _anchor_to_dict(anchor) -> dict:
    if isinstance(anchor, SpanAnchor):
        return {"type": "span", "node": anchor.node,
                "start": anchor.start, "end": anchor.end}
    return {"type": "margin", "node": anchor.node, "placement": anchor.placement}


def _mark_to_dict(mark: Mark) -> dict:
    out: dict = {"channel": mark.channel, "variant": mark.variant,
                 "anchor": _anchor_to_dict(mark.anchor)}
    if mark.intensity is not None:
        out["intensity"] = round(mark.intensity, 4)
    if mark.payload is not None:
        out["payload"] = mark.payload
    if mark.children:
        out["children"] = [_mark_to_dict(child) for child in mark.children]
    return out


def schema_to_dict(schema: ProcessSchema) -> dict:
    document = {"blocks": [
        {"node": block.node, "kind": block.kind,
         "runs": [{"node": run.node, "text": run.text, "font": run.font}
                  for run in block.runs]}
        for block in schema.document.blocks]}
    marks = sort_marks(schema.document, [_copy_mark(m) for m in schema.marks])
    return {"role": schema.role, "session": schema.session_id,
            "config": schema.config_fingerprint, "document": document,
            "marks": [_mark_to_dict(mark) for mark in marks]}


def _copy_mark(mark: Mark) -> Mark:
    return Mark(channel=mark.channel, variant=mark.variant, anchor=mark.anchor,
                intensity=mark.intensity, payload=mark.payload,
                children=[_copy_mark(c) for c in mark.children])


def serialize_schema(schema: ProcessSchema) -> bytes:
    body = canonical_json_bytes(schema_to_dict(schema))
    envelope = {"format_version": FORMAT_VERSION,
                "checksum": hashlib.sha256(body).hexdigest(),
                "schema": json.loads(body.decode("utf-8"))}
    return canonical_json_bytes(envelope)


# ----------------------------------------------------------------------
# parsing and validation


def _fail(message: str) -> None:
    raise SchemaValidationError(message)


def _parse_anchor(raw, node_texts: Mapping[int, str]) -> SpanAnchor | MarginAnchor:
    if not isinstance(raw, dict):
        _fail("anchor must be an object")
    node = raw.get("node")
    if not isinstance(node, int) or isinstance(node, bool):
        _fail("anchor node must be an integer")
    if raw.get("type") == "span":
        start, end = raw.get("start"), raw.get("end")
        if not all(isinstance(v, int) and not isinstance(v, bool)
                   for v in (start, end)):
            _fail("span bounds must be integers")
        if node not in node_texts:
            _fail(f"span anchored to unknown node {node}")
        if not 0 <= start <= end <= len(node_texts[node]):
            _fail(f"span {start}..{end} outside node {node}")
        return SpanAnchor(node=node, start=start, end=end)
    if raw.get("type") == "margin":
        placement = raw.get("placement")
        if placement not in ("start", "after"):
            _fail(f"unknown margin placement '{placement}'")
        if node != 0 and node not in node_texts:
            _fail(f"margin anchored to unknown node {node}")
        return MarginAnchor(node=node, placement=placement)
    _fail(f"unknown anchor type '{raw.get('type')}'")


def _parse_mark(raw, profile, node_texts) -> Mark:
    if not isinstance(raw, dict):
        _fail("mark must be an object")
    channel, variant = raw.get("channel"), raw.get("variant")
    if channel not in MARK_VOCABULARY:
        _fail(f"unknown mark channel '{channel}'")
    if variant not in MARK_VOCABULARY[channel]:
        _fail(f"unknown variant '{variant}' for channel '{channel}'")
    if not profile.permits(channel, variant):
        _fail(f"variant '{channel}/{variant}' not allowed for role "
              f"'{profile.role.value}'")
    anchor = _parse_anchor(raw.get("anchor"), node_texts)
    intensity = raw.get("intensity")
    if intensity is not None:
        if not isinstance(intensity, (int, float)) or isinstance(intensity, bool):
            _fail("intensity must be a number")
        if not 0.0 <= intensity <= 1.0:
            _fail("intensity out of range")
        if round(float(intensity), 4) != float(intensity):
            _fail("intensity carries more than four decimals")
        intensity = float(intensity)
    payload = raw.get("payload")
    if payload is not None and not isinstance(payload, dict):
        _fail("payload must be an object")
    children = [_parse_mark(child, profile, node_texts)
                for child in raw.get("children", [])]
    return Mark(channel=channel, variant=variant, anchor=anchor,
                intensity=intensity, payload=payload, children=children)


def parse_schema(data: bytes | str,
                 profile_overrides: Mapping | None = None) -> ProcessSchema:
    """Validate an envelope and rebuild the schema it carries."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        envelope = json.loads(text)
    except json.JSONDecodeError:
        _fail("envelope is not valid JSON")
    if not isinstance(envelope, dict):
        _fail("envelope must be an object")
    if envelope.get("format_version") != FORMAT_VERSION:
        _fail(f"unsupported format version {envelope.get('format_version')!r}")
    body = envelope.get("schema")
    if not isinstance(body, dict):
        _fail("envelope carries no schema object")
    digest = hashlib.sha256(canonical_json_bytes(body)).hexdigest()
    if digest != envelope.get("checksum"):
        _fail("checksum mismatch")
    try:
        profile = intent_profile(body.get("role"), profile_overrides)
    except Exception:
        _fail(f"unknown role '{body.get('role')}'")
    raw_document = body.get("document")
    if not isinstance(raw_document, dict) or not isinstance(
            raw_document.get("blocks"), list):
        _fail("document must carry a block list")
    node_texts: dict[int, str] = {}
    blocks: list[DocumentBlock] = []
    fonts_allowed = "font" in profile.allowed
    for raw_block in raw_document["blocks"]:
        if not isinstance(raw_block, dict):
            _fail("block must be an object")
        if not isinstance(raw_block.get("node"), int):
            _fail("block node must be an integer")
        kind = raw_block.get("kind", "paragraph")
        if kind not in ("paragraph", "heading", "list-item", "text"):
            _fail(f"unknown block kind '{kind}'")
        runs = []
        for raw_run in raw_block.get("runs", []):
            if not isinstance(raw_run, dict) or not isinstance(
                    raw_run.get("node"), int):
                _fail("run node must be an integer")
            if not isinstance(raw_run.get("text"), str):
                _fail("run text must be a string")
            font = raw_run.get("font")
            if font is not None:
                if font not in ("script", "sans"):
                    _fail(f"unknown font '{font}'")
                if not fonts_allowed or not profile.permits("font", font):
                    _fail(f"font '{font}' not allowed for role '{profile.role.value}'")
            runs.append(DocumentRun(node=raw_run["node"],
                                    text=raw_run["text"], font=font))
            node_texts[raw_run["node"]] = raw_run["text"]
        block = DocumentBlock(node=raw_block["node"], kind=kind,
                              runs=tuple(runs))
        blocks.append(block)
        node_texts[block.node] = "".join(run.text for run in runs)
    document = SchemaDocument(blocks=tuple(blocks))
    raw_marks = body.get("marks")
    if not isinstance(raw_marks, list):
        _fail("marks must be a list")
    marks = [_parse_mark(raw, profile, node_texts) for raw in raw_marks]
    return ProcessSchema(document=document, marks=marks, role=body["role"],
                         session_id=body.get("session", ""),
                         config_fingerprint=body.get("config", ""))


# ----------------------------------------------------------------------
# static export

_EXPORT_CSS = """
body { margin: 2rem auto; max-width: 46rem; font: 1rem/1.6 Georgia, serif;
       color: #222; background: #faf8f4; }
.run.font-script { font-family: Georgia, 'Iowan Old Style', serif; }
.run.font-sans { font-family: Helvetica, Arial, sans-serif; }
.mark.masking-tape { background: rgba(226, 203, 137, 0.45);
                     box-shadow: 0 0 0 2px rgba(226, 203, 137, 0.45); }
.mark.masking-tape.stacked { box-shadow: 2px 2px 0 1px rgba(200, 178, 112, 0.5),
                             0 0 0 2px rgba(226, 203, 137, 0.45); }
.mark.masking-tape.scrunched { border-bottom: 2px dashed rgba(170, 140, 60, 0.8); }
.mark.masking-tape.torn { border-left: 3px solid rgba(170, 140, 60, 0.8); }
.mark.smudge { background: linear-gradient(rgba(120,120,120,0.18),
               rgba(120,120,120,0.08)); filter: blur(0.2px); }
.mark.eraser-crumb::after { content: '\\2022'; color: #b5651d; padding: 0 0.15em; }
.mark.eraser-crumb.density-varied::after {
    opacity: calc(0.35 + 0.65 * var(--intensity, 0.5)); }
.mark.residual-glue::after { content: '\\25AA'; color: rgba(160,160,150,0.9);
    letter-spacing: 0.2em; }
.mark.residual-glue.sequenced::after { content: '\\25AA\\25AA'; }
.mark.stencil::before { content: '\\25A1'; color: #4a6b8a; padding-right: 0.2em; }
.mark.stencil.layered::before { content: '\\25A3'; }
.mark.stencil.lined-strokes { text-decoration: underline;
    text-decoration-color: rgba(74,107,138,0.6); }
.mark.stencil.dotted-strokes { text-decoration: underline dotted;
    text-decoration-color: rgba(74,107,138,0.6); }
.mark.ghost-text { display: none; }
#mark-details { margin-top: 3rem; border-top: 1px solid #ccc; padding-top: 1rem; }
#mark-details pre { white-space: pre-wrap; background: #f1ede4; padding: 0.5rem; }
"""


def _mark_open(mark: Mark, mark_id: str) -> str:
    classes = f"mark {mark.channel} {mark.variant}"
    attrs = f' class="{classes}" data-mark="{mark_id}"'
    if mark.intensity is not None:
        attrs += f' style="--intensity:{round(mark.intensity, 4)}"'
    return f"<span{attrs}>"


def _collect_details(mark: Mark, mark_id: str, sink: list[tuple[str, Mark]]) -> None:
    sink.append((mark_id, mark))
    for i, child in enumerate(mark.children):
        _collect_details(child, f"{mark_id}-{i}", sink)


def export_static_document(schema: ProcessSchema) -> str:
    """Self-contained HTML: document text under <main>, payloads after it."""
    marks = sort_marks(schema.document, [_copy_mark(m) for m in schema.marks])
    by_span_node: dict[int, list[tuple[Mark, str]]] = {}
    margin_start: dict[int, list[tuple[Mark, str]]] = {}
    margin_after: dict[int, list[tuple[Mark, str]]] = {}
    details: list[tuple[str, Mark]] = []
    for idx, mark in enumerate(marks):
        mark_id = f"m{idx}"
        _collect_details(mark, mark_id, details)
        if isinstance(mark.anchor, SpanAnchor):
            by_span_node.setdefault(mark.anchor.node, []).append((mark, mark_id))
        elif mark.anchor.placement == "start":
            margin_start.setdefault(mark.anchor.node, []).append((mark, mark_id))
        else:
            margin_after.setdefault(mark.anchor.node, []).append((mark, mark_id))

    def glyphs(entries: list[tuple[Mark, str]]) -> str:
        out = []
        for mark, mark_id in entries:
            inner = "".join(_mark_open(child, f"{mark_id}-{i}") + "</span>"
                            for i, child in enumerate(mark.children))
            out.append(_mark_open(mark, mark_id) + inner + "</span>")
        return "".join(out)

    def wrap_text(node: int, text: str) -> str:
        escaped = html.escape(text, quote=False)
        for mark, mark_id in reversed(by_span_node.get(node, [])):
            inner = "".join(_mark_open(child, f"{mark_id}-{i}") + "</span>"
                            for i, child in enumerate(mark.children))
            escaped = _mark_open(mark, mark_id) + escaped + inner + "</span>"
        return escaped

    block_tags = {"paragraph": "p", "heading": "h3", "list-item": "li", "text": "p"}
    rendered_blocks: list[str] = []
    for block in schema.document.blocks:
        tag = block_tags.get(block.kind, "p")
        runs_html = []
        for run in block.runs:
            font_class = f" font-{run.font}" if run.font else ""
            piece = (f'<span class="run{font_class}" data-node="{run.node}">'
                     + wrap_text(run.node, run.text) + "</span>")
            runs_html.append(glyphs(margin_start.get(run.node, [])) + piece
                             + glyphs(margin_after.get(run.node, [])))
        body = "".join(runs_html)
        # Block-level span marks wrap every run; margin glyphs sit at the
        # edges. A bare text block names one node, already wrapped above.
        run_nodes = {run.node for run in block.runs}
        if block.node not in run_nodes:
            for mark, mark_id in reversed(by_span_node.get(block.node, [])):
                inner = "".join(_mark_open(child, f"{mark_id}-{i}") + "</span>"
                                for i, child in enumerate(mark.children))
                body = _mark_open(mark, mark_id) + body + inner + "</span>"
            body = glyphs(margin_start.get(block.node, [])) + body
            body += glyphs(margin_after.get(block.node, []))
        rendered_blocks.append(
            f'<{tag} class="block" data-node="{block.node}">{body}</{tag}>')
    main = ('<main id="doc">' + glyphs(margin_start.get(0, []))
            + "\n\n".join(rendered_blocks)
            + glyphs(margin_after.get(0, [])) + "</main>")
    details_html = []
    for mark_id, mark in details:
        label = html.escape(f"{mark.channel} {mark.variant}")
        payload = {"anchor": _anchor_to_dict(mark.anchor)}
        if mark.intensity is not None:
            payload["intensity"] = round(mark.intensity, 4)
        if mark.payload is not None:
            payload["payload"] = mark.payload
        blob = html.escape(json.dumps(payload, indent=1, sort_keys=True,
                                      ensure_ascii=False), quote=False)
        details_html.append(
            f'<details id="{mark_id}-details"><summary>{label}</summary>'
            f"<pre>{blob}</pre></details>")
    return ("<!doctype html>\n<html lang=\"en\"><head><meta charset=\"utf-8\">"
            f"<title>exported document ({html.escape(schema.role)})</title>"
            f"<style>{_EXPORT_CSS}</style></head><body>"
            + main
            + '<section id="mark-details"><h2>Marks</h2>'
            + "".join(details_html)
            + "</section></body></html>")
