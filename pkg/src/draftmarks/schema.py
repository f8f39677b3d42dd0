"""Controller: project analyzed traces into a role-scoped process schema.

Pipeline: aggregate (temporal depth, survival) -> annotate (trace to mark,
variant fallback, prompt detail) -> assemble (document runs, fonts, canonical
mark order).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

from .events import UNKNOWN_PASTE_INSTRUCTION
from .model import Author, DocumentHistory, StructuralNode, TextNode
from .profiles import (
    Granularity,
    IntentProfile,
    PromptDetail,
    StakeholderRole,
    intent_profile,
)
from .traces import (
    DiscardTrace,
    FeedbackTrace,
    Generation,
    GenerationKind,
    TraceSet,
    analyze_history,
    score_prompt_complexity,
)


@dataclass(frozen=True)
class SpanAnchor:
    node: int
    start: int
    end: int


@dataclass(frozen=True)
class MarginAnchor:
    node: int
    placement: str  # "start" | "after"


Anchor = Union[SpanAnchor, MarginAnchor]


@dataclass
class Mark:
    channel: str
    variant: str
    anchor: Anchor
    intensity: float | None = None
    payload: dict | None = None
    children: list["Mark"] = field(default_factory=list)


@dataclass(frozen=True)
class DocumentRun:
    node: int
    text: str
    font: str | None


@dataclass(frozen=True)
class DocumentBlock:
    node: int
    kind: str
    runs: tuple[DocumentRun, ...]


@dataclass(frozen=True)
class SchemaDocument:
    blocks: tuple[DocumentBlock, ...]


@dataclass
class ProcessSchema:
    document: SchemaDocument
    marks: list[Mark]
    role: str
    session_id: str
    config_fingerprint: str


def document_text(document: SchemaDocument) -> str:
    return "\n\n".join(
        "".join(run.text for run in block.runs) for block in document.blocks)


@dataclass
class AggregatedTraces:
    surviving: list[int]  # indices into TraceSet.generations
    discards: list[DiscardTrace]
    feedback: list[FeedbackTrace]


def aggregate_traces(history: DocumentHistory, traces: TraceSet,
                     profile: IntentProfile) -> AggregatedTraces:
    """Apply survival and temporal-depth policy.

    Marks on content still in the document always survive; the depth window
    only limits how much abandoned history (discards, feedback) is surfaced.
    """
    final_map = history.tree_map(traces.final_version)
    surviving = [idx for idx, generation in enumerate(traces.generations)
                 if any(node in final_map for node in generation.nodes)]
    depth = profile.temporal_depth

    def recent(version: int) -> bool:
        return depth is None or traces.final_version - version <= depth

    discards = [trace for trace in traces.discards if recent(max(trace.versions))]
    feedback = [trace for trace in traces.feedback if recent(trace.version)]
    return AggregatedTraces(surviving=surviving, discards=discards, feedback=feedback)


def document_order_map(document: SchemaDocument) -> dict[int, int]:
    """Reading-order position per node named by the document; root is first."""
    order: dict[int, int] = {0: 0}
    for block in document.blocks:
        order.setdefault(block.node, len(order))
        for run in block.runs:
            order.setdefault(run.node, len(order))
    return order


def _segments_payload(segments) -> list[dict]:
    return [{"origin": s.origin, "start": s.start, "end": s.end} for s in segments]


class _Annotator:
    def __init__(self, history: DocumentHistory, traces: TraceSet,
                 profile: IntentProfile):
        self.history = history
        self.traces = traces
        self.profile = profile
        self.final_index = traces.final_version
        self.final_map = history.tree_map(self.final_index)
        self.parent_map = history.parent_index_map(self.final_index)
        # Nodes the rendered document names: root, its children (blocks) and
        # every surviving text node (runs). Margin anchors must land on these.
        root = history.root_lineage
        named = {root} | set(self.final_map[root].children)
        named.update(l for l, rec in self.final_map.items()
                     if isinstance(rec, TextNode))
        self.named_nodes = named

    def _margin(self, node: int, placement: str) -> MarginAnchor:
        cur = node
        while cur not in self.named_nodes:
            entry = self.parent_map.get(cur)
            if entry is None:
                cur = self.history.root_lineage
                break
            cur = entry[0]
        return MarginAnchor(cur, placement)

    def _mark(self, channel: str, variant: str, anchor: Anchor, *,
              intensity: float | None = None,
              payload: dict | None = None) -> Mark | None:
        resolved = self.profile.resolve_variant(channel, variant)
        if resolved is None:
            return None
        if channel == "eraser-crumb" and resolved != "density-varied":
            intensity = None
        return Mark(channel=channel, variant=resolved, anchor=anchor,
                    intensity=intensity, payload=payload)

    # ------------------------------------------------------------------

    def _chain_of(self, generation: Generation):
        idx = self.traces.chain_by_node.get(generation.nodes[0])
        if idx is None:
            return None
        chain = self.traces.chains[idx]
        if chain.links[-1] != generation.nodes[0] or len(chain.links) < 2:
            return None
        return chain

    def _phrase(self) -> bool:
        return self.profile.granularity is Granularity.PHRASE

    def _prompt_ghost(self, prompt, anchor: Anchor) -> Mark | None:
        detail = ("full" if self.profile.prompt_detail is PromptDetail.FULL_PROMPT
                  else "instruction-only")
        resolved = self.profile.resolve_variant("ghost-text", detail)
        if resolved is None:
            return None
        payload = {"instruction": prompt.instruction}
        if resolved == "full" and prompt.context is not None:
            payload["context"] = prompt.context
        return Mark("ghost-text", resolved, anchor, payload=payload)

    def _crumb(self, prompt, anchor: Anchor, link: int | None = None) -> Mark | None:
        if prompt.instruction == UNKNOWN_PASTE_INSTRUCTION:
            return None
        score = round(score_prompt_complexity(prompt), 4)
        payload = {"link": link} if link is not None else None
        crumb = self._mark("eraser-crumb", "density-varied", anchor,
                           intensity=score, payload=payload)
        if crumb is None:
            return None
        ghost = self._prompt_ghost(prompt, anchor)
        if ghost is not None:
            crumb.children.append(ghost)
        return crumb

    def _generation_marks(self, generation: Generation) -> list[Mark]:
        nodes = [n for n in generation.nodes if n in self.final_map]
        if not nodes:
            return []
        chain = self._chain_of(generation)
        marks: list[Mark] = []
        for position, node in enumerate(nodes):
            rec = self.final_map[node]
            span = SpanAnchor(node, 0, len(rec.content))
            edit = self.traces.edits.get(node)
            segments = self.traces.segments.get(node, ())
            payload: dict = {"kind": generation.kind.value,
                             "version": generation.version}
            if self._phrase() and segments:
                payload["segments"] = _segments_payload(segments)
                payload["inserted"] = self.history.original_record(node).content
            smudge_child: Mark | None = None
            if generation.kind is GenerationKind.TONAL_SHIFT and chain is None:
                channel = "smudge"
                variant = ("segmented"
                           if self._phrase() and len(segments) > 1 else "single")
            else:
                channel = "masking-tape"
                if chain is not None:
                    variant = "stacked"
                    payload["stack"] = self._stack_payload(chain)
                    if generation.kind is GenerationKind.TONAL_SHIFT:
                        smudge_child = self._mark("smudge", "single", span)
                elif edit is not None and edit.deletions:
                    variant = "scrunched"
                elif edit is not None and edit.insertions:
                    variant = "torn"
                elif self._phrase() and len(segments) > 1:
                    variant = "segmented"
                else:
                    variant = "single"
            if edit is not None:
                payload["original"] = edit.original
                payload["deletions"] = [list(d) for d in edit.deletions]
                payload["insertions"] = [list(i) for i in edit.insertions]
            mark = self._mark(channel, variant, span, payload=payload)
            if mark is None:
                continue
            if smudge_child is not None:
                mark.children.append(smudge_child)
            if position == len(nodes) - 1:
                self._attach_crumbs(mark, generation, chain, span)
            marks.append(mark)
        return marks

    def _stack_payload(self, chain) -> list[dict]:
        out = []
        for link in chain.links[:-1]:
            generation = self.traces.generations[self.traces.generation_by_node[link]]
            out.append({"node": link, "version": generation.version,
                        "kind": generation.kind.value,
                        "text": self.history.original_record(link).content})
        return out

    def _attach_crumbs(self, mark: Mark, generation: Generation, chain,
                       span: SpanAnchor) -> None:
        if chain is None:
            crumb = self._crumb(generation.prompt, span)
            if crumb is not None:
                mark.children.append(crumb)
            return
        for k, link in enumerate(chain.links):
            link_generation = self.traces.generations[
                self.traces.generation_by_node[link]]
            crumb = self._crumb(link_generation.prompt, span, link=k)
            if crumb is not None:
                mark.children.append(crumb)

    def _discard_mark(self, trace: DiscardTrace) -> Mark | None:
        variant = "sequenced" if len(trace.nodes) > 1 else "single"
        payload = {"discarded": [
            {"node": node, "version": version, "text": text}
            for node, text, version in zip(trace.nodes, trace.texts, trace.versions)]}
        anchor = self._margin(trace.anchor[0], trace.anchor[1])
        return self._mark("residual-glue", variant, anchor, payload=payload)

    def _feedback_mark(self, trace: FeedbackTrace) -> Mark | None:
        target = trace.target if trace.target is not None else self.history.root_lineage
        anchor = self._margin(target, "start")
        variant = "layered" if trace.layer > 1 else "single"
        payload = {"feedback": trace.feedback, "integrated": trace.integrated,
                   "layer": trace.layer,
                   "instruction": trace.prompt.instruction}
        if trace.untargeted:
            payload["untargeted"] = True
        if (self.profile.prompt_detail is PromptDetail.FULL_PROMPT
                and trace.prompt.context is not None):
            payload["context"] = trace.prompt.context
        mark = self._mark("stencil", variant, anchor, payload=payload)
        if mark is None:
            return None
        if (not trace.untargeted and trace.target in self.named_nodes
                and trace.target != self.history.root_lineage):
            stroke_variant = "lined-strokes" if trace.integrated else "dotted-strokes"
            text = self.history.node_text(self.final_index, trace.target)
            stroke = self._mark("stencil", stroke_variant,
                                SpanAnchor(trace.target, 0, len(text)))
            if stroke is not None:
                mark.children.append(stroke)
        return mark


def annotate_traces(history: DocumentHistory, traces: TraceSet,
                    aggregated: AggregatedTraces,
                    profile: IntentProfile) -> list[Mark]:
    annotator = _Annotator(history, traces, profile)
    marks: list[Mark] = []
    for idx in aggregated.surviving:
        marks.extend(annotator._generation_marks(traces.generations[idx]))
    for trace in aggregated.discards:
        mark = annotator._discard_mark(trace)
        if mark is not None:
            marks.append(mark)
    for trace in aggregated.feedback:
        mark = annotator._feedback_mark(trace)
        if mark is not None:
            marks.append(mark)
    if profile.granularity is Granularity.PARAGRAPH:
        marks = _collapse_to_blocks(history, traces.final_version, marks)
    return marks


def _collapse_to_blocks(history: DocumentHistory, final_index: int,
                        marks: list[Mark]) -> list[Mark]:
    """Paragraph granularity: widen every span to its whole block, dedupe."""
    tree = history.tree_map(final_index)
    block_of: dict[int, int] = {}

    def walk(lineage: int, block: int | None) -> None:
        rec = tree[lineage]
        if block is not None:
            block_of[lineage] = block
        if isinstance(rec, StructuralNode):
            for child in rec.children:
                walk(child, block if block is not None else child)

    walk(history.root_lineage, None)
    out: list[Mark] = []
    seen: set[tuple] = set()
    for mark in marks:
        node = mark.anchor.node
        block = block_of.get(node, node)
        if isinstance(mark.anchor, SpanAnchor):
            text = history.node_text(final_index, block)
            mark.anchor = SpanAnchor(block, 0, len(text))
        else:
            mark.anchor = MarginAnchor(block, mark.anchor.placement)
        key = (mark.channel, mark.variant, mark.anchor.node,
               getattr(mark.anchor, "placement", None))
        if key in seen:
            continue
        seen.add(key)
        out.append(mark)
    return out


def _anchor_sort_key(order: dict[int, int], anchor: Anchor) -> tuple:
    position = order.get(anchor.node, len(order) + anchor.node)
    if isinstance(anchor, MarginAnchor):
        rank = 0 if anchor.placement == "start" else 2
        return (position, rank, 0, 0)
    return (position, 1, anchor.start, anchor.end)


def mark_sort_key(order: dict[int, int], mark: Mark) -> tuple:
    payload = json.dumps(mark.payload, sort_keys=True) if mark.payload else ""
    return (*_anchor_sort_key(order, mark.anchor), mark.channel, mark.variant,
            mark.intensity if mark.intensity is not None else -1.0, payload)


def sort_marks(document: SchemaDocument, marks: list[Mark]) -> list[Mark]:
    """Canonical order: document position, then channel, variant, payload."""
    order = document_order_map(document)

    def rec(items: list[Mark]) -> list[Mark]:
        for mark in items:
            mark.children = rec(mark.children)
        return sorted(items, key=lambda m: mark_sort_key(order, m))

    return rec(list(marks))


def build_document(history: DocumentHistory, profile: IntentProfile) -> SchemaDocument:
    final_index = history.version_count - 1
    tree = history.tree_map(final_index)
    fonts = "font" in profile.allowed
    root = tree[history.root_lineage]
    blocks: list[DocumentBlock] = []

    def runs_of(lineage: int) -> list[DocumentRun]:
        rec = tree[lineage]
        if isinstance(rec, TextNode):
            font = None
            if fonts:
                font = "sans" if rec.provenance.author is Author.AI else "script"
            return [DocumentRun(node=lineage, text=rec.content, font=font)]
        out: list[DocumentRun] = []
        for child in rec.children:
            out.extend(runs_of(child))
        return out

    for child in root.children:
        rec = tree[child]
        kind = rec.kind.value if isinstance(rec, StructuralNode) else "text"
        blocks.append(DocumentBlock(node=child, kind=kind,
                                    runs=tuple(runs_of(child))))
    return SchemaDocument(blocks=tuple(blocks))


def build_process_schema(history: DocumentHistory,
                         role: StakeholderRole | str,
                         session_id: str = "",
                         config=None) -> ProcessSchema:
    """Full pipeline from a replayed history to a role-scoped schema."""
    if config is not None:
        profile = intent_profile(role, config.profile_overrides)
        traces = analyze_history(
            history,
            tonal_shift_overlap=config.tonal_shift_overlap,
            min_prompt_run=config.min_prompt_run,
            feedback_integration=config.feedback_integration,
            chain_overlap=config.chain_overlap)
        fingerprint = config.fingerprint()
    else:
        from .config import EngineConfig

        profile = intent_profile(role)
        traces = analyze_history(history)
        fingerprint = EngineConfig().fingerprint()
    aggregated = aggregate_traces(history, traces, profile)
    marks = annotate_traces(history, traces, aggregated, profile)
    document = build_document(history, profile)
    return ProcessSchema(document=document, marks=sort_marks(document, marks),
                         role=profile.role.value, session_id=session_id,
                         config_fingerprint=fingerprint)
