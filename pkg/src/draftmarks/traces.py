"""Trace analysis: reconstruct writing-process evidence from a history.

Works purely on sealed versions, orphans, and the current tree; never on the
raw event stream. Thresholds arrive from the engine config so tests can pin
them per case.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .model import (
    Author,
    DocumentHistory,
    PromptRecord,
    TextNode,
    Trigger,
)
from .textalign import (
    ReuseSegment,
    normalized_word_distance,
    overlap_coefficient,
    segment_against_prompt,
    tokenize,
)

DEFAULT_TONAL_SHIFT_OVERLAP = 0.6
DEFAULT_MIN_PROMPT_RUN = 3
DEFAULT_FEEDBACK_INTEGRATION = 0.15
DEFAULT_CHAIN_OVERLAP = 0.5


class GenerationKind(str, Enum):
    NEW_CONTENT = "new-content"
    TONAL_SHIFT = "tonal-shift"
    FEEDBACK = "feedback"


@dataclass(frozen=True)
class Generation:
    """One AI insertion event: the nodes it created and what produced them."""

    nodes: tuple[int, ...]
    prompt: PromptRecord
    generated: str
    version: int
    anchor: tuple[int, int]
    kind: GenerationKind


@dataclass(frozen=True)
class IterationChain:
    links: tuple[int, ...]  # first node of each generation, oldest first


@dataclass(frozen=True)
class DiscardTrace:
    nodes: tuple[int, ...]
    texts: tuple[str, ...]
    versions: tuple[int, ...]
    anchor: tuple[int, str]  # (node, "after") or (node, "start")


@dataclass(frozen=True)
class EditTrace:
    """Human reshaping inside one surviving AI node."""

    node: int
    original: str
    final: str
    deletions: tuple[tuple[int, int], ...]  # (offset in original, length)
    insertions: tuple[tuple[int, str], ...]  # (offset in final, text)


@dataclass(frozen=True)
class FeedbackTrace:
    orphan: int
    target: int | None
    integrated: bool
    untargeted: bool
    layer: int
    version: int
    feedback: str
    prompt: PromptRecord


@dataclass
class TraceSet:
    final_version: int
    generations: list[Generation] = field(default_factory=list)
    generation_by_node: dict[int, int] = field(default_factory=dict)
    chains: list[IterationChain] = field(default_factory=list)
    chain_by_node: dict[int, int] = field(default_factory=dict)
    discards: list[DiscardTrace] = field(default_factory=list)
    edits: dict[int, EditTrace] = field(default_factory=dict)
    segments: dict[int, tuple[ReuseSegment, ...]] = field(default_factory=dict)
    feedback: list[FeedbackTrace] = field(default_factory=list)


def score_prompt_complexity(prompt: PromptRecord) -> float:
    """Half instruction length (saturating at 50 words), half context presence."""
    words = len(tokenize(prompt.instruction))
    return 0.5 * min(1.0, words / 50.0) + 0.5 * (1.0 if prompt.context else 0.0)


def prompt_text(prompt: PromptRecord) -> str:
    if prompt.context:
        return prompt.instruction + "\n" + prompt.context
    return prompt.instruction


def classify_generation(prompt: PromptRecord, generated: str,
                        tonal_shift_overlap: float = DEFAULT_TONAL_SHIFT_OVERLAP,
                        orphan: bool = False) -> GenerationKind:
    """Feedback never landed; heavy word overlap with context is a reshaping."""
    if orphan:
        return GenerationKind.FEEDBACK
    if prompt.context:
        overlap = overlap_coefficient(tokenize(generated), tokenize(prompt.context))
        if overlap >= tonal_shift_overlap:
            return GenerationKind.TONAL_SHIFT
    return GenerationKind.NEW_CONTENT


def collect_generations(history: DocumentHistory,
                        tonal_shift_overlap: float = DEFAULT_TONAL_SHIFT_OVERLAP,
                        ) -> list[Generation]:
    """One Generation per AI-inserted version, in version order."""
    out: list[Generation] = []
    for version in history.versions:
        if version.trigger is not Trigger.AI_INSERTED:
            continue
        before = history.tree_map(version.index - 1)
        after = history.tree_map(version.index)
        added = after.keys() - before.keys()
        ai_nodes = sorted(
            lineage for lineage in added
            if isinstance(after[lineage], TextNode)
            and after[lineage].provenance.author is Author.AI)
        if not ai_nodes:
            continue
        first = after[ai_nodes[0]]
        parents = history.parent_index_map(version.index)
        # Climb to the topmost node this insertion created (its block wrapper,
        # usually) and take that node's slot as the generation anchor. Read
        # from the version's final state: interleaved human structural edits
        # at the same parent would shift it, but nothing re-parents nodes.
        top = ai_nodes[0]
        while parents[top][0] in added:
            top = parents[top][0]
        prompt = first.provenance.prompt
        generated = first.provenance.generated or ""
        out.append(Generation(
            nodes=tuple(ai_nodes), prompt=prompt, generated=generated,
            version=version.index, anchor=parents[top],
            kind=classify_generation(prompt, generated, tonal_shift_overlap)))
    return out


@dataclass(frozen=True)
class _Removal:
    version: int
    nodes: tuple[int, ...]  # removed AI text nodes, lineage order
    texts: tuple[str, ...]
    top: int  # subtree root that left the tree
    position: tuple[int, int]  # (parent, index) in the pre-removal state


def _collect_removals(history: DocumentHistory) -> list[_Removal]:
    out: list[_Removal] = []
    for version in history.versions:
        if version.trigger is not Trigger.AI_REMOVED:
            continue
        before = history.tree_map(version.index - 1)
        after = history.tree_map(version.index)
        removed = before.keys() - after.keys()
        parents = history.parent_index_map(version.index - 1)
        ai_nodes = sorted(
            lineage for lineage in removed
            if isinstance(before[lineage], TextNode)
            and before[lineage].provenance.author is Author.AI)
        if not ai_nodes:
            continue
        # The window may also drop human-removed subtrees (those never seal);
        # the triggering subtree is the one holding the AI text.
        top = ai_nodes[0]
        while parents[top][0] in removed:
            top = parents[top][0]
        out.append(_Removal(
            version=version.index, nodes=tuple(ai_nodes),
            texts=tuple(before[lineage].content for lineage in ai_nodes),
            top=top, position=parents[top]))
    return out


def detect_iteration_chains(history: DocumentHistory,
                            generations: list[Generation],
                            chain_overlap: float = DEFAULT_CHAIN_OVERLAP,
                            ) -> list[IterationChain]:
    """Link generations that revise one another into vertex-disjoint paths.

    A successor either replaces its predecessor's slot right after the
    removal, or quotes at least `chain_overlap` of the predecessor's words
    in its own prompt context.
    """
    removals = _collect_removals(history)
    removal_by_node: dict[int, _Removal] = {}
    for removal in removals:
        for node in removal.nodes:
            removal_by_node[node] = removal

    def replaces(prior: Generation, nxt: Generation) -> bool:
        removal = removal_by_node.get(prior.nodes[0])
        if removal is None:
            return False
        return (nxt.version - removal.version in (1, 2)
                and removal.position == nxt.anchor)

    def quotes(prior: Generation, nxt: Generation) -> bool:
        if not nxt.prompt.context:
            return False
        prior_words = set(tokenize(prior.generated))
        if not prior_words:
            return False
        context_words = set(tokenize(nxt.prompt.context))
        return len(prior_words & context_words) / len(prior_words) >= chain_overlap

    predecessor: dict[int, int] = {}
    has_successor: set[int] = set()
    for j, nxt in enumerate(generations):
        for i in range(j - 1, -1, -1):
            if i in has_successor:
                continue
            prior = generations[i]
            if replaces(prior, nxt) or quotes(prior, nxt):
                predecessor[j] = i
                has_successor.add(i)
                break
    chains: list[IterationChain] = []
    for j in range(len(generations)):
        if j in predecessor and j not in has_successor:
            links = [j]
            while links[-1] in predecessor:
                links.append(predecessor[links[-1]])
            chains.append(IterationChain(
                links=tuple(generations[k].nodes[0] for k in reversed(links))))
    return chains


def detect_discards(history: DocumentHistory, generations: list[Generation],
                    chains: list[IterationChain]) -> list[DiscardTrace]:
    """Group permanently abandoned AI nodes by where they would sit today."""
    final_index = history.version_count - 1
    final_map = history.tree_map(final_index)
    surviving_chain_nodes: set[int] = set()
    generation_by_node = {g.nodes[0]: g for g in generations}
    for chain in chains:
        tail = generation_by_node[chain.links[-1]]
        if any(node in final_map for node in tail.nodes):
            surviving_chain_nodes.update(chain.links[:-1])

    grouped: dict[tuple[int, str], list[tuple[int, int, str]]] = {}
    for removal in _collect_removals(history):
        nodes = [n for n in removal.nodes if n not in surviving_chain_nodes]
        if not nodes:
            continue
        anchor = _resolve_final_anchor(history, removal, final_map)
        bucket = grouped.setdefault(anchor, [])
        for node, text in zip(removal.nodes, removal.texts):
            if node in nodes:
                bucket.append((removal.version, node, text))
    out: list[DiscardTrace] = []
    for anchor in sorted(grouped, key=lambda a: (a[0], a[1])):
        entries = sorted(grouped[anchor])
        out.append(DiscardTrace(
            nodes=tuple(node for _, node, _ in entries),
            texts=tuple(text for _, _, text in entries),
            versions=tuple(version for version, _, _ in entries),
            anchor=anchor))
    return out


def _resolve_final_anchor(history: DocumentHistory, removal: _Removal,
                          final_map: dict) -> tuple[int, str]:
    parent, index = removal.position
    before = history.tree_map(removal.version - 1)
    siblings = before[parent].children
    for i in range(index - 1, -1, -1):
        if siblings[i] in final_map:
            return (siblings[i], "after")
    if parent in final_map:
        return (parent, "start")
    return (history.root_lineage, "start")


def compute_edit_traces(history: DocumentHistory) -> dict[int, EditTrace]:
    """Per surviving AI node: how the writer reshaped the inserted text."""
    from .diff import char_script

    final_index = history.version_count - 1
    out: dict[int, EditTrace] = {}
    for lineage, rec in history.tree_map(final_index).items():
        if not isinstance(rec, TextNode) or rec.provenance.author is not Author.AI:
            continue
        original = history.original_record(lineage).content
        if original == rec.content:
            continue
        deletions: list[tuple[int, int]] = []
        insertions: list[tuple[int, str]] = []
        pos_old = pos_new = 0
        for op in char_script(original, rec.content):
            if op[0] == "equal":
                pos_old += op[1]
                pos_new += op[1]
            elif op[0] == "delete":
                deletions.append((pos_old, op[1]))
                pos_old += op[1]
            else:
                insertions.append((pos_new, op[1]))
                pos_new += len(op[1])
        out[lineage] = EditTrace(node=lineage, original=original, final=rec.content,
                                 deletions=tuple(deletions),
                                 insertions=tuple(insertions))
    return out


def compute_feedback_traces(history: DocumentHistory,
                            integration_threshold: float = DEFAULT_FEEDBACK_INTEGRATION,
                            ) -> list[FeedbackTrace]:
    final_index = history.version_count - 1
    final_map = history.tree_map(final_index)
    layers: dict[int, int] = {}
    out: list[FeedbackTrace] = []
    for orphan in history.orphans:
        rec = history.node_pool[orphan]
        ctx = history.orphan_contexts[orphan]
        if ctx.target is None:
            out.append(FeedbackTrace(
                orphan=orphan, target=None, integrated=False, untargeted=True,
                layer=1, version=ctx.version_index, feedback=rec.content,
                prompt=rec.provenance.prompt))
            continue
        layers[ctx.target] = layers.get(ctx.target, 0) + 1
        final_text = (history.node_text(final_index, ctx.target)
                      if ctx.target in final_map else "")
        distance = normalized_word_distance(ctx.target_text or "", final_text)
        out.append(FeedbackTrace(
            orphan=orphan, target=ctx.target,
            integrated=distance >= integration_threshold, untargeted=False,
            layer=layers[ctx.target], version=ctx.version_index,
            feedback=rec.content, prompt=rec.provenance.prompt))
    return out


def segment_generations(history: DocumentHistory, generations: list[Generation],
                        min_run: int = DEFAULT_MIN_PROMPT_RUN,
                        ) -> dict[int, tuple[ReuseSegment, ...]]:
    """Prompt-reuse segments per AI node, over its originally inserted text."""
    out: dict[int, tuple[ReuseSegment, ...]] = {}
    for generation in generations:
        source = prompt_text(generation.prompt)
        for node in generation.nodes:
            original = history.original_record(node).content
            out[node] = tuple(segment_against_prompt(original, source, min_run))
    return out


def analyze_history(history: DocumentHistory,
                    tonal_shift_overlap: float = DEFAULT_TONAL_SHIFT_OVERLAP,
                    min_prompt_run: int = DEFAULT_MIN_PROMPT_RUN,
                    feedback_integration: float = DEFAULT_FEEDBACK_INTEGRATION,
                    chain_overlap: float = DEFAULT_CHAIN_OVERLAP) -> TraceSet:
    generations = collect_generations(history, tonal_shift_overlap)
    chains = detect_iteration_chains(history, generations, chain_overlap)
    traces = TraceSet(final_version=history.version_count - 1)
    traces.generations = generations
    for idx, generation in enumerate(generations):
        for node in generation.nodes:
            traces.generation_by_node[node] = idx
    traces.chains = chains
    for idx, chain in enumerate(chains):
        for node in chain.links:
            traces.chain_by_node[node] = idx
    traces.discards = detect_discards(history, generations, chains)
    traces.edits = compute_edit_traces(history)
    traces.segments = segment_generations(history, generations, min_prompt_run)
    traces.feedback = compute_feedback_traces(history, feedback_integration)
    return traces
