"""Version-controlled document model with provenance-carrying nodes.

Versions are sealed only by AI-boundary events: an AI text node entering the
tree, an AI node's subtree leaving it, or cumulative deletions inside one AI
node crossing the configured threshold. Human revisions stay inside the
current working version. Sealed versions share node records; a record is
never mutated once a sealed version references it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union

# Revision records allocate ids from a disjoint high range so that logical
# node ids (the id of a node's first record, used by anchors and children
# lists) stay dense and predictable from the event stream alone.
REVISION_ID_BASE = 1 << 32

DEFAULT_DELETION_THRESHOLD = 10


class Author(str, Enum):
    HUMAN = "human"
    AI = "ai"


class NodeKind(str, Enum):
    ROOT = "root"
    PARAGRAPH = "paragraph"
    HEADING = "heading"
    LIST_ITEM = "list-item"
    TEXT = "text"


class Trigger(str, Enum):
    """Why a version exists. Everything after INITIAL is an AI boundary."""

    INITIAL = "initial"
    AI_INSERTED = "ai-inserted"
    AI_REMOVED = "ai-removed"
    AI_DELETION_THRESHOLD = "ai-deletion-threshold"


class ModelError(Exception):
    """Base for document-model failures."""


class UnknownNodeError(ModelError):
    pass


class AnchorError(ModelError):
    pass


class ProvenanceError(ModelError):
    pass


class VersionIndexError(ModelError):
    pass


@dataclass(frozen=True)
class PromptRecord:
    """What the writer asked for: an instruction plus optional pasted context."""

    instruction: str
    context: str | None = None


@dataclass(frozen=True)
class Provenance:
    author: Author
    prompt: PromptRecord | None = None
    generated: str | None = None

    def __post_init__(self) -> None:
        if self.author is Author.HUMAN and (self.prompt or self.generated):
            raise ProvenanceError("human nodes carry no prompt or generated text")
        if self.author is Author.AI and self.prompt is None:
            raise ProvenanceError("AI nodes require a prompt record")


@dataclass(frozen=True)
class TextNode:
    id: int
    lineage: int
    predecessor: int | None
    content: str
    provenance: Provenance
    style: frozenset[str] = frozenset()
    orphan: bool = False


@dataclass
class StructuralNode:
    # children holds lineage ids; the per-version referenced set decides
    # which revision of each child is live. The list mutates in place only
    # while no sealed version references this record.
    id: int
    lineage: int
    predecessor: int | None
    kind: NodeKind
    children: list[int] = field(default_factory=list)


NodeRecord = Union[TextNode, StructuralNode]


@dataclass
class Version:
    index: int
    trigger: Trigger
    root: int
    referenced: set[int]
    deletion_counters: dict[int, int] = field(default_factory=dict)
    sealed: bool = False


@dataclass(frozen=True)
class OrphanContext:
    """Where a never-inserted AI output was aimed, captured at event time."""

    target: int | None
    version_index: int
    target_text: str | None


@dataclass(frozen=True)
class MaterializedNode:
    """Fully expanded tree node; content concrete, ids are lineage ids."""

    node: int
    kind: str
    content: str | None
    author: str | None
    style: tuple[str, ...]
    children: tuple["MaterializedNode", ...]

    def to_jsonable(self) -> dict:
        out: dict = {"node": self.node, "kind": self.kind}
        if self.content is not None:
            out["content"] = self.content
        if self.author is not None:
            out["author"] = self.author
        if self.style:
            out["style"] = list(self.style)
        if self.children:
            out["children"] = [c.to_jsonable() for c in self.children]
        return out


def editor_state_bytes(root: MaterializedNode) -> bytes:
    """Canonical byte form of a materialized tree, for equality checks."""
    return json.dumps(
        root.to_jsonable(), sort_keys=True, ensure_ascii=False, separators=(",", ":")
    ).encode("utf-8")


class DocumentHistory:
    """A document plus every sealed version of it, sharing node records."""

    def __init__(self, deletion_threshold: int = DEFAULT_DELETION_THRESHOLD) -> None:
        if deletion_threshold < 1:
            raise ValueError("deletion threshold must be positive")
        self.deletion_threshold = deletion_threshold
        self.node_pool: dict[int, NodeRecord] = {}
        self.orphans: list[int] = []
        self.orphan_contexts: dict[int, OrphanContext] = {}
        self._next_lineage = 0
        self._next_revision = REVISION_ID_BASE
        self._sealed_ids: set[int] = set()
        # lineage -> live record id for the working version
        self._current: dict[int, int] = {}
        root = self._create_structural(NodeKind.ROOT)
        self.versions: list[Version] = [
            Version(index=0, trigger=Trigger.INITIAL, root=root.lineage,
                    referenced={root.id})
        ]

    # ------------------------------------------------------------------
    # allocation

    def _alloc_lineage(self) -> int:
        lineage = self._next_lineage
        self._next_lineage += 1
        return lineage

    def _alloc_revision(self) -> int:
        rid = self._next_revision
        self._next_revision += 1
        return rid

    def _create_structural(self, kind: NodeKind) -> StructuralNode:
        lineage = self._alloc_lineage()
        rec = StructuralNode(id=lineage, lineage=lineage, predecessor=None, kind=kind)
        self.node_pool[rec.id] = rec
        self._current[lineage] = rec.id
        return rec

    def _create_text(self, content: str, provenance: Provenance,
                     style: frozenset[str] = frozenset()) -> TextNode:
        lineage = self._alloc_lineage()
        rec = TextNode(id=lineage, lineage=lineage, predecessor=None,
                       content=content, provenance=provenance, style=style)
        self.node_pool[rec.id] = rec
        self._current[lineage] = rec.id
        return rec

    # ------------------------------------------------------------------
    # working-version plumbing

    @property
    def working(self) -> Version:
        return self.versions[-1]

    @property
    def version_count(self) -> int:
        return len(self.versions)

    @property
    def root_lineage(self) -> int:
        return self.versions[0].root

    def _resolve(self, node: int) -> NodeRecord:
        rec_id = self._current.get(node)
        if rec_id is None:
            raise UnknownNodeError(f"node {node} is not in the current document")
        return self.node_pool[rec_id]

    def current_record(self, node: int) -> NodeRecord:
        """Live record for a node in the working version."""
        return self._resolve(node)

    def _seal(self, trigger: Trigger) -> None:
        """Freeze the working version and open the next one under `trigger`."""
        working = self.working
        working.sealed = True
        self._sealed_ids.update(working.referenced)
        self.versions.append(
            Version(index=working.index + 1, trigger=trigger,
                    root=working.root, referenced=set(working.referenced))
        )

    def _swap_record(self, old: NodeRecord, new: NodeRecord) -> None:
        self.node_pool[new.id] = new
        self._current[new.lineage] = new.id
        ref = self.working.referenced
        ref.discard(old.id)
        ref.add(new.id)

    def _replace_text(self, old: TextNode, content: str) -> TextNode:
        # Content changes always allocate: the predecessor link is the edit lineage.
        new = TextNode(id=self._alloc_revision(), lineage=old.lineage,
                       predecessor=old.id, content=content,
                       provenance=old.provenance, style=old.style)
        self._swap_record(old, new)
        return new

    def _mutable_structural(self, rec: StructuralNode) -> StructuralNode:
        if rec.id not in self._sealed_ids:
            return rec
        clone = StructuralNode(id=self._alloc_revision(), lineage=rec.lineage,
                               predecessor=rec.id, kind=rec.kind,
                               children=list(rec.children))
        self._swap_record(rec, clone)
        return clone

    def _structural_slot(self, at: tuple[int, int]) -> tuple[StructuralNode, int]:
        """Normalize an anchor to (structural parent, child index)."""
        node, offset = at
        rec = self._resolve(node)
        if isinstance(rec, StructuralNode):
            if not 0 <= offset <= len(rec.children):
                raise AnchorError(f"child index {offset} out of range for node {node}")
            return rec, offset
        # Text-node boundary anchors address the slot before or after the node.
        parent_lineage, index = self._parent_slot(node)
        if offset == 0:
            return self._resolve_structural(parent_lineage), index
        if offset == len(rec.content):
            return self._resolve_structural(parent_lineage), index + 1
        raise AnchorError("node insertion requires a boundary or structural anchor")

    def _resolve_structural(self, node: int) -> StructuralNode:
        rec = self._resolve(node)
        if not isinstance(rec, StructuralNode):
            raise AnchorError(f"node {node} is not structural")
        return rec

    def _parent_slot(self, node: int) -> tuple[int, int]:
        for lineage, rec_id in self._current.items():
            rec = self.node_pool[rec_id]
            if isinstance(rec, StructuralNode) and node in rec.children:
                return lineage, rec.children.index(node)
        raise UnknownNodeError(f"node {node} has no parent in the current document")

    def _subtree_lineages(self, node: int) -> list[int]:
        out = [node]
        rec = self._resolve(node)
        if isinstance(rec, StructuralNode):
            for child in rec.children:
                out.extend(self._subtree_lineages(child))
        return out

    def _contains_ai_text(self, lineages: list[int]) -> bool:
        for lineage in lineages:
            rec = self.node_pool[self._current[lineage]]
            if isinstance(rec, TextNode) and rec.provenance.author is Author.AI:
                return True
        return False

    # ------------------------------------------------------------------
    # operations

    def insert_text(self, at: tuple[int, int], text: str, author: Author,
                    prompt: PromptRecord | None = None,
                    generated: str | None = None,
                    block: NodeKind | None = None,
                    style: frozenset[str] = frozenset()) -> "DocumentHistory":
        """Insert text at an anchor.

        Human text spliced into an existing text node revises that node in
        the working version. Text landing in a structural slot becomes one or
        more new nodes (wrapped in `block` when given); AI insertions seal
        the working version first, so the sealed snapshot predates them.
        """
        if text == "":
            return self
        if author is Author.HUMAN:
            if prompt is not None or generated is not None:
                raise ProvenanceError("human insertions carry no prompt")
            node, offset = at
            rec = self._resolve(node)
            if isinstance(rec, TextNode):
                if rec.orphan:
                    raise AnchorError("orphan nodes are not part of the document")
                if not 0 <= offset <= len(rec.content):
                    raise AnchorError(f"offset {offset} out of range for node {node}")
                self._replace_text(rec, rec.content[:offset] + text + rec.content[offset:])
                return self
            provenance = Provenance(Author.HUMAN)
            parent, index = self._structural_slot(at)
            self._insert_nodes(parent, index, text, provenance, block, style)
            return self
        if prompt is None:
            raise ProvenanceError("AI insertions require a prompt record")
        provenance = Provenance(Author.AI, prompt=prompt,
                                generated=generated if generated is not None else text)
        # Validate the anchor before sealing so failed inserts leave no version.
        parent, index = self._structural_slot(at)
        if block is not None and not any(c for c in text.split("\n\n")):
            return self
        # Seal first: the frozen snapshot is the document before this output.
        self._seal(Trigger.AI_INSERTED)
        self._insert_nodes(parent, index, text, provenance, block, style)
        return self

    def _insert_nodes(self, parent: StructuralNode, index: int, text: str,
                      provenance: Provenance, block: NodeKind | None,
                      style: frozenset[str]) -> list[int]:
        chunks = [c for c in text.split("\n\n") if c] if block is not None else [text]
        created: list[int] = []
        new_children: list[int] = []
        ref = self.working.referenced
        for chunk in chunks:
            node = self._create_text(chunk, provenance, style)
            ref.add(node.id)
            created.append(node.lineage)
            if block is not None:
                wrapper = self._create_structural(block)
                ref.add(wrapper.id)
                wrapper.children.append(node.lineage)
                new_children.append(wrapper.lineage)
            else:
                new_children.append(node.lineage)
        parent = self._mutable_structural(parent)
        parent.children[index:index] = new_children
        return created

    def delete_text(self, at: tuple[int, int], length: int) -> "DocumentHistory":
        """Delete a character range from one text node.

        Deletions inside AI nodes accumulate per node; crossing the threshold
        seals the pre-deletion state and applies the deletion in the newly
        opened version with a fresh counter.
        """
        if length == 0:
            return self
        node, offset = at
        rec = self._resolve(node)
        if not isinstance(rec, TextNode):
            raise AnchorError(f"node {node} holds no text")
        if length < 0 or offset < 0 or offset + length > len(rec.content):
            raise AnchorError(f"range {offset}+{length} out of bounds for node {node}")
        remaining = rec.content[:offset] + rec.content[offset + length:]
        if rec.provenance.author is Author.AI:
            counters = self.working.deletion_counters
            total = counters.get(node, 0) + length
            if total >= self.deletion_threshold:
                self._seal(Trigger.AI_DELETION_THRESHOLD)
                rec = self._resolve(node)
                assert isinstance(rec, TextNode)
                self._replace_text(rec, remaining)
                return self
            counters[node] = total
        self._replace_text(rec, remaining)
        return self

    def remove_node(self, node: int) -> "DocumentHistory":
        """Detach a node and its subtree from the document.

        Seals the pre-removal state when the subtree holds any AI text;
        orphan records keep holding the removed content for later traces.
        """
        if node == self.root_lineage:
            raise AnchorError("cannot remove the document root")
        self._resolve(node)
        parent_lineage, index = self._parent_slot(node)
        subtree = self._subtree_lineages(node)
        if self._contains_ai_text(subtree):
            self._seal(Trigger.AI_REMOVED)
        parent = self._mutable_structural(self._resolve_structural(parent_lineage))
        del parent.children[index]
        ref = self.working.referenced
        counters = self.working.deletion_counters
        for lineage in subtree:
            ref.discard(self._current.pop(lineage))
            counters.pop(lineage, None)
        return self

    def record_orphan(self, content: str, prompt: PromptRecord,
                      target: int | None = None) -> int:
        """Keep an AI output that never entered the document (e.g. feedback)."""
        lineage = self._alloc_lineage()
        rec = TextNode(id=lineage, lineage=lineage, predecessor=None,
                       content=content,
                       provenance=Provenance(Author.AI, prompt=prompt, generated=content),
                       orphan=True)
        self.node_pool[rec.id] = rec
        # Orphans never join the working tree or any referenced set.
        self._current.pop(lineage, None)
        self.orphans.append(lineage)
        target_text: str | None = None
        resolved = target if target is not None and target in self._current else None
        if resolved is not None:
            target_text = self.node_text(self.working.index, resolved)
        self.orphan_contexts[lineage] = OrphanContext(
            target=resolved, version_index=self.working.index, target_text=target_text
        )
        return lineage

    # ------------------------------------------------------------------
    # read side

    def _version(self, index: int) -> Version:
        if not 0 <= index < len(self.versions):
            raise VersionIndexError(f"no version {index} (have {len(self.versions)})")
        return self.versions[index]

    def tree_map(self, index: int) -> dict[int, NodeRecord]:
        """lineage -> record resolution map for one version."""
        version = self._version(index)
        return {self.node_pool[rid].lineage: self.node_pool[rid]
                for rid in version.referenced}

    def materialize_version(self, index: int) -> MaterializedNode:
        version = self._version(index)
        lmap = self.tree_map(index)

        def build(lineage: int) -> MaterializedNode:
            rec = lmap[lineage]
            if isinstance(rec, TextNode):
                return MaterializedNode(node=lineage, kind=NodeKind.TEXT.value,
                                        content=rec.content,
                                        author=rec.provenance.author.value,
                                        style=tuple(sorted(rec.style)), children=())
            return MaterializedNode(node=lineage, kind=rec.kind.value, content=None,
                                    author=None, style=(),
                                    children=tuple(build(c) for c in rec.children))

        return build(version.root)

    def parent_index_map(self, index: int) -> dict[int, tuple[int, int]]:
        out: dict[int, tuple[int, int]] = {}
        for lineage, rec in self.tree_map(index).items():
            if isinstance(rec, StructuralNode):
                for i, child in enumerate(rec.children):
                    out[child] = (lineage, i)
        return out

    def node_text(self, index: int, lineage: int) -> str:
        """Concatenated text content of one node's subtree in one version."""
        lmap = self.tree_map(index)
        if lineage not in lmap:
            raise UnknownNodeError(f"node {lineage} is not in version {index}")

        def walk(l: int) -> Iterator[str]:
            rec = lmap[l]
            if isinstance(rec, TextNode):
                yield rec.content
            else:
                for child in rec.children:
                    yield from walk(child)

        return "".join(walk(lineage))

    def original_record(self, lineage: int) -> NodeRecord:
        """First record of a node: its id equals the lineage id."""
        rec = self.node_pool.get(lineage)
        if rec is None:
            raise UnknownNodeError(f"no node {lineage} in the pool")
        return rec
