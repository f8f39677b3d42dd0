"""Structural and textual diffs between two versions of a document."""

from __future__ import annotations

from dataclasses import dataclass, field
from difflib import SequenceMatcher

from .model import DocumentHistory, MaterializedNode, StructuralNode, TextNode

# A char-level edit script is a tuple of ops:
#   ("equal", count) | ("delete", count) | ("insert", text)
CharOp = tuple


def char_script(old: str, new: str) -> tuple[CharOp, ...]:
    """Edit script turning `old` into `new`, from stdlib sequence matching."""
    ops: list[CharOp] = []
    matcher = SequenceMatcher(None, old, new, autojunk=False)
    for tag, i1, i2, j1, j2 in matcher.get_opcodes():
        if tag == "equal":
            ops.append(("equal", i2 - i1))
        elif tag == "delete":
            ops.append(("delete", i2 - i1))
        elif tag == "insert":
            ops.append(("insert", new[j1:j2]))
        else:  # replace
            ops.append(("delete", i2 - i1))
            ops.append(("insert", new[j1:j2]))
    return tuple(ops)


def apply_script(old: str, script: tuple[CharOp, ...]) -> str:
    out: list[str] = []
    pos = 0
    for op in script:
        if op[0] == "equal":
            out.append(old[pos:pos + op[1]])
            pos += op[1]
        elif op[0] == "delete":
            pos += op[1]
        else:
            out.append(op[1])
    if pos != len(old):
        raise ValueError("script does not cover the source string")
    return "".join(out)


@dataclass(frozen=True)
class AddedNode:
    node: int
    kind: str
    content: str | None
    author: str | None
    style: tuple[str, ...]
    children: tuple[int, ...]
    parent: int
    index: int


@dataclass(frozen=True)
class ContentChange:
    node: int
    script: tuple[CharOp, ...]


@dataclass(frozen=True)
class StructureChange:
    node: int
    children: tuple[int, ...]


@dataclass
class NodeChangeSet:
    added: list[AddedNode] = field(default_factory=list)
    removed: list[int] = field(default_factory=list)
    changed: list[ContentChange] = field(default_factory=list)
    structure: list[StructureChange] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.changed or self.structure)


def diff_versions(history: DocumentHistory, i: int, j: int) -> NodeChangeSet:
    """Changes that turn version i into version j, keyed by node lineage."""
    before = history.tree_map(i)
    after = history.tree_map(j)
    parents = history.parent_index_map(j)
    out = NodeChangeSet()
    for lineage in sorted(after.keys() - before.keys()):
        rec = after[lineage]
        parent, index = parents[lineage]
        if isinstance(rec, TextNode):
            out.added.append(AddedNode(
                node=lineage, kind="text", content=rec.content,
                author=rec.provenance.author.value, style=tuple(sorted(rec.style)),
                children=(), parent=parent, index=index))
        else:
            out.added.append(AddedNode(
                node=lineage, kind=rec.kind.value, content=None, author=None,
                style=(), children=tuple(rec.children), parent=parent, index=index))
    out.removed = sorted(before.keys() - after.keys())
    for lineage in sorted(before.keys() & after.keys()):
        a, b = before[lineage], after[lineage]
        if isinstance(a, TextNode) and isinstance(b, TextNode):
            if a.content != b.content:
                out.changed.append(ContentChange(lineage, char_script(a.content, b.content)))
        elif isinstance(a, StructuralNode) and isinstance(b, StructuralNode):
            if tuple(a.children) != tuple(b.children):
                out.structure.append(StructureChange(lineage, tuple(b.children)))
    return out


def apply_changeset(tree: MaterializedNode, changes: NodeChangeSet) -> MaterializedNode:
    """Replay a changeset onto a materialized tree; checks diff round trips."""
    nodes: dict[int, dict] = {}

    def index_tree(node: MaterializedNode) -> None:
        nodes[node.node] = {
            "kind": node.kind, "content": node.content, "author": node.author,
            "style": node.style, "children": [c.node for c in node.children],
        }
        for child in node.children:
            index_tree(child)

    index_tree(tree)
    for change in changes.changed:
        entry = nodes[change.node]
        entry["content"] = apply_script(entry["content"], change.script)
    for added in changes.added:
        nodes[added.node] = {
            "kind": added.kind, "content": added.content, "author": added.author,
            "style": added.style, "children": list(added.children),
        }
    for structure in changes.structure:
        nodes[structure.node]["children"] = list(structure.children)
    for lineage in changes.removed:
        nodes.pop(lineage, None)

    def build(lineage: int) -> MaterializedNode:
        entry = nodes[lineage]
        return MaterializedNode(
            node=lineage, kind=entry["kind"], content=entry["content"],
            author=entry["author"], style=tuple(entry["style"]),
            children=tuple(build(c) for c in entry["children"]))

    return build(tree.node)
