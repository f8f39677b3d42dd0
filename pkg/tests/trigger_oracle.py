"""Content-free version-count oracle.

Predicts how many versions a log must produce by counting trigger events:
AI text entering the tree (generations and external pastes), subtrees with
AI text leaving it, and per-node deletion tallies crossing the threshold.
Tracks only authorship, parentage and content lengths, never text.
"""

from __future__ import annotations

from draftmarks.events import AIFeedback, AIGenerate, KeyDelete, KeyInsert, Paste

ROOT = 0


class TriggerCounter:
    def __init__(self, deletion_threshold: int = 10):
        self.threshold = deletion_threshold
        self.versions = 1
        self.next_id = 1
        # id -> ("text", author, length) | (kind, None, children list)
        self.meta: dict[int, tuple] = {ROOT: ("root", None, [])}
        self.parent: dict[int, int] = {}
        self.tallies: dict[int, int] = {}

    def _bump(self) -> None:
        self.versions += 1
        self.tallies = {}

    def _register(self, anchor_node: int, text: str, author: str,
                  block: str | None, slot_parent: int, slot_index: int) -> None:
        if block == "none":
            kind = None
        elif block is not None:
            kind = block
        else:
            kind = "paragraph" if anchor_node == ROOT else None
        chunks = [c for c in text.split("\n\n") if c] if kind else [text]
        inserted = []
        for chunk in chunks:
            tid = self.next_id
            self.next_id += 1
            self.meta[tid] = ("text", author, len(chunk))
            if kind:
                wid = self.next_id
                self.next_id += 1
                self.meta[wid] = (kind, None, [tid])
                self.parent[tid] = wid
                inserted.append(wid)
            else:
                inserted.append(tid)
        children = self.meta[slot_parent][2]
        children[slot_index:slot_index] = inserted
        for nid in inserted:
            self.parent[nid] = slot_parent

    def _slot(self, anchor: tuple[int, int]) -> tuple[int, int]:
        nid, offset = anchor
        kind = self.meta[nid][0]
        if kind != "text":
            return nid, offset
        pid = self.parent[nid]
        index = self.meta[pid][2].index(nid)
        return (pid, index) if offset == 0 else (pid, index + 1)

    def _subtree_has_ai_text(self, nid: int) -> bool:
        kind, author, payload = self.meta[nid]
        if kind == "text":
            return author == "ai"
        return any(self._subtree_has_ai_text(c) for c in payload)

    def apply(self, event) -> None:
        if isinstance(event, KeyInsert):
            if event.text == "":
                return
            if self.meta[event.anchor[0]][0] == "text":
                kind, author, length = self.meta[event.anchor[0]]
                self.meta[event.anchor[0]] = (kind, author, length + len(event.text))
                return
            parent, index = self._slot(event.anchor)
            self._register(event.anchor[0], event.text, "human", event.block, parent, index)
        elif isinstance(event, Paste):
            if event.text == "":
                return
            if event.source == "local_app":
                if self.meta[event.anchor[0]][0] == "text":
                    kind, author, length = self.meta[event.anchor[0]]
                    self.meta[event.anchor[0]] = (kind, author, length + len(event.text))
                    return
                parent, index = self._slot(event.anchor)
                self._register(event.anchor[0], event.text, "human", event.block,
                               parent, index)
                return
            # External pastes are AI text entering the tree: a version boundary.
            parent, index = self._slot(event.anchor)
            self._bump()
            self._register(event.anchor[0], event.text, "ai", event.block, parent, index)
        elif isinstance(event, AIGenerate):
            if event.inserted == "":
                if event.generated:
                    self.next_id += 1
                return
            anchor = event.anchor
            if anchor is None:
                anchor = (ROOT, len(self.meta[ROOT][2]))
            kind = event.block
            if kind is None and anchor[0] == ROOT:
                kind = "paragraph"
            if kind not in (None, "none") and not any(
                    c for c in event.inserted.split("\n\n")):
                return
            parent, index = self._slot(anchor)
            self._bump()
            self._register(anchor[0], event.inserted, "ai", event.block, parent, index)
        elif isinstance(event, AIFeedback):
            self.next_id += 1
        elif isinstance(event, KeyDelete):
            if event.scope == "node":
                nid = event.node
                if self._subtree_has_ai_text(nid):
                    self._bump()
                pid = self.parent[nid]
                self.meta[pid][2].remove(nid)
                stack = [nid]
                while stack:
                    cur = stack.pop()
                    kind, _, payload = self.meta.pop(cur)
                    self.tallies.pop(cur, None)
                    self.parent.pop(cur, None)
                    if kind != "text":
                        stack.extend(payload)
                return
            if event.length == 0:
                return
            nid = event.anchor[0]
            kind, author, length = self.meta[nid]
            self.meta[nid] = (kind, author, length - event.length)
            if author == "ai":
                total = self.tallies.get(nid, 0) + event.length
                if total >= self.threshold:
                    self._bump()
                else:
                    self.tallies[nid] = total


def expected_version_count(events, deletion_threshold: int = 10) -> int:
    counter = TriggerCounter(deletion_threshold=deletion_threshold)
    for event in events:
        counter.apply(event)
    return counter.versions
