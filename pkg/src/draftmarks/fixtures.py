"""Three built-in co-writing scenario logs.

Each scenario exercises a different collaboration shape: heavy discard and
rewrite (matilda), an iterative refinement chain plus feedback rounds
(lavender), and a single wholesale generation (bruce). The logs are plain
strings so tests and the CLI can regenerate them deterministically.
"""

from __future__ import annotations

import json
from pathlib import Path


class _LogWriter:
    """Builds a session log while tracking the lineage ids replay will assign.

    Ids mirror the engine's allocation order exactly: each inserted chunk
    takes an id for its text node and then one for its wrapper (when a block
    wraps it); feedback and unused generations take one orphan id each.
    """

    def __init__(self, setup: str):
        self.lines = [json.dumps(
            {"version": "1", "consent": True, "setup": setup})]
        self.seq = 0
        self.clock = 0
        self.next_id = 1  # 0 is the document root

    def _emit(self, kind: str, **fields) -> None:
        self.seq += 1
        self.clock += 740  # fixed cadence keeps the bytes reproducible
        record = {"seq": self.seq, "t": self.clock, "kind": kind}
        record.update(fields)
        self.lines.append(json.dumps(record, ensure_ascii=False))

    def _take(self) -> int:
        lineage = self.next_id
        self.next_id += 1
        return lineage

    def type_block(self, slot: tuple[int, int], text: str,
                   block: str = "paragraph") -> tuple[int, int]:
        """Human-typed new block; returns (text node, wrapper)."""
        self._emit("key_insert", anchor=list(slot), text=text, block=block)
        return self._take(), self._take()

    def type_into(self, node: int, offset: int, text: str) -> None:
        self._emit("key_insert", anchor=[node, offset], text=text)

    def delete_range(self, node: int, offset: int, length: int) -> None:
        self._emit("key_delete", scope="range", anchor=[node, offset],
                   length=length)

    def delete_node(self, node: int) -> None:
        self._emit("key_delete", scope="node", node=node)

    def generate(self, slot: tuple[int, int] | None, instruction: str,
                 generated: str, context: str | None = None,
                 block: str | None = "paragraph",
                 wrap_chunks: bool | None = None) -> list[tuple[int, int | None]]:
        """AI generation inserted verbatim; returns (text, wrapper) per chunk.

        `block` mirrors the event field: None omits it (document-end inserts
        then default to paragraph wrapping), "none" forces a bare text node.
        """
        fields = {"anchor": list(slot) if slot is not None else None,
                  "instruction": instruction, "generated": generated,
                  "inserted": generated, "context": context}
        if block is not None:
            fields["block"] = block
        self._emit("ai_generate", **fields)
        wraps = wrap_chunks if wrap_chunks is not None else block != "none"
        chunks = ([c for c in generated.split("\n\n") if c.strip()]
                  if wraps else [generated])
        created = []
        for _ in chunks:
            text_id = self._take()
            created.append((text_id, self._take() if wraps else None))
        return created

    def feedback(self, target: int | None, instruction: str, generated: str,
                 context: str | None = None) -> int:
        self._emit("ai_feedback", target=target, instruction=instruction,
                   generated=generated, context=context)
        return self._take()

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


# ---------------------------------------------------------------- matilda

MATILDA_P1 = ("Volcanoes have always fascinated people because they shape "
              "the land in sudden and violent ways.")
MATILDA_P1_REWRITE = ("Volcanoes have always fascinated people because they "
                      "shape the land in ways both sudden and violent.")
MATILDA_TRANSITION = ("In hindsight, the eruption taught planners a lasting "
                      "lesson about preparation.")


def matilda_log() -> str:
    """A student drafts an essay, discards two AI hooks, keeps two transitions."""
    w = _LogWriter("split_context")
    t1, p1 = w.type_block((0, 0), MATILDA_P1)
    t2, p2 = w.type_block((0, 1), "Mount St Helens erupted in 1980 and the "
                                  "blast flattened forests for miles around.")
    t3, p3 = w.type_block((0, 2), "Scientists now monitor volcanoes with "
                                  "sensors so that towns nearby get warnings "
                                  "in time.")
    (d1, d1w), = w.generate(
        (0, 0), "write an opening hook for my volcano essay",
        "Imagine the ground trembling beneath your feet as the mountain "
        "awakens.")
    w.delete_node(d1w)
    (d2, d2w), = w.generate(
        (0, 0), "try another opening hook",
        "What if the hill outside your window could explode tomorrow?")
    w.delete_node(d2w)
    # she swaps her own first paragraph for an AI rewording of it
    w.delete_node(t1)
    w.generate((p1, 0), "rewrite my first paragraph in a more formal tone",
               MATILDA_P1_REWRITE, context=MATILDA_P1, block="none")
    (tr1, _), = w.generate(
        (p2, 1), "write a transition sentence linking the eruption to the "
                 "lessons learned",
        MATILDA_TRANSITION, block="none")
    w.delete_range(tr1, 0, len("In hindsight, "))  # 14 chars, over threshold
    w.generate((p3, 0), "add a transition sentence at the start of my third "
                        "paragraph",
               "Beyond the devastation, eruptions also renew the soil. ",
               block="none")
    # ordinary polish typed by hand; no versions sealed by this
    w.type_into(t2, 0, "On 18 May 1980, ")
    w.delete_range(t2, len("On 18 May 1980, "), len("Mount St Helens erupted "
                                                    "in 1980 and"))
    w.type_into(t2, len("On 18 May 1980, "), "Mount St Helens erupted and")
    return w.text()


# --------------------------------------------------------------- lavender

LAVENDER_S1 = ("The lamplight guttered as Mara finally let the letter fall "
               "from her hands.")
LAVENDER_S2 = ("She watched as Mara finally let the letter settle beside "
               "the steady flame.")
LAVENDER_S3 = ("She watched as Mara finally let the letter settle beside "
               "the flame, steady now.")
LAVENDER_P3 = ("You could have told me, she said, not looking up from the "
               "stove.")
LAVENDER_P4 = ("The kitchen smelled of ash and oranges, a combination that "
               "made no sense and perfect sense.")


def lavender_log() -> str:
    """A novelist iterates three times on one closing line and takes feedback."""
    w = _LogWriter("integrated_tool")
    t1, p1 = w.type_block((0, 0), "Mara had carried the letter for three "
                                  "days before she dared to open it.")
    t2, p2 = w.type_block((0, 1), "The kitchen was the only room where the "
                                  "lamps still worked.")
    t3, p3 = w.type_block((0, 2), LAVENDER_P3)
    t4, p4 = w.type_block((0, 3), LAVENDER_P4)
    (outline, outline_w), = w.generate(
        (0, 1), "outline the rest of this chapter in three beats",
        "First the letter is read. Then the argument. Then the quiet.")
    w.delete_node(outline_w)
    (g1, g1w), = w.generate((0, 4),
                            "draft the closing paragraph of the scene",
                            LAVENDER_S1)
    w.delete_node(g1w)
    # the composer sends elided selection quotes as context, not whole drafts
    (g2, g2w), = w.generate((0, 4), "make it quieter, less melodramatic",
                            LAVENDER_S2,
                            context="The lamplight guttered … fall from "
                                    "her hands.")
    w.delete_node(g2w)
    w.generate((0, 4), "keep this exactly but smooth the rhythm a little",
               LAVENDER_S3,
               context="She watched as Mara finally let the letter "
                       "settle … flame.")
    w.feedback(p3, "give feedback on my dialogue",
               "The line lands, but letting her look up once would sharpen "
               "it.", context=LAVENDER_P3)
    # she reworks the dialogue paragraph after reading the note
    w.delete_range(t3, len("You could have told me, she said, "),
                   len("not looking up from the stove."))
    w.type_into(t3, len("You could have told me, she said, "),
                "her eyes fixed on the stove flame.")
    w.feedback(p4, "is this description too long",
               "Cut one of the two scents; the contradiction carries it.",
               context=LAVENDER_P4)
    w.delete_range(t4, len("The kitchen smelled of ash and oranges"),
                   len(", a combination that made no sense and perfect "
                       "sense"))
    w.type_into(t4, len("The kitchen smelled of ash and oranges"),
                ", which should not have worked")
    w.feedback(p2, "does the pacing hold here",
               "Pacing holds; the lamp detail buys the slow beat.")
    return w.text()


# ------------------------------------------------------------------ bruce

BRUCE_INSTRUCTION = (
    "write a five hundred word essay on whether school uniforms limit how "
    "students express themselves, casual tenth grade voice, do not mention "
    "any statistics")

BRUCE_ESSAY = (
    "Everyone at my school has an opinion about uniforms, and most of those "
    "opinions are loud. The dress code debate comes back every single year, "
    "usually right after spirit week.\n\n"
    "People who like uniforms say mornings get easier when nobody picks an "
    "outfit. People who hate them say clothes are how you show who you are "
    "before you ever say a word.\n\n"
    "Honestly, both sides want the same thing, which is to feel comfortable "
    "walking into first period. Maybe that matters more than the fabric "
    "rules themselves.")

BRUCE_ADDED_SENTENCE = (" My cousin transferred to a uniform school and says "
                        "she stopped caring by October.")


def bruce_log() -> str:
    """One wholesale generation, then a single hand-typed sentence inside it."""
    w = _LogWriter("ambient_assistant")
    chunks = w.generate(None, BRUCE_INSTRUCTION, BRUCE_ESSAY, block=None)
    third_text = chunks[2][0]
    third_chunk = BRUCE_ESSAY.split("\n\n")[2]
    w.type_into(third_text, len(third_chunk), BRUCE_ADDED_SENTENCE)
    return w.text()


FIXTURES = {
    "matilda": matilda_log,
    "lavender": lavender_log,
    "bruce": bruce_log,
}


def write_fixture_logs(directory: str | Path) -> dict[str, Path]:
    """Write every scenario log as <name>.log under `directory`."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}
    for name, build in FIXTURES.items():
        path = directory / f"{name}.log"
        path.write_text(build(), encoding="utf-8")
        written[name] = path
    return written
