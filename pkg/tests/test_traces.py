"""Trace analysis over sealed histories: generations, chains, discards, edits."""

import random

import pytest

from draftmarks.model import Author, DocumentHistory, NodeKind, PromptRecord
from draftmarks.traces import (
    GenerationKind,
    analyze_history,
    classify_generation,
    prompt_text,
    score_prompt_complexity,
)

from fuzzgen import generate_log
from draftmarks.events import parse_session_log
from draftmarks.replay import replay_session


def make_doc():
    h = DocumentHistory()
    h.insert_text((0, 0), "the harbor empties before dawn", Author.HUMAN,
                  block=NodeKind.PARAGRAPH)
    return h


def gen(h, slot, text, instruction="keep going", context=None, block=NodeKind.PARAGRAPH):
    h.insert_text(slot, text, Author.AI,
                  prompt=PromptRecord(instruction=instruction, context=context),
                  generated=text, block=block)
    # the new text node is the lowest lineage allocated by this insert
    return max(l for l, r in h.tree_map(h.version_count - 1).items()) - (
        1 if block is not None else 0)


def test_prompt_complexity_scoring():
    assert score_prompt_complexity(PromptRecord(instruction="")) == 0.0
    half = PromptRecord(instruction="word " * 50)
    assert score_prompt_complexity(half) == 0.5
    assert score_prompt_complexity(
        PromptRecord(instruction="two words", context="x")) == 0.5 + 0.5 * 2 / 50
    assert score_prompt_complexity(PromptRecord(instruction="w " * 80)) == 0.5


def test_classification_by_context_overlap():
    reshaped = "the harbor empties before dawn every single day"
    ctx = "the harbor empties before dawn"
    kind = classify_generation(
        PromptRecord(instruction="make this punchier", context=ctx), reshaped)
    assert kind is GenerationKind.TONAL_SHIFT
    kind = classify_generation(
        PromptRecord(instruction="make this punchier", context=ctx),
        "meanwhile inland the orchards were waking up")
    assert kind is GenerationKind.NEW_CONTENT
    kind = classify_generation(PromptRecord(instruction="continue"), ctx)
    assert kind is GenerationKind.NEW_CONTENT  # no context, overlap undefined


def test_collect_generations_orders_nodes_and_versions():
    h = make_doc()
    gen(h, (0, 1), "first addition about the moorings")
    gen(h, (0, 2), "second addition\n\nwith a follow-on paragraph")
    traces = analyze_history(h)
    assert len(traces.generations) == 2
    one, two = traces.generations
    assert one.version == 1 and two.version == 2
    assert len(one.nodes) == 1 and len(two.nodes) == 2
    assert two.nodes[0] < two.nodes[1]
    for g in (one, two):
        for node in g.nodes:
            assert traces.generation_by_node[node] == traces.generations.index(g)


def test_generation_anchor_is_wrapper_slot():
    h = make_doc()
    gen(h, (0, 1), "tacked on at the end")
    traces = analyze_history(h)
    assert traces.generations[0].anchor == (0, 1)


def test_chain_by_replacement_slot():
    h = make_doc()
    first = gen(h, (0, 1), "draft one of the closing line")
    h.remove_node(first + 1)  # drop the wrapper; seals v2
    second = gen(h, (0, 1), "draft two of the closing line")
    traces = analyze_history(h)
    assert len(traces.chains) == 1
    assert traces.chains[0].links == (first, second)
    assert traces.chain_by_node[first] == traces.chain_by_node[second] == 0


def test_no_chain_when_slot_differs():
    h = make_doc()
    first = gen(h, (0, 1), "draft one of the closing line")
    h.remove_node(first + 1)
    gen(h, (0, 0), "opens the piece instead")
    traces = analyze_history(h)
    assert traces.chains == []


def test_no_chain_when_gap_too_wide():
    h = make_doc()
    first = gen(h, (0, 1), "draft one of the closing line")
    h.remove_node(first + 1)  # removal seals v2
    gen(h, (0, 0), "unrelated front matter")
    gen(h, (0, 0), "more unrelated front matter")
    gen(h, (0, 1), "draft two arrives at the old slot, too late")
    traces = analyze_history(h)
    # same slot as the removal but three versions later: no replacement link
    assert traces.chains == []


def test_chain_by_quoted_context():
    h = make_doc()
    first = gen(h, (0, 1), "gulls wheel over the empty slips at dawn")
    second = gen(h, (0, 2), "a reworked line about patient birds",
                 instruction="rewrite this line",
                 context="gulls wheel over the empty slips at dawn")
    traces = analyze_history(h)
    assert len(traces.chains) == 1
    assert traces.chains[0].links == (first, second)


def test_chain_greedy_prefers_nearest_predecessor():
    h = make_doc()
    a = gen(h, (0, 1), "shared words alpha beta gamma delta")
    b = gen(h, (0, 2), "shared words alpha beta gamma delta epsilon")
    c = gen(h, (0, 3), "final take", instruction="rewrite",
            context="shared words alpha beta gamma delta epsilon")
    traces = analyze_history(h)
    # c quotes both a and b fully; the nearest unclaimed predecessor wins
    assert len(traces.chains) == 1
    assert traces.chains[0].links == (b, c)
    assert a not in traces.chain_by_node


def test_discard_groups_and_anchors():
    h = make_doc()
    first = gen(h, (0, 1), "a stray idea that will not survive")
    second = gen(h, (0, 2), "another stray idea, also doomed")
    h.remove_node(second + 1)
    h.remove_node(first + 1)
    traces = analyze_history(h)
    assert traces.chains == []
    # both sat after the surviving opening paragraph, so one grouped trace
    assert len(traces.discards) == 1
    d = traces.discards[0]
    assert d.nodes == (second, first)
    assert d.versions == (3, 4)
    assert d.texts[1].startswith("a stray")
    assert d.anchor == (2, "after")


def test_replaced_chain_links_are_not_discards():
    h = make_doc()
    first = gen(h, (0, 1), "draft one of the ending")
    h.remove_node(first + 1)
    gen(h, (0, 1), "draft two of the ending, kept")
    traces = analyze_history(h)
    assert len(traces.chains) == 1
    assert traces.discards == []


def test_abandoned_chain_tail_still_discards():
    h = make_doc()
    first = gen(h, (0, 1), "draft one of the ending")
    h.remove_node(first + 1)
    second = gen(h, (0, 1), "draft two of the ending")
    h.remove_node(second + 1)
    traces = analyze_history(h)
    discarded = {n for d in traces.discards for n in d.nodes}
    assert first in discarded and second in discarded


def test_edit_trace_records_deletions_and_insertions():
    h = make_doc()
    node = gen(h, (0, 1), "the committee deliberated at great length")
    h.delete_text((node, 0), 4)  # "the " gone, under threshold
    h.insert_text((node, 0), "our ", Author.HUMAN)
    traces = analyze_history(h)
    edit = traces.edits[node]
    assert edit.original == "the committee deliberated at great length"
    assert edit.final == "our committee deliberated at great length"
    assert edit.deletions and edit.insertions
    assert traces.edits.keys() == {node}


def test_untouched_nodes_have_no_edit_trace():
    h = make_doc()
    gen(h, (0, 1), "left exactly as generated")
    traces = analyze_history(h)
    assert traces.edits == {}


def test_feedback_integration_threshold():
    h = make_doc()
    target = 1
    snapshot = h.node_text(0, target)
    h.record_orphan("consider naming the season",
                    PromptRecord(instruction="critique"), target=target)
    h.record_orphan("general note", PromptRecord(instruction="overall thoughts"))
    # no edits: first is targeted but unintegrated, second untargeted
    traces = analyze_history(h)
    targeted = [f for f in traces.feedback if not f.untargeted]
    assert len(targeted) == 1 and targeted[0].integrated is False
    assert targeted[0].feedback == "consider naming the season"
    untargeted = [f for f in traces.feedback if f.untargeted]
    assert len(untargeted) == 1 and untargeted[0].target is None

    h2 = make_doc()
    h2.record_orphan("rework the rhythm of this sentence",
                     PromptRecord(instruction="critique"), target=1)
    h2.delete_text((1, 0), 10)
    h2.insert_text((1, 0), "every evening the pier ", Author.HUMAN)
    traces2 = analyze_history(h2)
    assert traces2.feedback[0].integrated is True
    assert snapshot == "the harbor empties before dawn"


def test_feedback_layers_count_per_target():
    h = make_doc()
    h.record_orphan("first pass", PromptRecord(instruction="critique"), target=2)
    h.record_orphan("second pass", PromptRecord(instruction="critique again"), target=2)
    h.record_orphan("elsewhere", PromptRecord(instruction="critique"), target=1)
    traces = analyze_history(h)
    layers = {(f.orphan): f.layer for f in traces.feedback}
    assert sorted(layers.values()) == [1, 1, 2]


def test_segments_cover_inserted_text():
    h = make_doc()
    node = gen(h, (0, 1), "use the phrase silver morning water in your answer",
               instruction="write one line that mentions silver morning water")
    traces = analyze_history(h)
    segs = traces.segments[node]
    assert segs[0].start == 0 and segs[-1].end == len(
        "use the phrase silver morning water in your answer")
    assert any(s.origin == "from-prompt" for s in segs)


def test_segments_use_original_text_even_after_edits():
    h = make_doc()
    node = gen(h, (0, 1), "the original inserted sentence stands here")
    h.delete_text((node, 0), 4)
    traces = analyze_history(h)
    assert traces.segments[node][-1].end == len(
        "the original inserted sentence stands here")


def test_prompt_text_joins_context():
    p = PromptRecord(instruction="fix tone", context="old text")
    assert prompt_text(p) == "fix tone\nold text"
    assert prompt_text(PromptRecord(instruction="fix tone")) == "fix tone"


def _analyze_properties(traces, h):
    final_map = h.tree_map(h.version_count - 1)
    gen_nodes = set()
    for g in traces.generations:
        assert g.nodes, "generation without nodes"
        assert h.versions[g.version].trigger.value == "ai-inserted"
        for n in g.nodes:
            assert n not in gen_nodes, "node claimed by two generations"
            gen_nodes.add(n)
    linked = set()
    for chain in traces.chains:
        assert len(chain.links) >= 2
        versions = [traces.generations[traces.generation_by_node[l]].version
                    for l in chain.links]
        assert versions == sorted(versions)
        for l in chain.links:
            assert l not in linked, "node in two chains"
            linked.add(l)
    discarded = set()
    for d in traces.discards:
        assert len(d.nodes) == len(d.texts) == len(d.versions)
        assert list(d.versions) == sorted(d.versions)
        for n in d.nodes:
            assert n not in final_map, "discard trace for surviving node"
            assert n not in discarded
            discarded.add(n)
        anchor_node, placement = d.anchor
        assert placement in ("after", "start")
        assert anchor_node in final_map
    for node, edit in traces.edits.items():
        assert node in final_map
        assert edit.final == final_map[node].content
        rebuilt = list(edit.original)
        for off, length in reversed(edit.deletions):
            del rebuilt[off:off + length]
        for off, text in edit.insertions:
            rebuilt[off:off] = list(text)
        assert "".join(rebuilt) == edit.final
    for f in traces.feedback:
        assert f.untargeted == (f.target is None)
        assert f.layer >= 1
    for node, segs in traces.segments.items():
        original = h.original_record(node).content
        if not original:
            assert segs == ()
            continue
        assert segs[0].start == 0 and segs[-1].end == len(original)
        for prev, cur in zip(segs, segs[1:]):
            assert prev.end == cur.start
            assert prev.origin != cur.origin


def test_fuzzed_histories_satisfy_trace_invariants():
    rng = random.Random(4242)
    for trial in range(40):
        seed = rng.randrange(10 ** 9)
        log_text = generate_log(seed)
        h = replay_session(parse_session_log(log_text))
        traces = analyze_history(h)
        _analyze_properties(traces, h)
