"""Stakeholder roles and what each one is allowed to see.

A profile is a projection: which mark channels and variants reach the
reader, how far back in version history traces are surfaced, how finely
marks subdivide text, and how much of each prompt is revealed.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping


class StakeholderRole(str, Enum):
    TEACHER = "teacher"
    REVIEWER = "reviewer"
    GENERAL_READER = "general"
    WRITER = "writer"


class Granularity(str, Enum):
    PHRASE = "phrase"
    NODE = "node"
    PARAGRAPH = "paragraph"


class PromptDetail(str, Enum):
    INSTRUCTION_ONLY = "instruction-only"
    FULL_PROMPT = "full"


# The complete mark vocabulary. Channel -> variants.
MARK_VOCABULARY: dict[str, frozenset[str]] = {
    "masking-tape": frozenset({"single", "stacked", "scrunched", "torn", "segmented"}),
    "smudge": frozenset({"single", "segmented"}),
    "eraser-crumb": frozenset({"solid", "density-varied"}),
    "residual-glue": frozenset({"single", "sequenced"}),
    "stencil": frozenset({"single", "layered", "dotted-strokes", "lined-strokes"}),
    "ghost-text": frozenset({"instruction-only", "full"}),
    "font": frozenset({"script", "sans"}),
}

# When a computed variant is not allowed, fall back along these edges until
# an allowed variant appears; a dead end drops the mark.
VARIANT_FALLBACK: dict[tuple[str, str], str] = {
    ("masking-tape", "stacked"): "single",
    ("masking-tape", "scrunched"): "single",
    ("masking-tape", "torn"): "single",
    ("masking-tape", "segmented"): "single",
    ("smudge", "segmented"): "single",
    ("residual-glue", "sequenced"): "single",
    ("stencil", "layered"): "single",
    ("eraser-crumb", "density-varied"): "solid",
    ("eraser-crumb", "solid"): "density-varied",
    ("ghost-text", "full"): "instruction-only",
}


class UnknownRoleError(Exception):
    pass


@dataclass(frozen=True)
class IntentProfile:
    role: StakeholderRole
    allowed: Mapping[str, frozenset[str]]
    temporal_depth: int | None  # None = unbounded
    granularity: Granularity
    prompt_detail: PromptDetail

    def permits(self, channel: str, variant: str) -> bool:
        return variant in self.allowed.get(channel, frozenset())

    def resolve_variant(self, channel: str, variant: str) -> str | None:
        """The variant itself, its nearest allowed fallback, or None to drop."""
        seen = set()
        current = variant
        while current not in seen:
            if self.permits(channel, current):
                return current
            seen.add(current)
            nxt = VARIANT_FALLBACK.get((channel, current))
            if nxt is None:
                return None
            current = nxt
        return None


_FULL = {channel: frozenset(variants) for channel, variants in MARK_VOCABULARY.items()}

_PROFILES: dict[StakeholderRole, IntentProfile] = {
    StakeholderRole.TEACHER: IntentProfile(
        role=StakeholderRole.TEACHER, allowed=_FULL, temporal_depth=None,
        granularity=Granularity.PHRASE, prompt_detail=PromptDetail.FULL_PROMPT),
    # The writer reviews their own record with nothing held back.
    StakeholderRole.WRITER: IntentProfile(
        role=StakeholderRole.WRITER, allowed=_FULL, temporal_depth=None,
        granularity=Granularity.PHRASE, prompt_detail=PromptDetail.FULL_PROMPT),
    StakeholderRole.REVIEWER: IntentProfile(
        role=StakeholderRole.REVIEWER,
        allowed={
            "masking-tape": frozenset({"single", "stacked"}),
            "eraser-crumb": frozenset({"solid"}),
            "font": frozenset({"script", "sans"}),
        },
        temporal_depth=1, granularity=Granularity.NODE,
        prompt_detail=PromptDetail.INSTRUCTION_ONLY),
    StakeholderRole.GENERAL_READER: IntentProfile(
        role=StakeholderRole.GENERAL_READER,
        allowed={
            "masking-tape": frozenset({"single", "scrunched", "torn"}),
            "smudge": frozenset({"single"}),
            "eraser-crumb": frozenset({"density-varied"}),
            "ghost-text": frozenset({"full"}),
            "stencil": frozenset({"single"}),
            "font": frozenset({"script", "sans"}),
        },
        temporal_depth=3, granularity=Granularity.NODE,
        prompt_detail=PromptDetail.FULL_PROMPT),
}


def intent_profile(role: StakeholderRole | str,
                   overrides: Mapping | None = None) -> IntentProfile:
    """Profile for a role, with optional config-level field overrides."""
    try:
        resolved = StakeholderRole(role)
    except ValueError:
        raise UnknownRoleError(f"unknown stakeholder role '{role}'") from None
    profile = _PROFILES[resolved]
    spec = (overrides or {}).get(resolved.value)
    if not spec:
        return profile
    allowed = profile.allowed
    if "allowed" in spec:
        allowed = {}
        for channel, variants in spec["allowed"].items():
            if channel not in MARK_VOCABULARY:
                raise UnknownRoleError(f"unknown mark channel '{channel}'")
            bad = set(variants) - MARK_VOCABULARY[channel]
            if bad:
                raise UnknownRoleError(f"unknown variants {sorted(bad)} for '{channel}'")
            allowed[channel] = frozenset(variants)
    return IntentProfile(
        role=resolved,
        allowed=allowed,
        temporal_depth=spec.get("temporal_depth", profile.temporal_depth),
        granularity=Granularity(spec.get("granularity", profile.granularity)),
        prompt_detail=PromptDetail(spec.get("prompt_detail", profile.prompt_detail)),
    )
