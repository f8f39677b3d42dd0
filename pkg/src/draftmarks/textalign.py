"""Word-level text alignment: tokenizing, LCS matching, reuse segmentation.

Matching is case-insensitive and ignores punctuation stuck to word edges.
The common-subsequence search is a full DP, not a heuristic: reuse runs
must be length-optimal so the from-prompt threshold behaves predictably.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def normalize_token(raw: str) -> str:
    start, end = 0, len(raw)
    while start < end and _is_punct(raw[start]):
        start += 1
    while end > start and _is_punct(raw[end - 1]):
        end -= 1
    return raw[start:end].casefold()


def token_spans(text: str) -> list[tuple[str, int, int]]:
    """Whitespace-delimited chunks with their [start, end) char spans."""
    out: list[tuple[str, int, int]] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        start = i
        while i < n and not text[i].isspace():
            i += 1
        out.append((text[start:i], start, i))
    return out


def tokenize(text: str) -> list[str]:
    return [t for t in (normalize_token(raw) for raw, _, _ in token_spans(text)) if t]


def lcs_pairs(a: list[str], b: list[str]) -> list[tuple[int, int]]:
    """Index pairs of one longest common subsequence of a and b."""
    m, n = len(a), len(b)
    if m == 0 or n == 0:
        return []
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m - 1, -1, -1):
        row, nxt = dp[i], dp[i + 1]
        for j in range(n - 1, -1, -1):
            if a[i] == b[j]:
                row[j] = nxt[j + 1] + 1
            else:
                down, right = nxt[j], row[j + 1]
                row[j] = down if down >= right else right
    pairs: list[tuple[int, int]] = []
    i = j = 0
    while i < m and j < n:
        if a[i] == b[j]:
            pairs.append((i, j))
            i += 1
            j += 1
        elif dp[i + 1][j] >= dp[i][j + 1]:
            i += 1
        else:
            j += 1
    return pairs


def overlap_coefficient(a: list[str], b: list[str]) -> float:
    """Word-set overlap: |A & B| / min(|A|, |B|); zero when either is empty."""
    sa, sb = set(a), set(b)
    if not sa or not sb:
        return 0.0
    return len(sa & sb) / min(len(sa), len(sb))


def word_levenshtein(a: list[str], b: list[str]) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, wa in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, wb in enumerate(b, start=1):
            cost = 0 if wa == wb else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev = cur
    return prev[-1]


def normalized_word_distance(a_text: str, b_text: str) -> float:
    a, b = tokenize(a_text), tokenize(b_text)
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return word_levenshtein(a, b) / longest


@dataclass(frozen=True)
class ReuseSegment:
    origin: str  # "from-prompt" | "novel-ai"
    start: int
    end: int


def segment_against_prompt(generated: str, prompt_text: str | None,
                           min_run: int) -> list[ReuseSegment]:
    """Partition generated text into prompt-reuse and novel char ranges.

    A from-prompt segment is a maximal run of matched words, consecutive on
    both sides of the alignment, at least `min_run` words long. Boundaries
    sit at the first character of each segment's opening word, so the ranges
    tile [0, len(generated)) exactly.
    """
    if generated == "":
        return []
    spans = token_spans(generated)
    normalized = [(idx, normalize_token(raw)) for idx, (raw, _, _) in enumerate(spans)]
    words = [(idx, tok) for idx, tok in normalized if tok]
    prompt_words = tokenize(prompt_text) if prompt_text else []
    origins = ["novel-ai"] * len(spans)
    if words and prompt_words:
        pairs = lcs_pairs([tok for _, tok in words], prompt_words)
        run: list[int] = []
        runs: list[list[int]] = []
        for k, (wi, pj) in enumerate(pairs):
            if run and wi == pairs[k - 1][0] + 1 and pj == pairs[k - 1][1] + 1:
                run.append(wi)
            else:
                runs.append(run)
                run = [wi]
        runs.append(run)
        for run in runs:
            if len(run) >= min_run:
                lo = words[run[0]][0]
                hi = words[run[-1]][0]
                for idx in range(lo, hi + 1):
                    origins[idx] = "from-prompt"
    # Punctuation-only chunks ride with the preceding word's origin.
    for idx, tok in normalized:
        if not tok and idx > 0:
            origins[idx] = origins[idx - 1]
    segments: list[ReuseSegment] = []
    seg_start = 0
    for idx in range(1, len(spans)):
        if origins[idx] != origins[idx - 1]:
            boundary = spans[idx][1]
            segments.append(ReuseSegment(origins[idx - 1], seg_start, boundary))
            seg_start = boundary
    segments.append(ReuseSegment(origins[-1], seg_start, len(generated)))
    return segments
