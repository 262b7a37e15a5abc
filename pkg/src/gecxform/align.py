"""Extended-LCS alignment of input subwords to contiguous spans of a corrected sentence.

Each subword is assigned a possibly-empty contiguous span of the corrected
("gold") sentence so that the sum of per-pair weights is maximal. Comparisons
ignore casing, diacritics and the identity of punctuation characters; spans
are cut from the original gold text. The gold sentence receives one prepended
space so that its words carry the same leading-space convention as the
subwords.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .textnorm import alignment_normalize, alignment_normalized_view
from .tokenizer import SubwordSequence, WORD_LEAD

# A single subword may absorb at most 8 + 3 * len(subword) gold characters.
SPAN_BOUND_BASE = 8
SPAN_BOUND_PER_CHAR = 3

_NEG = float("-inf")

# Exhaustive search limits for the reference implementation.
BRUTEFORCE_MAX_SUBWORDS = 5
BRUTEFORCE_MAX_GOLD = 16


class AlignmentError(ValueError):
    """No complete alignment exists (the gold text has no alignable characters)."""


def span_length_bound(subword_len: int) -> int:
    return SPAN_BOUND_BASE + SPAN_BOUND_PER_CHAR * subword_len


def edit_distance(a, b) -> int:
    """Unit-cost Levenshtein distance over two sequences."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(b) < len(a):
        a, b = b, a
    prev = list(range(len(a) + 1))
    for j, bc in enumerate(b, 1):
        cur = [j] + [0] * len(a)
        for i, ac in enumerate(a, 1):
            cur[i] = min(prev[i] + 1, cur[i - 1] + 1, prev[i - 1] + (ac != bc))
        prev = cur
    return prev[-1]


def levenshtein_similarity(a: str, b: str) -> float:
    """1 - editDistance / max(len); 1.0 when both strings are empty."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - edit_distance(a, b) / longest


def span_cost(subword: str, span: str) -> float:
    """Weight of pairing one normalized subword with one candidate gold span.

    Exact match scores 1, whitespace-trimmed equality 0.75, anything else half
    the Levenshtein similarity. The similarity is taken over the trimmed
    strings: surrounding whitespace carries no evidence, and counting it would
    let a shifted word boundary outweigh an in-word match.
    """
    if subword == span:
        return 1.0
    sub = subword.strip()
    spn = span.strip()
    if sub == spn:
        return 0.75
    return 0.5 * levenshtein_similarity(sub, spn)


@dataclass(frozen=True)
class Alignment:
    """Per-subword spans over ``gold`` (the corrected sentence with one leading space).

    Spans are half-open ``(start, end)`` character offsets, non-overlapping and
    in order; together they cover every gold character except possibly
    trailing whitespace. A skipped subword has an empty span.
    """

    gold: str
    spans: tuple[tuple[int, int], ...]
    total_weight: float

    @property
    def span_texts(self) -> list[str]:
        return [self.gold[a:b] for a, b in self.spans]


def _subword_texts(subwords) -> list[str]:
    if isinstance(subwords, SubwordSequence):
        return subwords.texts()
    return list(subwords)


def _prepare(subwords, gold: str):
    texts = _subword_texts(subwords)
    if not texts:
        raise ValueError("alignment requires at least one subword")
    if not gold:
        raise ValueError("alignment requires non-empty gold text")
    lead_gold = WORD_LEAD + gold
    view = alignment_normalized_view(lead_gold)
    if not view.normalized.strip():
        raise AlignmentError("gold text contains only whitespace")
    normed = [alignment_normalize(t) for t in texts]
    return lead_gold, view, normed


def align(subwords: SubwordSequence | Sequence[str], gold: str) -> Alignment:
    """Maximum-weight alignment of ``subwords`` to spans of ``gold``.

    Dynamic program over (subword index, gold offset): a subword is either
    skipped or consumes a span of up to ``span_length_bound`` characters;
    whitespace-only spans are never consumed and the gold text must be fully
    consumed except for trailing whitespace. Ties prefer skipping, then the
    shorter span for the earlier subword. If the length bound makes full
    consumption impossible the bound is lifted for that sentence.
    """
    lead_gold, view, normed = _prepare(subwords, gold)
    g = view.normalized
    result = _solve_dp(normed, g, bounded=True)
    if result is None:
        result = _solve_dp(normed, g, bounded=False)
    if result is None:
        raise AlignmentError("no complete alignment exists")
    weight, norm_spans = result
    cuts = view.boundaries()
    spans = tuple((cuts[a], cuts[b]) for a, b in norm_spans)
    return Alignment(lead_gold, spans, weight)


def _solve_dp(normed: list[str], g: str, bounded: bool):
    n = len(normed)
    m = len(g)
    # tail_ws[j]: g[j:] contains no non-space characters
    tail_ws = [False] * (m + 1)
    tail_ws[m] = True
    for j in range(m - 1, -1, -1):
        tail_ws[j] = tail_ws[j + 1] and g[j] == " "

    w_next = [0.0 if tail_ws[j] else _NEG for j in range(m + 1)]
    choices: list[list[int]] = []
    neg = _NEG

    for i in range(n - 1, -1, -1):
        s = normed[i]
        stripped = s.strip()
        ls = len(stripped)
        ns = len(s)
        limit_default = span_length_bound(ns) if bounded else m
        w_cur = [neg] * (m + 1)
        ci = [0] * (m + 1)
        krange = range(1, ls + 1)
        for j in range(m + 1):
            best = w_next[j]
            choice = 0
            limit = min(m - j, limit_default)
            # Levenshtein row of `stripped` against the growing stripped span,
            # updated in place one committed character at a time.
            row = list(range(ls + 1))
            first_ns = -1          # offset of the first non-space span character
            committed_end = -1     # offset just past the last committed character
            pending = 0            # whitespace seen after content, not yet interior
            glen = 0
            for l in range(1, limit + 1):
                pos = j + l - 1
                ch = g[pos]
                if ch == " ":
                    if first_ns < 0:
                        continue  # whitespace-only spans are never candidates
                    pending += 1
                else:
                    if first_ns < 0:
                        first_ns = pos
                    # pending whitespace becomes interior once content follows
                    for commit in (" " * pending + ch) if pending else ch:
                        glen += 1
                        diag = row[0]
                        row[0] = glen
                        for k in krange:
                            above = row[k]
                            cand_k = row[k - 1] + 1
                            if above + 1 < cand_k:
                                cand_k = above + 1
                            d = diag if stripped[k - 1] == commit else diag + 1
                            if d < cand_k:
                                cand_k = d
                            row[k] = cand_k
                            diag = above
                    pending = 0
                    committed_end = pos + 1
                tail = w_next[j + l]
                if tail == neg:
                    continue
                if l == ns and g[j : j + l] == s:
                    c = 1.0
                elif glen == ls and g[first_ns:committed_end] == stripped:
                    c = 0.75
                else:
                    c = 0.5 * (1.0 - row[ls] / (ls if ls > glen else glen))
                cand = c + tail
                if cand > best:
                    best = cand
                    choice = l
            w_cur[j] = best
            ci[j] = choice
        w_next = w_cur
        choices.append(ci)

    if w_next[0] == _NEG:
        return None
    choices.reverse()
    spans = []
    j = 0
    for i in range(n):
        l = choices[i][j]
        spans.append((j, j + l))
        j += l
    return w_next[0], spans


def align_bruteforce(subwords: SubwordSequence | Sequence[str], gold: str) -> Alignment:
    """Reference alignment by exhaustive enumeration of contiguous span partitions.

    Only intended for tests; raises ValueError beyond
    ``BRUTEFORCE_MAX_SUBWORDS`` subwords or ``BRUTEFORCE_MAX_GOLD`` gold
    characters.
    """
    texts = _subword_texts(subwords)
    if len(texts) > BRUTEFORCE_MAX_SUBWORDS or len(gold) > BRUTEFORCE_MAX_GOLD:
        raise ValueError("instance too large for exhaustive alignment")
    lead_gold, view, normed = _prepare(subwords, gold)
    g = view.normalized
    m = len(g)
    n = len(normed)
    tail_ws = [False] * (m + 1)
    tail_ws[m] = True
    for j in range(m - 1, -1, -1):
        tail_ws[j] = tail_ws[j + 1] and g[j] == " "

    def best(i: int, j: int, bounded: bool, memo: dict):
        if i == n:
            return (0.0, ()) if tail_ws[j] else None
        key = (i, j)
        if key in memo:
            return memo[key]
        s = normed[i]
        result = None
        tail = best(i + 1, j, bounded, memo)
        if tail is not None:
            result = (tail[0], ((j, j),) + tail[1])
        limit = min(m - j, span_length_bound(len(s)) if bounded else m)
        for l in range(1, limit + 1):
            span = g[j : j + l]
            if span.isspace():
                continue
            rest = best(i + 1, j + l, bounded, memo)
            if rest is None:
                continue
            cand = span_cost(s, span) + rest[0]
            if result is None or cand > result[0]:
                result = (cand, ((j, j + l),) + rest[1])
        memo[key] = result
        return result

    solved = best(0, 0, True, {})
    if solved is None:
        solved = best(0, 0, False, {})
    if solved is None:
        raise AlignmentError("no complete alignment exists")
    weight, norm_spans = solved
    cuts = view.boundaries()
    spans = tuple((cuts[a], cuts[b]) for a, b in norm_spans)
    return Alignment(lead_gold, spans, weight)
