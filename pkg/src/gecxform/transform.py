"""Transformation dictionaries: induction over a corpus, label encoding, decoding.

A dictionary is induced per granularity (character or string programs, applied
per subword or per word) by aligning every sentence pair, cutting the gold
span of each unit, and counting the transformation that rewrites the unit into
its span. Encoding looks the built transformation up by value, falls back to a
seeded random scan of the dictionary, and finally to the uncorrectable label.
Decoding applies the labelled transformation per unit; uncorrectable and
inapplicable labels leave the unit unchanged.
"""

from __future__ import annotations

import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

from ._parallel import map_ordered
from .align import AlignmentError, align
from .editscript import (
    KEEP,
    UNCORRECTABLE,
    CharTransformation,
    StringTransformation,
    Transformation,
    UncorrectableMarker,
    UnreachableSpanError,
    apply_transformation,
    build_char_transformation,
    build_string_transformation,
    parse_transformation,
    serialize_transformation,
)
from .errors import FormatError
from .textnorm import CasingMode
from .tokenizer import TokenizerMode, detokenize, group_words, tokenize

log = logging.getLogger(__name__)

UNCORRECTABLE_ID = 0
KEEP_ID = 1

_GRAINS = ("char", "string")
_UNITS = ("subword", "word")


@dataclass(frozen=True)
class GranularityMode:
    """One of the four transformation granularities, e.g. char-at-subword."""

    grain: str
    unit: str

    def __post_init__(self) -> None:
        if self.grain not in _GRAINS or self.unit not in _UNITS:
            raise ValueError(f"invalid granularity: {self.grain}-at-{self.unit}")

    @property
    def label(self) -> str:
        return f"{self.grain}-at-{self.unit}"

    @classmethod
    def parse(cls, label: str) -> "GranularityMode":
        parts = label.split("-at-")
        if len(parts) != 2:
            raise ValueError(f"invalid granularity label: {label!r}")
        return cls(parts[0], parts[1])


ALL_MODES = tuple(
    GranularityMode(grain, unit) for grain in _GRAINS for unit in _UNITS
)


@dataclass(frozen=True)
class DictEntry:
    ident: int
    count: int
    transformation: Transformation


@dataclass
class TransformationDictionary:
    """Induced label set. Entry 0 is always uncorrectable and entry 1 keep."""

    mode: GranularityMode
    casing: CasingMode
    min_count: int
    entries: tuple[DictEntry, ...]
    _by_value: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.entries) < 2:
            raise ValueError("dictionary must contain uncorrectable and keep")
        if not isinstance(self.entries[UNCORRECTABLE_ID].transformation, UncorrectableMarker):
            raise ValueError("entry 0 must be the uncorrectable marker")
        if self.entries[KEEP_ID].transformation != KEEP:
            raise ValueError("entry 1 must be keep")
        for i, entry in enumerate(self.entries):
            if entry.ident != i:
                raise ValueError("entry ids must be dense and ascending")
        self._by_value = {e.transformation: e.ident for e in self.entries}
        if len(self._by_value) != len(self.entries):
            raise ValueError("dictionary entries must be unique")

    @property
    def size(self) -> int:
        return len(self.entries)

    def lookup(self, transformation: Transformation) -> int | None:
        return self._by_value.get(transformation)

    def transformation_for(self, ident: int) -> Transformation:
        if not 0 <= ident < len(self.entries):
            raise KeyError(f"label id {ident} not in dictionary")
        return self.entries[ident].transformation

    def truncated(self, max_rules: int) -> "TransformationDictionary":
        """Keep uncorrectable, keep, and the ``max_rules`` most frequent rules."""
        return TransformationDictionary(
            self.mode, self.casing, self.min_count, self.entries[: max_rules + 2]
        )


@dataclass(frozen=True)
class LabeledSentence:
    units: tuple[str, ...]
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.units) != len(self.labels):
            raise ValueError("units and labels must have equal length")


def _pair_texts(pair) -> tuple[str, str]:
    if isinstance(pair, (tuple, list)):
        source, gold = pair
        return source, gold
    return pair.source, pair.gold


def unit_pairs(
    source: str,
    gold: str,
    mode: GranularityMode,
    casing: CasingMode,
    tokenizer: TokenizerMode,
) -> tuple[list[str], list[str]]:
    """Tokenize, align, and cut one gold span per unit of the requested mode."""
    seq = tokenize(source, tokenizer, casing)
    alignment = align(seq, gold)
    spans = alignment.span_texts
    if mode.unit == "subword":
        return seq.texts(), spans
    units, unit_spans = [], []
    for word_text, (a, b) in group_words(seq):
        units.append(word_text)
        unit_spans.append("".join(spans[a:b]))
    return units, unit_spans


def build_unit_transformation(
    unit: str, span: str, grain: str, casing: CasingMode
) -> Transformation | None:
    """Transformation rewriting unit into span, or None when unreachable.

    Identity pairs canonicalize to KEEP in both grains so dictionaries share
    one keep entry.
    """
    if unit == span:
        return KEEP
    try:
        if grain == "char":
            return build_char_transformation(unit, span, casing)
        return build_string_transformation(unit, span)
    except UnreachableSpanError:
        return None


def _pair_mode_units(pair, casing, tokenizer, unit_kinds):
    """Per-pair unit/span lists for the requested unit kinds, or None on failure."""
    source, gold = _pair_texts(pair)
    try:
        seq = tokenize(source, tokenizer, casing)
        alignment = align(seq, gold)
    except (ValueError, AlignmentError) as exc:
        return None, f"{exc} (source={source!r})"
    spans = alignment.span_texts
    result = {}
    if "subword" in unit_kinds:
        result["subword"] = (seq.texts(), spans)
    if "word" in unit_kinds:
        units, unit_spans = [], []
        for word_text, (a, b) in group_words(seq):
            units.append(word_text)
            unit_spans.append("".join(spans[a:b]))
        result["word"] = (units, unit_spans)
    return result, None


def corpus_unit_data(pairs, casing: CasingMode, tokenizer: TokenizerMode, unit_kinds):
    """Tokenize and align every pair once, for the requested unit kinds.

    Returns one ``(per_pair, problem)`` entry per pair, where ``per_pair``
    maps each unit kind to its (units, spans) lists, or is None with a
    diagnostic when the pair cannot be processed.
    """
    worker = partial(
        _pair_mode_units, casing=casing, tokenizer=tokenizer, unit_kinds=set(unit_kinds)
    )
    return map_ordered(worker, list(pairs))


def counts_from_unit_data(data, modes, casing: CasingMode) -> dict[GranularityMode, Counter]:
    counters = {mode: Counter() for mode in modes}
    for per_pair, problem in data:
        if per_pair is None:
            log.warning("skipping pair: %s", problem)
            continue
        for mode in modes:
            units, spans = per_pair[mode.unit]
            counter = counters[mode]
            for unit, span in zip(units, spans):
                t = build_unit_transformation(unit, span, mode.grain, casing)
                counter[UNCORRECTABLE if t is None else t] += 1
    return counters


def count_transformations(
    pairs,
    modes,
    casing: CasingMode,
    tokenizer: TokenizerMode,
) -> dict[GranularityMode, Counter]:
    """Count built transformations for several granularities in one pass.

    Pairs that fail to tokenize or align are skipped with a diagnostic.
    Units whose transformation is unreachable count toward uncorrectable.
    """
    unit_kinds = {m.unit for m in modes}
    data = corpus_unit_data(pairs, casing, tokenizer, unit_kinds)
    return counts_from_unit_data(data, modes, casing)


def dictionary_from_counts(
    counts: Counter,
    mode: GranularityMode,
    casing: CasingMode,
    min_count: int,
) -> TransformationDictionary:
    """Threshold the counts and assign stable ids.

    Uncorrectable and keep are always present (ids 0 and 1); the rest are
    ordered by descending frequency, then by serialized form.
    """
    entries = [
        DictEntry(UNCORRECTABLE_ID, counts.get(UNCORRECTABLE, 0), UNCORRECTABLE),
        DictEntry(KEEP_ID, counts.get(KEEP, 0), KEEP),
    ]
    rest = [
        (t, c)
        for t, c in counts.items()
        if c >= min_count and t != KEEP and not isinstance(t, UncorrectableMarker)
    ]
    rest.sort(key=lambda item: (-item[1], serialize_transformation(item[0])))
    for offset, (t, c) in enumerate(rest):
        entries.append(DictEntry(2 + offset, c, t))
    return TransformationDictionary(mode, casing, min_count, tuple(entries))


def induce(
    pairs,
    mode: GranularityMode,
    casing: CasingMode,
    min_count: int = 1,
    synthetic_pairs=(),
    synthetic_limit: int = 0,
    seed: int = 0,
    tokenizer: TokenizerMode = TokenizerMode.word(),
) -> TransformationDictionary:
    """Induce a transformation dictionary from authentic plus capped synthetic pairs.

    ``seed`` does not influence induction (which is deterministic); it is
    accepted so pipelines can carry one seed end to end.
    """
    del seed
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    if synthetic_limit < 0:
        raise ValueError("synthetic_limit must be >= 0")
    work = list(pairs) + list(synthetic_pairs)[:synthetic_limit]
    if not work:
        raise ValueError("induction requires at least one pair")
    counts = count_transformations(work, (mode,), casing, tokenizer)[mode]
    return dictionary_from_counts(counts, mode, casing, min_count)


def _search_candidates(dictionary: TransformationDictionary) -> list[DictEntry]:
    return [e for e in dictionary.entries if e.ident != UNCORRECTABLE_ID]


def _encode_unit(
    unit: str,
    span: str,
    dictionary: TransformationDictionary,
    rng: random.Random,
) -> int:
    built = build_unit_transformation(
        unit, span, dictionary.mode.grain, dictionary.casing
    )
    if built is not None:
        ident = dictionary.lookup(built)
        if ident is not None:
            return ident
    candidates = _search_candidates(dictionary)
    rng.shuffle(candidates)
    for entry in candidates:
        if apply_transformation(entry.transformation, unit) == span:
            return entry.ident
    return UNCORRECTABLE_ID


def encode(
    source: str,
    gold: str,
    dictionary: TransformationDictionary,
    tokenizer: TokenizerMode = TokenizerMode.word(),
    rng_seed: int = 0,
) -> LabeledSentence:
    """Label every unit of ``source`` with the dictionary entry encoding its correction.

    Direct lookup first; otherwise dictionary entries are tried in seeded
    random order, accepting the first whose application yields the unit's
    gold span; otherwise the uncorrectable label.
    """
    units, spans = unit_pairs(source, gold, dictionary.mode, dictionary.casing, tokenizer)
    rng = random.Random(rng_seed)
    labels = tuple(_encode_unit(u, s, dictionary, rng) for u, s in zip(units, spans))
    return LabeledSentence(tuple(units), labels)


def apply_labels(
    source: str,
    labeled: LabeledSentence,
    dictionary: TransformationDictionary,
) -> str:
    """Decode labels back to text; unknown ids raise, inapplicable labels keep the unit."""
    del source  # units carry the tokenization the labels were produced against
    out = []
    for unit, ident in zip(labeled.units, labeled.labels):
        result = apply_transformation(dictionary.transformation_for(ident), unit)
        out.append(unit if result is None else result)
    return detokenize(out)


# --- dictionary file format ---------------------------------------------------
#
# UTF-8 text. Header line:
#   mode=<char|string>-at-<subword|word> casing=<cased|uncased> min_count=<n>
# then one entry per line: <id>\t<count>\t<serialized transformation>


def dumps_dictionary(dictionary: TransformationDictionary) -> str:
    lines = [
        f"mode={dictionary.mode.label} casing={dictionary.casing.value} "
        f"min_count={dictionary.min_count}"
    ]
    for entry in dictionary.entries:
        lines.append(
            f"{entry.ident}\t{entry.count}\t"
            f"{serialize_transformation(entry.transformation)}"
        )
    return "\n".join(lines) + "\n"


def loads_dictionary(text: str) -> TransformationDictionary:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError("empty dictionary file")
    header = lines[0].split(" ")
    fields = {}
    for token in header:
        key, sep, value = token.partition("=")
        if not sep or key in fields:
            raise FormatError(f"malformed dictionary header: {lines[0]!r}")
        fields[key] = value
    if set(fields) != {"mode", "casing", "min_count"}:
        raise FormatError(f"malformed dictionary header: {lines[0]!r}")
    try:
        mode = GranularityMode.parse(fields["mode"])
        casing = CasingMode.parse(fields["casing"])
        min_count = int(fields["min_count"])
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    entries = []
    for lineno, raw in enumerate(lines[1:], 2):
        parts = raw.split("\t", 2)
        if len(parts) != 3:
            raise FormatError(f"line {lineno}: expected id, count, transformation")
        try:
            ident, count = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"line {lineno}: malformed entry {raw!r}") from None
        try:
            transformation = parse_transformation(parts[2])
        except FormatError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        entries.append(DictEntry(ident, count, transformation))
    try:
        return TransformationDictionary(mode, casing, min_count, tuple(entries))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def save_dictionary(dictionary: TransformationDictionary, path: str | Path) -> None:
    Path(path).write_text(dumps_dictionary(dictionary), encoding="utf-8")


def load_dictionary(path: str | Path) -> TransformationDictionary:
    return loads_dictionary(Path(path).read_text(encoding="utf-8"))
