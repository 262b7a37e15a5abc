"""Edit-level precision/recall/F0.5, oracle upper bounds, and the correction harness.

Hypothesis edits are extracted with a deterministic merged token edit script
rather than a lattice search; this is reproducible and sufficient for oracle
analyses, where hypotheses derive from the gold side.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Protocol

from .align import AlignmentError
from .corpus import SentencePair
from .editscript import INSERT, REPLACE, apply_transformation, minimal_edit_script
from .textnorm import CasingMode
from .tokenizer import TokenizerMode, detokenize, group_words, tokenize
from .transform import (
    ALL_MODES,
    GranularityMode,
    LabeledSentence,
    TransformationDictionary,
    _encode_unit,
    apply_labels,
    corpus_unit_data,
    counts_from_unit_data,
    dictionary_from_counts,
    encode,
    unit_pairs,
)

ANALYSIS_HEADER = "mode\tcasing\tmin_count\titerations\tdict_size\tprecision\trecall\tf0.5"

EditTuple = tuple[int, int, str]


def f_beta(tp: int, fp: int, fn: int, beta: float = 0.5) -> float:
    """F measure from micro counts; zero proposed edits count as precision 1."""
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    if precision == 0.0 and recall == 0.0:
        return 0.0
    b2 = beta * beta
    return (1.0 + b2) * precision * recall / (b2 * precision + recall)


@dataclass(frozen=True)
class EvalCounts:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f_half: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "EvalCounts":
        precision = tp / (tp + fp) if tp + fp else 1.0
        recall = tp / (tp + fn) if tp + fn else 1.0
        return cls(tp, fp, fn, precision, recall, f_beta(tp, fp, fn, 0.5))


def extract_edits(source_tokens: list[str], hypothesis_tokens: list[str]) -> list[EditTuple]:
    """Token-level edits as (start, end, correction) spans over the source tokens.

    Derived from the minimal token edit script; consecutive insertions at one
    gap merge into a single multi-token correction.
    """
    spans: list[EditTuple] = []
    for pos, kind, payload in minimal_edit_script(source_tokens, hypothesis_tokens):
        if kind == INSERT:
            gap = pos - 1
            if spans and spans[-1][0] == spans[-1][1] == gap:
                start, end, correction = spans.pop()
                spans.append((start, end, f"{correction} {payload}"))
            else:
                spans.append((gap, gap, payload))
        elif kind == REPLACE:
            spans.append((pos - 1, pos, payload))
        else:
            spans.append((pos - 1, pos, ""))
    return spans


def _normalize_correction(text: str) -> str:
    return " ".join(text.split())


def pair_gold_edits(pair: SentencePair, annotator: int = 0) -> list[EditTuple]:
    """Gold edits of a pair: annotated spans when present, else derived from the texts."""
    if pair.gold_edits:
        return [
            (e.start_token, e.end_token, _normalize_correction(e.correction))
            for e in pair.gold_edits
            if e.annotator == annotator
        ]
    return extract_edits(pair.source.split(), pair.gold.split())


def score(items: Iterable[tuple[str, str, list[EditTuple]]]) -> EvalCounts:
    """Micro-averaged counts over (source, hypothesis, gold_edits) triples."""
    tp = fp = fn = 0
    for source, hypothesis, gold_edits in items:
        hyp = set(extract_edits(source.split(), hypothesis.split()))
        gold = {(a, b, _normalize_correction(c)) for a, b, c in gold_edits}
        tp += len(hyp & gold)
        fp += len(hyp - gold)
        fn += len(gold - hyp)
    return EvalCounts.from_counts(tp, fp, fn)


class Classifier(Protocol):
    """Per-unit label predictor; output length must equal input length."""

    def predict(self, units: list[str], context: str) -> list[int]: ...


class OracleClassifier:
    """Predicts the labels that encode the held gold correction."""

    def __init__(
        self,
        dictionary: TransformationDictionary,
        gold: str,
        tokenizer: TokenizerMode = TokenizerMode.word(),
        rng_seed: int = 0,
    ) -> None:
        self.dictionary = dictionary
        self.gold = gold
        self.tokenizer = tokenizer
        self.rng_seed = rng_seed

    def predict(self, units: list[str], context: str) -> list[int]:
        labeled = encode(context, self.gold, self.dictionary, self.tokenizer, self.rng_seed)
        if len(labeled.labels) != len(units):
            raise ValueError("classifier tokenization disagrees with caller")
        return list(labeled.labels)


class MostFrequentClassifier:
    """Baseline: every unit gets the dictionary's most frequent label."""

    def __init__(self, dictionary: TransformationDictionary) -> None:
        best = max(dictionary.entries, key=lambda e: (e.count, -e.ident))
        self.label = best.ident

    def predict(self, units: list[str], context: str) -> list[int]:
        del context
        return [self.label] * len(units)


def sentence_units(
    sentence: str,
    dictionary: TransformationDictionary,
    tokenizer: TokenizerMode = TokenizerMode.word(),
) -> list[str]:
    """The unit texts (subwords or words) the dictionary's granularity operates on."""
    seq = tokenize(sentence, tokenizer, dictionary.casing)
    if dictionary.mode.unit == "subword":
        return seq.texts()
    return [word for word, _ in group_words(seq)]


def iterate_correct(
    sentence: str,
    classifier: Classifier,
    dictionary: TransformationDictionary,
    tokenizer: TokenizerMode = TokenizerMode.word(),
    max_iterations: int = 1,
) -> tuple[str, int]:
    """Repeatedly tokenize, predict and apply until a fixed point or the cap."""
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    current = sentence
    for used in range(1, max_iterations + 1):
        units = sentence_units(current, dictionary, tokenizer)
        labels = classifier.predict(units, current)
        if len(labels) != len(units):
            raise ValueError("classifier returned a label list of the wrong length")
        out = apply_labels(current, LabeledSentence(tuple(units), tuple(labels)), dictionary)
        if out == current:
            return current, used
        current = out
    return current, max_iterations


@dataclass(frozen=True)
class OracleAnalysisRow:
    """One configuration of the upper-bound sweep.

    The sweep also varies the iteration count, so rows carry it alongside the
    granularity, casing and threshold.
    """

    mode: GranularityMode
    casing: CasingMode
    min_count: int
    iterations: int
    dictionary_size: int
    precision: float
    recall: float
    f_half: float


class _CachedEncoder:
    """Per-dictionary unit labeller with memoized fallback search.

    Which matching entry the random scan lands on varies with the seed, but
    every match rewrites the unit into the same gold span, so scores are
    unaffected; memoizing by (unit, span) is therefore safe for upper-bound
    scoring.
    """

    def __init__(self, dictionary: TransformationDictionary, seed: int) -> None:
        self.dictionary = dictionary
        self.rng = random.Random(seed)
        self.cache: dict[tuple[str, str], int] = {}

    def label(self, unit: str, span: str) -> int:
        key = (unit, span)
        ident = self.cache.get(key)
        if ident is None:
            ident = _encode_unit(unit, span, self.dictionary, self.rng)
            self.cache[key] = ident
        return ident


def _upper_bound_outputs(
    pairs: list[SentencePair],
    dictionary: TransformationDictionary,
    tokenizer: TokenizerMode,
    seed: int,
    iterations: int,
    unit_data=None,
) -> list[str]:
    encoder = _CachedEncoder(dictionary, seed)
    unit_kind = dictionary.mode.unit
    outputs = []
    for idx, pair in enumerate(pairs):
        current = pair.source
        for round_no in range(iterations):
            if current == pair.gold:
                break  # keep the upper bound monotone in allowed iterations
            cached = None
            if round_no == 0 and unit_data is not None:
                per_pair, _ = unit_data[idx]
                if per_pair is None:
                    break  # pair cannot be aligned; leave it uncorrected
                cached = per_pair[unit_kind]
            if cached is not None:
                units, spans = cached
            else:
                try:
                    units, spans = unit_pairs(
                        current, pair.gold, dictionary.mode, dictionary.casing, tokenizer
                    )
                except (ValueError, AlignmentError):
                    break
            labels = [encoder.label(u, s) for u, s in zip(units, spans)]
            corrected = []
            for unit, ident in zip(units, labels):
                result = apply_transformation(
                    dictionary.transformation_for(ident), unit
                )
                corrected.append(unit if result is None else result)
            out = detokenize(corrected)
            if out == current:
                break
            current = out
        outputs.append(current)
    return outputs


def oracle_upper_bound(
    pairs: list[SentencePair],
    dictionary: TransformationDictionary,
    tokenizer: TokenizerMode = TokenizerMode.word(),
    seed: int = 0,
    iterations: int = 1,
    annotator: int = 0,
    unit_data=None,
) -> tuple[EvalCounts, OracleAnalysisRow]:
    """Score the corpus as if every encoded label were predicted perfectly.

    ``unit_data`` may carry precomputed per-pair alignments from
    :func:`gecxform.transform.corpus_unit_data` to avoid re-aligning when
    several dictionaries are evaluated over one corpus.
    """
    outputs = _upper_bound_outputs(pairs, dictionary, tokenizer, seed, iterations, unit_data)
    counts = score(
        (pair.source, out, pair_gold_edits(pair, annotator))
        for pair, out in zip(pairs, outputs)
    )
    row = OracleAnalysisRow(
        mode=dictionary.mode,
        casing=dictionary.casing,
        min_count=dictionary.min_count,
        iterations=iterations,
        dictionary_size=dictionary.size,
        precision=counts.precision,
        recall=counts.recall,
        f_half=counts.f_half,
    )
    return counts, row


def analyze(
    pairs: list[SentencePair],
    casing: CasingMode,
    tokenizer: TokenizerMode = TokenizerMode.word(),
    min_counts: tuple[int, ...] = (1, 2, 3),
    iteration_counts: tuple[int, ...] = (1, 4),
    seed: int = 0,
    annotator: int = 0,
) -> list[OracleAnalysisRow]:
    """Upper-bound sweep over every granularity, threshold and iteration setting.

    Every pair is tokenized and aligned once; the counting pass and all
    configurations reuse that work.
    """
    unit_data = corpus_unit_data(pairs, casing, tokenizer, ("subword", "word"))
    counters = counts_from_unit_data(unit_data, ALL_MODES, casing)
    rows = []
    for mode in ALL_MODES:
        for min_count in min_counts:
            dictionary = dictionary_from_counts(counters[mode], mode, casing, min_count)
            for iterations in iteration_counts:
                _, row = oracle_upper_bound(
                    pairs, dictionary, tokenizer, seed, iterations, annotator,
                    unit_data=unit_data,
                )
                rows.append(row)
    return rows


def rows_to_tsv(rows: list[OracleAnalysisRow]) -> str:
    lines = [ANALYSIS_HEADER]
    for row in rows:
        lines.append(
            f"{row.mode.label}\t{row.casing.value}\t{row.min_count}\t{row.iterations}"
            f"\t{row.dictionary_size}\t{row.precision:.4f}\t{row.recall:.4f}"
            f"\t{row.f_half:.4f}"
        )
    return "\n".join(lines) + "\n"
