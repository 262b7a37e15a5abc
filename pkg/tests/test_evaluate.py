import random

import pytest

from corpusgen import suffix_error_pairs, uncased_noise_config
from gecxform.corpus import CorruptionConfig, SentencePair, corrupt_corpus
from gecxform.editscript import KEEP, UNCORRECTABLE
from gecxform.evaluate import (
    ANALYSIS_HEADER,
    EvalCounts,
    MostFrequentClassifier,
    OracleClassifier,
    analyze,
    extract_edits,
    f_beta,
    iterate_correct,
    oracle_upper_bound,
    pair_gold_edits,
    rows_to_tsv,
    score,
)
from gecxform.textnorm import CasingMode
from gecxform.tokenizer import TokenizerMode
from gecxform.transform import (
    GranularityMode,
    TransformationDictionary,
    DictEntry,
    encode,
    induce,
)

U = CasingMode.UNCASED
C = CasingMode.CASED
CHAR_SUB = GranularityMode("char", "subword")
CHUNKS = TokenizerMode.char_chunks(3)


def reserved_only_dictionary(mode=CHAR_SUB, casing=U):
    return TransformationDictionary(
        mode, casing, 1, (DictEntry(0, 0, UNCORRECTABLE), DictEntry(1, 0, KEEP))
    )


# --- metrics ------------------------------------------------------------------


def test_f_beta_examples():
    assert f_beta(1, 0, 0) == 1.0
    # P = R = 0.5
    assert f_beta(1, 1, 1) == pytest.approx(0.5, abs=1e-9)
    # P = 0.8, R = 0.4  ->  1.25*0.8*0.4 / (0.25*0.8 + 0.4)
    assert f_beta(4, 1, 6) == pytest.approx(2 / 3, abs=1e-9)


def test_f_beta_edge_cases():
    assert f_beta(0, 0, 0) == 1.0  # nothing proposed, nothing required
    assert f_beta(0, 0, 5) == 0.0  # nothing proposed, edits required
    assert f_beta(0, 5, 0) == 0.0  # spurious edits only


def test_eval_counts_consistency():
    counts = EvalCounts.from_counts(3, 1, 2)
    assert counts.precision == pytest.approx(0.75)
    assert counts.recall == pytest.approx(0.6)
    assert counts.f_half == pytest.approx(f_beta(3, 1, 2))


# --- edit extraction ----------------------------------------------------------


def test_extract_edits_examples():
    assert extract_edits(["gatherin", "leafes"], ["Gathering", "leaves"]) == [
        (0, 1, "Gathering"),
        (1, 2, "leaves"),
    ]
    assert extract_edits(["a", "b"], ["a", "b"]) == []
    assert extract_edits(["a", "b"], ["a", "x", "b"]) == [(1, 1, "x")]


def test_extract_edits_merges_same_gap_insertions():
    assert extract_edits(["a", "b"], ["a", "x", "y", "b"]) == [(1, 1, "x y")]


def test_extract_edits_deletion():
    assert extract_edits(["a", "b", "c"], ["a", "c"]) == [(1, 2, "")]


def test_pair_gold_edits_prefers_annotations():
    from gecxform.corpus import GoldEdit

    pair = SentencePair("a b", "a c", (GoldEdit(1, 2, "X", "c", 0),))
    assert pair_gold_edits(pair) == [(1, 2, "c")]
    derived = SentencePair("a b", "a c")
    assert pair_gold_edits(derived) == [(1, 2, "c")]


# --- scoring ------------------------------------------------------------------


def test_score_perfect_hypothesis():
    pairs = [("a b", "a c", [(1, 2, "c")]), ("x", "x", [])]
    counts = score(pairs)
    assert (counts.tp, counts.fp, counts.fn) == (1, 0, 0)
    assert counts.f_half == 1.0


def test_score_unchanged_hypothesis():
    counts = score([("a b", "a b", [(1, 2, "c")])])
    assert counts.tp == 0
    assert counts.f_half == 0.0


def test_score_half_recall():
    counts = score([("a b", "c b", [(0, 1, "c"), (1, 2, "d")])])
    assert counts.precision == 1.0
    assert counts.recall == 0.5
    assert counts.f_half == pytest.approx(1.25 * 0.5 / 0.75, abs=1e-9)


def test_score_order_invariant():
    items = [
        ("a b", "c b", [(0, 1, "c")]),
        ("x y", "x z", [(1, 2, "z"), (0, 1, "q")]),
    ]
    forward = score(items)
    backward = score(list(reversed(items)))
    assert forward == backward


# --- oracle upper bound -------------------------------------------------------


def test_upper_bound_self_induced_is_perfect():
    pairs = corrupt_corpus(
        [f"Kočka číslo {i} leze velmi tiše" for i in range(40)],
        uncased_noise_config(3),
    )
    dictionary = induce(pairs, CHAR_SUB, U, min_count=1, tokenizer=CHUNKS)
    counts, row = oracle_upper_bound(pairs, dictionary, CHUNKS, seed=1)
    assert counts.f_half == 1.0
    assert row.dictionary_size == dictionary.size
    assert row.min_count == 1


def test_upper_bound_reserved_dictionary_scores_zero():
    pairs = [SentencePair("kocka leze", "Kočka leze")]
    counts, _ = oracle_upper_bound(pairs, reserved_only_dictionary(), CHUNKS)
    assert counts.f_half == 0.0


def test_upper_bound_iterations_preserve_perfect_scores():
    # a min_count-1 dictionary induced from the corpus itself reaches every
    # gold in round 1; extra allowed rounds must not disturb that
    pairs = suffix_error_pairs(60, seed=9)
    dictionary = induce(pairs, CHAR_SUB, U, min_count=1, tokenizer=CHUNKS)
    one, _ = oracle_upper_bound(pairs, dictionary, CHUNKS, seed=5, iterations=1)
    four, _ = oracle_upper_bound(pairs, dictionary, CHUNKS, seed=5, iterations=4)
    assert one.f_half == 1.0
    assert four.f_half == 1.0


# --- analysis sweep -----------------------------------------------------------


def test_analyze_row_grid_and_monotonicity():
    pairs = suffix_error_pairs(50, seed=4)
    rows = analyze(pairs, U, CHUNKS, seed=2)
    assert len(rows) == 24
    combos = {(r.mode.label, r.min_count, r.iterations) for r in rows}
    assert len(combos) == 24
    by_config = {(r.mode.label, r.min_count, r.iterations): r.f_half for r in rows}
    for mode in ("char-at-subword", "char-at-word", "string-at-subword", "string-at-word"):
        for iters in (1, 4):
            f1 = by_config[(mode, 1, iters)]
            f2 = by_config[(mode, 2, iters)]
            f3 = by_config[(mode, 3, iters)]
            assert f1 + 1e-12 >= f2 >= f3 - 1e-12


def test_rows_to_tsv_format():
    pairs = suffix_error_pairs(10, seed=6)
    rows = analyze(pairs, U, CHUNKS, min_counts=(1,), iteration_counts=(1,))
    text = rows_to_tsv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == ANALYSIS_HEADER
    assert len(lines) == 5
    first = lines[1].split("\t")
    assert first[0] == "char-at-subword"
    assert len(first) == 8
    float(first[5]), float(first[6]), float(first[7])


# --- iterative harness --------------------------------------------------------


def test_iterate_oracle_reaches_gold_first_round():
    pairs = suffix_error_pairs(20, seed=12)
    dictionary = induce(pairs, CHAR_SUB, U, min_count=1, tokenizer=CHUNKS)
    pair = pairs[0]
    oracle = OracleClassifier(dictionary, pair.gold, CHUNKS, rng_seed=0)
    labeled = encode(pair.source, pair.gold, dictionary, CHUNKS)
    assert 0 not in labeled.labels  # fully encodable under min_count 1
    out, used = iterate_correct(pair.source, oracle, dictionary, CHUNKS, max_iterations=4)
    assert out == pair.gold
    assert used <= 4


def test_iterate_all_keep_classifier_is_fixed_point():
    dictionary = reserved_only_dictionary(casing=C)
    baseline = MostFrequentClassifier(dictionary)
    out, used = iterate_correct("whatever text here", baseline, dictionary,
                                TokenizerMode.word(), max_iterations=4)
    assert out == "whatever text here"
    assert used == 1


class OneFixPerPass:
    """Corrects the leftmost fixable unit per round, keeps the rest."""

    def __init__(self, dictionary, gold, tokenizer):
        self.oracle = OracleClassifier(dictionary, gold, tokenizer)

    def predict(self, units, context):
        labels = self.oracle.predict(units, context)
        fixed = []
        used_fix = False
        for label in labels:
            if label != 1 and not used_fix:
                fixed.append(label)
                used_fix = True
            elif label != 1:
                fixed.append(1)
            else:
                fixed.append(label)
        return fixed


def test_iterate_one_fix_per_pass_converges():
    # cased mode so keep labels coincide with "unit already correct"
    pairs = [SentencePair("koc kas mak", "koč kaš mák")]
    dictionary = induce(pairs, CHAR_SUB, C, min_count=1, tokenizer=TokenizerMode.word())
    pair = pairs[0]
    stub = OneFixPerPass(dictionary, pair.gold, TokenizerMode.word())
    out, used = iterate_correct(pair.source, stub, dictionary,
                                TokenizerMode.word(), max_iterations=4)
    assert out == pair.gold
    assert used in (3, 4)


def test_iterate_requires_positive_cap():
    dictionary = reserved_only_dictionary()
    with pytest.raises(ValueError):
        iterate_correct("x", MostFrequentClassifier(dictionary), dictionary,
                        TokenizerMode.word(), max_iterations=0)


def test_classifier_length_contract_enforced():
    dictionary = reserved_only_dictionary(casing=C)

    class Broken:
        def predict(self, units, context):
            return [1]

    with pytest.raises(ValueError):
        iterate_correct("a b c", Broken(), dictionary, TokenizerMode.word(), 2)
