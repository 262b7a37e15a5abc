import pytest

from gecxform.errors import FormatError
from gecxform.textnorm import CasingMode
from gecxform.tokenizer import (
    SubwordSequence,
    TokenizerMode,
    detokenize,
    group_words,
    load_vocab,
    tokenize,
)

FIG_VOCAB = TokenizerMode.vocab_greedy({" gathe", "rin", " lea", "fes"})


def test_vocab_tokenize_worked_example():
    seq = tokenize("gatherin leafes", FIG_VOCAB, CasingMode.UNCASED)
    assert seq.texts() == [" gathe", "rin", " lea", "fes"]
    assert [sw.word_index for sw in seq.subwords] == [0, 0, 1, 1]
    assert [sw.is_word_initial for sw in seq.subwords] == [True, False, True, False]


def test_word_mode():
    seq = tokenize("hello", TokenizerMode.word(), CasingMode.CASED)
    assert seq.texts() == [" hello"]


def test_char_chunks():
    seq = tokenize("ab cd", TokenizerMode.char_chunks(1), CasingMode.CASED)
    assert seq.texts() == [" a", "b", " c", "d"]
    seq = tokenize("abcdefg", TokenizerMode.char_chunks(3), CasingMode.CASED)
    assert seq.texts() == [" abc", "def", "g"]


def test_uncased_normalizes_before_matching():
    seq = tokenize("Gatherin LEAFES", FIG_VOCAB, CasingMode.UNCASED)
    assert seq.texts() == [" gathe", "rin", " lea", "fes"]


def test_unknown_characters_fall_back_to_single_pieces():
    # " lea" is word-initial only, so mid-word "lea" decomposes to characters
    seq = tokenize("gatherin qqlea", FIG_VOCAB, CasingMode.UNCASED)
    assert seq.texts() == [" gathe", "rin", " q", "q", "l", "e", "a"]


def test_longest_match_wins():
    mode = TokenizerMode.vocab_greedy({" a", " ab", " abc", "d"})
    seq = tokenize("abcd", mode, CasingMode.CASED)
    assert seq.texts() == [" abc", "d"]


def test_empty_sentence_rejected():
    with pytest.raises(ValueError):
        tokenize("   ", TokenizerMode.word(), CasingMode.CASED)


def test_group_words_examples():
    seq = tokenize("gatherin leafes", FIG_VOCAB, CasingMode.UNCASED)
    assert group_words(seq) == [(" gatherin", (0, 2)), (" leafes", (2, 4))]
    seq = tokenize("a", TokenizerMode.word(), CasingMode.CASED)
    assert group_words(seq) == [(" a", (0, 1))]
    seq = tokenize("xyz", TokenizerMode.char_chunks(1), CasingMode.CASED)
    assert group_words(seq) == [(" xyz", (0, 3))]


def test_round_trip_retokenization():
    for mode in (FIG_VOCAB, TokenizerMode.word(), TokenizerMode.char_chunks(2)):
        for casing in CasingMode:
            seq = tokenize("Gatherin  leafes", mode, casing)
            rebuilt = detokenize(seq.texts())
            seq2 = tokenize(rebuilt, mode, casing)
            assert seq2.subwords == seq.subwords


def test_word_index_increments_at_word_initial():
    seq = tokenize("gatherin leafes xx", FIG_VOCAB, CasingMode.UNCASED)
    last = -1
    for sw in seq.subwords:
        if sw.is_word_initial:
            assert sw.word_index == last + 1
            last = sw.word_index
        else:
            assert sw.word_index == last
        assert sw.is_word_initial == sw.text.startswith(" ")


def test_load_vocab(tmp_path):
    path = tmp_path / "vocab.txt"
    path.write_text(" gathe\nrin\n lea\nfes\n", encoding="utf-8")
    vocab = load_vocab(path)
    assert vocab == frozenset({" gathe", "rin", " lea", "fes"})


def test_load_vocab_rejects_cased_pieces_in_uncased_mode(tmp_path):
    path = tmp_path / "vocab.txt"
    path.write_text(" Gathe\nrin\n", encoding="utf-8")
    with pytest.raises(FormatError):
        load_vocab(path, CasingMode.UNCASED)


def test_load_vocab_rejects_blank_interior_line(tmp_path):
    path = tmp_path / "vocab.txt"
    path.write_text(" a\n\nb\n", encoding="utf-8")
    with pytest.raises(FormatError):
        load_vocab(path)


def test_vocab_mode_requires_vocabulary():
    with pytest.raises(ValueError):
        TokenizerMode("vocab")
