"""Subword tokenization with the leading-space word convention.

The first subword of every word carries one prepended space; continuation
subwords carry no marker. Concatenating the subword texts of a sentence and
trimming the single leading space therefore reproduces the (mode-normalized)
sentence.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import FormatError
from .textnorm import CasingMode, fold

WORD_LEAD = " "

_KINDS = ("word", "vocab", "chars")


@dataclass(frozen=True)
class Subword:
    text: str
    word_index: int
    is_word_initial: bool


@dataclass(frozen=True)
class SubwordSequence:
    subwords: tuple[Subword, ...]
    source_sentence: str

    def texts(self) -> list[str]:
        return [sw.text for sw in self.subwords]


@dataclass(frozen=True)
class TokenizerMode:
    """How sentences split into subwords.

    kind "word": one subword per whitespace token.
    kind "vocab": greedy longest-prefix matching against a piece vocabulary;
        word-initial pieces are stored with a leading space. Characters not
        coverable by the vocabulary fall back to single-character pieces.
    kind "chars": fixed chunks of ``chunk_size`` characters per word.
    """

    kind: str
    vocab: frozenset[str] | None = None
    chunk_size: int = 1

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown tokenizer kind: {self.kind!r}")
        if self.kind == "vocab":
            if not self.vocab:
                raise ValueError("vocab tokenizer requires a non-empty vocabulary")
            for piece in self.vocab:
                _check_piece(piece)
        if self.kind == "chars" and self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")

    @classmethod
    def word(cls) -> "TokenizerMode":
        return cls("word")

    @classmethod
    def vocab_greedy(cls, pieces) -> "TokenizerMode":
        return cls("vocab", vocab=frozenset(pieces))

    @classmethod
    def char_chunks(cls, k: int) -> "TokenizerMode":
        return cls("chars", chunk_size=k)


def _check_piece(piece: str) -> None:
    if not piece or piece == WORD_LEAD:
        raise ValueError(f"invalid vocabulary piece: {piece!r}")
    body = piece[1:] if piece.startswith(WORD_LEAD) else piece
    if not body or any(ch.isspace() for ch in body):
        raise ValueError(f"invalid vocabulary piece: {piece!r}")


def tokenize(sentence: str, mode: TokenizerMode, casing: CasingMode) -> SubwordSequence:
    """Split ``sentence`` into subwords; word boundaries follow whitespace.

    In uncased mode the subword texts are lowercased, diacritics-stripped
    views of the input.
    """
    words = fold(sentence, casing).split()
    if not words:
        raise ValueError("cannot tokenize an empty sentence")
    max_piece = max(len(p) for p in mode.vocab) if mode.kind == "vocab" else 0
    subwords: list[Subword] = []
    for wi, word in enumerate(words):
        spaced = WORD_LEAD + word
        if mode.kind == "word":
            pieces = [spaced]
        elif mode.kind == "chars":
            k = mode.chunk_size
            pieces = [WORD_LEAD + word[:k]] + [word[i : i + k] for i in range(k, len(word), k)]
        else:
            pieces = _greedy_pieces(spaced, mode.vocab, max_piece)
        for pi, piece in enumerate(pieces):
            subwords.append(Subword(piece, wi, pi == 0))
    return SubwordSequence(tuple(subwords), sentence)


def _greedy_pieces(spaced: str, vocab: frozenset[str], max_piece: int) -> list[str]:
    # Longest matching piece first; restart right after the match. Unknown
    # characters emit a single-character piece (the leading space travels
    # with the first character of the word).
    pieces = []
    pos = 0
    n = len(spaced)
    while pos < n:
        limit = min(n - pos, max_piece)
        match = None
        for length in range(limit, 0, -1):
            cand = spaced[pos : pos + length]
            if cand in vocab:
                match = cand
                break
        if match is None:
            match = spaced[pos : pos + 2] if pos == 0 else spaced[pos]
        pieces.append(match)
        pos += len(match)
    return pieces


def group_words(seq: SubwordSequence) -> list[tuple[str, tuple[int, int]]]:
    """One ``(word_text, (start, end))`` entry per word, over subword indices.

    The word text is the concatenation of its subword texts and keeps the
    leading space.
    """
    ranges: list[list[int]] = []
    for i, sw in enumerate(seq.subwords):
        if sw.is_word_initial:
            ranges.append([i, i + 1])
        else:
            ranges[-1][1] = i + 1
    return [
        ("".join(sw.text for sw in seq.subwords[a:b]), (a, b))
        for a, b in ranges
    ]


def detokenize(units: list[str]) -> str:
    """Invert the space convention: concatenate and trim the single leading space."""
    return "".join(units).removeprefix(WORD_LEAD)


def load_vocab(path: str | Path, casing: CasingMode = CasingMode.CASED) -> frozenset[str]:
    """Read a vocabulary file: UTF-8, one piece per line, leading space significant.

    In uncased mode every piece must already be lowercase and undiacritized.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    pieces = []
    for lineno, raw in enumerate(lines, 1):
        try:
            _check_piece(raw)
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from None
        if casing is CasingMode.UNCASED and fold(raw, casing) != raw:
            raise FormatError(
                f"{path}:{lineno}: piece {raw!r} is not valid for uncased mode"
            )
        pieces.append(raw)
    if not pieces:
        raise FormatError(f"{path}: empty vocabulary")
    return frozenset(pieces)
