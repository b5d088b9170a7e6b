"""Subword vocabulary comparison: overlap, greedy segmentation and fertility.

Segmentation here is greedy left-to-right longest match over a bare-string
vocabulary.  It is a stand-in for the tokenizer's own inference (unigram or
WordPiece) and is only meant for side-by-side display and piece counts.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import ConfigurationError, InvalidInputError
from .formats import Table

PREFIX = "prefix"
CONTINUATION = "continuation"
BARE = "none"


class MarkerConvention(NamedTuple):
    """How a vocabulary marks word boundaries: ``prefix:▁``, ``continuation:##`` or ``none``."""

    kind: str = BARE
    marker: str = ""

    @classmethod
    def parse(cls, spec: str | None) -> "MarkerConvention":
        if not spec or spec == BARE:
            return cls()
        kind, sep, marker = spec.partition(":")
        if kind not in (PREFIX, CONTINUATION) or not sep or not marker:
            raise ConfigurationError(
                f"bad marker declaration {spec!r}; use prefix:<marker>, continuation:<marker> or none"
            )
        return cls(kind, marker)


SENTENCEPIECE = MarkerConvention(PREFIX, "▁")
WORDPIECE = MarkerConvention(CONTINUATION, "##")


@dataclass(frozen=True)
class Vocabulary:
    entries: frozenset[str]
    convention: MarkerConvention = MarkerConvention()
    # Raw entries that disappeared when markers were stripped (duplicates or bare markers).
    collapsed: int = 0

    def __len__(self):
        return len(self.entries)

    def __contains__(self, piece):
        return piece in self.entries

    @property
    def longest(self):
        return max(map(len, self.entries))


def normalize_vocab(raw: Iterable[str], convention: MarkerConvention = MarkerConvention(),
                    fold_case: bool = False) -> Vocabulary:
    """Strip boundary markers so vocabularies with different conventions compare as bare strings."""
    raw = list(raw)
    entries = set()
    for entry in raw:
        if convention.kind != BARE and entry.startswith(convention.marker):
            entry = entry[len(convention.marker):]
        if fold_case:
            entry = entry.lower()
        if entry:
            entries.add(entry)
    if not entries:
        raise InvalidInputError("vocabulary is empty")
    return Vocabulary(frozenset(entries), convention, len(raw) - len(entries))


def read_vocab_file(path, convention: MarkerConvention = MarkerConvention(),
                    fold_case: bool = False) -> Vocabulary:
    """One entry per line; anything after a tab (e.g. a SentencePiece score) is ignored."""
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    raw = [line.rstrip("\r").split("\t", 1)[0] for line in lines]
    return normalize_vocab([e for e in raw if e], convention, fold_case)


class IntersectionStats(NamedTuple):
    shared: int
    rate_a: float
    rate_b: float
    jaccard: float


def intersection_stats(a: Vocabulary, b: Vocabulary) -> IntersectionStats:
    """Shared entry count, its share of ``a`` (the headline rate), its share of ``b``, and Jaccard."""
    shared = len(a.entries & b.entries)
    union = len(a.entries | b.entries)
    return IntersectionStats(
        shared,
        shared / len(a) if len(a) else 0.0,
        shared / len(b) if len(b) else 0.0,
        shared / union if union else 0.0,
    )


class Segmentation(NamedTuple):
    word: str
    pieces: tuple[str, ...]
    unknown: tuple[bool, ...]

    def __len__(self):
        return len(self.pieces)

    def display(self):
        return "-".join(self.pieces)


def greedy_segment(word: str, vocab: Vocabulary) -> Segmentation:
    """Longest-match-first segmentation; characters with no match become unknown single pieces.

    >>> v = normalize_vocab(["trans", "thoracique", "t"])
    >>> greedy_segment("transthoracique", v).pieces
    ('trans', 'thoracique')
    """
    pieces, unknown = [], []
    longest = vocab.longest
    i = 0
    while i < len(word):
        for j in range(min(len(word), i + longest), i, -1):
            if word[i:j] in vocab.entries:
                pieces.append(word[i:j])
                unknown.append(False)
                i = j
                break
        else:
            pieces.append(word[i])
            unknown.append(True)
            i += 1
    return Segmentation(word, tuple(pieces), tuple(unknown))


class FertilityStats(NamedTuple):
    mean: float
    max: int
    p95: float
    words: int
    unknown_pieces: int


def fertility(words: Sequence[str], vocab: Vocabulary) -> FertilityStats:
    """Average number of pieces per word, plus max and 95th percentile."""
    words = [w for w in words if w]
    if not words:
        raise InvalidInputError("fertility needs at least one non-empty word")
    segs = [greedy_segment(w, vocab) for w in words]
    lengths = np.array([len(s) for s in segs])
    return FertilityStats(
        float(lengths.mean()),
        int(lengths.max()),
        float(np.percentile(lengths, 95)),
        len(words),
        sum(sum(s.unknown) for s in segs),
    )


def segmentation_diff(words: Iterable[str], general: Vocabulary, specialized: Vocabulary) -> Table:
    """One row per word: its pieces under each vocabulary, hyphen-joined."""
    rows = [
        [w, greedy_segment(w, general).display(), greedy_segment(w, specialized).display()]
        for w in words
    ]
    return Table(
        ["term", "general", "specialized"],
        rows,
        title="segmentation comparison",
        notes=["segmentation: greedy longest match over each vocabulary"],
    )
