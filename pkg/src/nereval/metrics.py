"""Counting and scoring kernels.

Every evaluation mode reduces to per-class ``(tp, gold_n, pred_n)`` counts
(:class:`MatchCounts`), which are then turned into precision/recall/F1 and
averaged.  Scores are fractions in ``[0, 1]``; any undefined ratio is 0.0.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import ConfigurationError, InvalidInputError
from .tagging import OUTSIDE

MICRO = "micro"
MACRO = "macro"
WEIGHTED = "weighted"
AVERAGES = (MICRO, MACRO, WEIGHTED)

INCLUDE_O = "include-O"
EXCLUDE_O = "exclude-O-from-averages"
O_POLICIES = (INCLUDE_O, EXCLUDE_O)


class Counts(NamedTuple):
    tp: int = 0
    gold_n: int = 0
    pred_n: int = 0

    def __add__(self, other):
        return Counts(self.tp + other.tp, self.gold_n + other.gold_n, self.pred_n + other.pred_n)


class MatchCounts(dict):
    """``label -> Counts``.  Adding two instances sums them class by class."""

    def __add__(self, other):
        merged = MatchCounts(self)
        for label, c in other.items():
            merged[label] = merged.get(label, Counts()) + c
        return merged


class Scores(NamedTuple):
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0


@dataclass(frozen=True)
class ClassScore:
    label: str
    precision: float
    recall: float
    f1: float
    support: int
    # True when a zero denominator forced some score to 0.0.
    undefined: bool = False

    @property
    def scores(self):
        return Scores(self.precision, self.recall, self.f1)


@dataclass
class EvalReport:
    classes: list[ClassScore]
    micro: Scores
    macro: Scores
    weighted: Scores
    excluded: tuple[str, ...] = ()
    methodology: str | None = None
    headline: str = "micro-f1"
    extra: dict[str, float] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def metric(self, name: str) -> float:
        """Look up ``micro-f1``, ``macro-precision``, ``weighted-recall``... or an extra column."""
        if name in self.extra:
            return self.extra[name]
        mode, _, kind = name.partition("-")
        if mode in AVERAGES and kind in Scores._fields:
            return getattr(getattr(self, mode), kind)
        raise KeyError(name)

    @property
    def headline_value(self) -> float:
        return self.metric(self.headline)

    @property
    def undefined(self) -> list[str]:
        return [c.label for c in self.classes if c.undefined]


def _ratio(num, den):
    return num / den if den else 0.0


def prf(counts: Counts, label: str = "") -> ClassScore:
    tp, gold_n, pred_n = counts
    p = _ratio(tp, pred_n)
    r = _ratio(tp, gold_n)
    f1 = _ratio(2 * p * r, p + r)
    return ClassScore(label, p, r, f1, gold_n, undefined=not (gold_n and pred_n))


def average(per_class: Sequence[ClassScore], raw: Mapping[str, Counts] | None, mode: str) -> Scores:
    if mode not in AVERAGES:
        raise ConfigurationError(f"unknown averaging mode {mode!r}")
    if not per_class:
        return Scores()
    if mode == MICRO:
        if raw is None:
            raise InvalidInputError("micro averaging needs the raw counts")
        pooled = Counts()
        for c in per_class:
            pooled = pooled + raw[c.label]
        return prf(pooled).scores
    if mode == MACRO:
        n = len(per_class)
        return Scores(
            sum(c.precision for c in per_class) / n,
            sum(c.recall for c in per_class) / n,
            sum(c.f1 for c in per_class) / n,
        )
    total = sum(c.support for c in per_class)
    if not total:
        return Scores()
    return Scores(
        sum(c.precision * c.support for c in per_class) / total,
        sum(c.recall * c.support for c in per_class) / total,
        sum(c.f1 * c.support for c in per_class) / total,
    )


def build_report(counts: Mapping[str, Counts], exclude: Iterable[str] = (), **kwargs) -> EvalReport:
    """Score and average every class not in ``exclude``.

    Excluded classes are counted but left out of both the class rows and the
    averages, so padding a corpus with excluded labels leaves the report
    unchanged.  Classes with neither gold nor predicted occurrences are ignored.
    """
    exclude = tuple(sorted(set(exclude)))
    classes = [
        prf(counts[label], label)
        for label in sorted(counts)
        if (counts[label].gold_n or counts[label].pred_n) and label not in exclude
    ]
    return EvalReport(
        classes=classes,
        micro=average(classes, counts, MICRO),
        macro=average(classes, counts, MACRO),
        weighted=average(classes, counts, WEIGHTED),
        excluded=exclude,
        **kwargs,
    )


def _multiset_match(gold_keys, pred_keys, label_of):
    gold = Counter(gold_keys)
    pred = Counter(pred_keys)
    counts = MatchCounts()
    for key in gold.keys() | pred.keys():
        label = label_of(key)
        c = counts.get(label, Counts())
        counts[label] = c + Counts(min(gold[key], pred[key]), gold[key], pred[key])
    return counts


def match_entities(gold, pred) -> MatchCounts:
    """Exact (label, start, end) matching; each gold span is matched at most once."""
    return _multiset_match(
        [(e.label, e.start, e.end) for e in gold],
        [(e.label, e.start, e.end) for e in pred],
        lambda key: key[0],
    )


def token_counts(gold_labels: Sequence[str], pred_labels: Sequence[str]) -> MatchCounts:
    """Per-class token counts; every position is one gold and one predicted label."""
    if len(gold_labels) != len(pred_labels):
        raise InvalidInputError(
            f"token count mismatch: {len(gold_labels)} gold vs {len(pred_labels)} predicted"
        )
    counts = MatchCounts()
    for label in set(gold_labels) | set(pred_labels):
        counts[label] = Counts()
    for g, p in zip(gold_labels, pred_labels):
        counts[g] = counts[g] + Counts(int(g == p), 1, 0)
        counts[p] = counts[p] + Counts(0, 0, 1)
    return counts


def excluded_for(o_policy: str, outside: str = OUTSIDE) -> tuple[str, ...]:
    """Labels left out of the averages under a token-level O policy."""
    if o_policy == INCLUDE_O:
        return ()
    if o_policy == EXCLUDE_O:
        return (outside,)
    raise ConfigurationError(f"unknown O policy {o_policy!r}; expected one of {', '.join(O_POLICIES)}")


def offset_match(gold, pred) -> MatchCounts:
    """Exact character-offset matching of standoff entities.

    A prediction is a true positive iff an unmatched gold entity has the same
    label and an identical fragment list.
    """
    return _multiset_match(
        [(e.label, tuple(e.fragments)) for e in gold],
        [(e.label, tuple(e.fragments)) for e in pred],
        lambda key: key[0],
    )
