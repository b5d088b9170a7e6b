"""The four evaluation methodologies, side-by-side comparison and multi-seed aggregation.

``entity-strict``     decode entities under the tag scheme, exact span match,
                      micro-averaged F1 as headline.
``token-with-O``      every token is a classification decision, ``O`` included;
                      support-weighted F1 as headline.
``entity-without-O``  only the first token of each entity carries its class,
                      ``O`` is left out of the averages; micro F1 as headline.
``offset-exact``      standoff entities matched on label and exact character
                      fragments; micro F1 as headline.
"""
from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from . import metrics
from .errors import AlignmentError, ConfigurationError, InvalidInputError
from .formats import StandoffEntity, Table
from .metrics import EXCLUDE_O, INCLUDE_O, EvalReport
from .tagging import (
    IOB2,
    STRICT,
    EntitySpan,
    check_scheme,
    decode_entities,
    entity_label,
    flatten_nested,
    project_first_token_labels,
)

RAW = "raw"
COLLAPSED = "collapsed"
TOKEN_CLASSES = (RAW, COLLAPSED)


class MethodologyId(str, Enum):
    ENTITY_STRICT = "entity-strict"
    TOKEN_WITH_O = "token-with-O"
    ENTITY_WITHOUT_O = "entity-without-O"
    OFFSET_EXACT = "offset-exact"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value):
        try:
            return cls(value)
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ConfigurationError(f"unknown methodology {value!r}; expected one of {choices}") from None


HEADLINES = {
    MethodologyId.ENTITY_STRICT: "micro-f1",
    MethodologyId.TOKEN_WITH_O: "weighted-f1",
    MethodologyId.ENTITY_WITHOUT_O: "micro-f1",
    MethodologyId.OFFSET_EXACT: "micro-f1",
}

# Columns shown per methodology in a comparison table; the rest print as "-".
COMPARISON_COLUMNS = ("weighted-f1", "macro-f1", "micro-f1", "seqeval-f1")
_REPORTED = {
    MethodologyId.ENTITY_STRICT: ("weighted-f1", "macro-f1", "micro-f1"),
    MethodologyId.TOKEN_WITH_O: ("weighted-f1", "macro-f1"),
    MethodologyId.ENTITY_WITHOUT_O: COMPARISON_COLUMNS,
    MethodologyId.OFFSET_EXACT: ("weighted-f1", "macro-f1", "micro-f1"),
}


def _tags(seq):
    return seq.tags if hasattr(seq, "tags") else seq


def align(gold, pred):
    """Pair gold and predicted tag sequences, failing on any count or length mismatch."""
    gold = [_tags(s) for s in gold]
    pred = [_tags(s) for s in pred]
    if len(gold) != len(pred):
        raise AlignmentError(f"gold has {len(gold)} sequences but prediction has {len(pred)}")
    for i, (g, p) in enumerate(zip(gold, pred)):
        if len(g) != len(p):
            raise AlignmentError(
                f"sequence {i}: gold has {len(g)} tokens but prediction has {len(p)}",
                sequence_index=i,
            )
    return list(zip(gold, pred))


def eval_entity_strict(gold, pred, scheme: str = IOB2, mode: str = STRICT) -> EvalReport:
    scheme = check_scheme(scheme)
    counts = metrics.MatchCounts()
    for g, p in align(gold, pred):
        counts = counts + metrics.match_entities(
            decode_entities(g, scheme, mode), decode_entities(p, scheme, mode)
        )
    return metrics.build_report(
        counts, methodology=MethodologyId.ENTITY_STRICT.value, headline="micro-f1"
    )


def eval_token_with_O(gold, pred, token_classes: str = RAW, o_policy: str = INCLUDE_O) -> EvalReport:
    if token_classes not in TOKEN_CLASSES:
        raise ConfigurationError(f"unknown token class granularity {token_classes!r}; expected raw or collapsed")
    exclude = metrics.excluded_for(o_policy)
    pairs = align(gold, pred)
    convert = entity_label if token_classes == COLLAPSED else (lambda t: t)
    gold_labels = [convert(t) for g, _ in pairs for t in g]
    pred_labels = [convert(t) for _, p in pairs for t in p]
    counts = metrics.token_counts(gold_labels, pred_labels)
    return metrics.build_report(
        counts, exclude, methodology=MethodologyId.TOKEN_WITH_O.value, headline="weighted-f1"
    )


def eval_entity_without_O(gold, pred, scheme: str = IOB2, mode: str = STRICT) -> EvalReport:
    scheme = check_scheme(scheme)
    pairs = align(gold, pred)
    gold_labels = [t for g, _ in pairs for t in project_first_token_labels(g, scheme, mode)]
    pred_labels = [t for _, p in pairs for t in project_first_token_labels(p, scheme, mode)]
    counts = metrics.token_counts(gold_labels, pred_labels)
    strict = eval_entity_strict(gold, pred, scheme, mode)
    return metrics.build_report(
        counts,
        metrics.excluded_for(EXCLUDE_O),
        methodology=MethodologyId.ENTITY_WITHOUT_O.value,
        headline="micro-f1",
        extra={"seqeval-f1": strict.micro.f1},
    )


def flatten_standoff(entities: Sequence[StandoffEntity], strategy: str) -> list[StandoffEntity]:
    """Apply :func:`flatten_nested` to standoff entities through their character envelopes.

    Under ``concatenate`` a merged group becomes one single-fragment entity
    whose id joins the member ids with ``+``.
    """
    by_span = {}
    for e in entities:
        by_span.setdefault(EntitySpan(e.label, e.start, e.end - 1), []).append(e)
    flat = []
    for span in flatten_nested(by_span, strategy):
        members = by_span.get(span)
        if members is not None:
            flat.append(members[0])
            continue
        inside = [
            e for s, group in by_span.items() if span.start <= s.start and s.end <= span.end for e in group
        ]
        flat.append(StandoffEntity(
            "+".join(sorted({e.id for e in inside})), span.label, ((span.start, span.end + 1),)
        ))
    return flat


def _pair_documents(docs, side):
    if isinstance(docs, Mapping):
        return dict(docs)
    paired = {}
    for doc_id, entities in docs:
        if doc_id in paired:
            raise InvalidInputError(f"duplicate document id {doc_id!r} in {side}")
        paired[doc_id] = entities
    return paired


def eval_offset_exact(gold_docs, pred_docs, nested: str | None = None) -> EvalReport:
    """Pool exact-offset matches over documents paired by id.

    ``gold_docs``/``pred_docs`` map a document id to its standoff entities
    (a mapping, or an iterable of ``(id, entities)`` pairs).  Documents present
    on only one side are left out of the scores and reported as warnings.
    ``nested`` optionally flattens both sides first.
    """
    gold = _pair_documents(gold_docs, "gold")
    pred = _pair_documents(pred_docs, "prediction")
    warnings = [f"document {d!r} has no prediction; skipped" for d in sorted(gold.keys() - pred.keys())]
    warnings += [f"document {d!r} has no gold annotations; skipped" for d in sorted(pred.keys() - gold.keys())]
    counts = metrics.MatchCounts()
    for doc_id in sorted(gold.keys() & pred.keys()):
        g, p = gold[doc_id], pred[doc_id]
        if nested is not None:
            g, p = flatten_standoff(g, nested), flatten_standoff(p, nested)
        counts = counts + metrics.offset_match(g, p)
    return metrics.build_report(
        counts, methodology=MethodologyId.OFFSET_EXACT.value, headline="micro-f1", warnings=warnings
    )


# --- aggregation -----------------------------------------------------------

@dataclass(frozen=True)
class AggregateScore:
    metric: str
    mean: float
    std: float
    n: int

    def __str__(self):
        return f"{self.mean:.2f} ± {self.std:.2f}"


def _aggregate(metric, values):
    values = list(values)
    if not values:
        raise InvalidInputError(f"no values to aggregate for {metric!r}")
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return AggregateScore(metric, statistics.fmean(values), std, len(values))


def aggregate_runs(runs) -> list[AggregateScore]:
    """Mean and sample standard deviation (n - 1) per metric, in first-seen metric order.

    A metric missing from some runs is aggregated over the runs that have it.
    """
    runs = list(runs)
    if not runs:
        raise InvalidInputError("cannot aggregate zero runs")
    names = list(dict.fromkeys(name for run in runs for name in run.metrics))
    return [_aggregate(name, [r.metrics[name] for r in runs if name in r.metrics]) for name in names]


def aggregate_table(scores: Iterable[AggregateScore], title: str | None = None) -> Table:
    scores = list(scores)
    notes = [f"{s.metric}: single run (n=1), std reported as 0.00" for s in scores if s.n == 1]
    return Table(
        ["metric", "mean ± std", "n"],
        [[s.metric, s, s.n] for s in scores],
        title=title,
        notes=notes,
    )


# --- comparison ------------------------------------------------------------

@dataclass
class ComparisonRow:
    methodology: MethodologyId
    model: str
    headline: AggregateScore
    cells: dict[str, AggregateScore | None]


@dataclass
class ComparisonTable:
    columns: tuple[str, ...] = COMPARISON_COLUMNS
    rows: list[ComparisonRow] = field(default_factory=list)

    def row(self, methodology, model=None) -> ComparisonRow:
        methodology = MethodologyId.parse(methodology)
        for r in self.rows:
            if r.methodology == methodology and (model is None or r.model == model):
                return r
        raise KeyError((methodology, model))

    def headline(self, methodology, model=None) -> float:
        return self.row(methodology, model).headline.mean

    def to_table(self) -> Table:
        return Table(
            ["methodology", "model", "headline"] + list(self.columns),
            [
                [r.methodology.value, r.model, r.headline] + [r.cells.get(c) for c in self.columns]
                for r in self.rows
            ],
            bare_single_runs=True,
            title="methodology comparison",
            scale=100.0,
            notes=[f"{r.methodology.value}: headline is {r.headline.metric}" for r in self.rows],
        )


def _evaluate(methodology, gold, pred, standoff, options):
    if methodology == MethodologyId.ENTITY_STRICT:
        return eval_entity_strict(gold, pred, options["scheme"], options["mode"])
    if methodology == MethodologyId.TOKEN_WITH_O:
        return eval_token_with_O(gold, pred, options["token_classes"], options["o_policy"])
    if methodology == MethodologyId.ENTITY_WITHOUT_O:
        return eval_entity_without_O(gold, pred, options["scheme"], options["mode"])
    return eval_offset_exact(standoff[0], standoff[1], options["nested"])


def compare_runs(
    gold,
    pred_runs,
    methodologies,
    *,
    standoff_runs=None,
    model: str = "model",
    scheme: str = IOB2,
    mode: str = STRICT,
    token_classes: str = RAW,
    o_policy: str = INCLUDE_O,
    nested: str | None = None,
) -> ComparisonTable:
    """Evaluate every requested methodology on the same inputs, one seeded run at a time.

    ``pred_runs`` is a list of predicted corpora aligned with ``gold``;
    ``standoff_runs`` a list of ``(gold_docs, pred_docs)`` pairs for
    ``offset-exact``.  Cells hold mean ± sample std over the runs.
    """
    methodologies = [MethodologyId.parse(m) for m in methodologies]
    if not methodologies:
        raise ConfigurationError("at least one methodology is required")
    token_level = [m for m in methodologies if m != MethodologyId.OFFSET_EXACT]
    if MethodologyId.OFFSET_EXACT in methodologies and not standoff_runs:
        raise ConfigurationError("offset-exact needs standoff (BRAT) inputs")
    if token_level and (gold is None or not pred_runs):
        raise ConfigurationError(f"{token_level[0]} needs tagged gold and prediction inputs")
    pred_runs = list(pred_runs or [])
    standoff_runs = list(standoff_runs or [])
    if token_level and standoff_runs and len(standoff_runs) != len(pred_runs):
        raise ConfigurationError("token-level and standoff inputs must cover the same number of runs")
    options = dict(scheme=scheme, mode=mode, token_classes=token_classes, o_policy=o_policy, nested=nested)

    table = ComparisonTable()
    for methodology in methodologies:
        n_runs = len(standoff_runs) if methodology == MethodologyId.OFFSET_EXACT else len(pred_runs)
        reports = [
            _evaluate(
                methodology,
                gold,
                pred_runs[i] if i < len(pred_runs) else None,
                standoff_runs[i] if i < len(standoff_runs) else None,
                options,
            )
            for i in range(n_runs)
        ]
        headline = HEADLINES[methodology]
        cells = {
            column: _aggregate(column, [r.metric(column) for r in reports])
            for column in _REPORTED[methodology]
        }
        table.rows.append(ComparisonRow(
            methodology, model, _aggregate(headline, [r.metric(headline) for r in reports]), cells
        ))
    return table


def compare_methodologies(gold, pred, methodologies, *, standoff=None, **options) -> ComparisonTable:
    """Single-run :func:`compare_runs`; ``standoff`` is a ``(gold_docs, pred_docs)`` pair."""
    return compare_runs(
        gold,
        [pred] if pred is not None else [],
        methodologies,
        standoff_runs=[standoff] if standoff is not None else None,
        **options,
    )
