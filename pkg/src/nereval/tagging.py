"""Tag schemes: validation, span decoding/encoding, nesting and projections.

Tags are plain strings of the form ``"<PREFIX>-<LABEL>"`` or the bare
outside tag ``"O"``.  The label is everything after the first hyphen, so
labels may themselves contain hyphens (``"B-Sign-or-Symptom"``).

IOB2 is the reference scheme.  IOB1 and BILOU are supported as well; for
BILOU the IOBES spellings ``E``/``S`` are accepted as aliases of ``L``/``U``.
"""
from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

from .errors import ConfigurationError, InvalidInputError, NestedEntitiesError

OUTSIDE = "O"

IOB2 = "IOB2"
IOB1 = "IOB1"
BILOU = "BILOU"
SCHEMES = (IOB2, IOB1, BILOU)

STRICT = "strict"
REPAIR = "repair"
DECODE_MODES = (STRICT, REPAIR)

KEEP_COARSEST = "keep-coarsest"
CONCATENATE = "concatenate"
ERROR = "error"
FLATTEN_STRATEGIES = (KEEP_COARSEST, CONCATENATE, ERROR)

ORPHAN_I = "orphan-I"
TYPE_SWITCH_I = "type-switch-I"
INVALID_PREFIX = "invalid-prefix"
# BILOU only: an entity opened by B/I that is never closed by L.
UNTERMINATED = "unterminated"

_PREFIXES = {
    IOB2: frozenset("BIO"),
    IOB1: frozenset("BIO"),
    BILOU: frozenset("BILUOES"),
}
_BILOU_ALIASES = {"E": "L", "S": "U"}


class Tag(NamedTuple):
    prefix: str
    label: str

    def __str__(self):
        return self.prefix if self.prefix == OUTSIDE else f"{self.prefix}-{self.label}"


class EntitySpan(NamedTuple):
    """A typed token span; ``start`` and ``end`` are both inclusive."""

    label: str
    start: int
    end: int

    def __len__(self):
        return self.end - self.start + 1


class SchemeViolation(NamedTuple):
    position: int
    kind: str


def span_key(entity):
    return (entity.start, entity.end, entity.label)


def check_scheme(scheme: str) -> str:
    normalized = str(scheme).upper()
    if normalized not in SCHEMES:
        raise ConfigurationError(
            f"unknown tag scheme {scheme!r}; expected one of {', '.join(SCHEMES)}"
        )
    return normalized


def _check_mode(mode):
    if mode not in DECODE_MODES:
        raise ConfigurationError(f"unknown decode mode {mode!r}; expected strict or repair")


def split_tag(tag: str) -> Tag:
    """Split a tag string on its first hyphen.  Never fails."""
    if tag == OUTSIDE:
        return Tag(OUTSIDE, "")
    prefix, sep, label = tag.partition("-")
    if not sep:
        return Tag(tag, "")
    return Tag(prefix, label)


def parse_tag(tag: str, scheme: str = IOB2) -> Tag | None:
    """Return the normalized :class:`Tag`, or ``None`` if it is not legal in ``scheme``."""
    prefix, label = split_tag(tag)
    if prefix not in _PREFIXES[scheme]:
        return None
    if prefix == OUTSIDE:
        return Tag(OUTSIDE, "") if not label else None
    if not label:
        return None
    if scheme == BILOU:
        prefix = _BILOU_ALIASES.get(prefix, prefix)
    return Tag(prefix, label)


def entity_label(tag: str) -> str:
    """Collapse a tag to its entity class (``"B-PER"`` -> ``"PER"``, ``"O"`` -> ``"O"``).

    Strings that are not shaped like tags are returned unchanged.
    """
    prefix, label = split_tag(tag)
    if prefix == OUTSIDE or not label:
        return tag
    return label


def validate_tags(tags: Sequence[str], scheme: str = IOB2) -> list[SchemeViolation]:
    """List every position where ``tags`` breaks ``scheme``.

    IOB2: every ``I-X`` must directly follow ``B-X`` or ``I-X``.
    IOB1: only malformed tags are reported; ``I-X`` may open an entity.
    BILOU: ``I-X``/``L-X`` must continue an open ``X`` entity, and every
    entity opened by ``B-X`` must be closed by ``L-X``.
    """
    scheme = check_scheme(scheme)
    parsed = [parse_tag(t, scheme) for t in tags]
    violations = [SchemeViolation(i, INVALID_PREFIX) for i, t in enumerate(parsed) if t is None]

    if scheme == IOB2:
        for i, tag in enumerate(parsed):
            if tag is None or tag.prefix != "I":
                continue
            prev = parsed[i - 1] if i > 0 else None
            if prev is None or prev.prefix == OUTSIDE:
                violations.append(SchemeViolation(i, ORPHAN_I))
            elif prev.label != tag.label:
                violations.append(SchemeViolation(i, TYPE_SWITCH_I))
    elif scheme == BILOU:
        open_label = None
        for i, tag in enumerate(parsed):
            if tag is not None and tag.prefix in ("I", "L"):
                if tag.label == open_label:
                    open_label = tag.label if tag.prefix == "I" else None
                    continue
                if open_label is None:
                    violations.append(SchemeViolation(i, ORPHAN_I))
                else:
                    violations.append(SchemeViolation(i - 1, UNTERMINATED))
                    violations.append(SchemeViolation(i, TYPE_SWITCH_I))
                open_label = None
                continue
            if open_label is not None:
                violations.append(SchemeViolation(i - 1, UNTERMINATED))
            open_label = tag.label if tag is not None and tag.prefix == "B" else None
        if open_label is not None:
            violations.append(SchemeViolation(len(parsed) - 1, UNTERMINATED))

    violations.sort()
    return violations


def decode_entities(tags: Sequence[str], scheme: str = IOB2, mode: str = STRICT) -> list[EntitySpan]:
    """Decode a tag sequence into entity spans sorted by (start, end, label).

    In ``strict`` mode only a legal scheme start opens an entity; an ill-formed
    ``I-`` run produces nothing.  In ``repair`` mode an orphan or type-switched
    ``I-`` is read as a ``B-`` (and for BILOU an orphan ``L-`` as ``U-``, an
    unclosed entity is kept).  Tags that are illegal in the scheme act as ``O``.

    >>> decode_entities(["B-PER", "I-PER", "O", "B-LOC"])
    [EntitySpan(label='PER', start=0, end=1), EntitySpan(label='LOC', start=3, end=3)]
    """
    scheme = check_scheme(scheme)
    _check_mode(mode)
    if scheme == BILOU:
        return _decode_bilou(tags, repair=mode == REPAIR)

    repair = mode == REPAIR or scheme == IOB1
    entities = []
    label = start = None

    def close(end):
        if label is not None:
            entities.append(EntitySpan(label, start, end))

    for i, raw in enumerate(tags):
        tag = parse_tag(raw, scheme)
        if tag is None or tag.prefix == OUTSIDE:
            close(i - 1)
            label = None
        elif tag.prefix == "B":
            close(i - 1)
            label, start = tag.label, i
        elif tag.label == label:
            continue
        else:
            close(i - 1)
            label, start = (tag.label, i) if repair else (None, None)
    close(len(tags) - 1)
    return entities


def _decode_bilou(tags, repair):
    entities = []
    label = start = None

    def drop(end):
        if repair and label is not None:
            entities.append(EntitySpan(label, start, end))

    for i, raw in enumerate(tags):
        tag = parse_tag(raw, BILOU)
        if tag is not None and tag.prefix in ("I", "L") and tag.label == label:
            if tag.prefix == "L":
                entities.append(EntitySpan(label, start, i))
                label = None
            continue
        drop(i - 1)
        label = None
        if tag is None or tag.prefix == OUTSIDE:
            continue
        if tag.prefix == "U" or (repair and tag.prefix == "L"):
            entities.append(EntitySpan(tag.label, i, i))
        elif tag.prefix == "B" or repair:
            label, start = tag.label, i
    drop(len(tags) - 1)
    return entities


def _check_spans(entities, length):
    ordered = sorted(entities, key=span_key)
    for e in ordered:
        if not e.label:
            raise InvalidInputError(f"entity {e} has an empty label")
        if not 0 <= e.start <= e.end < length:
            raise InvalidInputError(f"entity {e} is out of bounds for length {length}")
    for a, b in zip(ordered, ordered[1:]):
        if b.start <= a.end:
            raise InvalidInputError(f"entities {a} and {b} overlap")
    return ordered


def encode_entities(entities: Iterable[EntitySpan], length: int, scheme: str = IOB2) -> list[str]:
    """Inverse of :func:`decode_entities` for non-overlapping spans."""
    scheme = check_scheme(scheme)
    ordered = _check_spans(list(entities), length)
    tags = [OUTSIDE] * length
    prev = None
    for e in ordered:
        if scheme == IOB2:
            tags[e.start] = f"B-{e.label}"
            for i in range(e.start + 1, e.end + 1):
                tags[i] = f"I-{e.label}"
        elif scheme == IOB1:
            touching = prev is not None and prev.end == e.start - 1 and prev.label == e.label
            tags[e.start] = f"{'B' if touching else 'I'}-{e.label}"
            for i in range(e.start + 1, e.end + 1):
                tags[i] = f"I-{e.label}"
        else:
            if e.start == e.end:
                tags[e.start] = f"U-{e.label}"
            else:
                tags[e.start] = f"B-{e.label}"
                for i in range(e.start + 1, e.end):
                    tags[i] = f"I-{e.label}"
                tags[e.end] = f"L-{e.label}"
        prev = e
    return tags


def _overlap(a, b):
    return a.start <= b.end and b.start <= a.end


def _strictly_contains(outer, inner):
    return (
        outer.start <= inner.start
        and inner.end <= outer.end
        and (outer.start, outer.end) != (inner.start, inner.end)
    )


def _coarse_rank(e):
    return (-(e.end - e.start), e.start, e.label)


def flatten_nested(entities: Iterable[EntitySpan], strategy: str = KEEP_COARSEST) -> list[EntitySpan]:
    """Remove nesting so that no two returned spans overlap.

    ``keep-coarsest`` drops every span strictly contained in another input
    span, then settles any remaining partial overlap by keeping the longer
    span (ties: earlier start, then smaller label).  ``concatenate`` replaces
    each connected group of overlapping spans by its envelope, labeled with
    the member labels joined by ``+`` from longest to shortest.  ``error``
    raises :class:`NestedEntitiesError` on any overlap.  Exact duplicates are
    collapsed first under every strategy.
    """
    if strategy not in FLATTEN_STRATEGIES:
        raise ConfigurationError(
            f"unknown flatten strategy {strategy!r}; expected one of {', '.join(FLATTEN_STRATEGIES)}"
        )
    unique = sorted(set(entities), key=span_key)

    if strategy == ERROR:
        for i, a in enumerate(unique):
            for b in unique[i + 1:]:
                if b.start > a.end:
                    break
                raise NestedEntitiesError(f"entities {a} and {b} overlap")
        return unique

    if strategy == KEEP_COARSEST:
        outermost = [e for e in unique if not any(_strictly_contains(o, e) for o in unique)]
        kept = []
        for e in sorted(outermost, key=_coarse_rank):
            if not any(_overlap(e, k) for k in kept):
                kept.append(e)
        return sorted(kept, key=span_key)

    groups = []
    for e in unique:
        if groups and e.start <= max(m.end for m in groups[-1]):
            groups[-1].append(e)
        else:
            groups.append([e])
    flat = []
    for members in groups:
        if len(members) == 1:
            flat.append(members[0])
            continue
        members.sort(key=_coarse_rank)
        flat.append(EntitySpan(
            "+".join(m.label for m in members),
            min(m.start for m in members),
            max(m.end for m in members),
        ))
    return flat


def project_first_token_labels(
    tags: Sequence[str], scheme: str = IOB2, mode: str = STRICT, outside: str = OUTSIDE
) -> list[str]:
    """One label per token: the entity class on each entity's first token, ``outside`` elsewhere."""
    projected = [outside] * len(tags)
    for e in decode_entities(tags, scheme, mode):
        projected[e.start] = e.label
    return projected
