"""Readers and writers: CoNLL columns, BRAT ``.ann`` standoff, runs-JSON, reports."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .errors import (
    ConfigurationError,
    EncodingError,
    InvalidInputError,
    MalformedAnnotationError,
    MalformedLineError,
    SchemaError,
)
from .metrics import EvalReport

FORMATS = ("json", "markdown", "csv")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[str, ...]
    tags: tuple[str, ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.tags):
            raise InvalidInputError(
                f"sentence has {len(self.tokens)} tokens but {len(self.tags)} tags"
            )

    def __len__(self):
        return len(self.tokens)


@dataclass
class Document:
    id: str
    sentences: list[Sentence] = field(default_factory=list)


@dataclass(frozen=True)
class StandoffEntity:
    """A typed character-offset annotation.  Fragment ends are exclusive."""

    id: str
    label: str
    fragments: tuple[tuple[int, int], ...]
    surface: str | None = None

    @property
    def start(self):
        return self.fragments[0][0]

    @property
    def end(self):
        return self.fragments[-1][1]


@dataclass(frozen=True)
class RunScores:
    seed: int
    metrics: dict[str, float]


def _decode(data, source=None):
    if isinstance(data, str):
        return data
    try:
        return bytes(data).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"invalid UTF-8 at byte {exc.start}", source=source) from None


# --- CoNLL -----------------------------------------------------------------

def parse_conll(data: bytes | str, source=None) -> list[Sentence]:
    """Read whitespace-separated columns: token first, tag last, blank line between sentences.

    ``#`` lines between sentences are comments.  Tags are not validated here.

    >>> [len(s) for s in parse_conll("Le B-DISO\\npatient I-DISO\\n\\nrien O\\n")]
    [2, 1]
    """
    text = _decode(data, source)
    sentences = []
    tokens, tags = [], []
    for lineno, line in enumerate(text.split("\n"), start=1):
        columns = line.split()
        if not columns:
            if tokens:
                sentences.append(Sentence(tuple(tokens), tuple(tags)))
                tokens, tags = [], []
            continue
        if not tokens and columns[0].startswith("#"):
            continue
        if len(columns) < 2:
            raise MalformedLineError(
                f"expected at least 2 columns (token and tag), got {line.strip()!r}",
                line=lineno,
                source=source,
            )
        tokens.append(columns[0])
        tags.append(columns[-1])
    if tokens:
        sentences.append(Sentence(tuple(tokens), tuple(tags)))
    return sentences


def write_conll(sentences: Sequence[Sentence]) -> bytes:
    blocks = []
    for i, s in enumerate(sentences):
        if not len(s):
            raise InvalidInputError(f"sentence {i} is empty and cannot be written")
        for cell in s.tokens + s.tags:
            if not cell or any(ch.isspace() for ch in cell):
                raise InvalidInputError(f"sentence {i}: cell {cell!r} cannot be written as a CoNLL column")
        if s.tokens[0].startswith("#"):
            raise InvalidInputError(f"sentence {i} starts with '#', which would read back as a comment")
        blocks.append("".join(f"{tok} {tag}\n" for tok, tag in zip(s.tokens, s.tags)))
    return "\n".join(blocks).encode("utf-8")


def read_conll(path) -> Document:
    path = Path(path)
    return Document(path.stem, parse_conll(path.read_bytes(), source=path))


# --- BRAT standoff ---------------------------------------------------------

def parse_brat_ann(data: bytes | str, source=None) -> list[StandoffEntity]:
    """Parse the text-bound (``T``) annotations of a BRAT ``.ann`` file.

    Relations, attributes, events, notes and comments are skipped.
    Discontinuous spans (``"0 4;8 12"``) become multi-fragment entities.
    """
    text = _decode(data, source)
    entities = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.startswith("T"):
            continue

        def fail(msg):
            return MalformedAnnotationError(msg, line=lineno, source=source)

        parts = line.rstrip("\r").split("\t")
        if len(parts) < 2:
            raise fail(f"text-bound annotation without a tab-separated body: {line!r}")
        ann_id, body = parts[0], parts[1]
        surface = "\t".join(parts[2:]) if len(parts) > 2 else None
        label, _, offsets = body.strip().partition(" ")
        if not label or not offsets.strip():
            raise fail(f"annotation {ann_id} is missing its label or offsets")
        fragments = []
        for chunk in offsets.split(";"):
            bounds = chunk.split()
            if len(bounds) != 2 or not all(b.isdigit() for b in bounds):
                raise fail(f"annotation {ann_id}: non-numeric offsets {chunk.strip()!r}")
            start, end = int(bounds[0]), int(bounds[1])
            if start >= end:
                raise fail(f"annotation {ann_id}: empty or reversed fragment {start}-{end}")
            fragments.append((start, end))
        fragments.sort()
        for (_, a_end), (b_start, _) in zip(fragments, fragments[1:]):
            if b_start < a_end:
                raise fail(f"annotation {ann_id}: overlapping fragments")
        entities.append(StandoffEntity(ann_id, label, tuple(fragments), surface))
    return entities


def read_ann_dir(path) -> dict[str, list[StandoffEntity]]:
    """Map file stem to entities for one ``.ann`` file or every ``.ann`` in a directory."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    files = [path] if path.is_file() else sorted(path.glob("*.ann"))
    return {f.stem: parse_brat_ann(f.read_bytes(), source=f) for f in files}


# --- runs JSON -------------------------------------------------------------

def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def parse_runs_json(data: bytes | str, source=None) -> list[RunScores]:
    """Read ``{"runs": [{"seed": int, "metrics": {name: number}}, ...]}``.  Values are kept verbatim."""
    try:
        doc = json.loads(_decode(data, source))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", line=exc.lineno, source=source) from None
    if not isinstance(doc, dict) or "runs" not in doc:
        raise SchemaError('top-level object must have a "runs" key', source=source)
    if not isinstance(doc["runs"], list):
        raise SchemaError('"runs" must be an array', source=source)
    runs = []
    for i, run in enumerate(doc["runs"]):
        if not isinstance(run, dict):
            raise SchemaError(f"runs[{i}] must be an object", source=source)
        seed = run.get("seed")
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise SchemaError(f"runs[{i}].seed must be an integer", source=source)
        metrics = run.get("metrics")
        if not isinstance(metrics, dict):
            raise SchemaError(f"runs[{i}].metrics must be an object", source=source)
        for name, value in metrics.items():
            if not _is_number(value) or not math.isfinite(value):
                raise SchemaError(f"runs[{i}].metrics[{name!r}] must be a finite number", source=source)
        runs.append(RunScores(seed, {name: float(v) for name, v in metrics.items()}))
    return runs


# --- reports ---------------------------------------------------------------

@dataclass
class Table:
    """Generic report table.

    Cells may be ``None`` (printed ``-``), str, int, float, or anything with
    ``mean``/``std``/``n`` attributes (printed ``mean ± std``).  Float and
    aggregate cells are multiplied by ``scale`` for markdown and CSV only.
    """

    columns: list[str]
    rows: list[list[Any]]
    title: str | None = None
    scale: float = 1.0
    notes: list[str] = field(default_factory=list)
    # Print single-run aggregate cells as a bare value instead of "x ± 0.00".
    bare_single_runs: bool = False


def format_mean_std(mean: float, std: float) -> str:
    """``73.03 ± 1.29`` style cell."""
    return f"{mean:.2f} ± {std:.2f}"


def _cell_text(cell, scale, bare_single_runs=False):
    if cell is None:
        return "-"
    if hasattr(cell, "std"):
        if bare_single_runs and cell.n == 1:
            return f"{cell.mean * scale:.2f}"
        return format_mean_std(cell.mean * scale, cell.std * scale)
    if isinstance(cell, bool) or isinstance(cell, (int, str)):
        return str(cell)
    return f"{cell * scale:.2f}"


def _cell_json(cell):
    if hasattr(cell, "std"):
        return {"mean": cell.mean, "std": cell.std, "n": cell.n}
    return cell


def _report_table(report: EvalReport) -> Table:
    rows = [[c.label, c.precision, c.recall, c.f1, c.support] for c in report.classes]
    support = sum(c.support for c in report.classes)
    for mode in ("micro", "macro", "weighted"):
        s = getattr(report, mode)
        rows.append([f"{mode} avg", s.precision, s.recall, s.f1, support])
    notes = [f"headline {report.headline}: {report.headline_value * 100:.2f}"]
    notes += [f"{name}: {value * 100:.2f}" for name, value in sorted(report.extra.items())]
    if report.excluded:
        notes.append(f"excluded classes: {', '.join(report.excluded)}")
    if report.undefined:
        notes.append(f"zero denominator (scored 0.00): {', '.join(report.undefined)}")
    return Table(
        ["label", "precision", "recall", "f1", "support"],
        rows,
        title=report.methodology,
        scale=100.0,
        notes=notes,
    )


def _report_json(report: EvalReport):
    doc = {
        "classes": [
            {"label": c.label, "precision": c.precision, "recall": c.recall, "f1": c.f1, "support": c.support}
            for c in report.classes
        ],
        "averages": {
            mode: getattr(report, mode)._asdict() for mode in ("micro", "macro", "weighted")
        },
    }
    if report.methodology is not None:
        doc["methodology"] = report.methodology
        doc["headline"] = {"metric": report.headline, "value": report.headline_value}
    if report.extra:
        doc["extra"] = dict(sorted(report.extra.items()))
    if report.excluded:
        doc["excluded"] = list(report.excluded)
    if report.undefined:
        doc["undefined"] = report.undefined
    if report.warnings:
        doc["warnings"] = list(report.warnings)
    return doc


def _table_json(table: Table):
    doc = {}
    if table.title is not None:
        doc["title"] = table.title
    doc["columns"] = list(table.columns)
    doc["rows"] = [
        {col: _cell_json(cell) for col, cell in zip(table.columns, row)} for row in table.rows
    ]
    return doc


def _markdown(table: Table) -> str:
    out = []
    if table.title:
        out += [f"## {table.title}", ""]
    out.append("| " + " | ".join(table.columns) + " |")
    out.append("|" + "|".join("---" for _ in table.columns) + "|")
    for row in table.rows:
        out.append("| " + " | ".join(_cell_text(c, table.scale, table.bare_single_runs) for c in row) + " |")
    if table.notes:
        out.append("")
        out += table.notes
    return "\n".join(out) + "\n"


def _csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell_text(c, table.scale, table.bare_single_runs) for c in row])
    return buf.getvalue()


def emit_report(report, fmt: str = "markdown") -> bytes:
    """Render an :class:`EvalReport`, a :class:`Table`, or anything with ``to_table()``.

    JSON keeps full-precision fractions; markdown and CSV print two decimals.
    """
    if fmt not in FORMATS:
        raise ConfigurationError(f"unknown output format {fmt!r}; expected one of {', '.join(FORMATS)}")
    if isinstance(report, EvalReport):
        if fmt == "json":
            return _dump_json(_report_json(report))
        table = _report_table(report)
    else:
        table = report if isinstance(report, Table) else report.to_table()
        if fmt == "json":
            return _dump_json(_table_json(table))
    text = _markdown(table) if fmt == "markdown" else _csv(table)
    return text.encode("utf-8")


def _dump_json(doc) -> bytes:
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
