"""Command line entry point: ``nereval {evaluate,compare,aggregate,vocab,carbon}``.

Exit codes: 0 success, 1 internal error, 2 user or input error.
Reports go to stdout; diagnostics and warnings go to stderr.
"""
from __future__ import annotations

import argparse
import datetime
import json
import sys
import traceback
from pathlib import Path

from . import carbon, formats, methodology, vocab
from .errors import AlignmentError, ToolkitError
from .metrics import EXCLUDE_O, INCLUDE_O
from .methodology import MethodologyId
from .tagging import DECODE_MODES, FLATTEN_STRATEGIES, SCHEMES

NO_FLATTEN = "none"


class UsageError(ToolkitError):
    pass


def _warn(message):
    print(f"warning: {message}", file=sys.stderr)


def _methodology_list(value):
    names = [v.strip() for v in value.split(",") if v.strip()]
    if not names:
        raise argparse.ArgumentTypeError("at least one methodology is required")
    try:
        return [MethodologyId.parse(n) for n in names]
    except ToolkitError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _methodology(value):
    if "," in value:
        raise argparse.ArgumentTypeError(f"expected a single methodology, got {value!r}")
    return _methodology_list(value)[0]


def _positive(kind):
    def parse(value):
        try:
            number = kind(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None
        if number <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {value}")
        return number
    return parse


def _add_output(p):
    p.add_argument("--format", choices=formats.FORMATS, default="markdown", help="report format")


def _add_tagging(p):
    p.add_argument("--scheme", choices=SCHEMES, default="IOB2", type=str.upper)
    p.add_argument("--decode", choices=DECODE_MODES, default="strict")
    p.add_argument("--nested", choices=FLATTEN_STRATEGIES + (NO_FLATTEN,), default=NO_FLATTEN,
                   help="flatten nested standoff annotations before offset-exact scoring "
                        "(default: none; decoded tag sequences never nest)")
    p.add_argument("--token-classes", choices=methodology.TOKEN_CLASSES, default=methodology.RAW,
                   help="token-with-O classes: raw tags or entity labels")
    p.add_argument("--o-policy", choices=("include", "exclude"), default="include",
                   help="token-with-O: keep the O class in the averages or not")


def build_parser():
    parser = argparse.ArgumentParser(prog="nereval", description="Sequence-labeling evaluation toolkit.")
    parser.add_argument("--timestamp", action="store_true", help="stamp reports with the generation time")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="score one prediction file against gold")
    p.add_argument("gold", type=Path, help="CoNLL file, or .ann file/directory for offset-exact")
    p.add_argument("pred", type=Path)
    p.add_argument("--methodology", type=_methodology, default=MethodologyId.ENTITY_STRICT)
    _add_tagging(p)
    _add_output(p)

    p = sub.add_parser("compare", help="score the same predictions under several methodologies")
    p.add_argument("gold", type=Path, help="CoNLL gold file (or .ann file/directory)")
    p.add_argument("pred", type=Path, nargs="+", help="one prediction per seeded run")
    p.add_argument("--methodologies", type=_methodology_list, required=True,
                   help="comma-separated list, e.g. entity-strict,token-with-O,entity-without-O")
    p.add_argument("--gold-ann", type=Path, help="BRAT gold for offset-exact alongside CoNLL inputs")
    p.add_argument("--pred-ann", type=Path, action="append", default=[],
                   help="BRAT predictions for offset-exact, one per run")
    p.add_argument("--model", default="model", help="row label")
    _add_tagging(p)
    _add_output(p)

    p = sub.add_parser("aggregate", help="mean ± sample std over seeded runs")
    p.add_argument("runs", type=Path, help='runs JSON: {"runs": [{"seed": 1, "metrics": {...}}]}')
    _add_output(p)

    p = sub.add_parser("vocab", help="compare two subword vocabularies")
    p.add_argument("vocab_a", type=Path, help="general vocabulary, one entry per line")
    p.add_argument("vocab_b", type=Path, help="specialized vocabulary")
    p.add_argument("--marker", help="marker convention for both files: prefix:▁, continuation:## or none")
    p.add_argument("--marker-a", help="marker convention for vocab_a (overrides --marker)")
    p.add_argument("--marker-b", help="marker convention for vocab_b (overrides --marker)")
    p.add_argument("--words", type=Path, help="word list (one per line) for fertility and segmentation rows")
    p.add_argument("--fold-case", action="store_true")
    _add_output(p)

    p = sub.add_parser("carbon", help="estimate training emissions")
    p.add_argument("--gpus", type=_positive(int), required=True)
    p.add_argument("--hours", type=_positive(float), required=True)
    p.add_argument("--device", help="V100 or A100; other devices need --power")
    p.add_argument("--power", type=_positive(float), help="kW per device")
    p.add_argument("--intensity", type=_positive(float), default=carbon.DEFAULT_INTENSITY,
                   help="kg CO2-eq per kWh")
    p.add_argument("--pue", type=_positive(float), default=1.0, help="datacenter overhead multiplier")
    _add_output(p)
    return parser


def _is_standoff(path: Path):
    return path.is_dir() or path.suffix == ".ann"


def _read_sentences(path):
    return formats.read_conll(path).sentences


def _paired_standoff(gold_path, pred_path):
    gold = formats.read_ann_dir(gold_path)
    pred = formats.read_ann_dir(pred_path)
    if gold_path.is_file() and pred_path.is_file():
        # two single files pair with each other whatever their names
        return {"doc": next(iter(gold.values()))}, {"doc": next(iter(pred.values()))}
    return gold, pred


def _nested(args):
    return None if args.nested == NO_FLATTEN else args.nested


def _o_policy(args):
    return INCLUDE_O if args.o_policy == "include" else EXCLUDE_O


def _aligned(func, gold_path, pred_path, *a):
    try:
        return func(_read_sentences(gold_path), _read_sentences(pred_path), *a)
    except AlignmentError as exc:
        raise AlignmentError(f"{gold_path} vs {pred_path}: {exc}", exc.sequence_index) from None


def cmd_evaluate(args):
    m = args.methodology
    if m == MethodologyId.OFFSET_EXACT:
        if not (_is_standoff(args.gold) and _is_standoff(args.pred)):
            raise UsageError("offset-exact expects .ann files or directories of .ann files")
        gold, pred = _paired_standoff(args.gold, args.pred)
        report = methodology.eval_offset_exact(gold, pred, _nested(args))
    elif m == MethodologyId.ENTITY_STRICT:
        report = _aligned(methodology.eval_entity_strict, args.gold, args.pred, args.scheme, args.decode)
    elif m == MethodologyId.TOKEN_WITH_O:
        report = _aligned(methodology.eval_token_with_O, args.gold, args.pred, args.token_classes, _o_policy(args))
    else:
        report = _aligned(methodology.eval_entity_without_O, args.gold, args.pred, args.scheme, args.decode)
    for w in report.warnings:
        _warn(w)
    return report


def cmd_compare(args):
    gold = None
    pred_runs = []
    standoff_runs = None
    if _is_standoff(args.gold):
        standoff_runs = [_paired_standoff(args.gold, p) for p in args.pred]
    else:
        gold = _read_sentences(args.gold)
        pred_runs = [_read_sentences(p) for p in args.pred]
        if args.pred_ann:
            if args.gold_ann is None:
                raise UsageError("--pred-ann needs --gold-ann")
            standoff_runs = [_paired_standoff(args.gold_ann, p) for p in args.pred_ann]
    try:
        table = methodology.compare_runs(
            gold,
            pred_runs,
            args.methodologies,
            standoff_runs=standoff_runs,
            model=args.model,
            scheme=args.scheme,
            mode=args.decode,
            token_classes=args.token_classes,
            o_policy=_o_policy(args),
            nested=_nested(args),
        )
    except AlignmentError as exc:
        raise AlignmentError(f"{args.gold} vs prediction: {exc}", exc.sequence_index) from None
    return table


def cmd_aggregate(args):
    runs = formats.parse_runs_json(args.runs.read_bytes(), source=args.runs)
    scores = methodology.aggregate_runs(runs)
    for s in scores:
        if s.n == 1:
            _warn(f"{s.metric}: only one run, std is reported as 0.00")
    return methodology.aggregate_table(scores)


def cmd_vocab(args):
    conv_a = vocab.MarkerConvention.parse(args.marker_a or args.marker)
    conv_b = vocab.MarkerConvention.parse(args.marker_b or args.marker)
    va = vocab.read_vocab_file(args.vocab_a, conv_a, args.fold_case)
    vb = vocab.read_vocab_file(args.vocab_b, conv_b, args.fold_case)
    for name, v in ((args.vocab_a, va), (args.vocab_b, vb)):
        if v.collapsed:
            _warn(f"{name}: {v.collapsed} entries collapsed after marker stripping")
    stats = vocab.intersection_stats(va, vb)
    rows = [
        ["size_a", len(va)],
        ["size_b", len(vb)],
        ["shared", stats.shared],
        ["shared/size_a", stats.rate_a],
        ["shared/size_b", stats.rate_b],
        ["jaccard", stats.jaccard],
    ]
    tables = []
    if args.words:
        words = [w for w in args.words.read_text(encoding="utf-8").split() if w]
        if args.fold_case:
            words = [w.lower() for w in words]
        for suffix, v in (("a", va), ("b", vb)):
            f = vocab.fertility(words, v)
            rows += [[f"fertility_{suffix}", f.mean], [f"fertility_{suffix}_max", f.max],
                     [f"fertility_{suffix}_p95", f.p95]]
        tables.append(vocab.segmentation_diff(words, va, vb))
    tables.insert(0, formats.Table(["statistic", "value"], rows, title="vocabulary overlap",
                                   notes=["headline overlap: shared/size_a"]))
    return tables


def cmd_carbon(args):
    if args.power is not None:
        power = args.power
    elif args.device:
        power = carbon.default_power(args.device)
    else:
        raise UsageError("pass --device V100|A100 or an explicit --power")
    run = carbon.TrainingRun(args.gpus, args.hours, power, args.intensity, args.pue)
    est = carbon.estimate_emissions(run)
    return formats.Table(
        ["gpus", "hours", "device", "power_kw", "intensity_kg_per_kwh", "pue", "gpu_hours", "energy_kwh", "co2_kg"],
        [[args.gpus, f"{args.hours:g}", args.device or "-", f"{power:g}", f"{args.intensity:g}",
          f"{args.pue:g}", est.gpu_hours, est.energy_kwh, est.co2_kg]],
        title="carbon estimate",
    )


COMMANDS = {
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "aggregate": cmd_aggregate,
    "vocab": cmd_vocab,
    "carbon": cmd_carbon,
}


def render(result, fmt, timestamp=None) -> bytes:
    results = result if isinstance(result, list) else [result]
    if fmt == "json":
        docs = [json.loads(formats.emit_report(r, "json")) for r in results]
        doc = docs[0] if len(docs) == 1 else {"tables": docs}
        if timestamp:
            doc["generated"] = timestamp
        return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
    out = b"\n".join(formats.emit_report(r, fmt) for r in results)
    if timestamp:
        prefix = "# " if fmt == "csv" else ""
        out += f"{prefix}generated: {timestamp}\n".encode("utf-8")
    return out


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds") if args.timestamp else None
        out = render(result, args.format, stamp)
    except (ToolkitError, OSError) as exc:
        if isinstance(exc, OSError) and exc.filename:
            msg = f"{exc.filename}: {exc.strerror or exc}"
        else:
            msg = str(exc)
        print(f"nereval {args.command}: error: {msg}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1
    sys.stdout.buffer.write(out)
    sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
