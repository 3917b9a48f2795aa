"""Command line interface.

Exit status is 0 on success, 1 on usage errors and 2 on data errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

from . import codecs, corpus, promptgen, scoring, taxonomy
from .codecs import OutputFormat
from .exceptions import GennerError
from .model import EMPTY_OUTPUT, BUILTIN_SCHEMAS, load_schema

FORMATS = [f.value for f in OutputFormat]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _pmap(func, items, jobs):
    """Order-preserving map, fanned out to worker processes when jobs > 1."""
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [func(x) for x in items]
    chunksize = max(1, len(items) // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items, chunksize=chunksize))


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _write_text(path, text):
    out, close = _open_out(path)
    try:
        out.write(text)
    finally:
        if close:
            out.close()


def _schema(args):
    return load_schema(args.schema)


def _gold(args):
    return corpus.read_corpus(args.gold, args.input_format)


def _decode_one(fmt, schema, closed, lenient, item):
    text, record = item
    if record is None:
        return EMPTY_OUTPUT
    return codecs.decode(record.format or fmt, schema, text, record.output, closed=closed, lenient=lenient)


def _decoded_pairs(args, schema):
    gold = _gold(args)
    records = {r.id: r for r in corpus.read_predictions(args.pred)}
    # Joining by id validates that every prediction refers to a gold sentence.
    scoring.pair_predictions(gold, dict.fromkeys(records, EMPTY_OUTPUT))
    work = partial(_decode_one, OutputFormat.parse(args.format), schema, not args.open_labels, args.lenient)
    parsed = _pmap(work, [(s.text, records.get(s.id)) for s in gold], args.jobs)
    return gold, records, parsed


def _encode_one(fmt, schema, sent):
    return corpus.PredictionRecord(sent.id, codecs.encode(fmt, schema, sent), fmt.value)


def cmd_encode(args):
    schema = _schema(args)
    fmt = OutputFormat.parse(args.format)
    records = _pmap(partial(_encode_one, fmt, schema), _gold(args), args.jobs)
    _write_text(args.output, "".join(json.dumps(r.to_dict(), ensure_ascii=False) + "\n" for r in records))
    return 0


def cmd_decode(args):
    schema = _schema(args)
    gold, records, parsed = _decoded_pairs(args, schema)
    lines = []
    n_warn = n_exact = 0
    for sent, p in zip(gold, parsed):
        if sent.id not in records:
            continue
        d = {"id": sent.id}
        d.update(p.to_dict(sent.text))
        lines.append(json.dumps(d, ensure_ascii=False) + "\n")
        n_warn += len(p.warnings)
        n_exact += p.exact
    _write_text(args.output, "".join(lines))
    print(f"decoded {len(lines)} output(s): {n_exact} exact, {n_warn} warning(s)", file=sys.stderr)
    return 0


def cmd_score(args):
    schema = _schema(args)
    fmt = OutputFormat.parse(args.format)
    if fmt is OutputFormat.CATEGORY_JSON and args.category_scoring == "multiset":
        gold = _gold(args)
        records = {r.id: r for r in corpus.read_predictions(args.pred)}
        scoring.pair_predictions(gold, dict.fromkeys(records, EMPTY_OUTPUT))
        pairs = []
        for sent in gold:
            rec = records.get(sent.id)
            pred, _ = codecs.category_mentions(schema, rec.output if rec else "{}", closed=not args.open_labels)
            pairs.append((Counter((l, m) for m, l in sent.mentions()), Counter(pred)))
        report = scoring.score_mention_multisets(pairs)
    else:
        gold, _, parsed = _decoded_pairs(args, schema)
        report = scoring.score_corpus(zip(gold, parsed))
    if args.output:
        _write_text(args.output, report.to_json() + "\n")
    print(report.to_json() if args.json else report.format_table(schema.ids))
    return 0


def cmd_errors(args):
    schema = _schema(args)
    gold, _, parsed = _decoded_pairs(args, schema)
    analysis = taxonomy.classify_corpus(zip(gold, parsed), schema)
    if args.output:
        _write_text(args.output, analysis.to_jsonl())
    print(json.dumps(analysis.to_dict(), indent=2) if args.json else analysis.format_table())
    return 0


def cmd_prompt(args):
    schema = _schema(args)
    text = promptgen.build_instruction(args.format, schema)
    if args.sentence is not None:
        text += "\n" + args.sentence
    _write_text(args.output, text + "\n")
    return 0


def cmd_symbolize(args):
    schema = _schema(args)
    data = promptgen.symbolize_dataset(_gold(args), schema, args.mode, args.alphabet)
    lines = []
    for sent, output in zip(data.sentences, data.outputs):
        d = sent.to_dict()
        d["output"] = output
        lines.append(json.dumps(d, ensure_ascii=False) + "\n")
    _write_text(args.output, "".join(lines))
    if args.instruction:
        _write_text(args.instruction, data.instruction + "\n")
    else:
        print(data.instruction, file=sys.stderr)
    return 0


def cmd_stats(args):
    splits = []
    for path in (args.train, args.dev, args.test):
        splits.append(corpus.read_corpus(path, args.input_format) if path else [])
    num_labels = len(load_schema(args.schema)) if args.schema else None
    stats = corpus.corpus_stats(*splits, num_labels=num_labels)
    print(json.dumps(stats.to_dict(), indent=2) if args.json else stats.format_table())
    if stats.shared_extents:
        print(
            f"note: {stats.shared_extents} span pair(s) share extents with different labels",
            file=sys.stderr,
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file whose keys set defaults for any flag")

    schema_help = f"built-in schema ({', '.join(BUILTIN_SCHEMAS)}) or a schema JSON file"
    gold = _Parser(add_help=False)
    gold.add_argument("--gold", required=True, help="gold corpus file")
    gold.add_argument("--input-format", choices=["standoff", "conll"], default="standoff")
    gold.add_argument("--schema", required=True, help=schema_help)
    gold.add_argument("--jobs", type=int, default=1, help="worker processes for per-sentence work")

    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", required=True, choices=FORMATS)

    decoding = _Parser(add_help=False)
    decoding.add_argument("--pred", required=True, help="JSONL predictions {id, output, format?}")
    decoding.add_argument("--lenient", action="store_true", help="re-anchor offset-json records whose offsets are wrong")
    decoding.add_argument("--open-labels", action="store_true", help="keep labels outside the schema instead of dropping them")

    parser = _Parser(prog="genner", description="Generative NER format conversion, parsing and evaluation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("encode", parents=[common, gold, fmt], help="serialize a gold corpus in an output format")
    p.add_argument("--output", help="output JSONL (default stdout)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=[common, gold, fmt, decoding], help="parse model outputs into spans")
    p.add_argument("--output", help="output JSONL (default stdout)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("score", parents=[common, gold, fmt, decoding], help="micro precision/recall/F1")
    p.add_argument("--category-scoring", choices=["positional", "multiset"], default="positional")
    p.add_argument("--output", help="write the JSON report here")
    p.add_argument("--json", action="store_true", help="print JSON instead of a table")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("errors", parents=[common, gold, fmt, decoding], help="classify prediction errors")
    p.add_argument("--output", help="write error records as JSONL here")
    p.add_argument("--json", action="store_true", help="print JSON summary instead of a table")
    p.set_defaults(func=cmd_errors)

    p = sub.add_parser("prompt", parents=[common, fmt], help="print the instruction for a format and schema")
    p.add_argument("--schema", required=True, help=schema_help)
    p.add_argument("--sentence", help="append this input sentence")
    p.add_argument("--output", help="output file (default stdout)")
    p.set_defaults(func=cmd_prompt)

    p = sub.add_parser("symbolize", parents=[common, gold], help="replace labels with symbols")
    p.add_argument("--mode", choices=["se", "so"], default="se")
    p.add_argument("--alphabet", default="ABCDEFGHIJKLMNOPQRSTUVWXYZ")
    p.add_argument("--output", help="output JSONL (default stdout)")
    p.add_argument("--instruction", help="write the instruction text here (default stderr)")
    p.set_defaults(func=cmd_symbolize)

    p = sub.add_parser("stats", parents=[common], help="sentence and label counts")
    p.add_argument("--train")
    p.add_argument("--dev")
    p.add_argument("--test")
    p.add_argument("--input-format", choices=["standoff", "conll"], default="standoff")
    p.add_argument("--schema", help="count labels from this schema instead of the data")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)
    return parser


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        config = json.loads(Path(known.config).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise UsageError(f"genner: error: cannot read config {known.config}: {e}") from None
    if not isinstance(config, dict):
        raise UsageError("genner: error: config file must hold a JSON object")
    defaults = {k.replace("-", "_"): v for k, v in config.items()}
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for sp in subparsers.choices.values():
        dests = {a.dest: a for a in sp._actions}
        applicable = {k: v for k, v in defaults.items() if k in dests}
        for k in applicable:
            # A flag supplied by the config file is no longer required on the command line.
            dests[k].required = False
        sp.set_defaults(**applicable)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("genner: error: --jobs must be >= 1")
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(e, file=sys.stderr)
        return 1
    except SystemExit as e:  # --help
        return e.code if isinstance(e.code, int) else 0
    try:
        return args.func(args)
    except (GennerError, OSError, ValueError) as e:
        print(f"genner: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
