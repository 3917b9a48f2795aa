"""Corpus readers and writers, prediction files and corpus statistics.

Two gold formats are supported:

* CoNLL-style columns: one token per line, the token in the first column and
  a BIO tag in the last, blank lines between sentences. Tokens are joined with
  single spaces to form the sentence text.
* Standoff JSONL: one ``{"id", "text", "entities": [{"start", "end",
  "label"}]}`` object per line. This is the only way to load nested corpora.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .exceptions import EncodingError, InvalidSpan, SchemaViolation
from .model import AnnotatedSentence, EntitySpan

logger = logging.getLogger(__name__)


def _read_lines(path) -> list[str]:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read().splitlines()
    except UnicodeDecodeError as e:
        raise EncodingError(f"{path}: not valid UTF-8 ({e.reason} at byte {e.start})") from None


def bio_to_spans(tokens: Sequence[str], tags: Sequence[str], where: str = "") -> tuple[str, list[EntitySpan]]:
    """Join tokens with single spaces and convert BIO tags to character spans.

    An ``I-X`` tag that does not continue an ``X`` entity starts a new one,
    with a logged warning.
    """
    offsets = []
    pos = 0
    for tok in tokens:
        offsets.append((pos, pos + len(tok)))
        pos += len(tok) + 1
    text = " ".join(tokens)
    spans = []
    current = None  # [label, start_token, end_token]
    for i, tag in enumerate(tags):
        if tag == "O":
            prefix, label = "O", None
        elif len(tag) > 2 and tag[1] == "-" and tag[0] in "BI":
            prefix, label = tag[0], tag[2:]
        else:
            raise SchemaViolation(f"unrecognized tag {tag!r}{where}")
        if prefix == "I" and (current is None or current[0] != label):
            logger.warning("I-%s without preceding B-%s%s; treated as B-%s", label, label, where, label)
            prefix = "B"
        if prefix == "I":
            current[2] = i
            continue
        if current is not None:
            spans.append(EntitySpan(offsets[current[1]][0], offsets[current[2]][1], current[0]))
            current = None
        if prefix == "B":
            current = [label, i, i]
    if current is not None:
        spans.append(EntitySpan(offsets[current[1]][0], offsets[current[2]][1], current[0]))
    return text, spans


def read_conll_columns(path) -> list[AnnotatedSentence]:
    """Read a BIO column file; ``-DOCSTART-`` lines are skipped.

    Sentence ids are the 0-based sentence index as a string.
    """
    sentences = []
    tokens: list[str] = []
    tags: list[str] = []
    first_line = 0

    def flush():
        if tokens:
            where = f" ({path}:{first_line})"
            try:
                text, spans = bio_to_spans(tokens, tags, where)
            except SchemaViolation as e:
                raise SchemaViolation(str(e), line=first_line, path=path) from None
            sentences.append(AnnotatedSentence(str(len(sentences)), text, tuple(spans)))
        tokens.clear()
        tags.clear()

    for lineno, line in enumerate(_read_lines(path), 1):
        cols = line.split()
        if not cols:
            flush()
            continue
        if cols[0] == "-DOCSTART-":
            flush()
            continue
        if len(cols) < 2:
            raise SchemaViolation("expected a token and a tag column", line=lineno, path=path)
        if not tokens:
            first_line = lineno
        tokens.append(cols[0])
        tags.append(cols[-1])
    flush()
    return sentences


def spans_to_bio(sent: AnnotatedSentence) -> tuple[list[str], list[str]]:
    """Inverse of :func:`bio_to_spans` for flat sentences whose text is space-joined tokens."""
    tokens = sent.text.split(" ")
    starts, ends = {}, {}
    pos = 0
    for i, tok in enumerate(tokens):
        if not tok:
            raise SchemaViolation(f"sentence {sent.id!r}: text is not single-space separated tokens")
        starts[pos] = i
        ends[pos + len(tok)] = i
        pos += len(tok) + 1
    tags = ["O"] * len(tokens)
    for span in sent.entities:
        if span.start not in starts or span.end not in ends:
            raise SchemaViolation(f"sentence {sent.id!r}: span {span.start}-{span.end} does not align with tokens")
        first, last = starts[span.start], ends[span.end]
        if any(t != "O" for t in tags[first:last + 1]):
            raise SchemaViolation(f"sentence {sent.id!r}: nested or overlapping spans cannot be written as BIO")
        tags[first] = f"B-{span.label}"
        for i in range(first + 1, last + 1):
            tags[i] = f"I-{span.label}"
    return tokens, tags


def write_conll_columns(sentences: Iterable[AnnotatedSentence], path):
    """Write two-column BIO files readable by :func:`read_conll_columns`."""
    with open(path, "w", encoding="utf-8") as f:
        for sent in sentences:
            if not sent.text:
                continue
            for tok, tag in zip(*spans_to_bio(sent)):
                f.write(f"{tok} {tag}\n")
            f.write("\n")


def sentence_from_dict(obj, line=None, path=None) -> AnnotatedSentence:
    if not isinstance(obj, dict):
        raise SchemaViolation("record is not a JSON object", line=line, path=path)
    try:
        sid, text, entities = obj["id"], obj["text"], obj.get("entities", [])
    except KeyError as e:
        raise SchemaViolation(f"missing field {e.args[0]!r}", line=line, path=path) from None
    if not isinstance(text, str):
        raise SchemaViolation("'text' must be a string", line=line, path=path)
    if not isinstance(entities, list):
        raise SchemaViolation("'entities' must be a list", line=line, path=path)
    spans = []
    for ent in entities:
        try:
            spans.append(EntitySpan(ent["start"], ent["end"], ent["label"]))
        except (KeyError, TypeError) as e:
            raise SchemaViolation(f"malformed entity {ent!r}: {e}", line=line, path=path) from None
        except InvalidSpan as e:
            raise SchemaViolation(str(e), line=line, path=path) from None
    try:
        return AnnotatedSentence(str(sid), text, tuple(spans))
    except InvalidSpan as e:
        raise SchemaViolation(str(e), line=line, path=path) from None


def read_standoff_json(path) -> list[AnnotatedSentence]:
    """Read standoff JSONL; any invalid record raises SchemaViolation with its line number."""
    sentences = []
    seen = set()
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except ValueError as e:
            raise SchemaViolation(f"invalid JSON: {e}", line=lineno, path=path) from None
        sent = sentence_from_dict(obj, lineno, path)
        if sent.id in seen:
            raise SchemaViolation(f"duplicate sentence id {sent.id!r}", line=lineno, path=path)
        seen.add(sent.id)
        sentences.append(sent)
    return sentences


def dumps_sentence(sent: AnnotatedSentence) -> str:
    return json.dumps(sent.to_dict(), ensure_ascii=False)


def write_standoff_json(sentences: Iterable[AnnotatedSentence], path):
    with open(path, "w", encoding="utf-8") as f:
        for sent in sentences:
            f.write(dumps_sentence(sent) + "\n")


def read_corpus(path, input_format: str = "standoff") -> list[AnnotatedSentence]:
    if input_format == "conll":
        return read_conll_columns(path)
    if input_format == "standoff":
        return read_standoff_json(path)
    raise ValueError(f"unknown input format {input_format!r}")


@dataclass(frozen=True)
class PredictionRecord:
    id: str
    output: str
    format: str | None = None

    def to_dict(self) -> dict:
        d = {"id": self.id, "output": self.output}
        if self.format is not None:
            d["format"] = self.format
        return d


def read_predictions(path) -> list[PredictionRecord]:
    """Read a JSONL file of ``{"id", "output", "format"?}`` records."""
    records = []
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except ValueError as e:
            raise SchemaViolation(f"invalid JSON: {e}", line=lineno, path=path) from None
        if not isinstance(obj, dict) or "id" not in obj or "output" not in obj:
            raise SchemaViolation("prediction needs 'id' and 'output'", line=lineno, path=path)
        output = obj["output"]
        if not isinstance(output, str):
            output = json.dumps(output, ensure_ascii=False)
        fmt = obj.get("format")
        records.append(PredictionRecord(str(obj["id"]), output, None if fmt is None else str(fmt)))
    return records


def write_predictions(records: Iterable[PredictionRecord], path):
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class CorpusStats:
    train: int
    dev: int
    test: int
    labels: int
    nested: bool
    entities: int = 0
    # Pairs of spans in one sentence with identical extents but different labels.
    shared_extents: int = 0

    def to_dict(self) -> dict:
        return {
            "train": self.train,
            "dev": self.dev,
            "test": self.test,
            "labels": self.labels,
            "type": "nested" if self.nested else "flat",
            "entities": self.entities,
            "shared_extents": self.shared_extents,
        }

    def format_table(self) -> str:
        d = self.to_dict()
        width = max(len(k) for k in d)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in d.items())


def _nesting(sent: AnnotatedSentence) -> tuple[bool, int]:
    spans = sent.entities
    nested = False
    shared = 0
    for i, a in enumerate(spans):
        for b in spans[i + 1:]:
            if b.start >= a.end:
                break
            if a.extent == b.extent:
                shared += 1
                nested = True
            elif a.contains(b) or b.contains(a):
                nested = True
    return nested, shared


def corpus_stats(
    train: Iterable[AnnotatedSentence] = (),
    dev: Iterable[AnnotatedSentence] = (),
    test: Iterable[AnnotatedSentence] = (),
    num_labels: int | None = None,
) -> CorpusStats:
    """Sentence counts per split, label count and the flat/nested flag.

    The label count is the number of distinct labels observed unless
    ``num_labels`` (typically the schema size) is given.
    """
    counts = []
    labels = set()
    nested = False
    shared = 0
    entities = 0
    for split in (train, dev, test):
        n = 0
        for sent in split:
            n += 1
            entities += len(sent.entities)
            labels.update(s.label for s in sent.entities)
            is_nested, k = _nesting(sent)
            nested = nested or is_nested
            shared += k
        counts.append(n)
    return CorpusStats(
        train=counts[0],
        dev=counts[1],
        test=counts[2],
        labels=len(labels) if num_labels is None else num_labels,
        nested=nested,
        entities=entities,
        shared_extents=shared,
    )
