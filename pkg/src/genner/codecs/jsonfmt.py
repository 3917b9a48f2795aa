"""JSON formats: category-grouped, occurrence-based and offset-based."""

from __future__ import annotations

import json
import re
from collections import Counter

from ..exceptions import UnknownLabel
from ..model import AnnotatedSentence, EntitySpan, LabelSchema, ParseWarning, span_sort_key
from . import base
from .base import find_occurrences, occurrence_index

_FENCE_RE = re.compile(r"```[a-zA-Z]*\s*(.*?)(?:```|$)", re.DOTALL)
_CLOSERS = {"{": "}", "[": "]"}


def _check_labels(schema, sent):
    for span in sent.entities:
        if span.label not in schema:
            raise UnknownLabel(f"label {span.label!r} is not in schema {schema.name!r}")


def _dumps(value) -> str:
    try:
        return json.dumps(value, ensure_ascii=False)
    except (ValueError, TypeError, RecursionError):
        return repr(value)[:200]


def encode_category_json(schema: LabelSchema, sent: AnnotatedSentence) -> str:
    _check_labels(schema, sent)
    grouped = {label: [] for label in schema.ids}
    for span in sorted(sent.entities, key=span_sort_key(schema)):
        grouped[span.label].append(span.mention(sent.text))
    return _dumps(grouped)


def encode_occurrence_json(schema: LabelSchema, sent: AnnotatedSentence) -> str:
    _check_labels(schema, sent)
    records = []
    for span in sorted(sent.entities, key=span_sort_key(schema)):
        mention = span.mention(sent.text)
        records.append(
            {
                "text": mention,
                "label": span.label,
                "occurrence_index": occurrence_index(sent.text, mention, span.start),
            }
        )
    return _dumps(records)


def encode_offset_json(schema: LabelSchema, sent: AnnotatedSentence) -> str:
    _check_labels(schema, sent)
    return _dumps(
        [
            {"text": span.mention(sent.text), "label": span.label, "start": span.start, "end": span.end}
            for span in sorted(sent.entities, key=span_sort_key(schema))
        ]
    )


def repair_json(text: str) -> str | None:
    """One bracket-balancing pass over truncated or chatty JSON.

    Drops prose around the first JSON value, removes trailing commas, closes
    an unterminated string and appends missing closing brackets. Returns None
    when the text contains no JSON object or array at all.
    """
    fenced = _FENCE_RE.search(text)
    if fenced:
        text = fenced.group(1)
    starts = [i for i in (text.find("{"), text.find("[")) if i != -1]
    if not starts:
        return None
    out: list[str] = []
    stack: list[str] = []
    in_string = escaped = False
    for c in text[min(starts):]:
        if in_string:
            out.append(c)
            if escaped:
                escaped = False
            elif c == "\\":
                escaped = True
            elif c == '"':
                in_string = False
            continue
        if c == '"':
            in_string = True
            out.append(c)
        elif c in _CLOSERS:
            stack.append(_CLOSERS[c])
            out.append(c)
        elif c in "}]":
            if not stack:
                break
            _trim_trailing(out)
            out.append(stack.pop())
            if not stack:
                break
        else:
            out.append(c)
    if in_string:
        if escaped:
            out.pop()
        out.append('"')
    if stack:
        _trim_trailing(out)
        if out and out[-1] == ":":
            out.append("null")
        out.extend(reversed(stack))
    return "".join(out)


def _trim_trailing(out: list[str]):
    while out and out[-1] in " \t\r\n,":
        out.pop()


def _load(output, expected: type, warnings: list):
    """Parse model output as JSON of the expected top-level type, or return None."""
    text = base.coerce_output(output, warnings).strip()
    dup_keys: list[str] = []

    def hook(pairs):
        obj = {}
        for key, value in pairs:
            if key in obj:
                dup_keys.append(key)
                if isinstance(obj[key], list) and isinstance(value, list):
                    value = obj[key] + value
            obj[key] = value
        return obj

    try:
        value = json.loads(text, object_pairs_hook=hook)
    except (ValueError, RecursionError):
        dup_keys.clear()
        try:
            repaired = repair_json(text)
            value = None if repaired is None else json.loads(repaired, object_pairs_hook=hook)
        except (ValueError, RecursionError):
            value = None
        if value is None:
            warnings.append(ParseWarning(base.PARSE_FAILURE, "output is not valid JSON", text[:200]))
            return None
        warnings.append(ParseWarning(base.JSON_REPAIRED, "output was repaired before parsing", text[:200]))
    for key in dup_keys:
        warnings.append(ParseWarning(base.DUPLICATE_KEY, f"key {key!r} appears more than once", key))
    if not isinstance(value, expected):
        warnings.append(
            ParseWarning(
                base.PARSE_FAILURE,
                f"expected a JSON {expected.__name__.replace('dict', 'object')}, got {type(value).__name__}",
                text[:200],
            )
        )
        return None
    return value


def category_mentions(schema: LabelSchema, output, *, closed: bool = True):
    """``(label, mention)`` pairs listed in a category-grouped JSON output.

    Returns the pairs in output order together with the parse warnings; no
    positional resolution is attempted.
    """
    warnings: list[ParseWarning] = []
    value = _load(output, dict, warnings)
    pairs = []
    if value is None:
        return pairs, warnings
    for label, items in value.items():
        if closed and label not in schema:
            warnings.append(
                ParseWarning(base.UNKNOWN_LABEL, f"label {label!r} is not in the schema", label, label=label)
            )
            continue
        if not isinstance(items, list):
            warnings.append(
                ParseWarning(base.MALFORMED_RECORD, f"value of {label!r} is not a list", _dumps(items)[:80])
            )
            continue
        if not label:
            warnings.append(ParseWarning(base.UNKNOWN_LABEL, "empty label key", ""))
            continue
        for item in items:
            if not isinstance(item, str) or not item:
                warnings.append(
                    ParseWarning(base.MALFORMED_RECORD, f"entry under {label!r} is not a non-empty string", _dumps(item)[:80])
                )
                continue
            pairs.append((label, item))
    return pairs, warnings


def decode_category_json(schema: LabelSchema, source_text: str, output, *, closed: bool = True):
    """Resolve category-grouped mentions to spans, greedy-leftmost.

    A string listed ``m`` times under one label claims the first ``m``
    non-overlapping occurrences of that string in ``source_text``.
    """
    pairs, warnings = category_mentions(schema, output, closed=closed)
    counts = Counter(pairs)
    spans = []
    for (label, mention), m in counts.items():
        starts = find_occurrences(source_text, mention)
        for s in starts[:m]:
            spans.append(EntitySpan(s, s + len(mention), label))
        for _ in range(m - len(starts)):
            code = base.MENTION_NOT_FOUND if not starts else base.OCCURRENCE_OUT_OF_RANGE
            warnings.append(
                ParseWarning(
                    code,
                    f"{mention!r} listed {m} time(s) under {label!r} but occurs {len(starts)} time(s)",
                    mention, mention, label,
                )
            )
    return base.finish(spans, warnings)


def _record_fields(item, fields, warnings):
    if not isinstance(item, dict):
        warnings.append(ParseWarning(base.MALFORMED_RECORD, "record is not an object", _dumps(item)[:80]))
        return None
    text = item.get("text")
    label = item.get("label")
    if not isinstance(label, str) or not label:
        warnings.append(ParseWarning(base.MALFORMED_RECORD, "record has no label", _dumps(item)[:80]))
        return None
    values = []
    for name in fields:
        v = item.get(name)
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        if not isinstance(v, int) or isinstance(v, bool):
            warnings.append(
                ParseWarning(base.MALFORMED_RECORD, f"field {name!r} is not an integer", _dumps(item)[:80], label=label)
            )
            return None
        values.append(v)
    return text, label, values


def _label_ok(schema, label, mention, closed, warnings) -> bool:
    if closed and label not in schema:
        warnings.append(
            ParseWarning(base.UNKNOWN_LABEL, f"label {label!r} is not in the schema", mention or "", mention, label)
        )
        return False
    return True


def decode_occurrence_json(schema: LabelSchema, source_text: str, output, *, closed: bool = True):
    """Map each ``{"text", "label", "occurrence_index"}`` record to the k-th occurrence."""
    warnings: list[ParseWarning] = []
    records = _load(output, list, warnings)
    spans = []
    for item in records or ():
        fields = _record_fields(item, ("occurrence_index",), warnings)
        if fields is None:
            continue
        text, label, (k,) = fields
        if not isinstance(text, str) or not text:
            warnings.append(ParseWarning(base.MALFORMED_RECORD, "record has no text", _dumps(item)[:80], label=label))
            continue
        if not _label_ok(schema, label, text, closed, warnings):
            continue
        if k < 1:
            warnings.append(
                ParseWarning(base.MALFORMED_RECORD, f"occurrence_index {k} is not 1-based", _dumps(item)[:80], text, label)
            )
            continue
        starts = find_occurrences(source_text, text)
        if len(starts) < k:
            code = base.MENTION_NOT_FOUND if not starts else base.OCCURRENCE_OUT_OF_RANGE
            warnings.append(
                ParseWarning(code, f"{text!r} occurs {len(starts)} time(s), index {k} requested", _dumps(item)[:80], text, label)
            )
            continue
        s = starts[k - 1]
        spans.append(EntitySpan(s, s + len(text), label))
    return base.finish(spans, warnings)


def decode_offset_json(schema: LabelSchema, source_text: str, output, *, closed: bool = True, lenient: bool = False):
    """Validate ``{"text", "label", "start", "end"}`` records against the source.

    In strict mode (the default) a record whose offsets are out of range or do
    not select its ``text`` is dropped. In lenient mode such a record is
    re-anchored to the occurrence of its text nearest to the claimed start.
    """
    warnings: list[ParseWarning] = []
    records = _load(output, list, warnings)
    spans = []
    n = len(source_text)
    for item in records or ():
        fields = _record_fields(item, ("start", "end"), warnings)
        if fields is None:
            continue
        text, label, (start, end) = fields
        frag = _dumps(item)[:80]
        has_text = isinstance(text, str) and bool(text)
        mention = text if has_text else None
        if not _label_ok(schema, label, mention, closed, warnings):
            continue
        in_range = False
        if end <= start:
            warnings.append(ParseWarning(base.INVALID_OFFSETS, f"end {end} <= start {start}", frag, mention, label))
        elif start < 0 or end > n:
            warnings.append(
                ParseWarning(base.OFFSET_OUT_OF_BOUNDS, f"({start}, {end}) outside text of length {n}", frag, mention, label)
            )
        else:
            in_range = True
        if not has_text:
            if in_range and lenient:
                warnings.append(ParseWarning(base.MALFORMED_RECORD, "record has no text; offsets trusted", frag, label=label))
                spans.append(EntitySpan(start, end, label))
            elif in_range:
                warnings.append(ParseWarning(base.MALFORMED_RECORD, "record has no text", frag, label=label))
            continue
        if in_range and source_text[start:end] == text:
            spans.append(EntitySpan(start, end, label))
            continue
        starts = find_occurrences(source_text, text)
        if not starts:
            if in_range:
                warnings.append(ParseWarning(base.MENTION_NOT_FOUND, f"{text!r} does not occur in the source", frag, text, label))
            continue
        if in_range:
            warnings.append(
                ParseWarning(
                    base.OFFSET_TEXT_MISMATCH,
                    f"source[{start}:{end}] is {source_text[start:end]!r}, record says {text!r}",
                    frag, text, label,
                )
            )
        if lenient:
            s = min(starts, key=lambda x: (abs(x - start), x))
            spans.append(EntitySpan(s, s + len(text), label))
    return base.finish(spans, warnings)
