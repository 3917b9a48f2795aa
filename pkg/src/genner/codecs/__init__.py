"""Encoders and decoders for the five generative NER output formats."""

from __future__ import annotations

from collections import defaultdict

from ..model import AnnotatedSentence, LabelSchema, ParsedOutput, laminar_check
from .base import (
    OutputFormat,
    find_occurrences,
    occurrence_index,
    resolve_occurrence,
)
from .inline import (
    decode_inline_bracketed,
    decode_inline_xml,
    encode_inline_bracketed,
    encode_inline_xml,
    strip_markup,
)
from .jsonfmt import (
    category_mentions,
    decode_category_json,
    decode_occurrence_json,
    decode_offset_json,
    encode_category_json,
    encode_occurrence_json,
    encode_offset_json,
    repair_json,
)

_ENCODERS = {
    OutputFormat.INLINE_BRACKETED: encode_inline_bracketed,
    OutputFormat.INLINE_XML: encode_inline_xml,
    OutputFormat.CATEGORY_JSON: encode_category_json,
    OutputFormat.OCCURRENCE_JSON: encode_occurrence_json,
    OutputFormat.OFFSET_JSON: encode_offset_json,
}

_DECODERS = {
    OutputFormat.INLINE_BRACKETED: decode_inline_bracketed,
    OutputFormat.INLINE_XML: decode_inline_xml,
    OutputFormat.CATEGORY_JSON: decode_category_json,
    OutputFormat.OCCURRENCE_JSON: decode_occurrence_json,
    OutputFormat.OFFSET_JSON: decode_offset_json,
}


def encode(fmt, schema: LabelSchema, sent: AnnotatedSentence) -> str:
    """Serialize ``sent`` in output format ``fmt``.

    Raises NotLaminar for inline formats when spans cross, and UnknownLabel
    when a span label is missing from ``schema``.
    """
    return _ENCODERS[OutputFormat.parse(fmt)](schema, sent)


def decode(fmt, schema: LabelSchema, source_text: str, output, *, closed: bool = True, lenient: bool = False) -> ParsedOutput:
    """Parse a model output in format ``fmt`` back into spans over ``source_text``.

    ``lenient`` only affects the offset format.
    """
    fmt = OutputFormat.parse(fmt)
    if fmt is OutputFormat.OFFSET_JSON:
        return decode_offset_json(schema, source_text, output, closed=closed, lenient=lenient)
    return _DECODERS[fmt](schema, source_text, output, closed=closed)


def is_lossless(fmt, schema: LabelSchema, sent: AnnotatedSentence) -> bool:
    """Whether decoding the encoding of ``sent`` in ``fmt`` gives ``sent`` back.

    Inline formats need a laminar span family. The occurrence format cannot
    name a mention that overlaps an earlier occurrence of the same string, and
    the category format can only express, per label and string, the leftmost
    occurrences.
    """
    fmt = OutputFormat.parse(fmt)
    if any(span.label not in schema for span in sent.entities):
        return False
    if fmt.is_inline:
        return laminar_check(sent.entities)
    if fmt is OutputFormat.OFFSET_JSON:
        return True
    text = sent.text
    if fmt is OutputFormat.OCCURRENCE_JSON:
        return all(span.start in find_occurrences(text, span.mention(text)) for span in sent.entities)
    groups = defaultdict(list)
    for span in sent.entities:
        groups[span.label, span.mention(text)].append(span.start)
    return all(
        sorted(starts) == find_occurrences(text, mention)[: len(starts)]
        for (_, mention), starts in groups.items()
    )


__all__ = [
    "OutputFormat",
    "category_mentions",
    "decode",
    "decode_category_json",
    "decode_inline_bracketed",
    "decode_inline_xml",
    "decode_occurrence_json",
    "decode_offset_json",
    "encode",
    "encode_category_json",
    "encode_inline_bracketed",
    "encode_inline_xml",
    "encode_occurrence_json",
    "encode_offset_json",
    "find_occurrences",
    "is_lossless",
    "occurrence_index",
    "repair_json",
    "resolve_occurrence",
    "strip_markup",
]
