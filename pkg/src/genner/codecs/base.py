from __future__ import annotations

import enum

from ..exceptions import MentionNotFound
from ..model import ParsedOutput, ParseWarning, span_sort_key


class OutputFormat(str, enum.Enum):
    """The five generative output formats.

    Values are the identifiers used on the command line and in file metadata.
    """

    INLINE_BRACKETED = "inline-bracketed"
    INLINE_XML = "inline-xml"
    CATEGORY_JSON = "category-json"
    OCCURRENCE_JSON = "occurrence-json"
    OFFSET_JSON = "offset-json"

    def __str__(self):
        return self.value

    @property
    def is_inline(self) -> bool:
        return self in (OutputFormat.INLINE_BRACKETED, OutputFormat.INLINE_XML)

    @classmethod
    def parse(cls, value) -> "OutputFormat":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for fmt in cls:
            if key in (fmt.value, fmt.name.lower().replace("_", "-")):
                return fmt
        raise ValueError(
            f"unknown output format {value!r}; expected one of {', '.join(f.value for f in cls)}"
        )


# Warning codes emitted by decoders.
UNKNOWN_LABEL = "UnknownLabel"
MENTION_NOT_FOUND = "MentionNotFound"
OCCURRENCE_OUT_OF_RANGE = "OccurrenceOutOfRange"
OFFSET_TEXT_MISMATCH = "OffsetTextMismatch"
INVALID_OFFSETS = "InvalidOffsets"
OFFSET_OUT_OF_BOUNDS = "OffsetOutOfBounds"
PARSE_FAILURE = "ParseFailure"
JSON_REPAIRED = "JsonRepaired"
MALFORMED_RECORD = "MalformedRecord"
UNBALANCED_BRACKET = "UnbalancedBracket"
MISMATCHED_TAG = "MismatchedTag"
UNCLOSED_TAG = "UnclosedTag"
STRAY_CLOSE_TAG = "StrayCloseTag"
EMPTY_MENTION = "EmptyMention"
TEXT_MISMATCH = "TextMismatch"
DUPLICATE_SPAN = "DuplicateSpan"
DUPLICATE_KEY = "DuplicateKey"
INVALID_INPUT = "InvalidInput"


def find_occurrences(text: str, mention: str) -> list[int]:
    """Start offsets of the non-overlapping left-to-right occurrences of ``mention``."""
    if not mention:
        return []
    starts = []
    i = text.find(mention)
    while i != -1:
        starts.append(i)
        i = text.find(mention, i + len(mention))
    return starts


def resolve_occurrence(text: str, mention: str, k: int) -> tuple[int, int]:
    """Extents of the ``k``-th (1-based) non-overlapping occurrence of ``mention``.

    >>> resolve_occurrence("aaaa", "aa", 2)
    (2, 4)
    """
    if not mention:
        raise ValueError("mention must be non-empty")
    if k < 1:
        raise ValueError(f"occurrence index must be >= 1, got {k}")
    starts = find_occurrences(text, mention)
    if len(starts) < k:
        raise MentionNotFound(
            f"{mention!r} occurs {len(starts)} time(s), occurrence {k} requested"
        )
    return starts[k - 1], starts[k - 1] + len(mention)


def occurrence_index(text: str, mention: str, start: int) -> int:
    """1-based occurrence index that encodes a mention starting at ``start``.

    Exact when ``start`` is one of the non-overlapping occurrences; otherwise
    the nearest preceding occurrence is named (the format cannot express the
    position).
    """
    starts = find_occurrences(text, mention)
    k = sum(1 for s in starts if s <= start)
    return max(k, 1)


def coerce_output(output, warnings: list) -> str:
    """Turn whatever a model produced into text; decoders never reject input."""
    if isinstance(output, str):
        return output
    if isinstance(output, (bytes, bytearray)):
        try:
            return bytes(output).decode("utf-8")
        except UnicodeDecodeError:
            text = bytes(output).decode("utf-8", errors="replace")
            warnings.append(ParseWarning(INVALID_INPUT, "output is not valid UTF-8", text[:80]))
            return text
    warnings.append(ParseWarning(INVALID_INPUT, f"output of type {type(output).__name__} is not text"))
    return "" if output is None else str(output)


def finish(spans, warnings):
    """Build a ParsedOutput, flagging spans the output listed more than once."""
    seen = set()
    for span in spans:
        if span in seen:
            warnings.append(
                ParseWarning(
                    DUPLICATE_SPAN,
                    f"span ({span.start}, {span.end}, {span.label}) listed more than once",
                    label=span.label,
                )
            )
        seen.add(span)
    return ParsedOutput(tuple(sorted(spans, key=span_sort_key())), tuple(warnings))
