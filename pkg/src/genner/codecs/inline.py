"""Inline formats: ``[text | LABEL]`` brackets and ``<LABEL>text</LABEL>`` tags.

Characters that carry markup meaning in a format are backslash-escaped
wherever they occur in the sentence, so encoding is reversible for any text.
Decoding is lenient: malformed markup is repaired or dropped, and when the
markup-stripped output no longer matches the source sentence the spans are
re-anchored by alignment or, failing that, by occurrence matching.
"""

from __future__ import annotations

import re
from difflib import SequenceMatcher

from ..exceptions import UnknownLabel
from ..model import AnnotatedSentence, EntitySpan, LabelSchema, ParseWarning, nesting_forest
from . import base
from .base import find_occurrences

BRACKET_SPECIALS = frozenset("\\[]|")
XML_SPECIALS = frozenset("\\<>")

_BRACKET_CLOSE_RE = re.compile(r"\|[ \t]*([^\[\]|\\\n]*?)[ \t]*\]")
_XML_TAG_RE = re.compile(r"<[ \t]*(/?)[ \t]*([^<>/\s\\]+)[ \t]*>")


def escape(text: str, specials) -> str:
    if not any(c in specials for c in text):
        return text
    return "".join("\\" + c if c in specials else c for c in text)


def unescape(text: str, specials) -> str:
    out = []
    i = 0
    while i < len(text):
        if text[i] == "\\" and i + 1 < len(text) and text[i + 1] in specials:
            out.append(text[i + 1])
            i += 2
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _check_labels(schema: LabelSchema, sent: AnnotatedSentence):
    for span in sent.entities:
        if span.label not in schema:
            raise UnknownLabel(f"label {span.label!r} is not in schema {schema.name!r}")


def _encode(sent, schema, specials, wrap) -> str:
    text = sent.text

    def render(nodes, lo, hi):
        parts = []
        pos = lo
        for node in nodes:
            parts.append(escape(text[pos:node.span.start], specials))
            inner = render(node.children, node.span.start, node.span.end)
            parts.append(wrap(inner, node.span.label))
            pos = node.span.end
        parts.append(escape(text[pos:hi], specials))
        return "".join(parts)

    return render(nesting_forest(sent.entities, schema), 0, len(text))


def encode_inline_bracketed(schema: LabelSchema, sent: AnnotatedSentence) -> str:
    _check_labels(schema, sent)
    return _encode(sent, schema, BRACKET_SPECIALS, lambda inner, label: f"[{inner} | {label}]")


def encode_inline_xml(schema: LabelSchema, sent: AnnotatedSentence) -> str:
    _check_labels(schema, sent)
    return _encode(sent, schema, XML_SPECIALS, lambda inner, label: f"<{label}>{inner}</{label}>")


# Token kinds produced by the tokenizers below.
_LIT, _OPEN, _CLOSE, _RBRACKET = range(4)


def _tokenize_bracketed(out: str) -> list[list]:
    items: list[list] = []
    i, n = 0, len(out)
    while i < n:
        c = out[i]
        if c == "\\" and i + 1 < n and out[i + 1] in BRACKET_SPECIALS:
            items.append([_LIT, out[i + 1]])
            i += 2
        elif c == "[":
            items.append([_OPEN, "[", None])
            i += 1
        elif c == "|":
            m = _BRACKET_CLOSE_RE.match(out, i)
            if m is None:
                items.append([_LIT, c])
                i += 1
                continue
            raw = m.group(0)
            # The single space before the pipe belongs to the markup.
            if items and items[-1][0] == _LIT and items[-1][1] == " " and out[i - 1] == " ":
                items.pop()
                raw = " " + raw
            items.append([_CLOSE, raw, m.group(1).strip()])
            i = m.end()
        elif c == "]":
            items.append([_RBRACKET, "]", None])
            i += 1
        else:
            items.append([_LIT, c])
            i += 1
    return items


def _tokenize_xml(out: str) -> list[list]:
    items: list[list] = []
    i, n = 0, len(out)
    while i < n:
        c = out[i]
        if c == "\\" and i + 1 < n and out[i + 1] in XML_SPECIALS:
            items.append([_LIT, out[i + 1]])
            i += 2
        elif c == "<":
            m = _XML_TAG_RE.match(out, i)
            if m is None:
                items.append([_LIT, c])
                i += 1
                continue
            kind = _CLOSE if m.group(1) else _OPEN
            items.append([kind, m.group(0), m.group(2)])
            i = m.end()
        else:
            items.append([_LIT, c])
            i += 1
    return items


def _match_bracketed(items, warnings) -> list[tuple[int, int]]:
    pairs = []
    stack = []
    for idx, item in enumerate(items):
        kind = item[0]
        if kind == _OPEN:
            stack.append(idx)
        elif kind == _CLOSE:
            if stack:
                pairs.append((stack.pop(), idx))
            else:
                warnings.append(ParseWarning(base.UNBALANCED_BRACKET, "label delimiter without opening bracket", item[1]))
                items[idx] = [_LIT, item[1]]
        elif kind == _RBRACKET:
            if stack:
                o = stack.pop()
                warnings.append(ParseWarning(base.UNBALANCED_BRACKET, "bracket group without label"))
                items[o] = [_LIT, "["]
            else:
                warnings.append(ParseWarning(base.UNBALANCED_BRACKET, "closing bracket without opening bracket", "]"))
            items[idx] = [_LIT, "]"]
    for o in stack:
        warnings.append(ParseWarning(base.UNBALANCED_BRACKET, "opening bracket never closed", "["))
        items[o] = [_LIT, "["]
    return pairs


def _match_xml(items, warnings) -> list[tuple[int, int]]:
    pairs = []
    stack: list[int] = []
    for idx, item in enumerate(items):
        kind = item[0]
        if kind == _OPEN:
            stack.append(idx)
        elif kind == _CLOSE:
            label = item[2]
            for depth in range(len(stack) - 1, -1, -1):
                if items[stack[depth]][2] == label:
                    if depth != len(stack) - 1:
                        warnings.append(
                            ParseWarning(
                                base.MISMATCHED_TAG,
                                f"closing tag for {label!r} crosses an open {items[stack[-1]][2]!r} tag",
                                item[1],
                            )
                        )
                    pairs.append((stack.pop(depth), idx))
                    break
            else:
                warnings.append(ParseWarning(base.STRAY_CLOSE_TAG, f"closing tag {label!r} was never opened", item[1]))
    for o in stack:
        warnings.append(ParseWarning(base.UNCLOSED_TAG, f"tag {items[o][2]!r} never closed", items[o][1]))
    return pairs


def _strip(items, pairs):
    """Markup-free text plus ``(start, end, label)`` in stripped coordinates."""
    positions = {}
    buf = []
    pos = 0
    for idx, item in enumerate(items):
        if item[0] == _LIT:
            buf.append(item[1])
            pos += len(item[1])
        else:
            positions[idx] = pos
    raw = [(positions[o], positions[c], items[c][2]) for o, c in pairs]
    raw.sort(key=lambda t: (t[0], -t[1]))
    return "".join(buf), raw


def _anchor(stripped: str, source: str, raw, schema, closed, warnings) -> list[EntitySpan]:
    accepted = []
    for start, end, label in raw:
        mention = stripped[start:end]
        if not label or (closed and label not in schema):
            warnings.append(
                ParseWarning(base.UNKNOWN_LABEL, f"label {label!r} is not in the schema", mention, mention, label)
            )
            continue
        if start >= end:
            warnings.append(ParseWarning(base.EMPTY_MENTION, f"empty mention labeled {label!r}", "", "", label))
            continue
        accepted.append((start, end, label))

    if stripped == source:
        return [EntitySpan(s, e, l) for s, e, l in accepted]

    warnings.append(
        ParseWarning(base.TEXT_MISMATCH, "output text differs from the source sentence", stripped[:200])
    )
    mapping = [-1] * len(stripped)
    matcher = SequenceMatcher(None, stripped, source, autojunk=False)
    for a, b, size in matcher.get_matching_blocks():
        for k in range(size):
            mapping[a + k] = b + k

    spans = []
    for start, end, label in accepted:
        mention = stripped[start:end]
        first, last = mapping[start], mapping[end - 1]
        if first >= 0 and last - first == end - 1 - start and source[first:last + 1] == mention:
            spans.append(EntitySpan(first, last + 1, label))
            continue
        starts = find_occurrences(source, mention)
        if not starts:
            warnings.append(
                ParseWarning(base.MENTION_NOT_FOUND, f"{mention!r} does not occur in the source", mention, mention, label)
            )
            continue
        k = sum(1 for s in find_occurrences(stripped, mention) if s <= start)
        s = starts[min(max(k, 1), len(starts)) - 1]
        spans.append(EntitySpan(s, s + len(mention), label))
    return spans


def _decode(tokenize, match, schema, source_text, output, closed):
    warnings: list[ParseWarning] = []
    out = base.coerce_output(output, warnings)
    items = tokenize(out)
    pairs = match(items, warnings)
    stripped, raw = _strip(items, pairs)
    spans = _anchor(stripped, source_text, raw, schema, closed, warnings)
    return base.finish(spans, warnings)


def decode_inline_bracketed(schema: LabelSchema, source_text: str, output, *, closed: bool = True):
    """Recover spans from ``[mention | LABEL]`` markup.

    With ``closed=False`` labels outside the schema are kept instead of being
    dropped with an UnknownLabel warning.
    """
    return _decode(_tokenize_bracketed, _match_bracketed, schema, source_text, output, closed)


def decode_inline_xml(schema: LabelSchema, source_text: str, output, *, closed: bool = True):
    """Recover spans from ``<LABEL>mention</LABEL>`` markup.

    Crossing tags are repaired by closing the innermost open tag with the same
    label, so the result may contain partially overlapping spans.
    """
    return _decode(_tokenize_xml, _match_xml, schema, source_text, output, closed)


def strip_markup(fmt, output: str) -> str:
    """Remove inline markup and escapes, leaving the plain sentence."""
    if fmt == base.OutputFormat.INLINE_BRACKETED:
        items = _tokenize_bracketed(output)
        pairs = _match_bracketed(items, [])
    else:
        items = _tokenize_xml(output)
        pairs = _match_xml(items, [])
    return _strip(items, pairs)[0]
