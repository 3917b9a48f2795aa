"""Span data model: label schemas, entity spans, sentences and parse results.

Offsets are half-open ``[start, end)`` and counted in Python ``str`` indices,
i.e. Unicode code points.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .exceptions import InvalidSpan, NotLaminar, UnknownLabel

logger = logging.getLogger(__name__)

BUILTIN_SCHEMAS = ("conll2003", "ontonotes5", "ace2005", "genia")

# Label ids travel inside inline markup, so they cannot contain markup characters.
_LABEL_ID_RE = re.compile(r"[^\s<>\[\]|\\/]+")


@dataclass(frozen=True)
class Label:
    id: str
    display_name: str = ""
    definition: str = ""


@dataclass(frozen=True)
class LabelSchema:
    """Ordered label set of one dataset.

    The order is significant: it fixes the key order of category-grouped JSON,
    the order of definition lines in prompts and the symbol assignment used by
    symbolization.
    """

    name: str
    labels: tuple[Label, ...]
    version: int = 1
    _rank: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        seen = {}
        for i, label in enumerate(labels):
            if not label.id or not _LABEL_ID_RE.fullmatch(label.id):
                raise ValueError(f"invalid label id {label.id!r} in schema {self.name!r}")
            if label.id in seen:
                raise ValueError(f"duplicate label id {label.id!r} in schema {self.name!r}")
            seen[label.id] = i
        object.__setattr__(self, "_rank", seen)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(label.id for label in self.labels)

    def __contains__(self, label_id) -> bool:
        return label_id in self._rank

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def rank(self, label_id: str) -> int:
        """Position of ``label_id`` in the schema; unknown labels sort last."""
        return self._rank.get(label_id, len(self.labels))

    def get(self, label_id: str) -> Label:
        try:
            return self.labels[self._rank[label_id]]
        except KeyError:
            raise UnknownLabel(f"label {label_id!r} is not in schema {self.name!r}") from None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "version": self.version,
            "labels": [
                {"id": l.id, "display_name": l.display_name, "definition": l.definition}
                for l in self.labels
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LabelSchema":
        labels = tuple(
            Label(
                id=item["id"],
                display_name=item.get("display_name", ""),
                definition=item.get("definition", ""),
            )
            for item in data["labels"]
        )
        return cls(name=data.get("name", ""), labels=labels, version=data.get("version", 1))

    @classmethod
    def from_ids(cls, name: str, ids: Iterable[str]) -> "LabelSchema":
        return cls(name=name, labels=tuple(Label(i) for i in ids))


def load_schema(name_or_path) -> LabelSchema:
    """Load a built-in schema by name (e.g. ``"conll2003"``) or a schema JSON file."""
    if isinstance(name_or_path, LabelSchema):
        return name_or_path
    key = str(name_or_path)
    if key.lower() in BUILTIN_SCHEMAS:
        text = (
            resources.files("genner.data")
            .joinpath("schemas", f"{key.lower()}.json")
            .read_text(encoding="utf-8")
        )
    else:
        text = Path(key).read_text(encoding="utf-8")
    return LabelSchema.from_dict(json.loads(text))


@dataclass(frozen=True, order=True)
class EntitySpan:
    """One labeled mention, ``text[start:end]``."""

    start: int
    end: int
    label: str

    def __post_init__(self):
        if not (isinstance(self.start, int) and isinstance(self.end, int)):
            raise InvalidSpan(f"offsets must be integers: {self.start!r}, {self.end!r}")
        if not 0 <= self.start < self.end:
            raise InvalidSpan(f"need 0 <= start < end, got ({self.start}, {self.end})")
        if not isinstance(self.label, str) or not self.label:
            raise InvalidSpan(f"empty label on span ({self.start}, {self.end})")

    def mention(self, text: str) -> str:
        return text[self.start:self.end]

    def contains(self, other: "EntitySpan") -> bool:
        return self.start <= other.start and other.end <= self.end

    def overlaps(self, other: "EntitySpan") -> bool:
        return self.start < other.end and other.start < self.end

    def overlap_length(self, other: "EntitySpan") -> int:
        return max(0, min(self.end, other.end) - max(self.start, other.start))

    @property
    def extent(self) -> tuple[int, int]:
        return (self.start, self.end)

    def to_dict(self, text: str | None = None) -> dict:
        d = {"start": self.start, "end": self.end, "label": self.label}
        if text is not None:
            d["text"] = self.mention(text)
        return d


def span_sort_key(schema: LabelSchema | None = None):
    """Canonical order: by start, outer spans before inner ones, then schema order."""
    if schema is None:
        return lambda s: (s.start, -s.end, s.label)
    return lambda s: (s.start, -s.end, schema.rank(s.label), s.label)


@dataclass(frozen=True)
class AnnotatedSentence:
    """Source text plus its (possibly nested) entity spans.

    Spans are validated against ``text`` and stored in canonical order.
    Duplicate ``(start, end, label)`` triples are collapsed with a logged
    warning.
    """

    id: str
    text: str
    entities: tuple[EntitySpan, ...] = ()

    def __post_init__(self):
        n = len(self.text)
        unique = []
        seen = set()
        for span in self.entities:
            if span.end > n:
                raise InvalidSpan(
                    f"sentence {self.id!r}: span ({span.start}, {span.end}) exceeds text length {n}"
                )
            if span in seen:
                logger.warning(
                    "sentence %r: collapsing duplicate span (%d, %d, %s)",
                    self.id, span.start, span.end, span.label,
                )
                continue
            seen.add(span)
            unique.append(span)
        object.__setattr__(self, "entities", tuple(sorted(unique, key=span_sort_key())))

    def mentions(self) -> list[tuple[str, str]]:
        return [(s.mention(self.text), s.label) for s in self.entities]

    def with_entities(self, entities: Iterable[EntitySpan]) -> "AnnotatedSentence":
        return AnnotatedSentence(self.id, self.text, tuple(entities))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "entities": [s.to_dict() for s in self.entities],
        }


@dataclass(frozen=True)
class ParseWarning:
    """One recovery action or rejected fragment reported by a decoder.

    ``mention`` and ``label`` are filled in when the warning concerns a
    specific entity record, so that downstream error analysis can report it.
    """

    code: str
    message: str
    fragment: str = ""
    mention: str | None = None
    label: str | None = None

    def to_dict(self) -> dict:
        d = {"code": self.code, "message": self.message, "fragment": self.fragment}
        if self.mention is not None:
            d["mention"] = self.mention
        if self.label is not None:
            d["label"] = self.label
        return d


@dataclass(frozen=True)
class ParsedOutput:
    """Spans recovered from one model output.

    ``entities`` is a multiset: a decoder reports a repeated span as many
    times as the output lists it.
    """

    entities: tuple[EntitySpan, ...] = ()
    warnings: tuple[ParseWarning, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @property
    def exact(self) -> bool:
        return not self.warnings

    def to_dict(self, text: str | None = None) -> dict:
        return {
            "entities": [s.to_dict(text) for s in self.entities],
            "warnings": [w.to_dict() for w in self.warnings],
            "exact": self.exact,
        }


EMPTY_OUTPUT = ParsedOutput()


@dataclass(frozen=True)
class SpanNode:
    span: EntitySpan
    children: tuple["SpanNode", ...] = ()


def _laminar_walk(spans: Sequence[EntitySpan], key):
    """Yield ``(span, ordered, parent_index, index)`` in pre-order; raise NotLaminar on crossing spans."""
    ordered = sorted(spans, key=key)
    stack: list[int] = []
    for i, span in enumerate(ordered):
        while stack and ordered[stack[-1]].end <= span.start:
            stack.pop()
        if stack:
            parent = ordered[stack[-1]]
            if span.end > parent.end:
                raise NotLaminar(
                    f"spans ({parent.start}, {parent.end}, {parent.label}) and "
                    f"({span.start}, {span.end}, {span.label}) partially overlap"
                )
        yield span, ordered, (stack[-1] if stack else None), i
        stack.append(i)


def laminar_check(entities: Iterable[EntitySpan]) -> bool:
    """True iff every pair of spans is disjoint or nested (equal extents count as nested)."""
    try:
        for _ in _laminar_walk(list(entities), span_sort_key()):
            pass
    except NotLaminar:
        return False
    return True


def nesting_forest(entities: Iterable[EntitySpan], schema: LabelSchema | None = None) -> tuple[SpanNode, ...]:
    """Arrange a laminar span family as a forest.

    Parents contain their children; siblings are ordered by start. Spans with
    identical extents nest inside each other, the label that comes first in
    ``schema`` (or alphabetically without one) being outermost.
    """
    children: dict[int | None, list[int]] = {None: []}
    ordered = None
    for span, ordered, parent, i in _laminar_walk(list(entities), span_sort_key(schema)):
        children.setdefault(parent, []).append(i)
        children[i] = []

    def build(i):
        return SpanNode(ordered[i], tuple(build(c) for c in children[i]))

    return tuple(build(i) for i in children[None])


def flatten_forest(forest: Iterable[SpanNode]) -> list[EntitySpan]:
    """Pre-order traversal of a forest built by :func:`nesting_forest`."""
    out = []
    stack = list(reversed(tuple(forest)))
    while stack:
        node = stack.pop()
        out.append(node.span)
        stack.extend(reversed(node.children))
    return out


def forest_depth(forest: Iterable[SpanNode]) -> int:
    return max((1 + forest_depth(n.children) for n in forest), default=0)
