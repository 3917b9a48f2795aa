"""Eight-way classification of prediction errors.

Every unmatched prediction gets exactly one type, decided by a fixed
priority:

1. a gold span with the same extents exists: ``OodTypes`` when the predicted
   label is outside the schema, ``WrongTypes`` when it differs from every gold
   label on those extents;
2. otherwise, against the overlapping gold span with the largest character
   overlap (earliest start on ties): ``ContainGold``, ``ContainedByGold`` or
   ``OverlapWithGold``;
3. no overlap at all: ``CompletelyO``.

Hallucinated mentions never become spans; they are read off the decoder's
``MentionNotFound`` warnings as ``OodMentions``. Gold spans that no error
record refers to and no prediction matched are ``OmittedMentions``.
"""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .codecs.base import MENTION_NOT_FOUND
from .model import AnnotatedSentence, EntitySpan, LabelSchema, ParsedOutput
from .scoring import match_spans


class ErrorType(str, enum.Enum):
    OOD_TYPES = "OodTypes"
    WRONG_TYPES = "WrongTypes"
    CONTAIN_GOLD = "ContainGold"
    CONTAINED_BY_GOLD = "ContainedByGold"
    OVERLAP_WITH_GOLD = "OverlapWithGold"
    COMPLETELY_O = "CompletelyO"
    OOD_MENTIONS = "OodMentions"
    OMITTED_MENTIONS = "OmittedMentions"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ErrorRecord:
    """One classified error.

    ``pred`` is None for omitted gold spans and for hallucinated mentions,
    which have no position in the text; ``mention`` and ``label`` always
    describe the offending prediction (or the missed gold span).
    """

    sentence_id: str
    error_type: ErrorType
    pred: EntitySpan | None
    gold: EntitySpan | None
    mention: str
    label: str

    def to_dict(self) -> dict:
        return {
            "id": self.sentence_id,
            "type": self.error_type.value,
            "mention": self.mention,
            "label": self.label,
            "pred": None if self.pred is None else self.pred.to_dict(),
            "gold": None if self.gold is None else self.gold.to_dict(),
        }


def _classify(pred: EntitySpan, gold: Sequence[EntitySpan], schema: LabelSchema):
    same_extent = [g for g in gold if g.extent == pred.extent]
    if same_extent:
        if any(g.label == pred.label for g in same_extent):
            return None, next(g for g in same_extent if g.label == pred.label)
        related = min(same_extent, key=lambda g: (g.start, g.label))
        if pred.label not in schema:
            return ErrorType.OOD_TYPES, related
        return ErrorType.WRONG_TYPES, related
    overlapping = [g for g in gold if g.overlaps(pred)]
    if not overlapping:
        return ErrorType.COMPLETELY_O, None
    best = min(overlapping, key=lambda g: (-g.overlap_length(pred), g.start, g.end, g.label))
    if pred.contains(best):
        return ErrorType.CONTAIN_GOLD, best
    if best.contains(pred):
        return ErrorType.CONTAINED_BY_GOLD, best
    return ErrorType.OVERLAP_WITH_GOLD, best


def classify_prediction(pred: EntitySpan, gold: Iterable[EntitySpan], schema: LabelSchema) -> ErrorType | None:
    """Error type of ``pred`` against the gold spans, or None when it is correct."""
    return _classify(pred, list(gold), schema)[0]


@dataclass
class ErrorAnalysis:
    records: list[ErrorRecord]

    @property
    def counts(self) -> dict[ErrorType, int]:
        tally = Counter(r.error_type for r in self.records)
        return {t: tally.get(t, 0) for t in ErrorType}

    @property
    def total(self) -> int:
        return len(self.records)

    @property
    def distribution(self) -> dict[ErrorType, float]:
        """Share of each error type; all zeros when there are no errors."""
        total = self.total
        return {t: (c / total if total else 0.0) for t, c in self.counts.items()}

    def to_dict(self) -> dict:
        counts = self.counts
        dist = self.distribution
        return {
            "total": self.total,
            "counts": {t.value: counts[t] for t in ErrorType},
            "distribution": {t.value: dist[t] for t in ErrorType},
        }

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.to_dict(), ensure_ascii=False) + "\n" for r in self.records)

    def format_table(self) -> str:
        counts = self.counts
        dist = self.distribution
        width = max(len(t.value) for t in ErrorType)
        lines = [f"{'error type'.ljust(width)}  {'count':>7}  {'share':>7}"]
        lines.append("-" * len(lines[0]))
        for t in ErrorType:
            lines.append(f"{t.value.ljust(width)}  {counts[t]:>7d}  {dist[t] * 100:>6.2f}%")
        lines.append("-" * len(lines[0]))
        lines.append(f"{'total'.ljust(width)}  {self.total:>7d}")
        return "\n".join(lines)


def classify_sentence(sent: AnnotatedSentence, parsed: ParsedOutput, schema: LabelSchema) -> list[ErrorRecord]:
    gold = list(sent.entities)
    m = match_spans(gold, parsed.entities)
    records = []
    attributed: set[EntitySpan] = set()
    for pred in m.unmatched_pred:
        error_type, related = _classify(pred, gold, schema)
        if error_type is None:
            # A repeated copy of a matched prediction: it overlaps a gold span
            # without strictly containing or being contained by it.
            error_type = ErrorType.OVERLAP_WITH_GOLD
        if related is not None:
            attributed.add(related)
        records.append(ErrorRecord(sent.id, error_type, pred, related, pred.mention(sent.text), pred.label))
    for w in parsed.warnings:
        if w.code == MENTION_NOT_FOUND:
            records.append(ErrorRecord(sent.id, ErrorType.OOD_MENTIONS, None, None, w.mention or w.fragment, w.label or ""))
    for g in m.unmatched_gold:
        if g not in attributed:
            records.append(ErrorRecord(sent.id, ErrorType.OMITTED_MENTIONS, None, g, g.mention(sent.text), g.label))
    return records


def classify_corpus(pairs: Iterable[tuple[AnnotatedSentence, ParsedOutput]], schema: LabelSchema) -> ErrorAnalysis:
    records = []
    for sent, parsed in pairs:
        records.extend(classify_sentence(sent, parsed, schema))
    return ErrorAnalysis(records)
