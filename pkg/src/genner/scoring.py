"""Exact-match micro precision, recall and F1 over ``(start, end, label)`` spans."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .exceptions import MismatchedIds
from .model import EMPTY_OUTPUT, AnnotatedSentence, EntitySpan, ParsedOutput


@dataclass(frozen=True)
class EvalCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other: "EvalCounts") -> "EvalCounts":
        return EvalCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    @property
    def precision(self) -> float:
        denom = self.tp + self.fp
        return self.tp / denom if denom else 0.0

    @property
    def recall(self) -> float:
        denom = self.tp + self.fn
        return self.tp / denom if denom else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
        }


@dataclass(frozen=True)
class SpanMatch:
    matched: tuple[EntitySpan, ...]
    unmatched_gold: tuple[EntitySpan, ...]
    unmatched_pred: tuple[EntitySpan, ...]


def match_spans(gold: Iterable[EntitySpan], pred: Iterable[EntitySpan]) -> SpanMatch:
    """Pair predictions with identical gold spans, one-to-one (multiset semantics)."""
    gold = list(gold)
    pred = list(pred)
    available = Counter(gold)
    matched, unmatched_pred = [], []
    for span in pred:
        if available[span] > 0:
            available[span] -= 1
            matched.append(span)
        else:
            unmatched_pred.append(span)
    used = Counter(matched)
    unmatched_gold = []
    for span in gold:
        if used[span] > 0:
            used[span] -= 1
        else:
            unmatched_gold.append(span)
    return SpanMatch(tuple(matched), tuple(unmatched_gold), tuple(unmatched_pred))


@dataclass
class EvalReport:
    counts: EvalCounts = field(default_factory=EvalCounts)
    per_label: dict[str, EvalCounts] = field(default_factory=dict)
    sentences: int = 0

    @property
    def precision(self) -> float:
        return self.counts.precision

    @property
    def recall(self) -> float:
        return self.counts.recall

    @property
    def f1(self) -> float:
        return self.counts.f1

    def add(self, label: str, tp=0, fp=0, fn=0):
        delta = EvalCounts(tp, fp, fn)
        self.counts = self.counts + delta
        self.per_label[label] = self.per_label.get(label, EvalCounts()) + delta

    def to_dict(self) -> dict:
        d = self.counts.to_dict()
        d["sentences"] = self.sentences
        d["per_label"] = {label: c.to_dict() for label, c in sorted(self.per_label.items())}
        return d

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    def format_table(self, label_order: Iterable[str] | None = None) -> str:
        labels = list(label_order) if label_order is not None else []
        labels += sorted(l for l in self.per_label if l not in labels)
        rows = [("label", "precision", "recall", "f1", "tp", "fp", "fn")]
        for label in labels:
            c = self.per_label.get(label, EvalCounts())
            rows.append((label, f"{c.precision:.4f}", f"{c.recall:.4f}", f"{c.f1:.4f}", str(c.tp), str(c.fp), str(c.fn)))
        c = self.counts
        rows.append(("micro", f"{c.precision:.4f}", f"{c.recall:.4f}", f"{c.f1:.4f}", str(c.tp), str(c.fp), str(c.fn)))
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        lines = []
        for i, row in enumerate(rows):
            cells = [row[0].ljust(widths[0])] + [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]
            lines.append("  ".join(cells))
            if i == 0 or i == len(rows) - 2:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines)


def score_sentence(gold: Iterable[EntitySpan], pred: Iterable[EntitySpan], report: EvalReport | None = None) -> EvalReport:
    report = report if report is not None else EvalReport()
    m = match_spans(gold, pred)
    for span in m.matched:
        report.add(span.label, tp=1)
    for span in m.unmatched_pred:
        report.add(span.label, fp=1)
    for span in m.unmatched_gold:
        report.add(span.label, fn=1)
    report.sentences += 1
    return report


def score_corpus(pairs: Iterable[tuple[AnnotatedSentence, ParsedOutput]]) -> EvalReport:
    """Sum tp/fp/fn over all sentences, then compute micro P/R/F1 once."""
    report = EvalReport()
    for sent, parsed in pairs:
        score_sentence(sent.entities, parsed.entities, report)
    return report


def pair_predictions(
    gold: Iterable[AnnotatedSentence], predictions: Mapping[str, ParsedOutput]
) -> list[tuple[AnnotatedSentence, ParsedOutput]]:
    """Join predictions to gold sentences by id.

    Gold sentences without a prediction are paired with an empty output, so
    all their entities count as missed.
    """
    gold = list(gold)
    known = {s.id for s in gold}
    unknown = [pid for pid in predictions if pid not in known]
    if unknown:
        shown = ", ".join(repr(u) for u in unknown[:5])
        raise MismatchedIds(f"{len(unknown)} prediction id(s) not in the gold corpus: {shown}")
    return [(s, predictions.get(s.id, EMPTY_OUTPUT)) for s in gold]


def score_mention_multisets(pairs: Iterable[tuple[Counter, Counter]]) -> EvalReport:
    """Score ``(label, mention)`` multisets, ignoring positions.

    This is the position-free alternative for category-grouped JSON, where a
    prediction counts as correct when the same string is listed under the
    same label as often as in the gold annotation.
    """
    report = EvalReport()
    for gold, pred in pairs:
        for key in set(gold) | set(pred):
            label = key[0]
            tp = min(gold[key], pred[key])
            report.add(label, tp=tp, fp=pred[key] - tp, fn=gold[key] - tp)
        report.sentences += 1
    return report
