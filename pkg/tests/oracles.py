"""Brute-force reference implementations used to check the library.

Nothing here imports library internals beyond the plain data classes, so a
bug in the library cannot leak into its own oracle.
"""

from __future__ import annotations

import itertools
from collections import Counter

from genner.model import EntitySpan


def laminar_pairwise(spans) -> bool:
    spans = list(spans)
    for a, b in itertools.combinations(spans, 2):
        disjoint = a.end <= b.start or b.end <= a.start
        a_in_b = b.start <= a.start and a.end <= b.end
        b_in_a = a.start <= b.start and b.end <= a.end
        if not (disjoint or a_in_b or b_in_a):
            return False
    return True


def all_positions(text: str, mention: str) -> list[int]:
    """Every start where ``mention`` occurs, overlapping or not."""
    return [i for i in range(len(text) - len(mention) + 1) if text[i:i + len(mention)] == mention]


def non_overlapping_positions(text: str, mention: str) -> list[int]:
    """Left-to-right scan that skips past each match."""
    out = []
    last_end = 0
    for i in all_positions(text, mention):
        if i >= last_end:
            out.append(i)
            last_end = i + len(mention)
    return out


def kth_occurrence(text: str, mention: str, k: int):
    pos = non_overlapping_positions(text, mention)
    if k > len(pos):
        return None
    return pos[k - 1], pos[k - 1] + len(mention)


def minimal_start_assignment(text: str, mention: str, m: int):
    """Lexicographically smallest set of m pairwise non-overlapping starts, or None.

    Exhaustive over all subsets of all (possibly overlapping) positions.
    """
    best = None
    for combo in itertools.combinations(all_positions(text, mention), m):
        if all(b >= a + len(mention) for a, b in zip(combo, combo[1:])):
            if best is None or combo < best:
                best = combo
    return best


def category_oracle(text: str, pairs) -> list[EntitySpan]:
    """Resolve ``(label, mention)`` pairs, taking as many as fit when some do not."""
    spans = []
    for (label, mention), m in Counter(pairs).items():
        while m > 0 and minimal_start_assignment(text, mention, m) is None:
            m -= 1
        for s in minimal_start_assignment(text, mention, m) or ():
            spans.append(EntitySpan(s, s + len(mention), label))
    return sorted(spans)


def occurrence_oracle(text: str, span: EntitySpan) -> int:
    """Index an encoder should emit: the span's own occurrence, else the nearest preceding one."""
    mention = span.mention(text)
    pos = non_overlapping_positions(text, mention)
    preceding = [i for i, p in enumerate(pos, 1) if p <= span.start]
    return preceding[-1] if preceding else 1


def forest_parents(spans, rank):
    """Parent of each span: its smallest container, with the outer one first on equal extents.

    ``spans`` must be laminar and sorted in the library's canonical order.
    Returns a list of parent indexes (None for roots).
    """
    parents = []
    for i, s in enumerate(spans):
        best = None
        for j, t in enumerate(spans):
            if i == j:
                continue
            contains = t.start <= s.start and s.end <= t.end
            if not contains:
                continue
            if t.extent == s.extent and j > i:
                continue
            if best is None or (spans[best].end - spans[best].start, -best) > (t.end - t.start, -j):
                best = j
        parents.append(best)
    return parents


def bio_oracle(tokens, tags):
    """Token-level state machine; a dangling I- opens a new entity."""
    spans = []
    open_label = None
    begin = 0
    for i, tag in enumerate(list(tags) + ["O"]):
        kind, _, label = tag.partition("-")
        continues = kind == "I" and open_label == label
        if open_label is not None and not continues:
            spans.append((begin, i - 1, open_label))
            open_label = None
        if kind in ("B", "I") and not continues:
            open_label, begin = label, i
    starts = list(itertools.accumulate([0] + [len(t) + 1 for t in tokens]))
    return [EntitySpan(starts[a], starts[b] + len(tokens[b]), lab) for a, b, lab in spans]


def max_matching(gold, pred) -> int:
    """Maximum bipartite matching on the span-equality graph, by exhaustive search."""
    gold, pred = list(gold), list(pred)
    if len(gold) < len(pred):
        gold, pred = pred, gold
    best = 0
    for perm in itertools.permutations(range(len(gold)), len(pred)):
        best = max(best, sum(pred[i] == gold[j] for i, j in enumerate(perm)))
    return best


def count_corpus(pairs):
    """Independent tp/fp/fn tally by removing matched items from lists."""
    tp = fp = fn = 0
    for gold, pred in pairs:
        remaining = list(gold)
        for p in pred:
            if p in remaining:
                remaining.remove(p)
                tp += 1
            else:
                fp += 1
        fn += len(remaining)
    return tp, fp, fn


def prf(tp, fp, fn):
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f
