import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import error_fixture
from genner import AnnotatedSentence, EntitySpan, ErrorType, ParsedOutput, load_schema
from genner.codecs import decode, encode
from genner.model import ParseWarning
from genner.scoring import score_corpus
from genner.taxonomy import ErrorAnalysis, classify_corpus, classify_prediction, classify_sentence
from generators import SCHEMA, garbage, mutate, random_sentence

FIX = error_fixture()
TEXT = FIX["text"]
GOLD = tuple(EntitySpan(*g) for g in FIX["gold"])
SENT = AnnotatedSentence("inter", TEXT, GOLD)


def span(mention, label, nth=0):
    start = TEXT.index(mention)
    for _ in range(nth):
        start = TEXT.index(mention, start + 1)
    return EntitySpan(start, start + len(mention), label)


@pytest.fixture
def schema():
    return load_schema("conll2003")


class TestClassifyPrediction:
    def test_examples(self, schema):
        assert classify_prediction(span("Inter", "LOC"), GOLD, schema) is ErrorType.WRONG_TYPES
        assert classify_prediction(span("defender Joceyln Angloma", "PER"), GOLD, schema) is ErrorType.CONTAIN_GOLD
        assert classify_prediction(span("Angloma", "PER"), GOLD, schema) is ErrorType.CONTAINED_BY_GOLD
        assert classify_prediction(span("suspended", "MISC"), GOLD, schema) is ErrorType.COMPLETELY_O
        assert classify_prediction(span("Joceyln Angloma", "PLAYER"), GOLD, schema) is ErrorType.OOD_TYPES
        assert classify_prediction(span("defender Joceyln", "PER"), GOLD, schema) is ErrorType.OVERLAP_WITH_GOLD
        assert classify_prediction(span("Inter", "ORG"), GOLD, schema) is None

    def test_extent_check_beats_boundary_checks(self, schema):
        # Same extents as a gold span with a different label: a type error even if other golds overlap.
        gold = [EntitySpan(0, 10, "ORG"), EntitySpan(0, 4, "PER")]
        assert classify_prediction(EntitySpan(0, 4, "LOC"), gold, schema) is ErrorType.WRONG_TYPES

    def test_maximal_overlap_then_earliest_start(self, schema):
        gold = [EntitySpan(0, 4, "PER"), EntitySpan(6, 8, "PER")]
        # Overlaps the first by 2 and contains the second.
        assert classify_prediction(EntitySpan(2, 8, "PER"), gold, schema) is ErrorType.OVERLAP_WITH_GOLD
        gold = [EntitySpan(0, 4, "PER"), EntitySpan(5, 9, "PER")]
        assert classify_prediction(EntitySpan(2, 7, "PER"), gold, schema) is ErrorType.OVERLAP_WITH_GOLD

    @settings(max_examples=200, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_invariant_to_gold_order(self, rnd):
        sent = random_sentence(rnd, laminar=False)
        pred = random_sentence(rnd).entities
        gold = list(sent.entities)
        for p in pred:
            a = classify_prediction(p, gold, SCHEMA)
            rnd.shuffle(gold)
            assert classify_prediction(p, gold, SCHEMA) is a


class TestErrorRows:
    @pytest.mark.parametrize("row", FIX["rows"], ids=[r["type"] for r in FIX["rows"]])
    def test_highlighted_span_gets_row_type(self, row, schema):
        parsed = decode("inline-xml", schema, TEXT, row["output"], closed=False)
        records = classify_sentence(SENT, parsed, schema)
        assert row["type"] in [r.error_type.value for r in records]

    def test_as_printed_extra_records(self, schema):
        # Rows that also drop a gold entity pick up an omitted record for it.
        for row in FIX["rows"]:
            parsed = decode("inline-xml", schema, TEXT, row["output"], closed=False)
            types = sorted(r.error_type.value for r in classify_sentence(SENT, parsed, schema))
            if row["type"] == "OverlapWithGold":
                assert types == ["OmittedMentions", "OverlapWithGold"]
            else:
                assert types == [row["type"]]

    def isolated(self):
        """Each perturbation applied alone to an otherwise perfect prediction."""
        g_inter, g_french, g_player = GOLD
        hallucination = ParseWarning("MentionNotFound", "not in source", "Milan", "Milan", "ORG")
        return {
            "OodTypes": [g_inter, g_french, span("Joceyln Angloma", "PLAYER")],
            "WrongTypes": [span("Inter", "LOC"), g_french, g_player],
            "ContainGold": [g_inter, g_french, span("defender Joceyln Angloma", "PER")],
            "ContainedByGold": [g_inter, g_french, span("Angloma", "PER")],
            "OverlapWithGold": [g_inter, g_french, span("defender Joceyln", "PER")],
            "CompletelyO": [g_inter, span("suspended", "MISC"), g_french, g_player],
            "OodMentions": ([g_inter, g_french, g_player], hallucination),
            "OmittedMentions": [g_inter, g_player],
        }

    def test_isolated_perturbations(self, schema):
        for name, pred in self.isolated().items():
            warnings = ()
            if isinstance(pred, tuple):
                pred, w = pred
                warnings = (w,)
            records = classify_sentence(SENT, ParsedOutput(tuple(pred), warnings), schema)
            assert [r.error_type.value for r in records] == [name]

    def test_full_set_one_of_each(self, schema):
        pairs = []
        for i, (name, pred) in enumerate(self.isolated().items()):
            warnings = ()
            if isinstance(pred, tuple):
                pred, w = pred
                warnings = (w,)
            pairs.append((AnnotatedSentence(str(i), TEXT, GOLD), ParsedOutput(tuple(pred), warnings)))
        analysis = classify_corpus(pairs, schema)
        assert all(c == 1 for c in analysis.counts.values())
        assert analysis.total == 8

    def test_record_shapes(self, schema):
        parsed = decode("inline-xml", schema, TEXT, FIX["rows"][-1]["output"])
        [rec] = classify_sentence(SENT, parsed, schema)
        assert rec.pred is None and rec.gold == GOLD[1]
        d = rec.to_dict()
        assert d["type"] == "OmittedMentions" and d["mention"] == "French"
        parsed = decode("inline-xml", schema, TEXT, FIX["rows"][1]["output"])
        [rec] = classify_sentence(SENT, parsed, schema)
        assert rec.pred == span("Inter", "LOC") and rec.gold == GOLD[0]


class TestDistribution:
    def test_perfect_predictions(self, schema):
        analysis = classify_corpus([(SENT, ParsedOutput(GOLD, ()))], schema)
        assert analysis.records == []
        assert set(analysis.distribution.values()) == {0.0}

    def test_planted_distribution(self):
        text = "w " * 50
        pairs = []
        for i in range(10):  # wrong type
            pairs.append((AnnotatedSentence(f"w{i}", text, (EntitySpan(0, 1, "PER"),)), ParsedOutput((EntitySpan(0, 1, "ORG"),), ())))
        for i in range(5):  # no overlap
            pairs.append((AnnotatedSentence(f"c{i}", text, ()), ParsedOutput((EntitySpan(2, 3, "ORG"),), ())))
        for i in range(5):  # missed
            pairs.append((AnnotatedSentence(f"o{i}", text, (EntitySpan(4, 5, "LOC"),)), ParsedOutput((), ())))
        for i in range(7):  # correct ones add nothing
            pairs.append((AnnotatedSentence(f"k{i}", text, (EntitySpan(6, 7, "LOC"),)), ParsedOutput((EntitySpan(6, 7, "LOC"),), ())))
        dist = classify_corpus(pairs, SCHEMA).distribution
        assert dist[ErrorType.WRONG_TYPES] == 0.5
        assert dist[ErrorType.COMPLETELY_O] == 0.25
        assert dist[ErrorType.OMITTED_MENTIONS] == 0.25
        assert sum(dist.values()) == 1.0

    def test_partition_and_sum_on_fuzzed_corpus(self):
        rng = random.Random(11)
        pairs = []
        for i in range(300):
            sent = random_sentence(rng, sid=str(i))
            fmt = rng.choice(["inline-xml", "inline-bracketed", "occurrence-json", "offset-json", "category-json"])
            out = mutate(rng, encode(fmt, SCHEMA, sent)) if rng.random() < 0.8 else garbage(rng)
            pairs.append((sent, decode(fmt, SCHEMA, sent.text, out)))
        analysis = classify_corpus(pairs, SCHEMA)
        assert abs(sum(analysis.distribution.values()) - 1) < 1e-9
        assert analysis.counts[ErrorType.OOD_TYPES] == 0
        counts = score_corpus(pairs).counts
        # Every unmatched prediction yields exactly one record with a span.
        assert len([r for r in analysis.records if r.pred is not None]) == counts.fp
        omitted = [r for r in analysis.records if r.error_type is ErrorType.OMITTED_MENTIONS]
        assert all(r.pred is None and r.gold is not None for r in omitted)
        assert len(omitted) <= counts.fn

    def test_outputs(self):
        analysis = ErrorAnalysis([])
        assert json.loads(json.dumps(analysis.to_dict()))["total"] == 0
        assert "OmittedMentions" in analysis.format_table()
        assert analysis.to_jsonl() == ""
