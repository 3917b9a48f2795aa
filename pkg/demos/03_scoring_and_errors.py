"""Scoring predictions and sorting the mistakes into error types.

We build a tiny gold corpus, pretend a model produced inline-XML output for it, and
report micro precision, recall and F1 alongside a breakdown of every error.
"""

from genner import AnnotatedSentence, EntitySpan, classify_corpus, decode, load_schema, score_corpus

schema = load_schema("conll2003")
gold = [
    AnnotatedSentence(
        "1",
        "Inter will be without suspended French defender Joceyln Angloma.",
        (EntitySpan(0, 5, "ORG"), EntitySpan(32, 38, "MISC"), EntitySpan(48, 63, "PER")),
    ),
    AnnotatedSentence(
        "2",
        "Havel praises Czech native Albright as friend.",
        (EntitySpan(0, 5, "PER"), EntitySpan(14, 19, "MISC"), EntitySpan(27, 35, "PER")),
    ),
]
model_outputs = {
    "1": "<LOC>Inter</LOC> will be without suspended French <PER>defender Joceyln</PER> Angloma.",
    "2": "<PER>Havel</PER> praises <MISC>Czech</MISC> native <PER>Albright</PER> as <MISC>friend</MISC>.",
}

pairs = [(s, decode("inline-xml", schema, s.text, model_outputs[s.id])) for s in gold]

report = score_corpus(pairs)
print(report.format_table(schema.ids))
print()

analysis = classify_corpus(pairs, schema)
print(analysis.format_table())
print()
for record in analysis.records:
    print(record.to_dict())
