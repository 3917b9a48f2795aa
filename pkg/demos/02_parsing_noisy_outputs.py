"""What the decoders do with imperfect model output.

Generated text rarely matches the requested format exactly. Every decoder returns the
spans it could recover plus a list of warnings describing each repair or rejection,
and never raises on bad output.
"""

from genner import decode, load_schema

schema = load_schema("conll2003")
text = "Havel praises Czech native Albright as friend."

cases = [
    ("inline-xml", "<PER>Havel</PER> praises <MISC>Czech</MISC> native <PER>Albright</PER> as friend."),
    # Unclosed tag, and a label outside the schema.
    ("inline-xml", "<PER>Havel praises <PLAYER>Czech</PLAYER> native Albright as friend."),
    # The model rewrote a word of the sentence; spans are realigned to the source.
    ("inline-bracketed", "[Havel | PER] praised [Czech | MISC] native [Albright | PER] as friend."),
    # Output cut off mid-answer: one bracket-balancing pass closes what was left open.
    ("category-json", '{"PER": ["Havel", "Albright"], "MISC": ["Czech'),
    # Single quotes are not JSON, and the repair pass does not guess at them.
    ("category-json", "{'PER': ['Havel']}"),
    # A mention that does not occur in the sentence at all.
    ("occurrence-json", '[{"text": "Vaclav Havel", "label": "PER", "occurrence_index": 1}]'),
    # Offsets that disagree with the quoted text.
    ("offset-json", '[{"text": "Czech", "label": "MISC", "start": 13, "end": 18}]'),
    ("offset-json", "this is not JSON at all"),
]

for fmt, output in cases:
    parsed = decode(fmt, schema, text, output)
    print(f"== {fmt}: {output}")
    for span in parsed.entities:
        print(f"   {span.label:5} {span.start:>3}-{span.end:<3} {span.mention(text)!r}")
    for warning in parsed.warnings:
        print(f"   warning {warning.code}: {warning.message}")
    print()

# Lenient mode re-resolves mismatched offsets from the quoted text instead of dropping them.
lenient = decode("offset-json", schema, text, cases[6][1], lenient=True)
print("lenient offsets:", [(s.start, s.end, s.label) for s in lenient.entities])

# Without schema closure, out-of-schema labels are kept so that error analysis can count them.
raw = decode("inline-xml", schema, text, cases[1][1], closed=False)
print("raw labels:", sorted({s.label for s in raw.entities}))
