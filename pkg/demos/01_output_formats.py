"""Five ways to write down the same nested annotation.

A biomedical sentence mentions the protein PU.1 twice, and the second mention sits
inside a DNA region. We serialize that annotation in every supported output format,
then parse each string back to confirm nothing was lost.
"""

from genner import AnnotatedSentence, EntitySpan, OutputFormat, decode, encode, is_lossless, load_schema

schema = load_schema("genia")
text = "This is the first demonstration of a specific interaction with PU.1 on a myeloid PU.1 binding site."
sentence = AnnotatedSentence(
    "demo",
    text,
    (EntitySpan(63, 67, "Protein"), EntitySpan(73, 98, "DNA"), EntitySpan(81, 85, "Protein")),
)

for fmt in OutputFormat:
    output = encode(fmt, schema, sentence)
    parsed = decode(fmt, schema, text, output)
    print(f"== {fmt.value}")
    print(output)
    print(f"   parsed back exactly: {parsed.entities == sentence.entities and parsed.exact}\n")

# Formats that name mentions by their string alone can be ambiguous. Here "PU.1" is
# labelled only the second time it appears, which category-json has no way to express.
second_only = sentence.with_entities([EntitySpan(81, 85, "Protein")])
print("second PU.1 only, category-json lossless?", is_lossless("category-json", schema, second_only))
print("second PU.1 only, occurrence-json lossless?", is_lossless("occurrence-json", schema, second_only))
print(encode("occurrence-json", schema, second_only))
