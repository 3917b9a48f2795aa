"""Building instruction prompts, and hiding label names behind symbols.

The first half prints the instruction a model would receive for one format and label
set. The second half swaps every label for an opaque letter, which is a way to test
whether a model relies on the label names themselves.
"""

from genner import AnnotatedSentence, EntitySpan, build_instruction, desymbolize, decode, load_schema, symbolize_dataset

schema = load_schema("conll2003")
print(build_instruction("inline-xml", schema))
print("\n" + "=" * 72 + "\n")

sentence = AnnotatedSentence(
    "havel",
    "Havel praises Czech native Albright as friend.",
    (EntitySpan(0, 5, "PER"), EntitySpan(14, 19, "MISC"), EntitySpan(27, 35, "PER")),
)
for mode in ("se", "so"):
    data = symbolize_dataset([sentence], schema, mode)
    print(f"[{mode}] mapping: {data.mapping.to_symbol}")
    print(f"[{mode}] instruction:\n{data.instruction}")
    print(f"[{mode}] target output: {data.outputs[0]}\n")

# A model answering in symbols is decoded against the symbol schema, then mapped back.
data = symbolize_dataset([sentence], schema, "so")
answer = "<B>Havel</B> praises <D>Czech</D> native <C>Albright</C> as friend."
parsed = desymbolize(decode("inline-xml", data.schema, sentence.text, answer), data.mapping)
print("decoded with original labels:", [(s.mention(sentence.text), s.label) for s in parsed.entities])
