"""Instruction prompts and symbol-label dataset variants.

A prompt has three parts, in this order: the task description for the
output format, the label definition block, and the input preamble. Prompt
text lives in ``data/prompt_template.json``; label definitions live in the
schema files.
"""

from __future__ import annotations

import enum
import json
import string
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .codecs import OutputFormat, encode
from .exceptions import AlphabetTooSmall, UnknownLabel
from .model import AnnotatedSentence, EntitySpan, Label, LabelSchema, ParsedOutput, ParseWarning

UNKNOWN_SYMBOL = "UnknownSymbol"


@dataclass(frozen=True)
class PromptTemplate:
    task_descriptions: dict
    label_block_header: str
    input_preamble: str
    symbol_instruction: str

    def task_description(self, fmt) -> str:
        return self.task_descriptions[OutputFormat.parse(fmt)]


def load_template(path=None) -> PromptTemplate:
    if path is None:
        text = resources.files("genner.data").joinpath("prompt_template.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    data = json.loads(text)
    return PromptTemplate(
        task_descriptions={OutputFormat.parse(k): v for k, v in data["task_descriptions"].items()},
        label_block_header=data["label_block_header"],
        input_preamble=data["input_preamble"],
        symbol_instruction=data["symbol_instruction"],
    )


def definition_line(label: Label) -> str:
    head = f"{label.id}({label.display_name})" if label.display_name else label.id
    return f"{head}: {label.definition}" if label.definition else head


def build_instruction(fmt, schema: LabelSchema, template: PromptTemplate | None = None) -> str:
    """Assemble the instruction for ``fmt``; the input sentence goes after it."""
    if not len(schema):
        raise ValueError("schema has no labels")
    template = template or load_template()
    label_block = "\n".join([template.label_block_header] + [definition_line(l) for l in schema])
    return "\n\n".join([template.task_description(fmt), label_block, template.input_preamble])


def build_example(fmt, schema: LabelSchema, sent: AnnotatedSentence, template: PromptTemplate | None = None) -> dict:
    """Instruction-tuning record (instruction, input, output) for one sentence."""
    return {
        "instruction": build_instruction(fmt, schema, template),
        "input": sent.text,
        "output": encode(fmt, schema, sent),
    }


class SymbolMode(str, enum.Enum):
    SE = "se"  # symbols with label explanations
    SO = "so"  # symbols only

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SymbolMapping:
    """Bijection between label ids and opaque symbols."""

    pairs: tuple[tuple[str, str], ...]
    mode: SymbolMode

    def __post_init__(self):
        labels = [l for l, _ in self.pairs]
        symbols = [s for _, s in self.pairs]
        if len(set(labels)) != len(labels) or len(set(symbols)) != len(symbols):
            raise ValueError("symbol mapping is not a bijection")

    @classmethod
    def build(cls, schema: LabelSchema, mode="se", alphabet: str | Sequence[str] = string.ascii_uppercase) -> "SymbolMapping":
        symbols = list(alphabet)
        if len(symbols) < len(schema):
            raise AlphabetTooSmall(f"{len(symbols)} symbols for {len(schema)} labels")
        return cls(tuple(zip(schema.ids, symbols)), SymbolMode(str(mode).lower()))

    @property
    def to_symbol(self) -> dict[str, str]:
        return dict(self.pairs)

    @property
    def to_label(self) -> dict[str, str]:
        return {s: l for l, s in self.pairs}

    def symbol_schema(self, schema: LabelSchema) -> LabelSchema:
        keep = self.mode is SymbolMode.SE
        return LabelSchema(
            name=f"{schema.name}-{self.mode.value}",
            labels=tuple(
                Label(sym, "", schema.get(label).definition if keep else "") for label, sym in self.pairs
            ),
            version=schema.version,
        )


def _enumerate(items: Sequence[str]) -> str:
    if len(items) <= 2:
        return " and ".join(items)
    return ", ".join(items[:-1]) + ", and " + items[-1]


def symbol_instruction(schema: LabelSchema, mapping: SymbolMapping, template: PromptTemplate | None = None) -> str:
    template = template or load_template()
    symbols = [s for _, s in mapping.pairs]
    first = template.symbol_instruction.format(labels=_enumerate(symbols))
    if mapping.mode is SymbolMode.SO:
        return first
    lines = [first] + [f"{sym}: {schema.get(label).definition}" for label, sym in mapping.pairs]
    return "\n".join(lines)


def symbolize_sentence(sent: AnnotatedSentence, mapping: SymbolMapping) -> AnnotatedSentence:
    table = mapping.to_symbol
    try:
        return sent.with_entities(EntitySpan(s.start, s.end, table[s.label]) for s in sent.entities)
    except KeyError as e:
        raise UnknownLabel(f"sentence {sent.id!r}: label {e.args[0]!r} has no symbol") from None


def desymbolize_sentence(sent: AnnotatedSentence, mapping: SymbolMapping) -> AnnotatedSentence:
    table = mapping.to_label
    try:
        return sent.with_entities(EntitySpan(s.start, s.end, table[s.label]) for s in sent.entities)
    except KeyError as e:
        raise UnknownLabel(f"sentence {sent.id!r}: symbol {e.args[0]!r} is not mapped") from None


@dataclass(frozen=True)
class SymbolizedDataset:
    mapping: SymbolMapping
    schema: LabelSchema
    sentences: tuple[AnnotatedSentence, ...]
    outputs: tuple[str, ...]
    instruction: str


def symbolize_dataset(
    sentences: Iterable[AnnotatedSentence],
    schema: LabelSchema,
    mode="se",
    alphabet: str | Sequence[str] = string.ascii_uppercase,
) -> SymbolizedDataset:
    """Replace label names by symbols; targets are rendered as inline XML.

    Only label strings change. Spans are untouched, so SE and SO variants of
    a corpus share the same entities and differ in the instruction alone.
    """
    mapping = SymbolMapping.build(schema, mode, alphabet)
    sym_schema = mapping.symbol_schema(schema)
    converted = tuple(symbolize_sentence(s, mapping) for s in sentences)
    outputs = tuple(encode(OutputFormat.INLINE_XML, sym_schema, s) for s in converted)
    return SymbolizedDataset(mapping, sym_schema, converted, outputs, symbol_instruction(schema, mapping))


def desymbolize(parsed: ParsedOutput, mapping: SymbolMapping) -> ParsedOutput:
    """Map symbol labels in a decoded output back to the original labels."""
    table = mapping.to_label
    spans = []
    warnings = [
        replace(w, label=table[w.label]) if w.label in table else w for w in parsed.warnings
    ]
    for span in parsed.entities:
        label = table.get(span.label)
        if label is None:
            warnings.append(
                ParseWarning(UNKNOWN_SYMBOL, f"symbol {span.label!r} is not mapped", span.label, label=span.label)
            )
            continue
        spans.append(EntitySpan(span.start, span.end, label))
    return ParsedOutput(tuple(spans), tuple(warnings))
