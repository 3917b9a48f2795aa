"""Output formats, parsing, scoring and error analysis for generative NER."""

from .codecs import OutputFormat, decode, encode, is_lossless
from .exceptions import (
    AlphabetTooSmall,
    EncodingError,
    GennerError,
    InvalidSpan,
    MentionNotFound,
    MismatchedIds,
    NotLaminar,
    SchemaViolation,
    UnknownLabel,
)
from .model import (
    AnnotatedSentence,
    EntitySpan,
    Label,
    LabelSchema,
    ParsedOutput,
    ParseWarning,
    flatten_forest,
    laminar_check,
    load_schema,
    nesting_forest,
)
from .promptgen import SymbolMapping, build_instruction, desymbolize, symbolize_dataset
from .scoring import EvalCounts, EvalReport, score_corpus, score_sentence
from .taxonomy import ErrorAnalysis, ErrorType, classify_corpus, classify_sentence

__version__ = "0.1.0"

__all__ = [
    "AlphabetTooSmall",
    "AnnotatedSentence",
    "EncodingError",
    "EntitySpan",
    "ErrorAnalysis",
    "ErrorType",
    "EvalCounts",
    "EvalReport",
    "GennerError",
    "InvalidSpan",
    "Label",
    "LabelSchema",
    "MentionNotFound",
    "MismatchedIds",
    "NotLaminar",
    "OutputFormat",
    "ParseWarning",
    "ParsedOutput",
    "SchemaViolation",
    "SymbolMapping",
    "UnknownLabel",
    "build_instruction",
    "classify_corpus",
    "classify_sentence",
    "decode",
    "desymbolize",
    "encode",
    "flatten_forest",
    "is_lossless",
    "laminar_check",
    "load_schema",
    "nesting_forest",
    "score_corpus",
    "score_sentence",
    "symbolize_dataset",
]
