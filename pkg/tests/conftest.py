import json
import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).parent
FIXTURES = TESTS / "fixtures"
sys.path.insert(0, str(TESTS))

from genner import AnnotatedSentence, EntitySpan, load_schema  # noqa: E402

GENIA_TEXT = "This is the first demonstration of a specific interaction with PU.1 on a myeloid PU.1 binding site."
GENIA_SPANS = (
    EntitySpan(63, 67, "Protein"),
    EntitySpan(73, 98, "DNA"),
    EntitySpan(81, 85, "Protein"),
)
FORMATS = ("inline-bracketed", "inline-xml", "category-json", "occurrence-json", "offset-json")


@pytest.fixture
def genia_schema():
    return load_schema("genia")


@pytest.fixture
def conll_schema():
    return load_schema("conll2003")


@pytest.fixture
def genia_sentence():
    return AnnotatedSentence("genia-1", GENIA_TEXT, GENIA_SPANS)


def read_fixture(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def golden_output(fmt: str) -> str:
    return read_fixture(f"genia_formats/{fmt}.txt")


def error_fixture() -> dict:
    return json.loads(read_fixture("error_types.json"))
