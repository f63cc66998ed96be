from __future__ import annotations

import datetime as dt

import pytest
from hypothesis import given, settings

from aicards.card import (
    ModelUsage,
    UsageEntry,
    add_model,
    new_card,
    set_entry,
)
from aicards.codecs import (
    FORMATS,
    LOSSLESS_FORMATS,
    build_bundle,
    canonicalize,
    decode_csv,
    decode_json,
    decode_xml,
    encode_csv,
    encode_json,
    encode_xml,
)
from aicards.errors import CardDecodeError, CardSchemaError
from aicards.taxonomy import Classification

from . import strategies

METACHAR_TEXTS = [
    'quote " quote',
    "comma, comma",
    "angle <tag> angle",
    "amp & amp",
    "percent % percent",
    "brace { brace }",
    "multi\nline\ndetail",
    "semi; colon",
    "back\\slash",
]


def _with_detail(card, text):
    entry = UsageEntry("writing.generating", used=True,
                       classifications=frozenset({Classification.NEW}),
                       model_refs=frozenset({0}), detail=text)
    return set_entry(card, entry)


@pytest.fixture
def small_card():
    card = new_card("1.0")
    card, _ = add_model(card, ModelUsage("ChatGPT", (dt.date(2023, 1, 21),)))
    return card


# -- JSON ------------------------------------------------------------------------

def test_json_contains_golden_detail(golden_card):
    text = encode_json(golden_card)
    assert "Gathering more ideas for the name of AI Usage Cards." in text


def test_json_empty_card_round_trip():
    card = new_card("1.0")
    assert decode_json(encode_json(card)) == card


def test_json_golden_round_trip(golden_card):
    assert decode_json(encode_json(golden_card)) == canonicalize(golden_card)


def test_json_is_byte_deterministic(golden_card):
    assert encode_json(golden_card) == encode_json(golden_card)


def test_json_top_level_key_order(golden_card):
    import json
    doc = json.loads(encode_json(golden_card))
    assert list(doc) == ["version", "project", "models", "categories",
                         "ethics", "approval", "license"]


def test_json_syntax_error_reports_position():
    with pytest.raises(CardDecodeError) as exc:
        decode_json('{"version": }')
    assert exc.value.line == 1


def test_json_unknown_version_is_schema_error():
    import json
    doc = json.loads(encode_json(new_card("1.0")))
    doc["version"] = "9.9"
    with pytest.raises(CardSchemaError):
        decode_json(json.dumps(doc))


def test_json_unknown_field_is_schema_error():
    import json
    doc = json.loads(encode_json(new_card("1.0")))
    doc["surprise"] = 1
    with pytest.raises(CardSchemaError) as exc:
        decode_json(json.dumps(doc))
    assert "surprise" in str(exc.value)


def test_json_used_entry_missing_detail_is_schema_error():
    import json
    doc = json.loads(encode_json(new_card("1.0")))
    doc["categories"]["writing"]["subcategories"]["writing.generating"] = {
        "used": True, "classifications": [], "models": [], "detail": ""}
    with pytest.raises(CardSchemaError) as exc:
        decode_json(json.dumps(doc))
    assert "writing.generating" in str(exc.value)


# -- XML -------------------------------------------------------------------------

def test_xml_root_version_attribute(golden_card):
    text = encode_xml(golden_card)
    assert '<aiUsageCard version="1.0">' in text


def test_xml_golden_round_trip(golden_card):
    assert decode_xml(encode_xml(golden_card)) == canonicalize(golden_card)


def test_xml_ampersand_survives(small_card):
    card = _with_detail(small_card, "Tom & Jerry <tags> 'quotes'")
    decoded = decode_xml(encode_xml(card))
    assert decoded.entries["writing.generating"].detail == "Tom & Jerry <tags> 'quotes'"


def test_xml_malformed_markup():
    with pytest.raises(CardDecodeError):
        decode_xml("<aiUsageCard version='1.0'><broken></aiUsageCard>")


def test_xml_wrong_root():
    with pytest.raises(CardDecodeError):
        decode_xml("<card/>")


# -- CSV -------------------------------------------------------------------------

def test_csv_has_26_usage_rows(golden_card):
    import csv as csv_module
    import io
    rows = list(csv_module.reader(io.StringIO(encode_csv(golden_card))))
    usage = [r for r in rows if r[0] == "usage"]
    assert len(usage) == 26


def test_csv_unused_rows_say_not_used(golden_card):
    import csv as csv_module
    import io
    rows = list(csv_module.reader(io.StringIO(encode_csv(golden_card))))
    unused = [r for r in rows if r[0] == "usage" and r[1] == "unused"]
    assert len(unused) == 23
    assert all(r[6] == "Not used" for r in unused)


def test_csv_golden_round_trip(golden_card):
    assert decode_csv(encode_csv(golden_card)) == canonicalize(golden_card)


def test_csv_header_mismatch():
    with pytest.raises(CardDecodeError) as exc:
        decode_csv("a,b,c\n1,2,3\n")
    assert "header" in str(exc.value)


def test_csv_row_shape_error_carries_row_number(golden_card):
    text = encode_csv(golden_card)
    lines = text.splitlines()
    lines.insert(3, "nonsense,row,,,,,x")
    with pytest.raises(CardDecodeError) as exc:
        decode_csv("\n".join(lines) + "\n")
    assert exc.value.row == 4


def test_csv_unknown_subcategory_id(golden_card):
    text = encode_csv(golden_card).replace(
        "usage,unused,coding,coding.comparing", "usage,unused,coding,coding.zzz")
    with pytest.raises((CardSchemaError, CardDecodeError)) as exc:
        decode_csv(text)
    assert "coding." in str(exc.value)


# -- cross-format properties -------------------------------------------------------

@settings(max_examples=120, deadline=None)
@given(strategies.cards())
def test_lossless_triangle(card):
    canonical = canonicalize(card)
    texts = {}
    for first in LOSSLESS_FORMATS:
        decoded = FORMATS[first].decode(FORMATS[first].encode(card))
        assert decoded == canonical, first
        for second in LOSSLESS_FORMATS:
            again = FORMATS[second].decode(FORMATS[second].encode(decoded))
            assert again == canonical, (first, second)
        texts[first] = FORMATS[first].encode(canonical)
    # determinism: canonical input yields identical bytes on a second pass
    for name, text in texts.items():
        assert FORMATS[name].encode(canonical) == text


@pytest.mark.parametrize("nasty", METACHAR_TEXTS)
def test_metacharacters_round_trip(small_card, nasty):
    card = _with_detail(small_card, nasty)
    for name in LOSSLESS_FORMATS:
        decoded = FORMATS[name].decode(FORMATS[name].encode(card))
        assert decoded.entries["writing.generating"].detail == nasty, name


# -- canonicalize ------------------------------------------------------------------

def test_canonicalize_idempotent(golden_card):
    once = canonicalize(golden_card)
    assert canonicalize(once) == once


def test_canonicalize_trims_text(small_card):
    card = _with_detail(small_card, "  x ")
    assert canonicalize(card).entries["writing.generating"].detail == "x"


def test_canonicalize_normalizes_blank_version():
    card = new_card("1.0")
    card, _ = add_model(card, ModelUsage("M", (dt.date(2024, 1, 1),), version="  "))
    assert canonicalize(card).models[0].version is None


def test_canonicalize_normalizes_not_used_version():
    card = new_card("1.0")
    card, _ = add_model(card, ModelUsage("M", (dt.date(2024, 1, 1),),
                                         version="Not used"))
    assert canonicalize(card).models[0].version is None


def test_model_ref_order_is_canonical_in_output(small_card):
    card, _ = add_model(small_card, ModelUsage("Second", (dt.date(2024, 2, 2),)))
    card = set_entry(card, UsageEntry(
        "writing.generating", used=True,
        classifications=frozenset({Classification.NEW}),
        model_refs=frozenset({1, 0}), detail="d"))
    assert '"models": [\n            0,\n            1\n          ]' in encode_json(card)


# -- bundle --------------------------------------------------------------------

def test_bundle_members_match_individual_encoders(golden_finalized):
    bundle = build_bundle(golden_finalized)
    assert bundle.json == encode_json(golden_finalized)
    assert bundle.xml == encode_xml(golden_finalized)
    assert bundle.csv == encode_csv(golden_finalized)
    assert bundle.get("bib") == bundle.bibtex
    assert bundle.get("tex") == bundle.latex
