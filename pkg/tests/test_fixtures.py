"""The checked-in golden example files must stay byte-identical to what the
encoders produce, so the documented examples never drift from the code."""

from __future__ import annotations

from pathlib import Path

import pytest

from aicards.card import finalize
from aicards.codecs import FORMATS, build_bundle
from aicards.questionnaire import load_script, replay, serialize_script

from .conftest import build_golden_card, build_golden_script

EXAMPLES = Path(__file__).resolve().parent.parent / "docs" / "examples"


@pytest.mark.parametrize("name", list(FORMATS))
def test_checked_in_export_matches_encoder(name):
    bundle = build_bundle(finalize(build_golden_card()))
    fixture = EXAMPLES / f"card{FORMATS[name].extension}"
    assert fixture.read_text(encoding="utf-8") == bundle.get(name)


def test_checked_in_answers_script_matches_builder():
    fixture = (EXAMPLES / "answers.json").read_text(encoding="utf-8")
    assert fixture == serialize_script(build_golden_script())


def test_checked_in_answers_script_replays_to_the_golden_card():
    script = load_script((EXAMPLES / "answers.json").read_text(encoding="utf-8"))
    _, card = replay(script)
    assert card == build_golden_card()
