from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from aicards.card import finalize, new_card
from aicards.cli import main
from aicards.codecs import FORMATS, build_bundle, encode_csv, encode_json
from aicards.questionnaire import serialize_script

from .conftest import (
    GOLDEN_DETAILS,
    GOLDEN_ETHICS,
    GOLDEN_PROJECT_NAME,
    build_golden_card,
    build_golden_script,
)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def golden_json(tmp_path) -> Path:
    path = tmp_path / "card.json"
    path.write_text(encode_json(build_golden_card()), encoding="utf-8", newline="")
    return path


@pytest.fixture
def script_file(tmp_path) -> Path:
    path = tmp_path / "answers.json"
    path.write_text(serialize_script(build_golden_script()), encoding="utf-8")
    return path


# -- validate ---------------------------------------------------------------------

def test_validate_golden_card_exits_zero(runner, golden_json):
    result = runner.invoke(main, ["validate", str(golden_json)])
    assert result.exit_code == 0, result.output
    assert "responsible: yes" in result.output


def test_validate_not_responsible_exits_one(runner, tmp_path, golden_json):
    doc = json.loads(golden_json.read_text())
    doc["approval"] = False
    stripped = tmp_path / "stripped.json"
    stripped.write_text(json.dumps(doc), encoding="utf-8")
    result = runner.invoke(main, ["validate", str(stripped)])
    assert result.exit_code == 1
    assert "Integrity: NOT satisfied" in result.output
    assert "approval-missing" in result.output


def test_validate_truncated_file_exits_two(runner, tmp_path, golden_json):
    truncated = tmp_path / "broken.json"
    truncated.write_text(golden_json.read_text()[:40], encoding="utf-8")
    result = runner.invoke(main, ["validate", str(truncated)])
    assert result.exit_code == 2


def test_validate_json_flag_prints_report(runner, golden_json):
    result = runner.invoke(main, ["validate", "--json", str(golden_json)])
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["responsible"] is True


# -- convert ----------------------------------------------------------------------

def test_convert_json_xml_json_reproduces_canonical_bytes(runner, tmp_path,
                                                          golden_json):
    via_xml = tmp_path / "card.xml"
    back = tmp_path / "back.json"
    assert runner.invoke(main, ["convert", str(golden_json), "--to", "xml",
                                "-o", str(via_xml)]).exit_code == 0
    assert runner.invoke(main, ["convert", str(via_xml), "--to", "json",
                                "-o", str(back)]).exit_code == 0
    assert back.read_bytes() == golden_json.read_bytes()


def test_convert_csv_to_tex_renders_not_used(runner, tmp_path):
    source = tmp_path / "card.csv"
    source.write_text(encode_csv(build_golden_card()), encoding="utf-8", newline="")
    target = tmp_path / "card.tex"
    result = runner.invoke(main, ["convert", str(source), "--to", "tex",
                                  "-o", str(target)])
    assert result.exit_code == 0, result.output
    assert target.read_text().count("Not used") == 24


def test_convert_unknown_format_is_usage_error(runner, golden_json):
    result = runner.invoke(main, ["convert", str(golden_json), "--to", "pdf"])
    assert result.exit_code == 2


def test_convert_incomplete_card_to_bib_exits_two(runner, tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text(encode_json(new_card("1.0")), encoding="utf-8")
    result = runner.invoke(main, ["convert", str(empty), "--to", "bib"])
    assert result.exit_code == 2


def test_convert_to_stdout(runner, golden_json):
    result = runner.invoke(main, ["convert", str(golden_json), "--to", "csv"])
    assert result.exit_code == 0
    assert result.output == encode_csv(build_golden_card())


# -- build ------------------------------------------------------------------------

def test_build_golden_script_writes_bundle(runner, tmp_path, script_file):
    out = tmp_path / "out"
    result = runner.invoke(main, ["build", str(script_file), "--out", str(out)])
    assert result.exit_code == 0, result.output
    expected = build_bundle(finalize(build_golden_card()))
    for name, fmt in FORMATS.items():
        assert (out / f"card{fmt.extension}").read_text(encoding="utf-8") == \
            expected.get(name), name


def test_build_format_selection(runner, tmp_path, script_file):
    out = tmp_path / "only"
    result = runner.invoke(main, ["build", str(script_file), "--out", str(out),
                                  "--format", "json"])
    assert result.exit_code == 0
    assert [p.name for p in out.iterdir()] == ["card.json"]


def test_build_script_missing_step_exits_two(runner, tmp_path):
    script = build_golden_script()
    truncated = script.answers[:-1]  # drop project-details
    path = tmp_path / "short.json"
    from aicards.questionnaire import AnswerScript
    path.write_text(serialize_script(AnswerScript("1.0", truncated)),
                    encoding="utf-8")
    result = runner.invoke(main, ["build", str(path), "--out", str(tmp_path / "o")])
    assert result.exit_code == 2
    assert "project-details" in result.output + (result.stderr or "")


def test_build_empty_file_exits_two(runner, tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("", encoding="utf-8")
    result = runner.invoke(main, ["build", str(path)])
    assert result.exit_code == 2


def test_build_json_flag(runner, tmp_path, script_file):
    result = runner.invoke(main, ["build", str(script_file),
                                  "--out", str(tmp_path / "j"), "--json"])
    assert result.exit_code == 0
    payload = result.output[result.output.index("{"):]
    assert json.loads(payload)["responsible"] is True


# -- interactive wizard --------------------------------------------------------------

WIZARD_INPUT = "\n".join([
    "ChatGPT",
    "2023-01-21",
    "",            # version unknown
    "",            # done with models
    "1,3,5",       # ideation, methodology, writing
    "1,2,3",       # assign ChatGPT to all three
    "2",           # ideation: improving existing ideas
    GOLDEN_DETAILS["ideation.improving"][1],
    "3",           # methodology: comparing related solutions
    GOLDEN_DETAILS["methodology.comparing"][1],
    "1",           # writing: generating new text
    GOLDEN_DETAILS["writing.generating"][1],
    GOLDEN_ETHICS.implications,
    GOLDEN_ETHICS.error_mitigation,
    GOLDEN_ETHICS.harm_mitigation,
    "y",           # approval
    "Redacted for anonymity",
    "Redacted for anonymity",
    "Redacted for anonymity",
    "",            # done with correspondences
    GOLDEN_PROJECT_NAME,
    "Artificial Intelligence, Reporting, Responsible AI",
    "y",           # finalize
]) + "\n"


def test_wizard_reproduces_the_golden_card(runner, tmp_path):
    out = tmp_path / "wizard"
    result = runner.invoke(main, ["new", "--out", str(out)], input=WIZARD_INPUT)
    assert result.exit_code == 0, result.output
    expected = build_bundle(finalize(build_golden_card()))
    for name, fmt in FORMATS.items():
        assert (out / f"card{fmt.extension}").read_text(encoding="utf-8") == \
            expected.get(name), name


def test_wizard_save_answers_replays_identically(runner, tmp_path):
    out = tmp_path / "wizard"
    saved = tmp_path / "answers.json"
    result = runner.invoke(main, ["new", "--out", str(out),
                                  "--save-answers", str(saved)],
                           input=WIZARD_INPUT)
    assert result.exit_code == 0, result.output
    from aicards.questionnaire import load_script, replay
    _, card = replay(load_script(saved.read_text(encoding="utf-8")))
    assert card == build_golden_card()


def test_wizard_abort_mid_flow_writes_nothing(runner, tmp_path):
    out = tmp_path / "aborted"
    partial = "\n".join([
        "ChatGPT", "2023-01-21", "", "", "1,3,5", "1,2,3",
        "2", GOLDEN_DETAILS["ideation.improving"][1],
        "3", GOLDEN_DETAILS["methodology.comparing"][1],
        "1", GOLDEN_DETAILS["writing.generating"][1],
    ]) + "\n"  # stream ends at the ethics questions
    result = runner.invoke(main, ["new", "--out", str(out)], input=partial)
    assert result.exit_code == 1
    assert not out.exists() or not list(out.iterdir())


def test_wizard_single_format(runner, tmp_path):
    out = tmp_path / "single"
    result = runner.invoke(main, ["new", "--out", str(out), "--format", "json"],
                           input=WIZARD_INPUT)
    assert result.exit_code == 0, result.output
    assert [p.name for p in out.iterdir()] == ["card.json"]
