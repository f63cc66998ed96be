from __future__ import annotations

import datetime as dt
from dataclasses import replace

import pytest

from aicards.card import (
    Correspondence,
    ModelUsage,
    ProjectDetails,
    add_model,
    new_card,
    set_project,
)
from aicards.validator import (
    Dimension,
    Severity,
    assess,
    check_accountability,
    check_integrity,
    check_transparency,
    report_to_dict,
)

# Single-field mutations and the one dimension each must flip. The golden
# card is responsible; every mutation below must make exactly its own
# dimension unsatisfied and restoring the field must restore the verdict.


def strip_approval(card):
    return replace(card, approval=False)


def strip_correspondences(card):
    return replace(card, project=replace(card.project, correspondences=()))


def strip_model_dates(card):
    models = tuple(replace(m, dates_used=()) for m in card.models)
    return replace(card, models=models)


MUTATIONS = [
    (strip_approval, Dimension.INTEGRITY),
    (strip_correspondences, Dimension.ACCOUNTABILITY),
    (strip_model_dates, Dimension.TRANSPARENCY),
]


def test_golden_card_is_responsible(golden_card):
    report = assess(golden_card)
    assert report.responsible
    assert all(result.satisfied for result in report.dimensions)


@pytest.mark.parametrize("mutate,dimension", MUTATIONS,
                         ids=[d.value for _, d in MUTATIONS])
def test_single_field_mutation_flips_exactly_one_dimension(golden_card, mutate,
                                                           dimension):
    mutated = mutate(golden_card)
    report = assess(mutated)
    assert not report.responsible
    for result in report.dimensions:
        expected = result.dimension is not dimension
        assert result.satisfied == expected, result.dimension


def test_report_shape(golden_card):
    report = assess(golden_card)
    assert [r.dimension for r in report.dimensions] == [
        Dimension.TRANSPARENCY, Dimension.INTEGRITY, Dimension.ACCOUNTABILITY]
    assert report.responsible == all(r.satisfied for r in report.dimensions)


def test_assess_is_pure(golden_card):
    assert assess(golden_card) == assess(golden_card)


def test_transparency_vacuous_on_unused_card():
    result = check_transparency(new_card("1.0"))
    assert result.satisfied
    assert result.findings == ()


def test_transparency_flags_usage_without_model(golden_card):
    entries = dict(golden_card.entries)
    entry = entries["ideation.improving"]
    entries["ideation.improving"] = replace(entry, model_refs=frozenset())
    card = replace(golden_card, entries=entries)
    result = check_transparency(card)
    assert not result.satisfied
    assert any(f.code == "usage-without-model" for f in result.findings)


def test_transparency_warns_on_unreferenced_model(golden_card):
    card, _ = add_model(golden_card, ModelUsage("Spare", (dt.date(2023, 3, 1),)))
    result = check_transparency(card)
    assert result.satisfied
    warnings = [f for f in result.findings if f.severity is Severity.WARNING]
    assert any(f.code == "model-unreferenced" for f in warnings)


def test_integrity_satisfied_without_usage_and_without_approval():
    card = new_card("1.0")
    result = check_integrity(card)
    assert result.satisfied and result.findings == ()


def test_integrity_requires_approval_when_used(golden_card):
    result = check_integrity(strip_approval(golden_card))
    assert not result.satisfied
    assert any(f.code == "approval-missing" for f in result.findings)


def test_integrity_requires_mitigation_answers(golden_card):
    card = replace(golden_card,
                   ethics=replace(golden_card.ethics, error_mitigation=" "))
    result = check_integrity(card)
    assert not result.satisfied
    assert any(f.code == "error-mitigation-missing" for f in result.findings)


def test_accountability_minimal_pass():
    card = set_project(new_card("1.0"), ProjectDetails(
        correspondences=(Correspondence("A", "a@example.org", "Lab"),),
        project_name="P"))
    assert check_accountability(card).satisfied


def test_accountability_requires_contact():
    card = set_project(new_card("1.0"), ProjectDetails(
        correspondences=(Correspondence("A", "", "Lab"),), project_name="P"))
    result = check_accountability(card)
    assert not result.satisfied
    assert any(f.code == "correspondence-missing-contact" for f in result.findings)


def test_accountability_accepts_redacted_text(golden_card):
    assert check_accountability(golden_card).satisfied


def test_report_to_dict_round_shape(golden_card):
    doc = report_to_dict(assess(golden_card))
    assert doc["responsible"] is True
    assert [d["dimension"] for d in doc["dimensions"]] == [
        "Transparency", "Integrity", "Accountability"]
