from __future__ import annotations

import datetime as dt

import pytest

from aicards.card import (
    Card,
    Correspondence,
    EthicsAnswers,
    ModelUsage,
    ProjectDetails,
    UsageEntry,
    add_model,
    finalize,
    new_card,
    set_approval,
    set_category_models,
    set_entry,
    set_ethics,
    set_project,
)
from aicards.questionnaire import Answer, AnswerScript, StepKind
from aicards.taxonomy import Classification

# The reference card: the completed v1.0 card distributed with the card
# template, reconstructed field by field. Three subcategories used, one
# model, full ethics answers, approval given.

GOLDEN_PROJECT_NAME = "AI Usage Cards for Responsibly Reporting Generated Content"
GOLDEN_DETAILS = {
    "ideation.improving": (
        Classification.REVISE,
        "Gathering more ideas for the name of AI Usage Cards.",
    ),
    "methodology.comparing": (
        Classification.COMPARE,
        "Compare multiple versions of our theoretical model.",
    ),
    "writing.generating": (
        Classification.NEW,
        "Generated a first version of the abstract which was not used in the "
        "final manuscript.",
    ),
}
GOLDEN_ETHICS = EthicsAnswers(
    implications="Facilitate the AI usage in scientific work (reporting).",
    error_mitigation="Careful evaluation of any generated content from the AI model.",
    harm_mitigation="Documentation of suggested content in the scientific document.",
)
GOLDEN_KEY_APPLICATIONS = ("Artificial Intelligence", "Reporting", "Responsible AI")
GOLDEN_MODEL = ModelUsage("ChatGPT", (dt.date(2023, 1, 21),), None)
GOLDEN_USED_CATEGORIES = ("ideation", "methodology", "writing")


def build_golden_card() -> Card:
    card = new_card("1.0")
    card, index = add_model(card, GOLDEN_MODEL)
    assert index == 0
    for sid, (classification, detail) in GOLDEN_DETAILS.items():
        card = set_entry(card, UsageEntry(
            subcategory_id=sid,
            used=True,
            classifications=frozenset({classification}),
            model_refs=frozenset({0}),
            detail=detail,
        ))
    for category_id in GOLDEN_USED_CATEGORIES:
        card = set_category_models(card, category_id, {0})
    card = set_ethics(card, GOLDEN_ETHICS)
    card = set_approval(card, True)
    card = set_project(card, ProjectDetails(
        correspondences=(Correspondence(
            name="Redacted for anonymity",
            contact="Redacted for anonymity",
            affiliation="Redacted for anonymity",
        ),),
        project_name=GOLDEN_PROJECT_NAME,
        key_applications=GOLDEN_KEY_APPLICATIONS,
    ))
    return card


def build_golden_script() -> AnswerScript:
    """The golden card as a questionnaire answer script."""
    answers = [
        Answer(StepKind.MODEL_INFO, [
            {"name": "ChatGPT", "dates_used": ["2023-01-21"], "version": None},
        ]),
        Answer(StepKind.MAIN_CATEGORIES, list(GOLDEN_USED_CATEGORIES)),
        Answer(StepKind.MODEL_ASSIGNMENT, [list(GOLDEN_USED_CATEGORIES)]),
    ]
    for category_id in GOLDEN_USED_CATEGORIES:
        used = [sid for sid in GOLDEN_DETAILS if sid.startswith(category_id + ".")]
        answers.append(Answer(StepKind.SUBCATEGORY_SELECT, used, param=category_id))
        for sid in used:
            classification, detail = GOLDEN_DETAILS[sid]
            answers.append(Answer(StepKind.SUBCATEGORY_DETAIL, {
                "used": True,
                "classifications": [classification.value],
                "detail": detail,
            }, param=sid))
    answers.extend([
        Answer(StepKind.ETHICS, {
            "implications": GOLDEN_ETHICS.implications,
            "error_mitigation": GOLDEN_ETHICS.error_mitigation,
            "harm_mitigation": GOLDEN_ETHICS.harm_mitigation,
        }),
        Answer(StepKind.APPROVAL, True),
        Answer(StepKind.PROJECT_DETAILS, {
            "correspondences": [{
                "name": "Redacted for anonymity",
                "contact": "Redacted for anonymity",
                "affiliation": "Redacted for anonymity",
            }],
            "project_name": GOLDEN_PROJECT_NAME,
            "key_applications": list(GOLDEN_KEY_APPLICATIONS),
        }),
    ])
    return AnswerScript(taxonomy_version="1.0", answers=tuple(answers))


@pytest.fixture
def golden_card() -> Card:
    return build_golden_card()


@pytest.fixture
def golden_finalized() -> Card:
    return finalize(build_golden_card())


@pytest.fixture
def golden_script() -> AnswerScript:
    return build_golden_script()
