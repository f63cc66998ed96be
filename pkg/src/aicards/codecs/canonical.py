"""Canonical form shared by every encoder.

Canonicalization trims surrounding whitespace from free text, normalizes
an absent model version (the empty string and the rendered sentinel
``"Not used"`` both mean "no version"), and drops empty category
assignments. It is idempotent, and every encoder applies it first so that
equal cards serialize to identical bytes.
"""

from __future__ import annotations

from dataclasses import replace

from ..card import Card, Correspondence, EthicsAnswers, ProjectDetails

#: Rendered placeholder for unused entries and absent optionals.
NOT_USED = "Not used"

#: Redistribution terms carried by every export.
LICENSE = "CC BY-NC 4.0"
LICENSE_URL = "https://creativecommons.org/licenses/by-nc/4.0/"


def _clean_version(version: str | None) -> str | None:
    if version is None:
        return None
    version = version.strip()
    if not version or version == NOT_USED:
        return None
    return version


def canonicalize(card: Card) -> Card:
    project = ProjectDetails(
        correspondences=tuple(
            Correspondence(c.name.strip(), c.contact.strip(), c.affiliation.strip())
            for c in card.project.correspondences
        ),
        project_name=card.project.project_name.strip(),
        key_applications=tuple(a.strip() for a in card.project.key_applications),
    )
    models = tuple(
        replace(m, name=m.name.strip(), version=_clean_version(m.version))
        for m in card.models
    )
    entries = {
        sid: (replace(entry, detail=entry.detail.strip()) if entry.used else entry)
        for sid, entry in card.entries.items()
    }
    ethics = EthicsAnswers(
        implications=card.ethics.implications.strip(),
        error_mitigation=card.ethics.error_mitigation.strip(),
        harm_mitigation=card.ethics.harm_mitigation.strip(),
    )
    category_models = {
        cat: refs for cat, refs in card.category_models.items() if refs
    }
    return replace(
        card,
        project=project,
        models=models,
        entries=entries,
        ethics=ethics,
        category_models=category_models,
    )
