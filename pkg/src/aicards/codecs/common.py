"""Shared decoding machinery for the lossless codecs."""

from __future__ import annotations

import datetime as dt
from dataclasses import replace
from typing import Iterable, Mapping

from ..card import Card, EthicsAnswers, ModelUsage, ProjectDetails, UsageEntry, new_card, set_category_models, set_entry
from ..errors import CardError, CardSchemaError, FieldPath, UnknownTaxonomyError
from ..taxonomy import Classification

ROOT = FieldPath()


def parse_date(value: str, path: FieldPath) -> dt.date:
    try:
        return dt.date.fromisoformat(value)
    except ValueError:
        raise CardSchemaError(f"not an ISO-8601 date: {value!r}", path) from None


def parse_classifications(names: Iterable[str], path: FieldPath) -> frozenset[Classification]:
    out = set()
    for name in names:
        if not isinstance(name, str):
            raise CardSchemaError("classification must be a string", path)
        try:
            out.add(Classification.from_name(name))
        except ValueError as exc:
            raise CardSchemaError(str(exc), path) from None
    return frozenset(out)


def make_entry(subcategory_id: str, used: bool, classifications, model_refs,
               detail: str, path: FieldPath) -> UsageEntry:
    try:
        return UsageEntry(
            subcategory_id=subcategory_id,
            used=used,
            classifications=frozenset(classifications),
            model_refs=frozenset(model_refs),
            detail=detail,
        )
    except CardError as exc:
        raise CardSchemaError(str(exc), path) from None


def assemble_card(
    *,
    version: str,
    project: ProjectDetails,
    models: tuple[ModelUsage, ...],
    category_models: Mapping[str, frozenset[int]],
    entries: Mapping[str, UsageEntry],
    ethics: EthicsAnswers,
    approval: bool,
) -> Card:
    """Compose decoded pieces into a card, re-checking every invariant.

    Model-level violations surface as schema errors carrying a field path,
    so a successfully decoded document is always a valid card.
    """
    try:
        card = new_card(version)
    except UnknownTaxonomyError:
        raise CardSchemaError(f"unknown taxonomy version {version!r}",
                              ROOT.child("version")) from None
    taxonomy = card.taxonomy
    card = replace(card, project=project, models=models,
                   ethics=ethics, approval=approval)

    expected = {sub.id for sub in taxonomy.usage_subcategories()}
    missing = expected - set(entries)
    if missing:
        raise CardSchemaError(
            f"missing usage subcategories: {', '.join(sorted(missing))}",
            ROOT.child("categories"))
    for sid, entry in entries.items():
        try:
            card = set_entry(card, entry)
        except CardError as exc:
            raise CardSchemaError(str(exc), ROOT.child("entries", sid)) from None

    for category_id, refs in category_models.items():
        try:
            card = set_category_models(card, category_id, refs)
        except CardError as exc:
            raise CardSchemaError(
                str(exc), ROOT.child("categories", category_id)) from None
    return card
