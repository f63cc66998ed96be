"""Lossless JSON rendering of a card.

Top-level keys appear in a fixed order (version, project, models,
categories, ethics, approval, license); category and subcategory keys
follow taxonomy order; output is byte-deterministic for equal cards.
"""

from __future__ import annotations

import json
from typing import Any

from ..card import Card, Correspondence, EthicsAnswers, ModelUsage, ProjectDetails, UsageEntry, check_text
from ..errors import CardDecodeError, CardError, CardSchemaError, FieldPath, UnknownTaxonomyError
from ..taxonomy import CLASSIFICATION_ORDER, get_taxonomy
from .canonical import LICENSE, canonicalize
from .common import ROOT, assemble_card, make_entry, parse_classifications, parse_date

_MISSING = object()


def _entry_to_obj(entry: UsageEntry) -> dict:
    if not entry.used:
        return {"used": False}
    return {
        "used": True,
        "classifications": [
            c.value for c in sorted(entry.classifications,
                                    key=CLASSIFICATION_ORDER.__getitem__)
        ],
        "models": sorted(entry.model_refs),
        "detail": entry.detail,
    }


def card_to_obj(card: Card) -> dict:
    """The JSON object form; also the payload used by the HTTP service."""
    card = canonicalize(card)
    taxonomy = card.taxonomy
    categories: dict[str, Any] = {}
    for category in taxonomy.usage_categories():
        categories[category.id] = {
            "models": sorted(card.category_models.get(category.id, frozenset())),
            "subcategories": {
                sub.id: _entry_to_obj(card.entries[sub.id])
                for sub in category.subcategories
            },
        }
    return {
        "version": card.taxonomy_version,
        "project": {
            "correspondences": [
                {"name": c.name, "contact": c.contact, "affiliation": c.affiliation}
                for c in card.project.correspondences
            ],
            "project_name": card.project.project_name,
            "key_applications": list(card.project.key_applications),
        },
        "models": [
            {
                "name": m.name,
                "dates_used": [d.isoformat() for d in m.dates_used],
                "version": m.version,
            }
            for m in card.models
        ],
        "categories": categories,
        "ethics": {
            "implications": card.ethics.implications,
            "error_mitigation": card.ethics.error_mitigation,
            "harm_mitigation": card.ethics.harm_mitigation,
        },
        "approval": card.approval,
        "license": LICENSE,
    }


def encode_json(card: Card) -> str:
    return json.dumps(card_to_obj(card), indent=2, ensure_ascii=False) + "\n"


# -- decoding -----------------------------------------------------------------

class _Obj:
    """A JSON object walker that tracks its field path and rejects leftovers."""

    def __init__(self, raw: Any, path: FieldPath):
        if not isinstance(raw, dict):
            raise CardSchemaError("expected an object", path)
        self.raw = dict(raw)
        self.path = path

    def take(self, key: str, default=_MISSING) -> Any:
        if key not in self.raw:
            if default is _MISSING:
                raise CardSchemaError(f"missing field {key!r}", self.path)
            return default
        return self.raw.pop(key)

    def finish(self) -> None:
        self.raw.pop("license", None)  # informational, tolerated
        if self.raw:
            extra = ", ".join(sorted(map(repr, self.raw)))
            raise CardSchemaError(f"unknown fields: {extra}", self.path)


def _text(value: Any, path: FieldPath, what: str = "value") -> str:
    if not isinstance(value, str):
        raise CardSchemaError(f"{what} must be a string", path)
    try:
        return check_text(value, what)
    except CardError as exc:
        raise CardSchemaError(str(exc), path) from None


def _bool(value: Any, path: FieldPath) -> bool:
    if not isinstance(value, bool):
        raise CardSchemaError("expected true or false", path)
    return value


def _list(value: Any, path: FieldPath) -> list:
    if not isinstance(value, list):
        raise CardSchemaError("expected a list", path)
    return value


def _int_refs(value: Any, path: FieldPath) -> frozenset[int]:
    refs = set()
    for v in _list(value, path):
        if isinstance(v, bool) or not isinstance(v, int):
            raise CardSchemaError("model reference must be an integer", path)
        refs.add(v)
    return frozenset(refs)


def _decode_project(raw: Any, path: FieldPath) -> ProjectDetails:
    obj = _Obj(raw, path)
    correspondences = []
    for i, raw_corr in enumerate(_list(obj.take("correspondences"),
                                       path.child("correspondences"))):
        corr_path = path.child("correspondences", i)
        corr = _Obj(raw_corr, corr_path)
        correspondences.append(Correspondence(
            name=_text(corr.take("name"), corr_path.child("name")),
            contact=_text(corr.take("contact"), corr_path.child("contact")),
            affiliation=_text(corr.take("affiliation"), corr_path.child("affiliation")),
        ))
        corr.finish()
    project_name = _text(obj.take("project_name"),
                         path.child("project_name"), "project name")
    key_applications = tuple(
        _text(v, path.child("key_applications", i), "key application")
        for i, v in enumerate(_list(obj.take("key_applications"),
                                    path.child("key_applications")))
    )
    obj.finish()
    return ProjectDetails(tuple(correspondences), project_name, key_applications)


def _decode_model(raw: Any, path: FieldPath) -> ModelUsage:
    obj = _Obj(raw, path)
    name = _text(obj.take("name"), path.child("name"), "model name")
    dates = tuple(
        parse_date(_text(v, path.child("dates_used", j)), path.child("dates_used", j))
        for j, v in enumerate(_list(obj.take("dates_used"), path.child("dates_used")))
    )
    raw_version = obj.take("version", None)
    version = None if raw_version is None else _text(
        raw_version, path.child("version"), "model version")
    obj.finish()
    try:
        return ModelUsage(name=name, dates_used=dates, version=version)
    except CardError as exc:
        raise CardSchemaError(str(exc), path) from None


def _decode_entry(sid: str, raw: Any, path: FieldPath) -> UsageEntry:
    obj = _Obj(raw, path)
    used = _bool(obj.take("used"), path.child("used"))
    classifications = parse_classifications(
        _list(obj.take("classifications", []), path.child("classifications")),
        path.child("classifications"))
    refs = _int_refs(obj.take("models", []), path.child("models"))
    detail = _text(obj.take("detail", ""), path.child("detail"), "detail")
    obj.finish()
    return make_entry(sid, used, classifications, refs, detail, path)


def _decode_ethics(raw: Any, path: FieldPath) -> EthicsAnswers:
    obj = _Obj(raw, path)
    ethics = EthicsAnswers(
        implications=_text(obj.take("implications"),
                           path.child("implications"), "ethics answer"),
        error_mitigation=_text(obj.take("error_mitigation"),
                               path.child("error_mitigation"), "ethics answer"),
        harm_mitigation=_text(obj.take("harm_mitigation"),
                              path.child("harm_mitigation"), "ethics answer"),
    )
    obj.finish()
    return ethics


def obj_to_card(raw: Any) -> Card:
    """Decode the JSON object form (shared with the service's validate body)."""
    doc = _Obj(raw, ROOT)
    version = _text(doc.take("version"), ROOT.child("version"), "version")
    try:
        taxonomy = get_taxonomy(version)
    except UnknownTaxonomyError:
        raise CardSchemaError(f"unknown taxonomy version {version!r}",
                              ROOT.child("version")) from None
    project = _decode_project(doc.take("project"), ROOT.child("project"))
    models = tuple(
        _decode_model(raw_model, ROOT.child("models", i))
        for i, raw_model in enumerate(_list(doc.take("models"), ROOT.child("models")))
    )

    categories_path = ROOT.child("categories")
    raw_categories = doc.take("categories")
    if not isinstance(raw_categories, dict):
        raise CardSchemaError("expected an object", categories_path)
    category_models: dict[str, frozenset[int]] = {}
    entries: dict[str, UsageEntry] = {}
    for category_id, raw_category in raw_categories.items():
        cat_path = categories_path.child(category_id)
        cat_obj = _Obj(raw_category, cat_path)
        refs = _int_refs(cat_obj.take("models", []), cat_path.child("models"))
        if refs:
            category_models[category_id] = refs
        raw_subs = cat_obj.take("subcategories")
        if not isinstance(raw_subs, dict):
            raise CardSchemaError("expected an object", cat_path.child("subcategories"))
        for sid, raw_entry in raw_subs.items():
            entry_path = cat_path.child("subcategories").child(sid)
            entries[sid] = _decode_entry(sid, raw_entry, entry_path)
        cat_obj.finish()

    ethics = _decode_ethics(doc.take("ethics"), ROOT.child("ethics"))
    approval = _bool(doc.take("approval"), ROOT.child("approval"))
    doc.finish()

    unknown = set(raw_categories) - {c.id for c in taxonomy.usage_categories()}
    if unknown:
        raise CardSchemaError(
            f"unknown categories: {', '.join(sorted(unknown))}", categories_path)

    return assemble_card(
        version=version,
        project=project,
        models=models,
        category_models=category_models,
        entries=entries,
        ethics=ethics,
        approval=approval,
    )


def decode_json(text: str) -> Card:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CardDecodeError(exc.msg, line=exc.lineno, column=exc.colno) from None
    return obj_to_card(raw)
