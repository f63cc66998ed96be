"""Lossless XML rendering of a card.

The root element is ``aiUsageCard`` with a ``version`` attribute; element
order mirrors taxonomy order and text content is escaped per the XML
standard. Mirrors the JSON codec field for field.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from ..card import Card, Correspondence, EthicsAnswers, ModelUsage, ProjectDetails, UsageEntry, check_text
from ..errors import CardDecodeError, CardError, CardSchemaError, FieldPath, UnknownTaxonomyError
from ..taxonomy import CLASSIFICATION_ORDER, get_taxonomy
from .canonical import LICENSE, LICENSE_URL, canonicalize
from .common import ROOT, assemble_card, make_entry, parse_classifications, parse_date

_HEADER = (
    '<?xml version="1.0" encoding="UTF-8"?>\n'
    f"<!-- Redistributable under {LICENSE}: {LICENSE_URL} -->\n"
)


def _leaf(parent: ET.Element, tag: str, text: str) -> ET.Element:
    el = ET.SubElement(parent, tag)
    if text:
        el.text = text
    return el


def encode_xml(card: Card) -> str:
    card = canonicalize(card)
    taxonomy = card.taxonomy
    root = ET.Element("aiUsageCard", version=card.taxonomy_version)

    project = ET.SubElement(root, "project")
    correspondences = ET.SubElement(project, "correspondences")
    for person in card.project.correspondences:
        el = ET.SubElement(correspondences, "correspondence")
        _leaf(el, "name", person.name)
        _leaf(el, "contact", person.contact)
        _leaf(el, "affiliation", person.affiliation)
    _leaf(project, "projectName", card.project.project_name)
    applications = ET.SubElement(project, "keyApplications")
    for app in card.project.key_applications:
        _leaf(applications, "keyApplication", app)

    models = ET.SubElement(root, "models")
    for index, model in enumerate(card.models):
        el = ET.SubElement(models, "model", index=str(index))
        _leaf(el, "name", model.name)
        dates = ET.SubElement(el, "datesUsed")
        for d in model.dates_used:
            _leaf(dates, "date", d.isoformat())
        if model.version is not None:
            _leaf(el, "version", model.version)

    categories = ET.SubElement(root, "categories")
    for category in taxonomy.usage_categories():
        cat_el = ET.SubElement(categories, "category", id=category.id)
        assigned = ET.SubElement(cat_el, "assignedModels")
        for ref in sorted(card.category_models.get(category.id, frozenset())):
            _leaf(assigned, "modelRef", str(ref))
        subs = ET.SubElement(cat_el, "subcategories")
        for sub in category.subcategories:
            entry = card.entries[sub.id]
            entry_el = ET.SubElement(subs, "subcategory", id=sub.id,
                                     used="true" if entry.used else "false")
            if entry.used:
                cls_el = ET.SubElement(entry_el, "classifications")
                for c in sorted(entry.classifications,
                                key=CLASSIFICATION_ORDER.__getitem__):
                    _leaf(cls_el, "classification", c.value)
                refs_el = ET.SubElement(entry_el, "modelRefs")
                for ref in sorted(entry.model_refs):
                    _leaf(refs_el, "modelRef", str(ref))
                _leaf(entry_el, "detail", entry.detail)

    ethics = ET.SubElement(root, "ethics")
    _leaf(ethics, "implications", card.ethics.implications)
    _leaf(ethics, "errorMitigation", card.ethics.error_mitigation)
    _leaf(ethics, "harmMitigation", card.ethics.harm_mitigation)
    _leaf(root, "approval", "true" if card.approval else "false")

    ET.indent(root, space="  ")
    return _HEADER + ET.tostring(root, encoding="unicode") + "\n"


# -- decoding -----------------------------------------------------------------

def _text_of(el: ET.Element | None, path: FieldPath, what: str = "value") -> str:
    if el is None:
        return ""
    value = el.text or ""
    try:
        return check_text(value, what)
    except CardError as exc:
        raise CardSchemaError(str(exc), path) from None


def _child(parent: ET.Element, tag: str, path: FieldPath) -> ET.Element:
    el = parent.find(tag)
    if el is None:
        raise CardSchemaError(f"missing element <{tag}>", path)
    return el


def _refs_of(parent: ET.Element | None, path: FieldPath) -> frozenset[int]:
    if parent is None:
        return frozenset()
    refs = set()
    for el in parent.findall("modelRef"):
        try:
            refs.add(int(el.text or ""))
        except ValueError:
            raise CardSchemaError("model reference must be an integer", path) from None
    return frozenset(refs)


def _bool_attr(value: str | None, path: FieldPath) -> bool:
    if value == "true":
        return True
    if value == "false":
        return False
    raise CardSchemaError('expected "true" or "false"', path)


def decode_xml(text: str) -> Card:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, column = exc.position
        raise CardDecodeError(f"malformed markup: {exc.msg.split(':')[0]}",
                              line=line, column=column) from None
    if root.tag != "aiUsageCard":
        raise CardDecodeError(f"root element must be <aiUsageCard>, got <{root.tag}>")

    version = root.get("version")
    if not version:
        raise CardSchemaError("missing version attribute", ROOT.child("version"))
    try:
        taxonomy = get_taxonomy(version)
    except UnknownTaxonomyError:
        raise CardSchemaError(f"unknown taxonomy version {version!r}",
                              ROOT.child("version")) from None

    project_path = ROOT.child("project")
    project_el = _child(root, "project", project_path)
    correspondences = []
    for i, el in enumerate(_child(project_el, "correspondences",
                                  project_path).findall("correspondence")):
        corr_path = project_path.child("correspondences", i)
        correspondences.append(Correspondence(
            name=_text_of(el.find("name"), corr_path.child("name")),
            contact=_text_of(el.find("contact"), corr_path.child("contact")),
            affiliation=_text_of(el.find("affiliation"), corr_path.child("affiliation")),
        ))
    project = ProjectDetails(
        correspondences=tuple(correspondences),
        project_name=_text_of(project_el.find("projectName"),
                              project_path.child("project_name"), "project name"),
        key_applications=tuple(
            _text_of(el, project_path.child("key_applications", i), "key application")
            for i, el in enumerate(_child(project_el, "keyApplications",
                                          project_path).findall("keyApplication"))
        ),
    )

    models = []
    models_path = ROOT.child("models")
    for i, el in enumerate(_child(root, "models", models_path).findall("model")):
        model_path = models_path.child(i)
        index = el.get("index")
        if index is not None and index != str(i):
            raise CardSchemaError(f"model index attribute {index!r} out of order",
                                  model_path)
        dates = tuple(
            parse_date(_text_of(d, model_path.child("dates_used", j)),
                       model_path.child("dates_used", j))
            for j, d in enumerate(_child(el, "datesUsed",
                                         model_path).findall("date"))
        )
        version_el = el.find("version")
        try:
            models.append(ModelUsage(
                name=_text_of(el.find("name"), model_path.child("name"), "model name"),
                dates_used=dates,
                version=None if version_el is None
                else _text_of(version_el, model_path.child("version"), "model version"),
            ))
        except CardError as exc:
            raise CardSchemaError(str(exc), model_path) from None

    categories_path = ROOT.child("categories")
    category_models: dict[str, frozenset[int]] = {}
    entries: dict[str, UsageEntry] = {}
    known = {c.id for c in taxonomy.usage_categories()}
    for cat_el in _child(root, "categories", categories_path).findall("category"):
        category_id = cat_el.get("id") or ""
        cat_path = categories_path.child(category_id or "?")
        if category_id not in known:
            raise CardSchemaError(f"unknown category {category_id!r}", cat_path)
        refs = _refs_of(cat_el.find("assignedModels"), cat_path.child("models"))
        if refs:
            category_models[category_id] = refs
        for entry_el in _child(cat_el, "subcategories",
                               cat_path).findall("subcategory"):
            sid = entry_el.get("id") or ""
            entry_path = cat_path.child("subcategories").child(sid or "?")
            used = _bool_attr(entry_el.get("used"), entry_path.child("used"))
            classifications = parse_classifications(
                (el.text or "" for el in entry_el.findall("classifications/classification")),
                entry_path.child("classifications"))
            refs = _refs_of(entry_el.find("modelRefs"), entry_path.child("models"))
            detail = _text_of(entry_el.find("detail"),
                              entry_path.child("detail"), "detail")
            entries[sid] = make_entry(sid, used, classifications, refs, detail,
                                      entry_path)

    ethics_path = ROOT.child("ethics")
    ethics_el = _child(root, "ethics", ethics_path)
    ethics = EthicsAnswers(
        implications=_text_of(ethics_el.find("implications"),
                              ethics_path.child("implications"), "ethics answer"),
        error_mitigation=_text_of(ethics_el.find("errorMitigation"),
                                  ethics_path.child("error_mitigation"), "ethics answer"),
        harm_mitigation=_text_of(ethics_el.find("harmMitigation"),
                                 ethics_path.child("harm_mitigation"), "ethics answer"),
    )
    approval = _bool_attr(_child(root, "approval", ROOT.child("approval")).text,
                          ROOT.child("approval"))

    return assemble_card(
        version=version,
        project=project,
        models=tuple(models),
        category_models=category_models,
        entries=entries,
        ethics=ethics,
        approval=approval,
    )
