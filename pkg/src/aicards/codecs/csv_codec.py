"""Lossless single-table CSV rendering of a card.

One flat table with the normative header
``section,field,category,subcategory,classifications,models,value``.
Rows appear in taxonomy order: the version, each project field, three rows
per declared model (name, dates joined by ``;``, version), one assignment
row per category with models, one row per usage subcategory (unused rows
carry the value ``Not used``), one row per ethics answer, the approval row,
and a closing license row. Quoting follows RFC 4180; lines end with ``\\n``.
"""

from __future__ import annotations

import csv
import io
import re

from ..card import Card, Correspondence, EthicsAnswers, ModelUsage, ProjectDetails, UsageEntry, check_text
from ..errors import CardDecodeError, CardError, CardSchemaError, FieldPath, UnknownTaxonomyError
from ..taxonomy import CLASSIFICATION_ORDER, get_taxonomy
from .canonical import LICENSE, NOT_USED, canonicalize
from .common import ROOT, assemble_card, make_entry, parse_classifications, parse_date

HEADER = ["section", "field", "category", "subcategory",
          "classifications", "models", "value"]

_CORR_FIELD = re.compile(r"^correspondence\[(\d+)\]\.(name|contact|affiliation)$")
_APP_FIELD = re.compile(r"^key_application\[(\d+)\]$")
_MODEL_FIELD = re.compile(r"^model\[(\d+)\]\.(name|dates|version)$")


def encode_csv(card: Card) -> str:
    card = canonicalize(card)
    taxonomy = card.taxonomy
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(HEADER)

    def row(section, field, value, category="", subcategory="",
            classifications="", models=""):
        writer.writerow([section, field, category, subcategory,
                         classifications, models, value])

    row("card", "taxonomy_version", card.taxonomy_version)
    for i, person in enumerate(card.project.correspondences):
        row("project", f"correspondence[{i}].name", person.name)
        row("project", f"correspondence[{i}].contact", person.contact)
        row("project", f"correspondence[{i}].affiliation", person.affiliation)
    row("project", "project_name", card.project.project_name)
    for i, app in enumerate(card.project.key_applications):
        row("project", f"key_application[{i}]", app)
    for i, model in enumerate(card.models):
        row("models", f"model[{i}].name", model.name)
        row("models", f"model[{i}].dates", ";".join(d.isoformat()
                                                    for d in model.dates_used))
        row("models", f"model[{i}].version",
            NOT_USED if model.version is None else model.version)
    for category in taxonomy.usage_categories():
        assigned = card.category_models.get(category.id, frozenset())
        if assigned:
            row("categories", "assigned_models", "", category=category.id,
                models=";".join(str(r) for r in sorted(assigned)))
        for sub in category.subcategories:
            entry = card.entries[sub.id]
            if entry.used:
                row("usage", "used", entry.detail,
                    category=category.id, subcategory=sub.id,
                    classifications=";".join(
                        c.value for c in sorted(entry.classifications,
                                                key=CLASSIFICATION_ORDER.__getitem__)),
                    models=";".join(str(r) for r in sorted(entry.model_refs)))
            else:
                row("usage", "unused", NOT_USED,
                    category=category.id, subcategory=sub.id)
    row("ethics", "implications", card.ethics.implications)
    row("ethics", "error_mitigation", card.ethics.error_mitigation)
    row("ethics", "harm_mitigation", card.ethics.harm_mitigation)
    row("approval", "approval", "Yes" if card.approval else "No")
    row("license", "terms", LICENSE)
    return out.getvalue()


# -- decoding -----------------------------------------------------------------

def _fail_row(number: int, message: str) -> CardDecodeError:
    return CardDecodeError(message, row=number)


def _checked(value: str, path: FieldPath, what: str = "value") -> str:
    try:
        return check_text(value, what)
    except CardError as exc:
        raise CardSchemaError(str(exc), path) from None


def decode_csv(text: str) -> Card:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise CardDecodeError("empty document") from None
    if header != HEADER:
        raise CardDecodeError(
            f"header mismatch: expected {','.join(HEADER)!r}, got {','.join(header)!r}")

    version: str | None = None
    corr_fields: dict[int, dict[str, str]] = {}
    project_name = ""
    applications: dict[int, str] = {}
    model_fields: dict[int, dict[str, str]] = {}
    assigned: dict[str, frozenset[int]] = {}
    usage_rows: dict[str, tuple[int, str, str, str, str]] = {}
    ethics_fields: dict[str, str] = {}
    approval: bool | None = None

    for number, cells in enumerate(reader, start=2):
        if len(cells) != len(HEADER):
            raise _fail_row(number, f"expected {len(HEADER)} cells, got {len(cells)}")
        section, field, category, subcategory, classifications, models, value = cells
        if section == "card":
            if field != "taxonomy_version" or version is not None:
                raise _fail_row(number, f"unexpected card row {field!r}")
            version = value
        elif section == "project":
            if field == "project_name":
                project_name = value
            elif m := _CORR_FIELD.match(field):
                corr_fields.setdefault(int(m.group(1)), {})[m.group(2)] = value
            elif m := _APP_FIELD.match(field):
                applications[int(m.group(1))] = value
            else:
                raise _fail_row(number, f"unknown project field {field!r}")
        elif section == "models":
            if m := _MODEL_FIELD.match(field):
                model_fields.setdefault(int(m.group(1)), {})[m.group(2)] = value
            else:
                raise _fail_row(number, f"unknown model field {field!r}")
        elif section == "categories":
            if field != "assigned_models" or not category:
                raise _fail_row(number, f"unexpected categories row {field!r}")
            try:
                refs = frozenset(int(r) for r in models.split(";") if r)
            except ValueError:
                raise _fail_row(number, "model references must be integers") from None
            if refs:
                assigned[category] = refs
        elif section == "usage":
            if field not in ("used", "unused") or not subcategory:
                raise _fail_row(number, f"unexpected usage row {field!r}")
            if subcategory in usage_rows:
                raise _fail_row(number, f"duplicate usage row for {subcategory!r}")
            if field == "unused" and (value != NOT_USED or classifications or models):
                raise _fail_row(number,
                                f'an unused row must carry only the value "{NOT_USED}"')
            usage_rows[subcategory] = (number, field, classifications, models, value)
        elif section == "ethics":
            if field not in ("implications", "error_mitigation", "harm_mitigation"):
                raise _fail_row(number, f"unknown ethics field {field!r}")
            ethics_fields[field] = value
        elif section == "approval":
            if value not in ("Yes", "No"):
                raise _fail_row(number, f"approval must be Yes or No, got {value!r}")
            approval = value == "Yes"
        elif section == "license":
            continue
        else:
            raise _fail_row(number, f"unknown section {section!r}")

    if version is None:
        raise CardDecodeError("missing card,taxonomy_version row")
    try:
        taxonomy = get_taxonomy(version)
    except UnknownTaxonomyError:
        raise CardSchemaError(f"unknown taxonomy version {version!r}",
                              ROOT.child("version")) from None
    if approval is None:
        raise CardDecodeError("missing approval row")

    correspondences = []
    for i in range(len(corr_fields)):
        if i not in corr_fields:
            raise CardSchemaError("correspondence indices must be contiguous",
                                  ROOT.child("project", "correspondences"))
        path = ROOT.child("project", "correspondences", i)
        fields = corr_fields[i]
        correspondences.append(Correspondence(
            name=_checked(fields.get("name", ""), path.child("name")),
            contact=_checked(fields.get("contact", ""), path.child("contact")),
            affiliation=_checked(fields.get("affiliation", ""), path.child("affiliation")),
        ))
    project = ProjectDetails(
        correspondences=tuple(correspondences),
        project_name=_checked(project_name, ROOT.child("project", "project_name"),
                              "project name"),
        key_applications=tuple(
            _checked(applications[i], ROOT.child("project", "key_applications", i),
                     "key application")
            for i in sorted(applications)
        ),
    )

    models = []
    for i in range(len(model_fields)):
        if i not in model_fields:
            raise CardSchemaError("model indices must be contiguous",
                                  ROOT.child("models"))
        path = ROOT.child("models", i)
        fields = model_fields[i]
        if "name" not in fields or "dates" not in fields or "version" not in fields:
            raise CardSchemaError("each model needs name, dates, and version rows", path)
        dates = tuple(
            parse_date(d, path.child("dates_used", j))
            for j, d in enumerate(x for x in fields["dates"].split(";") if x)
        )
        raw_version = fields["version"]
        try:
            models.append(ModelUsage(
                name=_checked(fields["name"], path.child("name"), "model name"),
                dates_used=dates,
                version=None if raw_version in (NOT_USED, "")
                else _checked(raw_version, path.child("version"), "model version"),
            ))
        except CardError as exc:
            raise CardSchemaError(str(exc), path) from None

    entries: dict[str, UsageEntry] = {}
    for sub in taxonomy.usage_subcategories():
        if sub.id not in usage_rows:
            raise CardSchemaError(f"missing usage row for {sub.id!r}",
                                  ROOT.child("entries", sub.id))
    for sid, (number, state, classifications, models_cell, value) in usage_rows.items():
        if taxonomy.subcategory(sid) is None:
            raise CardSchemaError(f"unknown subcategory id {sid!r}",
                                  ROOT.child("entries", sid))
        path = ROOT.child("entries", sid)
        used = state == "used"
        cls = parse_classifications(
            (c for c in classifications.split(";") if c), path.child("classifications"))
        try:
            refs = frozenset(int(r) for r in models_cell.split(";") if r)
        except ValueError:
            raise _fail_row(number, "model references must be integers") from None
        detail = _checked(value, path.child("detail"), "detail") if used else ""
        entries[sid] = make_entry(sid, used, cls, refs, detail, path)

    ethics = EthicsAnswers(
        implications=_checked(ethics_fields.get("implications", ""),
                              ROOT.child("ethics", "implications"), "ethics answer"),
        error_mitigation=_checked(ethics_fields.get("error_mitigation", ""),
                                  ROOT.child("ethics", "error_mitigation"), "ethics answer"),
        harm_mitigation=_checked(ethics_fields.get("harm_mitigation", ""),
                                 ROOT.child("ethics", "harm_mitigation"), "ethics answer"),
    )
    return assemble_card(
        version=version,
        project=project,
        models=tuple(models),
        category_models=assigned,
        entries=entries,
        ethics=ethics,
        approval=approval,
    )
