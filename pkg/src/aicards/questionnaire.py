"""Resumable wizard that turns interactive answers into a finalized card.

The flow asks for the models first, then where AI was used, assigns models
to those places, collects per-subcategory details, and closes with the
ethics questions, the approval, and the project details before a final
review. Sessions are immutable values; ``submit_answer`` and ``go_back``
return new sessions, which makes replay and persistence trivial.

The step sequence is a pure function of the answers accumulated so far:
subcategory steps exist exactly for the categories picked in the
main-category step, in taxonomy order. Answers downstream of the cursor
are retained on back-navigation and revalidated when resubmitted; answers
belonging to steps that a changed selection removed are discarded.
"""

from __future__ import annotations

import datetime as dt
import enum
import json
import secrets
from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Any, Mapping

from .card import (
    Card,
    Correspondence,
    EthicsAnswers,
    ModelUsage,
    ProjectDetails,
    UsageEntry,
    add_model,
    check_text,
    finalize,
    new_card,
    set_approval,
    set_category_models,
    set_entry,
    set_ethics,
    set_project,
)
from .errors import (
    AtFirstStepError,
    CardError,
    FieldPath,
    IncompleteCardError,
    IncompleteSessionError,
    PayloadInvalidError,
    ScriptError,
    SessionFinalizedError,
    StepMismatchError,
)
from .taxonomy import Classification, Taxonomy, get_taxonomy

ROOT = FieldPath()


class StepKind(enum.Enum):
    MODEL_INFO = "model-info"
    MAIN_CATEGORIES = "main-categories"
    MODEL_ASSIGNMENT = "model-assignment"
    SUBCATEGORY_SELECT = "subcategory-select"
    SUBCATEGORY_DETAIL = "subcategory-detail"
    ETHICS = "ethics"
    APPROVAL = "approval"
    PROJECT_DETAILS = "project-details"
    REVIEW = "review"


#: Step kinds parameterized by a taxonomy id, and the wire key carrying it.
PARAM_KEYS = {
    StepKind.SUBCATEGORY_SELECT: "category",
    StepKind.SUBCATEGORY_DETAIL: "subcategory",
}

StepKey = tuple[str, str]


def _key(kind: StepKind, param: str | None = None) -> StepKey:
    return (kind.value, param or "")


@dataclass(frozen=True)
class DetailAnswer:
    """Normalized subcategory-detail payload.

    ``model_refs`` of None means "use the models assigned to this entry's
    category", resolved when the card is built.
    """

    used: bool
    classifications: frozenset[Classification] = frozenset()
    model_refs: frozenset[int] | None = None
    detail: str = ""


@dataclass(frozen=True)
class Step:
    kind: StepKind
    param: str | None
    prompt: str
    schema: Mapping[str, Any]

    @property
    def key(self) -> StepKey:
        return _key(self.kind, self.param)


@dataclass(frozen=True)
class Answer:
    kind: StepKind
    payload: Any
    param: str | None = None


@dataclass(frozen=True)
class Session:
    id: str
    taxonomy_version: str
    cursor: int
    answers: Mapping[StepKey, Any]
    created_at: dt.datetime
    revision: int
    finalized: bool = False

    @property
    def taxonomy(self) -> Taxonomy:
        return get_taxonomy(self.taxonomy_version)

    def answer(self, kind: StepKind, param: str | None = None) -> Any:
        return self.answers.get(_key(kind, param))


def _frozen(answers: Mapping[StepKey, Any]) -> Mapping[StepKey, Any]:
    return MappingProxyType(dict(answers))


def start(taxonomy_version: str) -> Session:
    get_taxonomy(taxonomy_version)  # raises UnknownTaxonomyError
    return Session(
        id=secrets.token_urlsafe(16),
        taxonomy_version=taxonomy_version,
        cursor=0,
        answers=_frozen({}),
        created_at=dt.datetime.now(dt.timezone.utc),
        revision=0,
    )


# -- step sequence -------------------------------------------------------------

def _selected_categories(taxonomy: Taxonomy, answers: Mapping[StepKey, Any]):
    selection = answers.get(_key(StepKind.MAIN_CATEGORIES))
    if selection is None:
        return None
    return [c for c in taxonomy.usage_categories() if c.id in selection]


def step_sequence(taxonomy: Taxonomy, answers: Mapping[StepKey, Any]) -> list[Step]:
    """The full step list determinable from the answers so far."""
    steps = [_make_step(StepKind.MODEL_INFO, None, taxonomy, answers)]
    if _key(StepKind.MODEL_INFO) not in answers:
        return steps
    steps.append(_make_step(StepKind.MAIN_CATEGORIES, None, taxonomy, answers))

    selected = _selected_categories(taxonomy, answers)
    if selected is None:
        return steps
    models = answers.get(_key(StepKind.MODEL_INFO), ())
    if models and selected:
        steps.append(_make_step(StepKind.MODEL_ASSIGNMENT, None, taxonomy, answers))
    for category in selected:
        steps.append(_make_step(StepKind.SUBCATEGORY_SELECT, category.id,
                                taxonomy, answers))
        chosen = answers.get(_key(StepKind.SUBCATEGORY_SELECT, category.id))
        # detail steps for an unanswered select are not known yet; later
        # selects and the fixed tail are, so the path keeps its full shape
        for sub in category.subcategories:
            if chosen is not None and sub.id in chosen:
                steps.append(_make_step(StepKind.SUBCATEGORY_DETAIL, sub.id,
                                        taxonomy, answers))
    steps.append(_make_step(StepKind.ETHICS, None, taxonomy, answers))
    steps.append(_make_step(StepKind.APPROVAL, None, taxonomy, answers))
    steps.append(_make_step(StepKind.PROJECT_DETAILS, None, taxonomy, answers))
    steps.append(_make_step(StepKind.REVIEW, None, taxonomy, answers))
    return steps


def _make_step(kind: StepKind, param: str | None, taxonomy: Taxonomy,
               answers: Mapping[StepKey, Any]) -> Step:
    models = answers.get(_key(StepKind.MODEL_INFO), ())
    if kind is StepKind.MODEL_INFO:
        return Step(kind, None,
                    "List the AI models you used: name, dates used, and "
                    "version if known. You can list several.",
                    {"type": "model-list",
                     "fields": ["name", "dates_used", "version"],
                     "required": ["name"],
                     "date_format": "YYYY-MM-DD"})
    if kind is StepKind.MAIN_CATEGORIES:
        return Step(kind, None,
                    "In which parts of the work did you use AI?",
                    {"type": "multi-select",
                     "options": [{"id": c.id, "title": c.title}
                                 for c in taxonomy.usage_categories()]})
    if kind is StepKind.MODEL_ASSIGNMENT:
        selected = _selected_categories(taxonomy, answers) or []
        return Step(kind, None,
                    "Assign each model to the parts of the work it was used in.",
                    {"type": "assignment",
                     "models": [{"index": i, "name": m.name}
                                for i, m in enumerate(models)],
                     "options": [{"id": c.id, "title": c.title} for c in selected]})
    if kind is StepKind.SUBCATEGORY_SELECT:
        category = taxonomy.category(param)
        return Step(kind, param,
                    f"Which {category.title} activities used AI?",
                    {"type": "multi-select",
                     "options": [{"id": s.id, "title": s.title,
                                  "description": s.description}
                                 for s in category.subcategories]})
    if kind is StepKind.SUBCATEGORY_DETAIL:
        sub = taxonomy.subcategory(param)
        category = taxonomy.category_of(param)
        assignment = answers.get(_key(StepKind.MODEL_ASSIGNMENT))
        default_refs = sorted(
            i for i, cats in enumerate(assignment or ())
            if category.id in cats)
        return Step(kind, param,
                    f"Describe how AI was used for: {sub.title}",
                    {"type": "usage-detail",
                     "subcategory": {"id": sub.id, "title": sub.title,
                                     "description": sub.description},
                     "allowed_classifications": sorted(
                         c.value for c in sub.allowed_classifications),
                     "models": [{"index": i, "name": m.name}
                                for i, m in enumerate(models)],
                     "default_models": default_refs,
                     "required_when_used": ["detail"]})
    if kind is StepKind.ETHICS:
        questions = taxonomy.ethics_questions()
        keys = ("implications", "error_mitigation", "harm_mitigation")
        titles = [q.title for q in questions[:3]] if len(questions) >= 3 else [
            "What are the implications of using AI for this project?",
            "What steps are we taking to mitigate errors of AI for this project?",
            "What steps are we taking to minimize the chance of harm or "
            "inappropriate use of AI for this project?",
        ]
        return Step(kind, None,
                    "Answer the ethics questions for this project.",
                    {"type": "texts",
                     "fields": [{"key": k, "title": t}
                                for k, t in zip(keys, titles)]})
    if kind is StepKind.APPROVAL:
        affirmation = taxonomy.affirmation()
        title = affirmation.title if affirmation else (
            "The corresponding authors verify and agree with the "
            "modifications or generations of their used AI-generated content")
        return Step(kind, None, "Do the authors approve the AI-generated content?",
                    {"type": "affirmation", "title": title})
    if kind is StepKind.PROJECT_DETAILS:
        return Step(kind, None,
                    "Name the project and the people accountable for it.",
                    {"type": "project",
                     "fields": ["correspondences", "project_name",
                                "key_applications"]})
    return Step(StepKind.REVIEW, None,
                "Review the card, then finalize it.", {"type": "review"})


def current_step(session: Session) -> Step:
    if session.finalized:
        raise SessionFinalizedError("session is finalized")
    steps = step_sequence(session.taxonomy, session.answers)
    return steps[min(session.cursor, len(steps) - 1)]


# -- payload validation ----------------------------------------------------------

def _require_type(value, kind, path: FieldPath, what: str):
    if kind is bool and isinstance(value, bool):
        return value
    if kind is not bool and isinstance(value, kind) and not isinstance(value, bool):
        return value
    raise PayloadInvalidError(f"{what} has the wrong type", path)


def _string(value, path: FieldPath, what: str = "value") -> str:
    _require_type(value, str, path, what)
    try:
        return check_text(value, what)
    except CardError as exc:
        raise PayloadInvalidError(str(exc), path) from None


def _string_list(value, path: FieldPath, what: str) -> list[str]:
    _require_type(value, list, path, what)
    return [_string(v, path.child(i), what) for i, v in enumerate(value)]


def _validate_models(payload, path: FieldPath) -> tuple[ModelUsage, ...]:
    _require_type(payload, list, path, "model list")
    models = []
    for i, raw in enumerate(payload):
        model_path = path.child(i)
        _require_type(raw, dict, model_path, "model")
        unknown = set(raw) - {"name", "dates_used", "version"}
        if unknown:
            raise PayloadInvalidError(
                f"unknown model fields: {', '.join(sorted(unknown))}", model_path)
        dates = []
        for j, value in enumerate(raw.get("dates_used", [])):
            date_path = model_path.child("dates_used", j)
            try:
                dates.append(dt.date.fromisoformat(_string(value, date_path)))
            except ValueError:
                raise PayloadInvalidError(
                    f"not an ISO-8601 date: {value!r}", date_path) from None
        version = raw.get("version")
        try:
            models.append(ModelUsage(
                name=_string(raw.get("name", ""), model_path.child("name"), "model name"),
                dates_used=tuple(dates),
                version=None if version in (None, "")
                else _string(version, model_path.child("version"), "model version"),
            ))
        except CardError as exc:
            raise PayloadInvalidError(str(exc), model_path) from None
    return tuple(models)


def _validate_payload(session: Session, step: Step, payload) -> Any:
    taxonomy = session.taxonomy
    kind = step.kind
    path = ROOT.child(kind.value)

    if kind is StepKind.MODEL_INFO:
        return _validate_models(payload, path)

    if kind is StepKind.MAIN_CATEGORIES:
        ids = _string_list(payload, path, "category id")
        known = {c.id for c in taxonomy.usage_categories()}
        for i, cid in enumerate(ids):
            if cid not in known:
                raise PayloadInvalidError(f"unknown category {cid!r}", path.child(i))
        return frozenset(ids)

    if kind is StepKind.MODEL_ASSIGNMENT:
        models = session.answer(StepKind.MODEL_INFO) or ()
        selected = session.answer(StepKind.MAIN_CATEGORIES) or frozenset()
        _require_type(payload, list, path, "assignment")
        if len(payload) != len(models):
            raise PayloadInvalidError(
                f"expected one category list per model ({len(models)}), "
                f"got {len(payload)}", path)
        assignment = []
        for i, raw in enumerate(payload):
            ids = _string_list(raw, path.child(i), "category id")
            for cid in ids:
                if cid not in selected:
                    raise PayloadInvalidError(
                        f"category {cid!r} was not selected", path.child(i))
            assignment.append(frozenset(ids))
        return tuple(assignment)

    if kind is StepKind.SUBCATEGORY_SELECT:
        category = taxonomy.category(step.param)
        ids = _string_list(payload, path, "subcategory id")
        known = {s.id for s in category.subcategories}
        for i, sid in enumerate(ids):
            if sid not in known:
                raise PayloadInvalidError(
                    f"{sid!r} is not a subcategory of {category.id!r}", path.child(i))
        return frozenset(ids)

    if kind is StepKind.SUBCATEGORY_DETAIL:
        sub = taxonomy.subcategory(step.param)
        models = session.answer(StepKind.MODEL_INFO) or ()
        _require_type(payload, dict, path, "detail")
        unknown = set(payload) - {"used", "classifications", "model_refs", "detail"}
        if unknown:
            raise PayloadInvalidError(
                f"unknown detail fields: {', '.join(sorted(unknown))}", path)
        used = _require_type(payload.get("used", True), bool, path.child("used"), "used")
        classifications = set()
        for i, name in enumerate(payload.get("classifications", [])):
            cls_path = path.child("classifications", i)
            try:
                cls = Classification.from_name(_string(name, cls_path))
            except ValueError as exc:
                raise PayloadInvalidError(str(exc), cls_path) from None
            if cls not in sub.allowed_classifications:
                raise PayloadInvalidError(
                    f"{sub.id!r} does not allow classification {cls.value!r}", cls_path)
            classifications.add(cls)
        raw_refs = payload.get("model_refs")
        refs: frozenset[int] | None = None
        if raw_refs is not None:
            _require_type(raw_refs, list, path.child("model_refs"), "model_refs")
            refs_set = set()
            for i, ref in enumerate(raw_refs):
                ref_path = path.child("model_refs", i)
                _require_type(ref, int, ref_path, "model reference")
                if not 0 <= ref < len(models):
                    raise PayloadInvalidError(
                        f"model reference {ref} is out of range", ref_path)
                refs_set.add(ref)
            refs = frozenset(refs_set)
        detail = _string(payload.get("detail", ""), path.child("detail"), "detail")
        if used and not detail.strip():
            raise PayloadInvalidError("a used subcategory needs a detail text",
                                      path.child("detail"))
        if not used and (classifications or refs or detail):
            raise PayloadInvalidError("an unused subcategory must stay empty", path)
        return DetailAnswer(used=used, classifications=frozenset(classifications),
                            model_refs=refs, detail=detail)

    if kind is StepKind.ETHICS:
        _require_type(payload, dict, path, "ethics answers")
        keys = {"implications", "error_mitigation", "harm_mitigation"}
        unknown = set(payload) - keys
        if unknown:
            raise PayloadInvalidError(
                f"unknown ethics fields: {', '.join(sorted(unknown))}", path)
        return EthicsAnswers(**{
            key: _string(payload.get(key, ""), path.child(key), "ethics answer")
            for key in keys
        })

    if kind is StepKind.APPROVAL:
        return _require_type(payload, bool, path, "approval")

    if kind is StepKind.PROJECT_DETAILS:
        _require_type(payload, dict, path, "project details")
        unknown = set(payload) - {"correspondences", "project_name", "key_applications"}
        if unknown:
            raise PayloadInvalidError(
                f"unknown project fields: {', '.join(sorted(unknown))}", path)
        correspondences = []
        raw_corrs = payload.get("correspondences", [])
        _require_type(raw_corrs, list, path.child("correspondences"), "correspondences")
        for i, raw in enumerate(raw_corrs):
            corr_path = path.child("correspondences", i)
            _require_type(raw, dict, corr_path, "correspondence")
            unknown = set(raw) - {"name", "contact", "affiliation"}
            if unknown:
                raise PayloadInvalidError(
                    f"unknown correspondence fields: {', '.join(sorted(unknown))}",
                    corr_path)
            correspondences.append(Correspondence(
                name=_string(raw.get("name", ""), corr_path.child("name")),
                contact=_string(raw.get("contact", ""), corr_path.child("contact")),
                affiliation=_string(raw.get("affiliation", ""),
                                    corr_path.child("affiliation")),
            ))
        return ProjectDetails(
            correspondences=tuple(correspondences),
            project_name=_string(payload.get("project_name", ""),
                                 path.child("project_name"), "project name"),
            key_applications=tuple(_string_list(payload.get("key_applications", []),
                                                path.child("key_applications"),
                                                "key application")),
        )

    raise StepMismatchError("the review step takes no answer; finalize instead")


# -- transitions -----------------------------------------------------------------

def _prune(taxonomy: Taxonomy, answers: dict[StepKey, Any],
           step: Step, value: Any) -> None:
    """Discard stored answers that a changed selection invalidated."""
    if step.kind is StepKind.MAIN_CATEGORIES:
        for category in taxonomy.usage_categories():
            if category.id not in value:
                answers.pop(_key(StepKind.SUBCATEGORY_SELECT, category.id), None)
                for sub in category.subcategories:
                    answers.pop(_key(StepKind.SUBCATEGORY_DETAIL, sub.id), None)
        assignment = answers.get(_key(StepKind.MODEL_ASSIGNMENT))
        if assignment is not None:
            answers[_key(StepKind.MODEL_ASSIGNMENT)] = tuple(
                frozenset(cid for cid in cats if cid in value)
                for cats in assignment)
    elif step.kind is StepKind.SUBCATEGORY_SELECT:
        category = taxonomy.category(step.param)
        for sub in category.subcategories:
            if sub.id not in value:
                answers.pop(_key(StepKind.SUBCATEGORY_DETAIL, sub.id), None)
    elif step.kind is StepKind.MODEL_INFO:
        previous = answers.get(step.key)
        if previous is not None and len(previous) != len(value):
            answers.pop(_key(StepKind.MODEL_ASSIGNMENT), None)


def submit_answer(session: Session, answer: Answer) -> Session:
    """Validate and record one answer; the cursor advances one step."""
    if session.finalized:
        raise SessionFinalizedError("session is finalized")
    step = current_step(session)
    if answer.kind is not step.kind or (answer.param or None) != step.param:
        wanted = step.param and f"({step.param})" or ""
        raise StepMismatchError(
            f"expected an answer for step {step.kind.value}{wanted}, "
            f"got {answer.kind.value}"
            + (f"({answer.param})" if answer.param else ""))
    value = _validate_payload(session, step, answer.payload)

    answers = dict(session.answers)
    _prune(session.taxonomy, answers, step, value)
    answers[step.key] = value
    new_sequence = step_sequence(session.taxonomy, answers)
    keys = [s.key for s in new_sequence]
    cursor = keys.index(step.key) + 1
    return replace(session, answers=_frozen(answers), cursor=cursor,
                   revision=session.revision + 1)


def go_back(session: Session) -> Session:
    """Move the cursor one step back, keeping every stored answer."""
    if session.finalized:
        raise SessionFinalizedError("session is finalized")
    if session.cursor == 0:
        raise AtFirstStepError("already at the first step")
    return replace(session, cursor=session.cursor - 1,
                   revision=session.revision + 1)


# -- card assembly -----------------------------------------------------------------

def build_card(session: Session) -> Card:
    """The card described by the answers so far (unanswered parts stay empty)."""
    taxonomy = session.taxonomy
    card = new_card(session.taxonomy_version)
    for model in session.answer(StepKind.MODEL_INFO) or ():
        card, _ = add_model(card, model)

    assignment = session.answer(StepKind.MODEL_ASSIGNMENT) or ()
    by_category: dict[str, set[int]] = {}
    for index, categories in enumerate(assignment):
        for cid in categories:
            by_category.setdefault(cid, set()).add(index)
    for cid, refs in by_category.items():
        card = set_category_models(card, cid, refs)

    selection = session.answer(StepKind.MAIN_CATEGORIES) or frozenset()
    for category in taxonomy.usage_categories():
        if category.id not in selection:
            continue
        chosen = session.answer(StepKind.SUBCATEGORY_SELECT, category.id) or frozenset()
        for sub in category.subcategories:
            if sub.id not in chosen:
                continue
            detail = session.answer(StepKind.SUBCATEGORY_DETAIL, sub.id)
            if detail is None or not detail.used:
                continue
            refs = detail.model_refs
            if refs is None:
                refs = frozenset(by_category.get(category.id, set()))
            card = set_entry(card, UsageEntry(
                subcategory_id=sub.id,
                used=True,
                classifications=detail.classifications,
                model_refs=refs,
                detail=detail.detail,
            ))

    ethics = session.answer(StepKind.ETHICS)
    if ethics is not None:
        card = set_ethics(card, ethics)
    approval = session.answer(StepKind.APPROVAL)
    if approval is not None:
        card = set_approval(card, approval)
    project = session.answer(StepKind.PROJECT_DETAILS)
    if project is not None:
        card = set_project(card, project)
    return card


def _step_for_problem(path: FieldPath) -> StepKind:
    head = path.segments[0] if path.segments else ""
    if head == "project":
        return StepKind.PROJECT_DETAILS
    if head == "ethics":
        return StepKind.ETHICS
    if head == "models":
        return StepKind.MODEL_INFO
    if head == "category_models":
        return StepKind.MODEL_ASSIGNMENT
    if head == "entries":
        return StepKind.SUBCATEGORY_DETAIL
    return StepKind.REVIEW


def finalize_session(session: Session) -> tuple[Session, Card]:
    """Close the questionnaire: returns the finalized session and card."""
    if session.finalized:
        raise SessionFinalizedError("session is already finalized")
    step = current_step(session)
    if step.kind is not StepKind.REVIEW:
        raise StepMismatchError(
            f"finalize is only possible at the review step, not {step.kind.value}")
    try:
        card = finalize(build_card(session))
    except IncompleteCardError as exc:
        revisit = _step_for_problem(exc.problems[0][0])
        raise IncompleteSessionError(exc.problems, revisit.value) from None
    closed = replace(session, finalized=True, revision=session.revision + 1)
    return closed, card


def path_length(session: Session) -> int:
    """Number of answer-taking steps on the current path (review excluded)."""
    return len(step_sequence(session.taxonomy, session.answers)) - 1


# -- wire forms ---------------------------------------------------------------

def payload_to_wire(kind: StepKind, value: Any) -> Any:
    if kind is StepKind.MODEL_INFO:
        return [
            {"name": m.name, "dates_used": [d.isoformat() for d in m.dates_used],
             "version": m.version}
            for m in value
        ]
    if kind in (StepKind.MAIN_CATEGORIES, StepKind.SUBCATEGORY_SELECT):
        return sorted(value)
    if kind is StepKind.MODEL_ASSIGNMENT:
        return [sorted(cats) for cats in value]
    if kind is StepKind.SUBCATEGORY_DETAIL:
        wire = {"used": value.used}
        if value.used:
            wire["classifications"] = sorted(c.value for c in value.classifications)
            if value.model_refs is not None:
                wire["model_refs"] = sorted(value.model_refs)
            wire["detail"] = value.detail
        return wire
    if kind is StepKind.ETHICS:
        return {"implications": value.implications,
                "error_mitigation": value.error_mitigation,
                "harm_mitigation": value.harm_mitigation}
    if kind is StepKind.APPROVAL:
        return value
    if kind is StepKind.PROJECT_DETAILS:
        return {
            "correspondences": [
                {"name": c.name, "contact": c.contact, "affiliation": c.affiliation}
                for c in value.correspondences
            ],
            "project_name": value.project_name,
            "key_applications": list(value.key_applications),
        }
    return value


def answer_to_obj(kind: StepKind, param: str | None, payload: Any) -> dict:
    obj: dict[str, Any] = {"step": kind.value}
    if kind in PARAM_KEYS:
        obj[PARAM_KEYS[kind]] = param
    obj["payload"] = payload
    return obj


def answer_from_obj(obj: Any, index: int | None = None) -> Answer:
    if not isinstance(obj, dict) or "step" not in obj:
        raise ScriptError("each answer needs a 'step' field", index)
    try:
        kind = StepKind(obj["step"])
    except ValueError:
        raise ScriptError(f"unknown step kind {obj['step']!r}", index) from None
    param = None
    if kind in PARAM_KEYS:
        param = obj.get(PARAM_KEYS[kind])
        if not isinstance(param, str) or not param:
            raise ScriptError(
                f"step {kind.value} needs a {PARAM_KEYS[kind]!r} field", index)
    if "payload" not in obj:
        raise ScriptError(f"step {kind.value} is missing its payload", index)
    return Answer(kind=kind, param=param, payload=obj["payload"])


def payload_from_wire(kind: StepKind, wire: Any) -> Any:
    """Rebuild a normalized payload from its wire form (trusted input)."""
    if kind is StepKind.MODEL_INFO:
        return tuple(
            ModelUsage(
                name=m["name"],
                dates_used=tuple(dt.date.fromisoformat(d) for d in m["dates_used"]),
                version=m.get("version"),
            )
            for m in wire
        )
    if kind in (StepKind.MAIN_CATEGORIES, StepKind.SUBCATEGORY_SELECT):
        return frozenset(wire)
    if kind is StepKind.MODEL_ASSIGNMENT:
        return tuple(frozenset(cats) for cats in wire)
    if kind is StepKind.SUBCATEGORY_DETAIL:
        refs = wire.get("model_refs")
        return DetailAnswer(
            used=wire["used"],
            classifications=frozenset(
                Classification.from_name(c) for c in wire.get("classifications", [])),
            model_refs=None if refs is None else frozenset(refs),
            detail=wire.get("detail", ""),
        )
    if kind is StepKind.ETHICS:
        return EthicsAnswers(**wire)
    if kind is StepKind.APPROVAL:
        return bool(wire)
    if kind is StepKind.PROJECT_DETAILS:
        return ProjectDetails(
            correspondences=tuple(Correspondence(**c)
                                  for c in wire["correspondences"]),
            project_name=wire["project_name"],
            key_applications=tuple(wire["key_applications"]),
        )
    return wire


def session_to_obj(session: Session) -> dict:
    return {
        "id": session.id,
        "taxonomy_version": session.taxonomy_version,
        "cursor": session.cursor,
        "revision": session.revision,
        "created_at": session.created_at.isoformat(),
        "finalized": session.finalized,
        "answers": [
            {"step": kind, "param": param,
             "payload": payload_to_wire(StepKind(kind), value)}
            for (kind, param), value in session.answers.items()
        ],
    }


def session_from_obj(obj: dict) -> Session:
    answers = {}
    for item in obj["answers"]:
        kind = StepKind(item["step"])
        answers[(item["step"], item.get("param") or "")] = payload_from_wire(
            kind, item["payload"])
    return Session(
        id=obj["id"],
        taxonomy_version=obj["taxonomy_version"],
        cursor=obj["cursor"],
        answers=_frozen(answers),
        created_at=dt.datetime.fromisoformat(obj["created_at"]),
        revision=obj["revision"],
        finalized=obj["finalized"],
    )


# -- answer scripts -------------------------------------------------------------

@dataclass(frozen=True)
class AnswerScript:
    """A replayable record of one full questionnaire run."""

    taxonomy_version: str
    answers: tuple[Answer, ...]


def load_script(text: str) -> AnswerScript:
    if not text.strip():
        raise ScriptError("empty answer script")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScriptError(
            f"not valid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    if not isinstance(raw, dict):
        raise ScriptError("an answer script is an object with "
                          "'taxonomy_version' and 'answers'")
    version = raw.get("taxonomy_version")
    if not isinstance(version, str):
        raise ScriptError("missing or invalid 'taxonomy_version'")
    raw_answers = raw.get("answers")
    if not isinstance(raw_answers, list):
        raise ScriptError("missing or invalid 'answers' list")
    answers = tuple(answer_from_obj(obj, i) for i, obj in enumerate(raw_answers))
    return AnswerScript(taxonomy_version=version, answers=answers)


def serialize_script(script: AnswerScript) -> str:
    doc = {
        "taxonomy_version": script.taxonomy_version,
        "answers": [answer_to_obj(a.kind, a.param, a.payload) for a in script.answers],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def replay(script: AnswerScript) -> tuple[Session, Card]:
    """Drive a fresh session through a recorded script and finalize it."""
    session = start(script.taxonomy_version)
    for i, answer in enumerate(script.answers):
        try:
            session = submit_answer(session, answer)
        except (StepMismatchError, PayloadInvalidError) as exc:
            raise ScriptError(str(exc), i) from None
    step = current_step(session)
    if step.kind is not StepKind.REVIEW:
        raise ScriptError(
            f"script ends before the review step (stopped at {step.kind.value})",
            len(script.answers) - 1 if script.answers else None)
    return finalize_session(session)
