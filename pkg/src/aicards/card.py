"""The card aggregate: project details, model usages, per-subcategory entries.

Cards are immutable values. Every mutator returns a new card, so they can
be shared freely across threads; the questionnaire and the codecs both
build cards exclusively through the constructors in this module, which
keeps the invariants in one place.
"""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import (
    ClassificationNotAllowedError,
    DanglingModelRefError,
    EmptyDetailError,
    EmptyModelNameError,
    FieldPath,
    FutureDateError,
    IncompleteCardError,
    InvalidTextError,
    UnknownCategoryError,
    UnknownSubcategoryError,
    UnusedEntryNotEmptyError,
)
from .taxonomy import Classification, Taxonomy, get_taxonomy

# Control characters (other than tab and newline) cannot survive an XML
# round-trip, so they are rejected at the boundary rather than mangled later.
_BAD_TEXT = re.compile(r"[\x00-\x08\x0b-\x1f\x7f]")


def check_text(value: str, what: str) -> str:
    if _BAD_TEXT.search(value):
        raise InvalidTextError(f"{what} contains control characters")
    return value


@dataclass(frozen=True)
class Correspondence:
    name: str = ""
    contact: str = ""
    affiliation: str = ""

    def __post_init__(self):
        for label, value in (("name", self.name), ("contact", self.contact),
                             ("affiliation", self.affiliation)):
            check_text(value, f"correspondence {label}")


@dataclass(frozen=True)
class ProjectDetails:
    correspondences: tuple[Correspondence, ...] = ()
    project_name: str = ""
    key_applications: tuple[str, ...] = ()

    def __post_init__(self):
        check_text(self.project_name, "project name")
        for app in self.key_applications:
            check_text(app, "key application")


@dataclass(frozen=True)
class ModelUsage:
    """One AI model: its name, the dates it was used, and an optional version."""

    name: str
    dates_used: tuple[dt.date, ...] = ()
    version: str | None = None

    def __post_init__(self):
        if not self.name.strip():
            raise EmptyModelNameError("model name must be non-empty")
        check_text(self.name, "model name")
        if self.version is not None:
            check_text(self.version, "model version")
        today = dt.date.today()
        for d in self.dates_used:
            if d > today:
                raise FutureDateError(f"model {self.name!r} has a future usage date {d}")


@dataclass(frozen=True)
class UsageEntry:
    """The answer for one usage subcategory.

    An unused entry is completely empty; a used one must carry a detail text
    and may carry classifications and model references.
    """

    subcategory_id: str
    used: bool = False
    classifications: frozenset[Classification] = frozenset()
    model_refs: frozenset[int] = frozenset()
    detail: str = ""

    def __post_init__(self):
        check_text(self.detail, "entry detail")
        if self.used:
            if not self.detail.strip():
                raise EmptyDetailError(
                    f"used entry {self.subcategory_id!r} must carry a detail text")
        elif self.classifications or self.model_refs or self.detail:
            raise UnusedEntryNotEmptyError(
                f"unused entry {self.subcategory_id!r} must stay empty")


@dataclass(frozen=True)
class EthicsAnswers:
    implications: str = ""
    error_mitigation: str = ""
    harm_mitigation: str = ""

    def __post_init__(self):
        check_text(self.implications, "ethics answer")
        check_text(self.error_mitigation, "ethics answer")
        check_text(self.harm_mitigation, "ethics answer")


@dataclass(frozen=True)
class Card:
    taxonomy_version: str
    project: ProjectDetails
    models: tuple[ModelUsage, ...]
    category_models: Mapping[str, frozenset[int]]
    entries: Mapping[str, UsageEntry]
    ethics: EthicsAnswers
    approval: bool
    finalized: bool = field(default=False, compare=False)

    @property
    def taxonomy(self) -> Taxonomy:
        return get_taxonomy(self.taxonomy_version)

    def any_used(self) -> bool:
        return any(e.used for e in self.entries.values())

    def used_entries(self) -> tuple[UsageEntry, ...]:
        taxonomy = self.taxonomy
        return tuple(
            self.entries[sub.id]
            for sub in taxonomy.usage_subcategories()
            if self.entries[sub.id].used
        )

    def referenced_model_indices(self) -> frozenset[int]:
        refs: set[int] = set()
        for entry in self.entries.values():
            refs |= entry.model_refs
        return frozenset(refs)


def _frozen_map(pairs: Mapping) -> Mapping:
    return MappingProxyType(dict(pairs))


def new_card(taxonomy_version: str) -> Card:
    """An empty card with every usage subcategory pre-seeded as unused."""
    taxonomy = get_taxonomy(taxonomy_version)
    entries = {sub.id: UsageEntry(sub.id) for sub in taxonomy.usage_subcategories()}
    return Card(
        taxonomy_version=taxonomy_version,
        project=ProjectDetails(),
        models=(),
        category_models=_frozen_map({}),
        entries=_frozen_map(entries),
        ethics=EthicsAnswers(),
        approval=False,
    )


def add_model(card: Card, model: ModelUsage) -> tuple[Card, int]:
    """Append a model; the returned index is stable for the card's lifetime."""
    index = len(card.models)
    return replace(card, models=card.models + (model,)), index


def set_entry(card: Card, entry: UsageEntry) -> Card:
    taxonomy = card.taxonomy
    sub = taxonomy.subcategory(entry.subcategory_id)
    if sub is None or entry.subcategory_id not in card.entries:
        raise UnknownSubcategoryError(entry.subcategory_id)
    extra = entry.classifications - sub.allowed_classifications
    if extra:
        names = ", ".join(sorted(c.value for c in extra))
        raise ClassificationNotAllowedError(
            f"{entry.subcategory_id!r} does not allow: {names}")
    for ref in entry.model_refs:
        if not 0 <= ref < len(card.models):
            raise DanglingModelRefError(
                f"entry {entry.subcategory_id!r} references model {ref}, "
                f"but only {len(card.models)} are declared")
    entries = dict(card.entries)
    entries[entry.subcategory_id] = entry
    return replace(card, entries=_frozen_map(entries))


def set_category_models(card: Card, category_id: str, refs: Iterable[int]) -> Card:
    """Record which declared models were assigned to a usage category."""
    taxonomy = card.taxonomy
    category = taxonomy.category(category_id)
    if category is None or not category.is_usage:
        raise UnknownCategoryError(category_id)
    refs = frozenset(refs)
    for ref in refs:
        if not 0 <= ref < len(card.models):
            raise DanglingModelRefError(
                f"category {category_id!r} references model {ref}, "
                f"but only {len(card.models)} are declared")
    mapping = dict(card.category_models)
    if refs:
        mapping[category_id] = refs
    else:
        mapping.pop(category_id, None)
    return replace(card, category_models=_frozen_map(mapping))


def set_project(card: Card, project: ProjectDetails) -> Card:
    return replace(card, project=project)


def set_ethics(card: Card, ethics: EthicsAnswers) -> Card:
    return replace(card, ethics=ethics)


def set_approval(card: Card, approved: bool) -> Card:
    return replace(card, approval=approved)


def completeness_problems(card: Card) -> list[tuple[FieldPath, str]]:
    """Everything that still blocks finalization, each with a field path."""
    taxonomy = card.taxonomy
    problems: list[tuple[FieldPath, str]] = []
    root = FieldPath()

    if not card.project.project_name.strip():
        problems.append((root.child("project", "project_name"),
                         "project name must be non-empty"))
    if not any(c.contact.strip() for c in card.project.correspondences):
        problems.append((root.child("project", "correspondences"),
                         "at least one correspondence with a contact is required"))
    for i, model in enumerate(card.models):
        if not model.dates_used:
            problems.append((root.child("models", i, "dates_used"),
                             f"model {model.name!r} lists no usage dates"))
    for entry in card.used_entries():
        if not entry.model_refs:
            problems.append((root.child("entries", entry.subcategory_id, "model_refs"),
                             "used entry must reference at least one model"))
    if card.any_used():
        ethics = card.ethics
        for label, value in (("implications", ethics.implications),
                             ("error_mitigation", ethics.error_mitigation),
                             ("harm_mitigation", ethics.harm_mitigation)):
            if not value.strip():
                problems.append((root.child("ethics", label),
                                 f"ethics answer {label!r} must be non-empty"))

    # The assignment collected up front must agree with what the entries say.
    for category in taxonomy.usage_categories():
        used_refs: set[int] = set()
        for sub in category.subcategories:
            entry = card.entries[sub.id]
            if entry.used:
                used_refs |= entry.model_refs
        assigned = card.category_models.get(category.id, frozenset())
        if assigned != frozenset(used_refs):
            problems.append((
                root.child("category_models", category.id),
                f"category {category.id!r} is assigned models "
                f"{sorted(assigned)} but its used entries reference {sorted(used_refs)}",
            ))
    return problems


def finalize(card: Card) -> Card:
    """Gate a card on structural completeness and flag it complete.

    The returned card compares structurally equal to the input; only the
    (non-structural) finalized flag differs. Responsibility itself is the
    validator's business, so a complete card may still fail assessment.
    """
    problems = completeness_problems(card)
    if problems:
        raise IncompleteCardError(problems)
    return replace(card, finalized=True)
