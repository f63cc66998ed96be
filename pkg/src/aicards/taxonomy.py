"""Versioned card structure: blocks, categories, subcategories, classifications.

The card's shape lives in data, not code. The built-in v1.0 structure is
shipped as ``data/taxonomy-1.0.json`` and parsed through the same loader
that accepts custom taxonomies, so domain-specific card variants only need
a new document with their own version string. The strict shape rules
(exactly six blocks, per-block subcategory counts) apply to documents that
claim version "1.0"; custom versions are free to define other shapes.
"""

from __future__ import annotations

import enum
import json
import re
import threading
from dataclasses import dataclass
from functools import cached_property, lru_cache
from importlib import resources

from .errors import (
    TaxonomyInvariantError,
    TaxonomyParseError,
    UnknownSubcategoryError,
    UnknownTaxonomyError,
)


class Classification(enum.Enum):
    """How AI contributed to a subcategory. Closed set; order is canonical."""

    NEW = "New"
    REVISE = "Revise"
    COMPARE = "Compare"

    @classmethod
    def from_name(cls, name: str) -> "Classification":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(f"unknown classification: {name!r}")


#: Canonical sort order used by every encoder.
CLASSIFICATION_ORDER = {member: i for i, member in enumerate(Classification)}


class AnswerKind(enum.Enum):
    USAGE_DETAIL = "usage-detail"
    FREE_TEXT_QUESTION = "free-text-question"
    AFFIRMATION = "affirmation"


_ID_RE = re.compile(r"^[a-z0-9]+(?:-[a-z0-9]+)*$")
_SUB_ID_RE = re.compile(r"^[a-z0-9]+(?:-[a-z0-9]+)*(?:\.[a-z0-9]+(?:-[a-z0-9]+)*)+$")


@dataclass(frozen=True)
class SubcategoryDef:
    id: str
    title: str
    description: str
    allowed_classifications: frozenset[Classification]
    answer_kind: AnswerKind


@dataclass(frozen=True)
class Category:
    id: str
    title: str
    subcategories: tuple[SubcategoryDef, ...]

    @property
    def is_usage(self) -> bool:
        """A category whose subcategories all collect usage details."""
        return bool(self.subcategories) and all(
            s.answer_kind is AnswerKind.USAGE_DETAIL for s in self.subcategories
        )


@dataclass(frozen=True)
class Block:
    id: str
    title: str
    categories: tuple[Category, ...]

    @property
    def is_usage(self) -> bool:
        return bool(self.categories) and all(c.is_usage for c in self.categories)

    @property
    def subcategory_count(self) -> int:
        return sum(len(c.subcategories) for c in self.categories)


@dataclass(frozen=True)
class Taxonomy:
    """Immutable after construction; safe for unrestricted concurrent reads."""

    version: str
    blocks: tuple[Block, ...]

    @cached_property
    def _subcategories(self) -> dict[str, SubcategoryDef]:
        return {
            sub.id: sub
            for block in self.blocks
            for cat in block.categories
            for sub in cat.subcategories
        }

    @cached_property
    def _category_of_subcategory(self) -> dict[str, Category]:
        return {
            sub.id: cat
            for block in self.blocks
            for cat in block.categories
            for sub in cat.subcategories
        }

    def categories(self) -> tuple[Category, ...]:
        return tuple(cat for block in self.blocks for cat in block.categories)

    def usage_categories(self) -> tuple[Category, ...]:
        return tuple(cat for cat in self.categories() if cat.is_usage)

    def usage_subcategories(self) -> tuple[SubcategoryDef, ...]:
        return tuple(sub for cat in self.usage_categories() for sub in cat.subcategories)

    def category(self, category_id: str) -> Category | None:
        for cat in self.categories():
            if cat.id == category_id:
                return cat
        return None

    def subcategory(self, subcategory_id: str) -> SubcategoryDef | None:
        return self._subcategories.get(subcategory_id)

    def category_of(self, subcategory_id: str) -> Category:
        return self._category_of_subcategory[subcategory_id]

    def ethics_questions(self) -> tuple[SubcategoryDef, ...]:
        return tuple(
            sub
            for cat in self.categories()
            for sub in cat.subcategories
            if sub.answer_kind is AnswerKind.FREE_TEXT_QUESTION
        )

    def affirmation(self) -> SubcategoryDef | None:
        for cat in self.categories():
            for sub in cat.subcategories:
                if sub.answer_kind is AnswerKind.AFFIRMATION:
                    return sub
        return None


def lookup_subcategory(taxonomy: Taxonomy, subcategory_id: str) -> SubcategoryDef:
    """Resolve a subcategory id or raise an unknown-id error naming it."""
    sub = taxonomy.subcategory(subcategory_id)
    if sub is None:
        raise UnknownSubcategoryError(subcategory_id)
    return sub


# -- invariants ---------------------------------------------------------------

def _fail(invariant: str, message: str) -> None:
    raise TaxonomyInvariantError(invariant, message)


def validate_taxonomy(taxonomy: Taxonomy) -> Taxonomy:
    """Check every structural invariant; returns the taxonomy unchanged."""
    if not taxonomy.version.strip():
        _fail("version", "version string must be non-empty")
    if not taxonomy.blocks:
        _fail("blocks", "a taxonomy must define at least one block")

    seen_blocks: set[str] = set()
    seen_categories: set[str] = set()
    seen_subcategories: set[str] = set()
    for block in taxonomy.blocks:
        if not _ID_RE.match(block.id):
            _fail("identifier", f"bad block id {block.id!r}")
        if block.id in seen_blocks:
            _fail("unique-ids", f"duplicate block id {block.id!r}")
        seen_blocks.add(block.id)
        if not block.title.strip():
            _fail("titles", f"block {block.id!r} has an empty title")
        for cat in block.categories:
            if not _ID_RE.match(cat.id):
                _fail("identifier", f"bad category id {cat.id!r}")
            if cat.id in seen_categories:
                _fail("unique-ids", f"duplicate category id {cat.id!r}")
            seen_categories.add(cat.id)
            if not cat.title.strip():
                _fail("titles", f"category {cat.id!r} has an empty title")
            for sub in cat.subcategories:
                if not _SUB_ID_RE.match(sub.id):
                    _fail("identifier", f"bad subcategory id {sub.id!r}")
                if not sub.id.startswith(cat.id + "."):
                    _fail("identifier",
                          f"subcategory id {sub.id!r} must be prefixed by its category id")
                if sub.id in seen_subcategories:
                    _fail("unique-ids", f"duplicate subcategory id {sub.id!r}")
                seen_subcategories.add(sub.id)
                if not sub.title.strip():
                    _fail("titles", f"subcategory {sub.id!r} has an empty title")
                if sub.answer_kind is AnswerKind.USAGE_DETAIL:
                    if not sub.allowed_classifications:
                        _fail("allowed-classifications",
                              f"usage subcategory {sub.id!r} allows no classification")
                elif sub.allowed_classifications:
                    _fail("allowed-classifications",
                          f"question subcategory {sub.id!r} must not carry classifications")

    if taxonomy.version == "1.0":
        _validate_v1_shape(taxonomy)
    return taxonomy


def _validate_v1_shape(taxonomy: Taxonomy) -> None:
    # The v1.0 card shape is fixed: six blocks, one or two categories each,
    # and six to seven usage subcategories per usage block.
    if len(taxonomy.blocks) != 6:
        _fail("block-count", f"version 1.0 requires 6 blocks, found {len(taxonomy.blocks)}")
    for block in taxonomy.blocks:
        if not 1 <= len(block.categories) <= 2:
            _fail("categories-per-block",
                  f"block {block.id!r} must hold 1 or 2 categories, "
                  f"found {len(block.categories)}")
        if block.is_usage and not 6 <= block.subcategory_count <= 7:
            _fail("subcategories-per-block",
                  f"usage block {block.id!r} must hold 6 or 7 subcategories, "
                  f"found {block.subcategory_count}")


# -- serialization ------------------------------------------------------------

def _sub_to_dict(sub: SubcategoryDef) -> dict:
    return {
        "id": sub.id,
        "title": sub.title,
        "description": sub.description,
        "allowed_classifications": [
            c.value for c in sorted(sub.allowed_classifications,
                                    key=CLASSIFICATION_ORDER.__getitem__)
        ],
        "answer_kind": sub.answer_kind.value,
    }


def serialize_taxonomy(taxonomy: Taxonomy) -> str:
    """Deterministic document; ``load_taxonomy`` reads it back unchanged."""
    doc = {
        "version": taxonomy.version,
        "blocks": [
            {
                "id": block.id,
                "title": block.title,
                "categories": [
                    {
                        "id": cat.id,
                        "title": cat.title,
                        "subcategories": [_sub_to_dict(s) for s in cat.subcategories],
                    }
                    for cat in block.categories
                ],
            }
            for block in taxonomy.blocks
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _require(mapping: dict, key: str, kind: type, where: str):
    if not isinstance(mapping, dict):
        raise TaxonomyParseError(f"{where}: expected an object")
    if key not in mapping:
        raise TaxonomyParseError(f"{where}: missing field {key!r}")
    value = mapping[key]
    if not isinstance(value, kind):
        raise TaxonomyParseError(f"{where}: field {key!r} must be {kind.__name__}")
    return value


def load_taxonomy(document: str) -> Taxonomy:
    """Parse a taxonomy document and enforce every invariant."""
    if not document.strip():
        raise TaxonomyParseError("empty document")
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise TaxonomyParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc

    version = _require(raw, "version", str, "document")
    raw_blocks = _require(raw, "blocks", list, "document")
    blocks = []
    for i, raw_block in enumerate(raw_blocks):
        where = f"blocks[{i}]"
        categories = []
        for j, raw_cat in enumerate(_require(raw_block, "categories", list, where)):
            cat_where = f"{where}.categories[{j}]"
            subs = []
            for k, raw_sub in enumerate(
                    _require(raw_cat, "subcategories", list, cat_where)):
                sub_where = f"{cat_where}.subcategories[{k}]"
                names = _require(raw_sub, "allowed_classifications", list, sub_where)
                try:
                    allowed = frozenset(Classification.from_name(n) for n in names)
                except ValueError as exc:
                    raise TaxonomyParseError(f"{sub_where}: {exc}") from exc
                kind_name = _require(raw_sub, "answer_kind", str, sub_where)
                try:
                    kind = AnswerKind(kind_name)
                except ValueError as exc:
                    raise TaxonomyParseError(
                        f"{sub_where}: unknown answer_kind {kind_name!r}") from exc
                subs.append(SubcategoryDef(
                    id=_require(raw_sub, "id", str, sub_where),
                    title=_require(raw_sub, "title", str, sub_where),
                    description=_require(raw_sub, "description", str, sub_where),
                    allowed_classifications=allowed,
                    answer_kind=kind,
                ))
            categories.append(Category(
                id=_require(raw_cat, "id", str, cat_where),
                title=_require(raw_cat, "title", str, cat_where),
                subcategories=tuple(subs),
            ))
        blocks.append(Block(
            id=_require(raw_block, "id", str, where),
            title=_require(raw_block, "title", str, where),
            categories=tuple(categories),
        ))
    return validate_taxonomy(Taxonomy(version=version, blocks=tuple(blocks)))


@lru_cache(maxsize=1)
def builtin_v1() -> Taxonomy:
    """The complete built-in v1.0 card structure."""
    document = resources.files("aicards.data").joinpath("taxonomy-1.0.json").read_text("utf-8")
    return load_taxonomy(document)


# -- registry -----------------------------------------------------------------

_registry: dict[str, Taxonomy] = {}
_registry_lock = threading.Lock()


def get_taxonomy(version: str) -> Taxonomy:
    if version == "1.0":
        return builtin_v1()
    with _registry_lock:
        try:
            return _registry[version]
        except KeyError:
            raise UnknownTaxonomyError(version) from None


def register_taxonomy(taxonomy: Taxonomy) -> Taxonomy:
    """Make a custom taxonomy resolvable by version string."""
    validate_taxonomy(taxonomy)
    if taxonomy.version == "1.0" and taxonomy != builtin_v1():
        raise TaxonomyInvariantError(
            "version", 'version "1.0" is reserved for the built-in structure')
    with _registry_lock:
        _registry[taxonomy.version] = taxonomy
    return taxonomy


def known_versions() -> tuple[str, ...]:
    with _registry_lock:
        extra = tuple(sorted(v for v in _registry if v != "1.0"))
    return ("1.0",) + extra
