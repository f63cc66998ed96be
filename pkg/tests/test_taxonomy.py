from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aicards.errors import (
    TaxonomyInvariantError,
    TaxonomyParseError,
    UnknownSubcategoryError,
    UnknownTaxonomyError,
)
from aicards.taxonomy import (
    AnswerKind,
    Block,
    Category,
    Classification,
    SubcategoryDef,
    Taxonomy,
    builtin_v1,
    get_taxonomy,
    load_taxonomy,
    lookup_subcategory,
    serialize_taxonomy,
)

# Counts transcribed by hand from the v1.0 card template: the paired usage
# blocks hold 3+4, 3+3, 4+3, and 3+3 subcategories.
EXPECTED_USAGE_BLOCK_TOTALS = (7, 6, 7, 6)
EXPECTED_USAGE_SUBCATEGORY_TOTAL = 26
EXPECTED_CATEGORY_COUNTS = {
    "ideation": 3, "literature-review": 4, "methodology": 3, "experiments": 3,
    "writing": 4, "presentation": 3, "coding": 3, "data": 3,
}


def test_builtin_has_six_blocks():
    assert len(builtin_v1().blocks) == 6


def test_usage_block_subcategory_totals():
    usage_blocks = [b for b in builtin_v1().blocks if b.is_usage]
    assert tuple(b.subcategory_count for b in usage_blocks) == EXPECTED_USAGE_BLOCK_TOTALS
    for block in usage_blocks:
        assert 6 <= block.subcategory_count <= 7


def test_usage_category_counts():
    taxonomy = builtin_v1()
    counts = {c.id: len(c.subcategories) for c in taxonomy.usage_categories()}
    assert counts == EXPECTED_CATEGORY_COUNTS
    assert len(taxonomy.usage_subcategories()) == EXPECTED_USAGE_SUBCATEGORY_TOTAL


def test_literature_review_has_comparing_literature():
    category = builtin_v1().category("literature-review")
    assert len(category.subcategories) == 4
    assert "Comparing literature" in [s.title for s in category.subcategories]


def test_ethics_block_shape():
    taxonomy = builtin_v1()
    questions = taxonomy.ethics_questions()
    assert len(questions) == 3
    affirmation = taxonomy.affirmation()
    assert affirmation is not None
    assert affirmation.id == "ethics.approval"


def test_repeated_builtin_calls_are_identical():
    assert builtin_v1() == builtin_v1()


def test_all_subcategory_ids_resolve_and_are_unique():
    taxonomy = builtin_v1()
    seen = set()
    for block in taxonomy.blocks:
        for category in block.categories:
            for sub in category.subcategories:
                assert sub.id not in seen
                seen.add(sub.id)
                assert lookup_subcategory(taxonomy, sub.id) is sub


def test_lookup_known_subcategory():
    sub = lookup_subcategory(builtin_v1(), "ideation.improving")
    assert sub.title == "Improving existing ideas"


def test_lookup_unknown_subcategory_names_the_id():
    with pytest.raises(UnknownSubcategoryError) as exc:
        lookup_subcategory(builtin_v1(), "")
    assert "''" in str(exc.value)


def test_coding_generating_allows_new():
    sub = lookup_subcategory(builtin_v1(), "coding.generating")
    assert Classification.NEW in sub.allowed_classifications


def test_every_usage_subcategory_has_a_classification():
    for sub in builtin_v1().usage_subcategories():
        assert sub.allowed_classifications
        assert sub.answer_kind is AnswerKind.USAGE_DETAIL


def test_serialize_is_deterministic():
    assert serialize_taxonomy(builtin_v1()) == serialize_taxonomy(builtin_v1())


def test_round_trip_builtin():
    assert load_taxonomy(serialize_taxonomy(builtin_v1())) == builtin_v1()


def _custom_taxonomy() -> Taxonomy:
    return Taxonomy(version="lab-2.0", blocks=(
        Block(id="writing", title="Writing", categories=(
            Category(id="prose", title="Prose", subcategories=(
                SubcategoryDef(
                    id="prose.generating", title="Generating prose",
                    description="Any new text.",
                    allowed_classifications=frozenset({Classification.NEW}),
                    answer_kind=AnswerKind.USAGE_DETAIL),
            )),
        )),
        Block(id="ethics", title="Ethics", categories=(
            Category(id="ethics", title="Ethics", subcategories=(
                SubcategoryDef(
                    id="ethics.approval", title="Approved?", description="",
                    allowed_classifications=frozenset(),
                    answer_kind=AnswerKind.AFFIRMATION),
            )),
        )),
    ))


def test_round_trip_custom_taxonomy():
    custom = _custom_taxonomy()
    assert load_taxonomy(serialize_taxonomy(custom)) == custom


def test_five_block_document_claiming_v1_is_rejected():
    taxonomy = builtin_v1()
    doc = serialize_taxonomy(Taxonomy(version="1.0", blocks=taxonomy.blocks[:5]))
    with pytest.raises(TaxonomyInvariantError) as exc:
        load_taxonomy(doc)
    assert exc.value.invariant == "block-count"


def test_five_block_document_with_custom_version_is_fine():
    taxonomy = builtin_v1()
    doc = serialize_taxonomy(Taxonomy(version="custom-0.1",
                                      blocks=taxonomy.blocks[:5]))
    assert len(load_taxonomy(doc).blocks) == 5


def test_empty_document_is_a_parse_error():
    with pytest.raises(TaxonomyParseError):
        load_taxonomy("")


def test_bad_json_reports_position():
    with pytest.raises(TaxonomyParseError) as exc:
        load_taxonomy("{not json")
    assert exc.value.line == 1


def test_duplicate_subcategory_ids_rejected():
    custom = _custom_taxonomy()
    block = custom.blocks[0]
    category = block.categories[0]
    doubled = Category(id=category.id, title=category.title,
                       subcategories=category.subcategories * 2)
    doc = serialize_taxonomy(Taxonomy(version="dup-1", blocks=(
        Block(id=block.id, title=block.title, categories=(doubled,)),)))
    with pytest.raises(TaxonomyInvariantError) as exc:
        load_taxonomy(doc)
    assert exc.value.invariant == "unique-ids"


def test_get_taxonomy_unknown_version():
    with pytest.raises(UnknownTaxonomyError):
        get_taxonomy("9.9")


@settings(max_examples=30)
@given(st.integers(1, 4), st.integers(1, 3))
def test_serialize_load_identity_over_generated_taxonomies(n_blocks, n_subs):
    blocks = []
    for b in range(n_blocks):
        subs = tuple(
            SubcategoryDef(
                id=f"cat{b}.sub{s}", title=f"Subcategory {s}", description="d",
                allowed_classifications=frozenset({Classification.REVISE}),
                answer_kind=AnswerKind.USAGE_DETAIL)
            for s in range(n_subs))
        blocks.append(Block(id=f"block{b}", title=f"Block {b}", categories=(
            Category(id=f"cat{b}", title=f"Category {b}", subcategories=subs),)))
    taxonomy = Taxonomy(version="gen-1", blocks=tuple(blocks))
    assert load_taxonomy(serialize_taxonomy(taxonomy)) == taxonomy
