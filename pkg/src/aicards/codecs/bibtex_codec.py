"""BibTeX rendering of a finalized card. Export-only.

One ``@misc`` record keyed by a slug of the project name, with the
custom ``aiusage-models`` / ``aiusage-categories`` fields listing what the
card declares. Field order is fixed, so output is byte-deterministic.
"""

from __future__ import annotations

import re

from ..card import Card
from ..errors import UnfinalizedCardError
from .canonical import LICENSE, LICENSE_URL, canonicalize
from .latex_codec import latex_escape

_SLUG_RE = re.compile(r"[^a-z0-9]+")


def slugify(text: str) -> str:
    slug = _SLUG_RE.sub("-", text.lower()).strip("-")
    return slug or "ai-usage-card"


def encode_bibtex(card: Card) -> str:
    if not card.finalized:
        raise UnfinalizedCardError("the BibTeX export")
    card = canonicalize(card)
    taxonomy = card.taxonomy

    fields: list[tuple[str, str]] = [
        ("title", f"AI Usage Card for {card.project.project_name}"),
        ("author", " and ".join(c.name for c in card.project.correspondences if c.name)),
    ]
    all_dates = [d for m in card.models for d in m.dates_used]
    if all_dates:
        fields.append(("year", str(min(all_dates).year)))
    fields.append(("note", f"Generated with AI Usage Cards v{card.taxonomy_version}"))

    model_names = []
    for model in card.models:
        if model.name not in model_names:
            model_names.append(model.name)
    if model_names:
        fields.append(("aiusage-models", ", ".join(model_names)))
    used_categories = [
        category.title
        for category in taxonomy.usage_categories()
        if any(card.entries[sub.id].used for sub in category.subcategories)
    ]
    if used_categories:
        fields.append(("aiusage-categories", ", ".join(used_categories)))

    lines = [
        "@comment{AI Usage Card: redistributable under %s (%s)}" % (LICENSE, LICENSE_URL),
        "@misc{%s," % slugify(card.project.project_name),
    ]
    lines.extend("  %s = {%s}," % (key, latex_escape(value, newline=" "))
                 for key, value in fields)
    lines[-1] = lines[-1].rstrip(",")
    lines.append("}")
    return "\n".join(lines) + "\n"
