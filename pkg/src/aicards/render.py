"""Plain-text field list of a card, in the template's reading order.

Used for the questionnaire review screen, the service's session preview,
and the CLI. Values render the same way the card template prints them:
absent optionals and unused subcategories show "Not used".
"""

from __future__ import annotations

from .card import Card
from .codecs.canonical import NOT_USED, canonicalize


def field_list(card: Card) -> list[dict[str, str]]:
    card = canonicalize(card)
    taxonomy = card.taxonomy
    fields: list[dict[str, str]] = []

    def add(label: str, value: str) -> None:
        fields.append({"label": label, "value": value or NOT_USED})

    add("Correspondence(s)", "\n".join(c.name for c in card.project.correspondences))
    add("Contact(s)", "\n".join(c.contact for c in card.project.correspondences))
    add("Affiliation(s)", "\n".join(c.affiliation for c in card.project.correspondences))
    add("Project Name", card.project.project_name)
    add("Key Application(s)", ", ".join(card.project.key_applications))
    add("Model(s)", "\n".join(m.name for m in card.models))
    add("Date(s) Used", "\n".join(
        ", ".join(d.isoformat() for d in m.dates_used) or NOT_USED
        for m in card.models))
    add("Version(s)", "\n".join(m.version or NOT_USED for m in card.models))

    for category in taxonomy.usage_categories():
        refs = sorted(card.category_models.get(category.id, frozenset()))
        add(category.title, ", ".join(card.models[r].name for r in refs))
        for sub in category.subcategories:
            entry = card.entries[sub.id]
            add(sub.title, entry.detail if entry.used else "")

    questions = taxonomy.ethics_questions()
    titles = [q.title for q in questions[:3]] if len(questions) >= 3 else [
        "Implications", "Error mitigation", "Harm mitigation"]
    answers = (card.ethics.implications, card.ethics.error_mitigation,
               card.ethics.harm_mitigation)
    for title, answer in zip(titles, answers):
        add(title, answer)
    affirmation = taxonomy.affirmation()
    add(affirmation.title if affirmation else "Approval",
        "Yes" if card.approval else "No")
    return fields
