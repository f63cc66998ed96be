"""LaTeX rendering of a finalized card, mirroring the printed template.

Emits a self-contained fragment: a title line, a three-column longtable
whose rows follow the card's reading order with uppercase field labels,
and the version/format footer. Unused subcategories and absent optionals
render as "Not used". Export-only; there is no LaTeX parser.

The fragment needs ``\\usepackage{longtable,booktabs,xcolor}`` in the
including document; compile it with any LaTeX engine to obtain the PDF
distribution form of the card.
"""

from __future__ import annotations

import re

from ..card import Card, UsageEntry
from ..errors import UnfinalizedCardError
from ..taxonomy import Category, Taxonomy
from .canonical import LICENSE, LICENSE_URL, NOT_USED, canonicalize

_REPLACEMENTS = {
    "\\": "\\textbackslash{}",
    "&": "\\&",
    "%": "\\%",
    "$": "\\$",
    "#": "\\#",
    "_": "\\_",
    "{": "\\{",
    "}": "\\}",
    "~": "\\textasciitilde{}",
    "^": "\\textasciicircum{}",
}
_SPECIALS = re.compile("[%s]" % re.escape("".join(_REPLACEMENTS)))


def latex_escape(text: str, newline: str = " \\newline ") -> str:
    # single pass, so replacement text is never re-escaped
    text = _SPECIALS.sub(lambda m: _REPLACEMENTS[m.group()], text)
    return text.replace("\n", newline)


def _cell(label: str, value: str) -> str:
    return ("{\\color{aicardlabel}\\textbf{%s}} \\newline %s"
            % (latex_escape(label.upper()), latex_escape(value or NOT_USED)))


def _entry_cell(entry: UsageEntry, title: str) -> str:
    return _cell(title, entry.detail if entry.used else NOT_USED)


def _rows(first_column: str, cells: list[str]) -> list[str]:
    """Lay cells out two per row; the first row carries the left column."""
    lines = []
    for i in range(0, len(cells), 2):
        pair = cells[i:i + 2]
        if len(pair) == 1:
            pair.append("")
        left = first_column if i == 0 else ""
        lines.append(f"{left} &\n{pair[0]} &\n{pair[1]} \\\\[8pt]")
    return lines


def _category_label(card: Card, category: Category) -> str:
    refs = sorted(card.category_models.get(category.id, frozenset()))
    names = ", ".join(card.models[r].name for r in refs)
    label = "{\\color{aicardlabel}\\textbf{%s}}" % latex_escape(category.title.upper())
    if names:
        label += " \\newline " + latex_escape(names)
    return label


def _ethics_cells(card: Card, taxonomy: Taxonomy) -> list[str]:
    questions = taxonomy.ethics_questions()
    titles = (
        [q.title for q in questions[:3]]
        if len(questions) >= 3
        else ["Implications", "Error mitigation", "Harm mitigation"]
    )
    affirmation = taxonomy.affirmation()
    approval_title = affirmation.title if affirmation else "Approval"
    answers = (card.ethics.implications, card.ethics.error_mitigation,
               card.ethics.harm_mitigation)
    cells = [_cell(title, answer) for title, answer in zip(titles, answers)]
    cells.append(_cell(approval_title, "Yes" if card.approval else "No"))
    return cells


def encode_latex(card: Card) -> str:
    if not card.finalized:
        raise UnfinalizedCardError("the LaTeX export")
    card = canonicalize(card)
    taxonomy = card.taxonomy
    project = card.project

    lines = [
        "% AI Usage Card (generated)",
        "% Requires: \\usepackage{longtable,booktabs,xcolor}",
        f"% Redistributable under {LICENSE}: {LICENSE_URL}",
        "\\begingroup",
        "\\providecolor{aicardlabel}{HTML}{2E74B5}",
        "\\sffamily\\footnotesize",
        "\\noindent\\textbf{\\large AI Usage Card for %s}\\\\[8pt]"
        % latex_escape(project.project_name),
        "\\begin{longtable}{@{}p{0.22\\linewidth}p{0.36\\linewidth}p{0.36\\linewidth}@{}}",
    ]

    names = " \\newline ".join(latex_escape(c.name) for c in project.correspondences)
    contacts = " \\newline ".join(latex_escape(c.contact) for c in project.correspondences)
    affiliations = " \\newline ".join(latex_escape(c.affiliation)
                                      for c in project.correspondences)

    def raw_cell(label: str, body: str) -> str:
        return "{\\color{aicardlabel}\\textbf{%s}} \\newline %s" % (
            latex_escape(label.upper()), body or latex_escape(NOT_USED))

    lines.append(f"{raw_cell('Correspondence(s)', names)} &\n"
                 f"{raw_cell('Contact(s)', contacts)} &\n"
                 f"{raw_cell('Affiliation(s)', affiliations)} \\\\[8pt]")
    lines.append(" &\n%s &\n%s \\\\[8pt]" % (
        _cell("Project Name", project.project_name),
        _cell("Key Application(s)", ", ".join(project.key_applications)),
    ))
    model_names = " \\newline ".join(latex_escape(m.name) for m in card.models)
    model_dates = " \\newline ".join(
        latex_escape(", ".join(d.isoformat() for d in m.dates_used)) or latex_escape(NOT_USED)
        for m in card.models)
    model_versions = " \\newline ".join(
        latex_escape(m.version if m.version is not None else NOT_USED)
        for m in card.models)
    lines.append(f"{raw_cell('Model(s)', model_names)} &\n"
                 f"{raw_cell('Date(s) Used', model_dates)} &\n"
                 f"{raw_cell('Version(s)', model_versions)} \\\\[8pt]")
    lines.append("\\cmidrule{2-3}")

    for block in taxonomy.blocks:
        if not block.is_usage:
            continue
        for category in block.categories:
            cells = [
                _entry_cell(card.entries[sub.id], sub.title)
                for sub in category.subcategories
            ]
            lines.extend(_rows(_category_label(card, category), cells))
        lines.append("\\cmidrule{2-3}")

    ethics_label = "{\\color{aicardlabel}\\textbf{ETHICS}}"
    lines.extend(_rows(ethics_label, _ethics_cells(card, taxonomy)))
    lines.append("\\end{longtable}")
    lines.append(
        "\\noindent AI Usage Card v%s \\hfill PDF | BibTeX | XML | JSON | CSV"
        % latex_escape(card.taxonomy_version))
    lines.append("\\endgroup")
    return "\n".join(lines) + "\n"
