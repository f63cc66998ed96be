"""Card serialization: five formats, three of them lossless.

JSON, XML, and CSV parse back into a card structurally equal to the
(canonicalized) source. BibTeX and LaTeX are export-only renderings of a
finalized card. ``build_bundle`` produces all five from one card.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..card import Card
from .bibtex_codec import encode_bibtex
from .canonical import LICENSE, NOT_USED, canonicalize
from .csv_codec import decode_csv, encode_csv
from .json_codec import card_to_obj, decode_json, encode_json, obj_to_card
from .latex_codec import encode_latex, latex_escape
from .xml_codec import decode_xml, encode_xml

__all__ = [
    "ExportBundle", "build_bundle", "canonicalize", "card_to_obj", "obj_to_card",
    "encode_json", "decode_json", "encode_xml", "decode_xml",
    "encode_csv", "decode_csv", "encode_bibtex", "encode_latex",
    "latex_escape", "FORMATS", "LICENSE", "NOT_USED",
]


@dataclass(frozen=True)
class Format:
    name: str
    extension: str
    media_type: str
    encode: Callable[[Card], str]
    decode: Callable[[str], Card] | None  # None for export-only formats


FORMATS: dict[str, Format] = {
    "json": Format("json", ".json", "application/json; charset=utf-8",
                   encode_json, decode_json),
    "xml": Format("xml", ".xml", "application/xml; charset=utf-8",
                  encode_xml, decode_xml),
    "csv": Format("csv", ".csv", "text/csv; charset=utf-8",
                  encode_csv, decode_csv),
    "bib": Format("bib", ".bib", "application/x-bibtex; charset=utf-8",
                  encode_bibtex, None),
    "tex": Format("tex", ".tex", "application/x-tex; charset=utf-8",
                  encode_latex, None),
}

LOSSLESS_FORMATS = ("json", "xml", "csv")


@dataclass(frozen=True)
class ExportBundle:
    """The five serialized renderings of one card."""

    json: str
    xml: str
    csv: str
    bibtex: str
    latex: str

    def get(self, format_name: str) -> str:
        return {"json": self.json, "xml": self.xml, "csv": self.csv,
                "bib": self.bibtex, "tex": self.latex}[format_name]


def build_bundle(card: Card) -> ExportBundle:
    """All five renderings of one finalized card."""
    return ExportBundle(
        json=encode_json(card),
        xml=encode_xml(card),
        csv=encode_csv(card),
        bibtex=encode_bibtex(card),
        latex=encode_latex(card),
    )
