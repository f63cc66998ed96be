"""Exception hierarchy and field paths shared by every module.

Each exception carries a stable ``code`` so the HTTP service and the CLI
can report machine-readable errors without string matching.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class FieldPath:
    """An ordered address of one card field, e.g. ``models[0].dates_used``.

    String segments are attribute or key names; integer segments are list
    indices. Segments that themselves contain dots (subcategory ids) are
    rendered in brackets to keep the printed form readable.
    """

    segments: tuple[str | int, ...] = ()

    def child(self, *segments: str | int) -> "FieldPath":
        return FieldPath(self.segments + segments)

    def __str__(self) -> str:
        parts: list[str] = []
        for seg in self.segments:
            if isinstance(seg, int) or "." in str(seg):
                parts.append(f"[{seg}]")
            elif parts:
                parts.append(f".{seg}")
            else:
                parts.append(str(seg))
        return "".join(parts)


ROOT = FieldPath()


class AicardsError(Exception):
    """Base class for every error raised by this package."""

    code = "error"


# -- taxonomy ---------------------------------------------------------------

class TaxonomyError(AicardsError):
    code = "taxonomy-error"


class UnknownTaxonomyError(TaxonomyError):
    code = "unknown-taxonomy"

    def __init__(self, version: str):
        super().__init__(f"unknown taxonomy version: {version!r}")
        self.version = version


class TaxonomyParseError(TaxonomyError):
    code = "taxonomy-parse-error"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class TaxonomyInvariantError(TaxonomyError):
    code = "taxonomy-invariant"

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


# -- card model -------------------------------------------------------------

class CardError(AicardsError):
    code = "card-error"


class UnknownSubcategoryError(CardError):
    code = "unknown-subcategory"

    def __init__(self, subcategory_id: str):
        super().__init__(f"unknown usage subcategory id: {subcategory_id!r}")
        self.subcategory_id = subcategory_id


class UnknownCategoryError(CardError):
    code = "unknown-category"

    def __init__(self, category_id: str):
        super().__init__(f"unknown usage category id: {category_id!r}")
        self.category_id = category_id


class ClassificationNotAllowedError(CardError):
    code = "classification-not-allowed"


class DanglingModelRefError(CardError):
    code = "dangling-model-reference"


class EmptyDetailError(CardError):
    code = "used-entry-with-empty-detail"


class UnusedEntryNotEmptyError(CardError):
    code = "unused-entry-not-empty"


class EmptyModelNameError(CardError):
    code = "empty-model-name"


class FutureDateError(CardError):
    code = "future-date"


class InvalidTextError(CardError):
    # free text is restricted to characters every codec can round-trip
    code = "invalid-text"


class UnfinalizedCardError(CardError):
    code = "unfinalized-card"

    def __init__(self, what: str):
        super().__init__(f"{what} requires a finalized card; call finalize() first")


class IncompleteCardError(CardError):
    """Raised by finalize(); lists every unmet completeness condition."""

    code = "incomplete-card"

    def __init__(self, problems: list[tuple[FieldPath, str]]):
        lines = "; ".join(f"{path}: {msg}" for path, msg in problems)
        super().__init__(f"card is incomplete: {lines}")
        self.problems = problems


# -- codecs -----------------------------------------------------------------

class DecodeError(AicardsError):
    code = "decode-error"


class CardDecodeError(DecodeError):
    """Syntax-level failure: malformed JSON/XML markup or a bad CSV table."""

    code = "syntax-error"

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None, row: int | None = None):
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        elif row is not None:
            where = f" (row {row})"
        super().__init__(message + where)
        self.line = line
        self.column = column
        self.row = row


class CardSchemaError(DecodeError):
    """Well-formed document that does not describe a valid card."""

    code = "schema-error"

    def __init__(self, message: str, path: FieldPath = ROOT):
        super().__init__(f"{path}: {message}" if path.segments else message)
        self.path = path


# -- questionnaire ----------------------------------------------------------

class QuestionnaireError(AicardsError):
    code = "questionnaire-error"


class StepMismatchError(QuestionnaireError):
    code = "step-mismatch"


class PayloadInvalidError(QuestionnaireError):
    code = "payload-invalid"

    def __init__(self, message: str, path: FieldPath = ROOT):
        super().__init__(f"{path}: {message}" if path.segments else message)
        self.path = path


class SessionFinalizedError(QuestionnaireError):
    code = "session-finalized"


class AtFirstStepError(QuestionnaireError):
    code = "at-first-step"


class IncompleteSessionError(QuestionnaireError):
    """finalize_session() failure; names the step the user must revisit."""

    code = "incomplete-session"

    def __init__(self, problems: list[tuple[FieldPath, str]], revisit_step: str):
        lines = "; ".join(f"{path}: {msg}" for path, msg in problems)
        super().__init__(f"card is incomplete (revisit {revisit_step}): {lines}")
        self.problems = problems
        self.revisit_step = revisit_step


class ScriptError(QuestionnaireError):
    code = "script-error"

    def __init__(self, message: str, index: int | None = None):
        where = f" (answer {index})" if index is not None else ""
        super().__init__(message + where)
        self.index = index


# -- service ----------------------------------------------------------------

class ServiceError(AicardsError):
    code = "service-error"


class InvalidRecipientError(ServiceError):
    code = "invalid-recipient"


class UnknownCardError(ServiceError):
    code = "unknown-card"

    def __init__(self, card_id: str):
        super().__init__(f"unknown card id: {card_id!r}")
        self.card_id = card_id


class StaleRevisionError(ServiceError):
    code = "stale-revision"

    def __init__(self, expected: int, got: int):
        super().__init__(f"stale revision: session is at {expected}, request sent {got}")
        self.expected = expected
        self.got = got
