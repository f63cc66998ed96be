"""Executable responsibility checks: transparency, integrity, accountability.

Each dimension is a pure function from a card to a result; the overall
verdict is the conjunction of the three. Integrity is necessarily checked
as attestation (the approval flag plus non-empty mitigation answers) — a
program can verify that human review was declared, not that it was done
well; that limitation is documented in the README.

Finding codes form a closed set:

  transparency   usage-without-model (error), model-missing-name (error),
                 model-missing-dates (error), model-unreferenced (warning)
  integrity      approval-missing (error), error-mitigation-missing (error),
                 harm-mitigation-missing (error), implications-missing (warning)
  accountability no-correspondence (error), correspondence-missing-contact
                 (error), correspondence-missing-name (warning)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .card import Card
from .errors import FieldPath


class Dimension(enum.Enum):
    TRANSPARENCY = "Transparency"
    INTEGRITY = "Integrity"
    ACCOUNTABILITY = "Accountability"


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    severity: Severity
    code: str
    message: str
    path: FieldPath


@dataclass(frozen=True)
class DimensionResult:
    dimension: Dimension
    satisfied: bool
    findings: tuple[Finding, ...]


@dataclass(frozen=True)
class ValidationReport:
    dimensions: tuple[DimensionResult, ...]
    responsible: bool

    def dimension(self, dimension: Dimension) -> DimensionResult:
        for result in self.dimensions:
            if result.dimension is dimension:
                return result
        raise KeyError(dimension)


def _result(dimension: Dimension, findings: list[Finding]) -> DimensionResult:
    satisfied = not any(f.severity is Severity.ERROR for f in findings)
    return DimensionResult(dimension, satisfied, tuple(findings))


def _error(code: str, message: str, path: FieldPath) -> Finding:
    return Finding(Severity.ERROR, code, message, path)


def _warning(code: str, message: str, path: FieldPath) -> Finding:
    return Finding(Severity.WARNING, code, message, path)


def check_transparency(card: Card) -> DimensionResult:
    """Every usage must be attributable to a declared, dated model."""
    root = FieldPath()
    findings: list[Finding] = []
    referenced: set[int] = set()
    for entry in card.used_entries():
        path = root.child("entries", entry.subcategory_id)
        if not entry.model_refs:
            findings.append(_error(
                "usage-without-model",
                f"used entry {entry.subcategory_id!r} names no model",
                path.child("model_refs")))
        referenced |= entry.model_refs
    for index in sorted(referenced):
        if not 0 <= index < len(card.models):
            continue  # dangling refs are a structural problem, not a dimension one
        model = card.models[index]
        if not model.name.strip():
            findings.append(_error(
                "model-missing-name",
                f"referenced model {index} has no name",
                root.child("models", index, "name")))
        if not model.dates_used:
            findings.append(_error(
                "model-missing-dates",
                f"referenced model {model.name!r} lists no usage dates",
                root.child("models", index, "dates_used")))
    for index, model in enumerate(card.models):
        if index not in referenced:
            findings.append(_warning(
                "model-unreferenced",
                f"declared model {model.name!r} is referenced by no entry",
                root.child("models", index)))
    return _result(Dimension.TRANSPARENCY, findings)


def check_integrity(card: Card) -> DimensionResult:
    """Usage must be approved and its error/harm mitigation attested."""
    root = FieldPath()
    findings: list[Finding] = []
    if card.any_used():
        if not card.approval:
            findings.append(_error(
                "approval-missing",
                "AI was used but the generated content is not approved",
                root.child("approval")))
        if not card.ethics.error_mitigation.strip():
            findings.append(_error(
                "error-mitigation-missing",
                "AI was used but no error mitigation steps are given",
                root.child("ethics", "error_mitigation")))
        if not card.ethics.harm_mitigation.strip():
            findings.append(_error(
                "harm-mitigation-missing",
                "AI was used but no harm mitigation steps are given",
                root.child("ethics", "harm_mitigation")))
        if not card.ethics.implications.strip():
            findings.append(_warning(
                "implications-missing",
                "consider describing the implications of using AI here",
                root.child("ethics", "implications")))
    return _result(Dimension.INTEGRITY, findings)


def check_accountability(card: Card) -> DimensionResult:
    """Someone contactable must answer for the AI-assisted content."""
    root = FieldPath()
    findings: list[Finding] = []
    if not card.project.correspondences:
        findings.append(_error(
            "no-correspondence",
            "no corresponding individual is documented",
            root.child("project", "correspondences")))
    for i, person in enumerate(card.project.correspondences):
        path = root.child("project", "correspondences", i)
        if not person.contact.strip():
            findings.append(_error(
                "correspondence-missing-contact",
                "correspondence lacks a contact",
                path.child("contact")))
        if not person.name.strip():
            findings.append(_warning(
                "correspondence-missing-name",
                "correspondence lacks a name",
                path.child("name")))
    return _result(Dimension.ACCOUNTABILITY, findings)


def assess(card: Card) -> ValidationReport:
    """Run all three checks; responsible means all satisfied simultaneously."""
    dimensions = (
        check_transparency(card),
        check_integrity(card),
        check_accountability(card),
    )
    return ValidationReport(dimensions, all(d.satisfied for d in dimensions))


def report_to_dict(report: ValidationReport) -> dict:
    """Wire form of a report, used by the service and the CLI --json flag."""
    return {
        "responsible": report.responsible,
        "dimensions": [
            {
                "dimension": result.dimension.value,
                "satisfied": result.satisfied,
                "findings": [
                    {
                        "severity": f.severity.value,
                        "code": f.code,
                        "message": f.message,
                        "path": str(f.path),
                    }
                    for f in result.findings
                ],
            }
            for result in report.dimensions
        ],
    }
