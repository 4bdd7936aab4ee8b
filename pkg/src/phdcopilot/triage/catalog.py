"""Issue catalog: load, validate, and ship the curated triage data.

The catalog is curated data, not mined evidence: each row records an issue,
the stakeholders it touches, banded prevalence and consequence, the severity
derived from them, a mitigability rating on the 0-3 scale, a risk label, and
the citation keys behind the banding. Validation recomputes severity from the
bands and flags every inconsistency instead of silently fixing it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .scoring import BANDS, MITIGATION_SCALE, RiskLabel, severity

STAKEHOLDERS = ("Candidate", "Supervisor", "GRS")

FIELDNAMES = (
    "id",
    "title",
    "stakeholders",
    "prevalence_band",
    "consequence_band",
    "severity",
    "mitigation",
    "risk",
    "refs",
)


class CatalogFormatError(Exception):
    """Raised when catalog rows cannot be parsed; message lists line numbers."""


@dataclass(frozen=True)
class IssueRecord:
    id: str
    title: str
    stakeholders: tuple[str, ...]
    prevalence_band: int
    consequence_band: int
    severity: int
    mitigation: int
    risk: RiskLabel
    refs: tuple[str, ...]


@dataclass(frozen=True)
class CatalogViolation:
    issue_id: str
    rule: str
    message: str


def parse_catalog(text: str) -> list[IssueRecord]:
    """Parse catalog CSV text; malformed rows raise with their line numbers."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(reader.fieldnames) != FIELDNAMES:
        raise CatalogFormatError(
            f"line 1: expected header {','.join(FIELDNAMES)}, got {reader.fieldnames}"
        )
    records: list[IssueRecord] = []
    errors: list[str] = []
    for line_no, row in enumerate(reader, start=2):
        try:
            records.append(
                IssueRecord(
                    id=row["id"].strip(),
                    title=row["title"].strip(),
                    stakeholders=tuple(s.strip() for s in row["stakeholders"].split("|") if s.strip()),
                    prevalence_band=int(row["prevalence_band"]),
                    consequence_band=int(row["consequence_band"]),
                    severity=int(row["severity"]),
                    mitigation=int(row["mitigation"]),
                    risk=RiskLabel(row["risk"].strip()),
                    refs=tuple(r.strip() for r in row["refs"].split("|") if r.strip()),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(f"line {line_no}: {exc}")
    if errors:
        raise CatalogFormatError("; ".join(errors))
    return records


def load_catalog(path: str | Path) -> list[IssueRecord]:
    return parse_catalog(Path(path).read_text(encoding="utf-8"))


def shipped_catalog_path() -> Path:
    return Path(str(resources.files("phdcopilot.triage").joinpath("data/issue_catalog.csv")))


def load_shipped_catalog() -> list[IssueRecord]:
    return load_catalog(shipped_catalog_path())


def validate_catalog(records: list[IssueRecord]) -> list[CatalogViolation]:
    violations: list[CatalogViolation] = []
    seen: set[str] = set()
    for record in records:
        if record.id in seen:
            violations.append(CatalogViolation(record.id, "duplicate-id", "issue id repeats"))
        seen.add(record.id)
        if record.prevalence_band not in BANDS:
            violations.append(
                CatalogViolation(record.id, "band-range", f"P={record.prevalence_band} outside {BANDS}")
            )
        if record.consequence_band not in BANDS:
            violations.append(
                CatalogViolation(record.id, "band-range", f"C={record.consequence_band} outside {BANDS}")
            )
        if record.prevalence_band in BANDS and record.consequence_band in BANDS:
            expected = severity(record.prevalence_band, record.consequence_band)
            if record.severity != expected:
                violations.append(
                    CatalogViolation(
                        record.id,
                        "severity-mismatch",
                        f"S={record.severity} but round-half-up((P+C)/2)={expected}",
                    )
                )
        if record.mitigation not in MITIGATION_SCALE:
            violations.append(
                CatalogViolation(
                    record.id, "mitigation-scale", f"mitigation={record.mitigation} outside {MITIGATION_SCALE}"
                )
            )
        unknown = [s for s in record.stakeholders if s not in STAKEHOLDERS]
        if unknown or not record.stakeholders:
            violations.append(
                CatalogViolation(
                    record.id, "stakeholders", f"expected a non-empty subset of {STAKEHOLDERS}, got {record.stakeholders}"
                )
            )
        if not record.refs:
            violations.append(
                CatalogViolation(record.id, "risk-rationale", "risk label carries no rationale references")
            )
    return violations
