"""Severity-mitigability-risk triage over the curated issue catalog."""

from .catalog import (
    CatalogFormatError,
    CatalogViolation,
    IssueRecord,
    load_catalog,
    load_shipped_catalog,
    parse_catalog,
    shipped_catalog_path,
    validate_catalog,
)
from .report import render_csv, render_figures, render_report, render_table
from .scoring import (
    BANDS,
    MITIGATION_SCALE,
    RiskAssessment,
    RiskDimension,
    RiskLabel,
    band_prevalence,
    severity,
)

__all__ = [
    "CatalogFormatError",
    "CatalogViolation",
    "IssueRecord",
    "load_catalog",
    "load_shipped_catalog",
    "parse_catalog",
    "shipped_catalog_path",
    "validate_catalog",
    "render_csv",
    "render_figures",
    "render_report",
    "render_table",
    "BANDS",
    "MITIGATION_SCALE",
    "RiskAssessment",
    "RiskDimension",
    "RiskLabel",
    "band_prevalence",
    "severity",
]
