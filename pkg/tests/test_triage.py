from __future__ import annotations

import pytest

from phdcopilot.triage import (
    CatalogFormatError,
    IssueRecord,
    RiskAssessment,
    RiskDimension,
    RiskLabel,
    band_prevalence,
    load_shipped_catalog,
    parse_catalog,
    render_csv,
    render_figures,
    render_report,
    render_table,
    severity,
    validate_catalog,
)

# All nine band pairs under round-half-up.
SEVERITY_TABLE = {
    (1, 1): 1,
    (1, 2): 2,
    (2, 1): 2,
    (1, 3): 2,
    (3, 1): 2,
    (2, 2): 2,
    (2, 3): 3,
    (3, 2): 3,
    (3, 3): 3,
}


def test_severity_enumerates_all_nine_pairs_exactly():
    for (p, c), expected in SEVERITY_TABLE.items():
        assert severity(p, c) == expected


def test_half_up_rounding_on_the_2_5_case():
    assert severity(2, 3) == 3
    assert severity(1, 1) == 1
    assert severity(3, 3) == 3


def test_severity_rejects_out_of_domain_bands():
    for p, c in ((0, 1), (1, 4), (2.5, 2), (-1, 3)):
        with pytest.raises(ValueError):
            severity(p, c)  # type: ignore[arg-type]


def test_prevalence_banding_edges():
    assert band_prevalence(0.42) == 3
    assert band_prevalence(0.19) == 1
    assert band_prevalence(0.20) == 2
    assert band_prevalence(0.40) == 2
    assert band_prevalence(0.41) == 3
    assert band_prevalence(0.0) == 1
    assert band_prevalence(1.0) == 3


def test_prevalence_rejects_out_of_range():
    with pytest.raises(ValueError):
        band_prevalence(1.2)
    with pytest.raises(ValueError):
        band_prevalence(-0.1)


def test_risk_rubric_tiers():
    low = RiskAssessment("x", flagged=())
    medium = RiskAssessment("x", flagged=((RiskDimension.PRIVACY_SURVEILLANCE, False),))
    high = RiskAssessment(
        "x",
        flagged=(
            (RiskDimension.PRIVACY_SURVEILLANCE, False),
            (RiskDimension.GAMING_METRIC_FIXATION, True),
        ),
    )
    assert low.label is RiskLabel.LOW
    assert medium.label is RiskLabel.MEDIUM
    assert high.label is RiskLabel.HIGH


def test_shipped_catalog_has_fifteen_clean_rows():
    records = load_shipped_catalog()
    assert len(records) == 15
    assert validate_catalog(records) == []


def test_shipped_catalog_severities_recompute_from_bands():
    for record in load_shipped_catalog():
        assert record.severity == severity(record.prevalence_band, record.consequence_band)


def test_severity_mismatch_is_flagged():
    text = (
        "id,title,stakeholders,prevalence_band,consequence_band,severity,mitigation,risk,refs\n"
        "x,Test issue,Candidate,2,3,2,1,M,key2024\n"
    )
    violations = validate_catalog(parse_catalog(text))
    assert any(v.rule == "severity-mismatch" for v in violations)


def test_mitigation_scale_violation_is_flagged():
    text = (
        "id,title,stakeholders,prevalence_band,consequence_band,severity,mitigation,risk,refs\n"
        "x,Test issue,Candidate,2,3,3,4,M,key2024\n"
    )
    violations = validate_catalog(parse_catalog(text))
    assert any(v.rule == "mitigation-scale" for v in violations)


def test_malformed_rows_report_line_numbers():
    text = (
        "id,title,stakeholders,prevalence_band,consequence_band,severity,mitigation,risk,refs\n"
        "ok,Fine,Candidate,2,2,2,1,M,key\n"
        "bad,Broken,Candidate,notanint,2,2,1,M,key\n"
    )
    with pytest.raises(CatalogFormatError) as err:
        parse_catalog(text)
    assert "line 3" in str(err.value)


def test_csv_report_round_trips_to_identical_records():
    records = load_shipped_catalog()
    again = parse_catalog(render_csv(records))
    assert again == records


def test_table_report_has_header_rule_and_all_rows():
    records = load_shipped_catalog()
    lines = render_table(records).strip().splitlines()
    assert len(lines) == 2 + 15
    assert lines[0].startswith("id")


def test_empty_catalog_renders_header_only():
    lines = render_report([], "csv").strip().splitlines()
    assert len(lines) == 1


def test_rendering_is_deterministic():
    records = load_shipped_catalog()
    assert render_report(records, "table") == render_report(records, "table")
    assert render_report(records, "csv") == render_report(records, "csv")


def test_unknown_format_rejected():
    with pytest.raises(ValueError):
        render_report([], "pdf")


def test_figures_render_to_files(tmp_path):
    records = load_shipped_catalog()
    paths = render_figures(records, tmp_path / "charts")
    assert len(paths) == 2
    for path in paths:
        assert path.exists() and path.stat().st_size > 0
