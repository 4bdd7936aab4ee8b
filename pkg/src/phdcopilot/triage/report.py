"""Triage report rendering: aligned text, CSV, and chart files.

Rendering is deterministic: rows keep catalog order and identical records
produce byte-identical output. The CSV form round-trips through the catalog
parser. Figures are side outputs written next to the delimited report.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .catalog import FIELDNAMES, IssueRecord

_TABLE_COLUMNS = (
    ("id", lambda r: r.id),
    ("title", lambda r: r.title),
    ("stakeholders", lambda r: "|".join(r.stakeholders)),
    ("P", lambda r: str(r.prevalence_band)),
    ("C", lambda r: str(r.consequence_band)),
    ("S", lambda r: str(r.severity)),
    ("mitigation", lambda r: str(r.mitigation)),
    ("risk", lambda r: r.risk.value),
)


def render_csv(records: list[IssueRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(FIELDNAMES)
    for r in records:
        writer.writerow(
            [
                r.id,
                r.title,
                "|".join(r.stakeholders),
                r.prevalence_band,
                r.consequence_band,
                r.severity,
                r.mitigation,
                r.risk.value,
                "|".join(r.refs),
            ]
        )
    return buffer.getvalue()


def render_table(records: list[IssueRecord]) -> str:
    headers = [name for name, _ in _TABLE_COLUMNS]
    rows = [[getter(r) for _, getter in _TABLE_COLUMNS] for r in records]
    widths = [
        max(len(headers[i]), *(len(row[i]) for row in rows)) if rows else len(headers[i])
        for i in range(len(headers))
    ]
    def fmt(cells: list[str]) -> str:
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(cells)).rstrip()

    lines = [fmt(headers), fmt(["-" * w for w in widths])]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines) + "\n"


def render_report(records: list[IssueRecord], fmt: str) -> str:
    if fmt == "csv":
        return render_csv(records)
    if fmt == "table":
        return render_table(records)
    raise ValueError(f"unknown report format: {fmt!r} (expected 'table' or 'csv')")


def render_figures(records: list[IssueRecord], out_dir: str | Path) -> list[Path]:
    """Write severity and mitigation charts as PNG files; returns the paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    ids = [r.id for r in records]
    sev = [r.severity for r in records]
    mit = [r.mitigation for r in records]

    fig, ax = plt.subplots(figsize=(10, 0.35 * max(len(records), 4) + 1.5))
    colors = {1: "#7fb285", 2: "#e3b23c", 3: "#c0392b"}
    ax.barh(ids, sev, color=[colors[s] for s in sev])
    ax.set_xlabel("severity (round-half-up mean of P and C bands)")
    ax.set_xticks([1, 2, 3])
    ax.invert_yaxis()
    ax.set_title("Issue severity")
    fig.tight_layout()
    severity_path = out_dir / "severity_by_issue.png"
    fig.savefig(severity_path, dpi=120)
    plt.close(fig)
    written.append(severity_path)

    fig, ax = plt.subplots(figsize=(6.5, 5.5))
    risk_marker = {"L": "o", "M": "s", "H": "^"}
    jitter = {rid: 0.04 * (i % 3 - 1) for i, rid in enumerate(ids)}
    for r in records:
        ax.scatter(
            r.mitigation + jitter[r.id],
            r.severity + jitter[r.id],
            marker=risk_marker[r.risk.value],
            s=70,
            alpha=0.8,
            color={"L": "#2c7fb8", "M": "#e3b23c", "H": "#c0392b"}[r.risk.value],
        )
    ax.set_xlabel("mitigation potential (0=None .. 3=High)")
    ax.set_ylabel("severity")
    ax.set_xticks([0, 1, 2, 3])
    ax.set_yticks([1, 2, 3])
    ax.set_title("Severity vs mitigability (marker/colour = introduced risk)")
    fig.tight_layout()
    scatter_path = out_dir / "severity_vs_mitigation.png"
    fig.savefig(scatter_path, dpi=120)
    plt.close(fig)
    written.append(scatter_path)
    return written
