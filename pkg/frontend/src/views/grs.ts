// GRS console: policy corpus upload, conflict and change views, and the
// consented aggregate dashboard. No student-level data appears here.

import type { AggregateSignal, PolicyConflict, PolicyDiffEntry } from "../types.js";
import { emptyNote, escapeHtml, section, table } from "../render.js";

export function renderPolicyUpload(documents: { id: string; title: string; version: string }[]): string {
  const existing = documents.length
    ? table(
        ["id", "title", "version"],
        documents.map((d) => [escapeHtml(d.id), escapeHtml(d.title), escapeHtml(d.version)]),
      )
    : emptyNote("No policy documents ingested yet.");
  return section(
    "Policy corpus",
    existing +
      `<form id="policy-upload">` +
      `<input name="doc-id" placeholder="document id" required>` +
      `<input name="doc-version" placeholder="version" value="1">` +
      `<textarea name="doc-body" placeholder="Document text; clause lines use topic-key: value" required></textarea>` +
      `<button type="submit">Ingest version</button>` +
      `</form>`,
    "policy",
  );
}

export function renderConflicts(conflicts: PolicyConflict[], warnings: string[]): string {
  const warningBlock = warnings.length
    ? `<ul class="warnings">${warnings.map((w) => `<li>${escapeHtml(w)}</li>`).join("")}</ul>`
    : "";
  if (!conflicts.length) {
    return section("Clause conflicts", warningBlock + emptyNote("No conflicting clauses."), "conflicts");
  }
  const rows = conflicts.map((c) => [
    escapeHtml(c.topic_key),
    `${escapeHtml(c.a.document_id)}:${c.a.line} = ${escapeHtml(c.a.value)}`,
    `${escapeHtml(c.b.document_id)}:${c.b.line} = ${escapeHtml(c.b.value)}`,
  ]);
  return section("Clause conflicts", warningBlock + table(["topic", "clause A", "clause B"], rows), "conflicts");
}

export function renderDiff(entries: PolicyDiffEntry[]): string {
  if (!entries.length) {
    return section("Latest change trace", emptyNote("No differences between the last two versions."), "diff");
  }
  const rows = entries.map((e) => [
    escapeHtml(e.kind),
    escapeHtml(e.topic_key),
    escapeHtml(e.before ?? "—"),
    escapeHtml(e.after ?? "—"),
  ]);
  return section("Latest change trace", table(["change", "topic", "before", "after"], rows), "diff");
}

export function renderAggregates(signals: AggregateSignal[]): string {
  if (!signals.length) {
    return section(
      "Aggregate signals",
      emptyNote("No consented signals. Groups below the anonymity minimum are suppressed entirely."),
      "aggregates",
    );
  }
  const rows = signals.map((s) => [
    escapeHtml(s.cohort_key),
    escapeHtml(s.metric),
    s.metric.includes("rate") ? `${Math.round(s.value * 100)}%` : s.value.toFixed(2),
    escapeHtml(s.group_size),
  ]);
  return section("Aggregate signals", table(["cohort", "metric", "value", "group size"], rows), "aggregates");
}
