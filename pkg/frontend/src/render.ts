// Small HTML helpers. Views are pure functions from fetched payloads to
// markup strings, so they are testable without a browser.

import { CASE_STATES, type CaseState } from "./types.js";

export function escapeHtml(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

const STATE_BADGES: Record<CaseState, string> = {
  Draft: "badge-muted",
  Shared: "badge-attention",
  UnderReview: "badge-active",
  Returned: "badge-info",
  Applied: "badge-ok",
  Closed: "badge-muted",
};

export function renderCaseState(state: string): string {
  if (!CASE_STATES.includes(state as CaseState)) {
    throw new Error(`unknown moderation state: ${state}`);
  }
  const css = STATE_BADGES[state as CaseState];
  return `<span class="badge ${css}">${escapeHtml(state)}</span>`;
}

export function validateThreshold(raw: string): { ok: true; value: number } | { ok: false; error: string } {
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    return { ok: false, error: "threshold must be a number" };
  }
  if (!(value > 0 && value <= 1)) {
    return { ok: false, error: "threshold must be greater than 0 and at most 1" };
  }
  return { ok: true, value };
}

export function section(title: string, body: string, id = ""): string {
  const idAttr = id ? ` id="${escapeHtml(id)}"` : "";
  return `<section class="panel"${idAttr}><h2>${escapeHtml(title)}</h2>${body}</section>`;
}

export function table(headers: string[], rows: string[][]): string {
  const head = headers.map((h) => `<th>${escapeHtml(h)}</th>`).join("");
  const body = rows
    .map((cells) => `<tr>${cells.map((c) => `<td>${c}</td>`).join("")}</tr>`)
    .join("");
  return `<table><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table>`;
}

export function emptyNote(text: string): string {
  return `<p class="empty">${escapeHtml(text)}</p>`;
}
