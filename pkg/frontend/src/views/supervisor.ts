// Supervisor console: the review queue, the feedback-and-patch composer, and
// the released-summary feed.

import type { ModerationCase, ProgressSummary } from "../types.js";
import { emptyNote, escapeHtml, renderCaseState, section, table } from "../render.js";

const PATCH_KINDS = [
  "RequireSources",
  "PreferMethod",
  "ScopeLimit",
  "Tone",
  "Exclude",
  "QuestioningMode",
];

export function renderQueue(cases: ModerationCase[]): string {
  if (!cases.length) {
    return section("Review queue", emptyNote("No shared artefacts waiting."), "queue");
  }
  const rows = cases.map((c) => {
    const action =
      c.state === "Shared"
        ? `<button class="begin-review" data-case="${escapeHtml(c.id)}">Start review</button>`
        : `<button class="open-composer" data-case="${escapeHtml(c.id)}">Write feedback</button>`;
    return [
      escapeHtml(c.id),
      escapeHtml(c.student_id),
      escapeHtml(c.artefact_id),
      renderCaseState(c.state),
      action,
    ];
  });
  return section("Review queue", table(["case", "student", "artefact", "state", ""], rows), "queue");
}

export function renderComposer(caseId: string): string {
  const kinds = PATCH_KINDS.map((k) => `<option>${k}</option>`).join("");
  return section(
    "Feedback and behaviour patch",
    `<form id="composer" data-case="${escapeHtml(caseId)}">` +
      `<textarea name="feedback" placeholder="Feedback for the student (required)" required></textarea>` +
      `<fieldset><legend>Optional patch</legend>` +
      `<label><input type="checkbox" name="attach-patch"> attach a patch</label>` +
      `<select name="patch-kind">${kinds}</select>` +
      `<input name="patch-payload" placeholder="payload (e.g. source id, tone, AskAlways)">` +
      `<input name="patch-topic" placeholder="topic scope (blank = all topics)">` +
      `</fieldset>` +
      `<button type="submit">Return to student</button>` +
      `<span class="form-error" id="composer-error"></span>` +
      `</form>`,
    "composer",
  );
}

export function renderSummaryFeed(summaries: ProgressSummary[]): string {
  if (!summaries.length) {
    return section("Released summaries", emptyNote("No summaries released yet."), "summary-feed");
  }
  const rows = summaries.map((s) => [
    escapeHtml(s.student_id),
    `${Math.round(s.completion * 100)}%`,
    escapeHtml(s.narrative),
    escapeHtml(s.artefact_links.join(", ")),
  ]);
  return section(
    "Released summaries",
    table(["student", "completion", "narrative", "linked artefacts"], rows),
    "summary-feed",
  );
}
