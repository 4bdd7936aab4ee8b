// Student workspace: chat with the assistant, goals and thresholds, consent
// toggles, share-for-moderation, the patch digest, and the practice-due list.

import type {
  ConsentScopes,
  Goal,
  PracticeItem,
  ProgressSummary,
  QueryResponse,
} from "../types.js";
import { emptyNote, escapeHtml, section, table } from "../render.js";

export function renderChat(history: { query: string; response: QueryResponse }[]): string {
  if (!history.length) {
    return section("Assistant", emptyNote("Ask a question to start the private loop."), "chat");
  }
  const turns = history
    .map(({ query, response }) => {
      const backlinks = response.backlinks
        .map(
          (b) =>
            `<li class="backlink">${escapeHtml(b.document_id)}@${escapeHtml(b.document_version)} ` +
            `<q>${escapeHtml(b.quoted_text.slice(0, 120))}</q></li>`,
        )
        .join("");
      const flags = [
        response.contested ? '<span class="badge badge-attention">contested</span>' : "",
        response.verified ? '<span class="badge badge-ok">verified</span>' : "",
        response.awaiting_reply ? '<span class="badge badge-info">awaiting your reply</span>' : "",
      ].join(" ");
      const share =
        response.artefact_id === null
          ? ""
          : `<button class="share" data-artefact="${escapeHtml(response.artefact_id)}">Share for moderation</button>`;
      return (
        `<article class="turn">` +
        `<p class="query">${escapeHtml(query)}</p>` +
        `<p class="route">${escapeHtml(response.route)} / ${escapeHtml(response.bloom_level)} ${flags}</p>` +
        `<p class="answer">${escapeHtml(response.text)}</p>` +
        (backlinks ? `<ul class="backlinks">${backlinks}</ul>` : "") +
        share +
        `</article>`
      );
    })
    .join("");
  return section("Assistant", turns, "chat");
}

export function renderGoals(goals: Goal[]): string {
  const form =
    `<form id="goal-form">` +
    `<input name="title" placeholder="Goal title" required>` +
    `<select name="metric">` +
    `<option>LiteratureReviewedCount</option><option>ExperimentsAnalysedCount</option><option>DraftCompleteness</option>` +
    `</select>` +
    `<input name="target" type="number" min="1" value="10">` +
    `<input name="threshold" placeholder="threshold (0, 1]" value="0.8">` +
    `<select name="release_rule"><option>ManualOnly</option><option>AutoSendOnCross</option></select>` +
    `<button type="submit">Set goal</button>` +
    `<span class="form-error" id="goal-form-error"></span>` +
    `</form>`;
  if (!goals.length) {
    return section("Goals and thresholds", form + emptyNote("No goals yet."), "goals");
  }
  const rows = goals.map((g) => [
    escapeHtml(g.title),
    escapeHtml(g.metric),
    `${Math.round((g.completion ?? 0) * 100)}%`,
    escapeHtml(g.threshold),
    escapeHtml(g.release_rule),
    `<button class="edit-threshold" data-goal="${escapeHtml(g.id)}">Edit threshold</button>`,
  ]);
  return section(
    "Goals and thresholds",
    form + table(["title", "metric", "completion", "threshold", "release", ""], rows),
    "goals",
  );
}

export function renderConsent(consent: ConsentScopes): string {
  const rows = Object.entries(consent.scopes).map(([scope, state]) => [
    escapeHtml(scope),
    `<label class="toggle"><input type="checkbox" class="consent-toggle" data-scope="${escapeHtml(scope)}" ${
      state === "On" ? "checked" : ""
    }> ${escapeHtml(state)}</label>`,
  ]);
  return section(
    "Consent",
    table(["scope", "state"], rows) +
      `<p class="note">Everything starts Off. Toggles take effect immediately and releases re-check at the instant of release.</p>`,
    "consent",
  );
}

export function renderPatchDigest(digest: string): string {
  return section(
    "Rules shaping my assistant",
    `<pre class="digest">${escapeHtml(digest)}</pre>`,
    "patch-digest",
  );
}

export function renderPracticeDue(items: PracticeItem[], now: number): string {
  if (!items.length) {
    return section("Practice due", emptyNote("Nothing due. New items appear after you learn something."), "practice");
  }
  const rows = items.map((item) => [
    escapeHtml(item.prompt_text),
    item.due_at <= now ? '<span class="badge badge-attention">due</span>' : escapeHtml(item.due_at),
    `<button class="practice-pass" data-item="${escapeHtml(item.id)}">Got it</button>` +
      `<button class="practice-fail" data-item="${escapeHtml(item.id)}">Missed it</button>`,
  ]);
  return section("Practice due", table(["prompt", "due", ""], rows), "practice");
}

export function renderSummaryCuration(summaries: ProgressSummary[]): string {
  const pending = summaries.filter((s) => s.released_at === null);
  if (!pending.length) {
    return "";
  }
  const banners = pending
    .map((s) => {
      const action =
        s.curated_by === null
          ? `<button class="curate" data-summary="${escapeHtml(s.id)}">Review and confirm</button>`
          : `<button class="release" data-summary="${escapeHtml(s.id)}">Release to supervisor</button>`;
      return (
        `<div class="banner">` +
        `<strong>Progress summary ready to curate</strong>` +
        `<p>${escapeHtml(s.narrative)}</p>` +
        `<p>${s.artefact_links.length} linked artefacts; nothing releases without your confirmation.</p>` +
        action +
        `</div>`
      );
    })
    .join("");
  return section("Progress summaries", banners, "summaries");
}
