// Console runtime: session bootstrap, role-specific mounting, and polling.
// All state shown on screen is fetched; the only client-side logic is form
// validation mirrored by the server.

import { ApiCallError, ApiClient, type Session } from "./api.js";
import { escapeHtml, validateThreshold } from "./render.js";
import type { QueryResponse, Role } from "./types.js";
import { renderAggregates, renderConflicts, renderDiff, renderPolicyUpload } from "./views/grs.js";
import {
  renderChat,
  renderConsent,
  renderGoals,
  renderPatchDigest,
  renderPracticeDue,
  renderSummaryCuration,
} from "./views/student.js";
import { renderComposer, renderQueue, renderSummaryFeed } from "./views/supervisor.js";

const POLL_INTERVAL_MS = Number(
  new URLSearchParams(window.location.search).get("poll") ?? "4000",
);

interface ConsoleState {
  client: ApiClient;
  chat: { query: string; response: QueryResponse }[];
  composerCase: string | null;
}

let state: ConsoleState | null = null;
let pollTimer: number | undefined;

function mountError(error: unknown): void {
  const box = document.getElementById("errors")!;
  const message =
    error instanceof ApiCallError
      ? `${error.body.code}${error.body.rule ? ` — rule ${error.body.rule}` : ""}: ${error.body.message}`
      : String(error);
  box.innerHTML = `<div class="error">${escapeHtml(message)}</div>`;
  window.setTimeout(() => (box.innerHTML = ""), 6000);
}

async function refresh(): Promise<void> {
  if (!state) return;
  const root = document.getElementById("view")!;
  try {
    root.innerHTML = await renderForRole(state);
    wireHandlers(root);
  } catch (error) {
    mountError(error);
  }
}

async function renderForRole(s: ConsoleState): Promise<string> {
  const me = s.client.actorId;
  if (s.client.role === "Student") {
    const [goals, consent, digest, practice, summaries] = await Promise.all([
      s.client.getGoals(me),
      s.client.getConsent(me),
      s.client.patchDigest(me),
      s.client.practiceDue(me),
      s.client.getSummaries(me),
    ]);
    return (
      renderChat(s.chat) +
      `<form id="query-form"><input name="q" placeholder="Ask the assistant" required>` +
      `<button type="submit">Send</button></form>` +
      renderSummaryCuration(summaries.summaries) +
      renderGoals(goals.goals) +
      renderConsent(consent) +
      renderPatchDigest(digest.digest) +
      renderPracticeDue(practice.items, Date.now() / 1000)
    );
  }
  if (s.client.role === "Supervisor") {
    const [queue, summaries] = await Promise.all([
      s.client.queue(me),
      s.client.supervisorSummaries(me),
    ]);
    const composer = s.composerCase ? renderComposer(s.composerCase) : "";
    return renderQueue(queue.cases) + composer + renderSummaryFeed(summaries.summaries);
  }
  const [documents, conflicts, diff, aggregates] = await Promise.all([
    s.client.policyDocuments(),
    s.client.policyConflicts(),
    s.client.policyDiff(),
    s.client.aggregates(),
  ]);
  return (
    renderPolicyUpload(documents.documents) +
    renderConflicts(conflicts.conflicts, conflicts.warnings) +
    renderDiff(diff.entries) +
    renderAggregates(aggregates.signals)
  );
}

function wireHandlers(root: HTMLElement): void {
  if (!state) return;
  const s = state;
  const me = s.client.actorId;

  root.querySelector<HTMLFormElement>("#query-form")?.addEventListener("submit", async (event) => {
    event.preventDefault();
    const input = (event.target as HTMLFormElement).elements.namedItem("q") as HTMLInputElement;
    try {
      const response = await s.client.query(me, input.value);
      s.chat.push({ query: input.value, response });
      await refresh();
    } catch (error) {
      mountError(error);
    }
  });

  root.querySelectorAll<HTMLButtonElement>(".share").forEach((button) =>
    button.addEventListener("click", async () => {
      try {
        await s.client.shareArtefact(button.dataset.artefact!);
        await refresh();
      } catch (error) {
        mountError(error);
      }
    }),
  );

  root.querySelector<HTMLFormElement>("#goal-form")?.addEventListener("submit", async (event) => {
    event.preventDefault();
    const form = event.target as HTMLFormElement;
    const errorBox = root.querySelector("#goal-form-error")!;
    const raw = (form.elements.namedItem("threshold") as HTMLInputElement).value;
    const checked = validateThreshold(raw);
    if (!checked.ok) {
      errorBox.textContent = checked.error;
      return;
    }
    try {
      await s.client.createGoal(me, {
        title: (form.elements.namedItem("title") as HTMLInputElement).value,
        metric: (form.elements.namedItem("metric") as HTMLSelectElement).value,
        target: Number((form.elements.namedItem("target") as HTMLInputElement).value),
        unit: "items",
        threshold: checked.value,
        release_rule: (form.elements.namedItem("release_rule") as HTMLSelectElement).value,
      });
      await refresh();
    } catch (error) {
      mountError(error);
    }
  });

  root.querySelectorAll<HTMLInputElement>(".consent-toggle").forEach((toggle) =>
    toggle.addEventListener("change", async () => {
      // No optimistic flips for consent: wait for the server, then re-fetch.
      toggle.disabled = true;
      try {
        await s.client.setConsent(me, toggle.dataset.scope!, toggle.checked ? "On" : "Off");
      } catch (error) {
        mountError(error);
      } finally {
        await refresh();
      }
    }),
  );

  root.querySelectorAll<HTMLButtonElement>(".curate").forEach((button) =>
    button.addEventListener("click", async () => {
      try {
        await s.client.curateSummary(me, button.dataset.summary!);
        await refresh();
      } catch (error) {
        mountError(error);
      }
    }),
  );

  root.querySelectorAll<HTMLButtonElement>(".release").forEach((button) =>
    button.addEventListener("click", async () => {
      try {
        await s.client.releaseSummary(me, button.dataset.summary!);
        await refresh();
      } catch (error) {
        mountError(error);
      }
    }),
  );

  root.querySelectorAll<HTMLButtonElement>(".begin-review").forEach((button) =>
    button.addEventListener("click", async () => {
      try {
        await s.client.beginReview(button.dataset.case!);
        s.composerCase = button.dataset.case!;
        await refresh();
      } catch (error) {
        mountError(error);
      }
    }),
  );

  root.querySelectorAll<HTMLButtonElement>(".open-composer").forEach((button) =>
    button.addEventListener("click", async () => {
      s.composerCase = button.dataset.case!;
      await refresh();
    }),
  );

  root.querySelector<HTMLFormElement>("#composer")?.addEventListener("submit", async (event) => {
    event.preventDefault();
    const form = event.target as HTMLFormElement;
    const errorBox = root.querySelector("#composer-error")!;
    const feedback = (form.elements.namedItem("feedback") as HTMLTextAreaElement).value.trim();
    if (!feedback) {
      errorBox.textContent = "feedback is required to return a case";
      return;
    }
    const attach = (form.elements.namedItem("attach-patch") as HTMLInputElement).checked;
    const patch = attach
      ? {
          kind: (form.elements.namedItem("patch-kind") as HTMLSelectElement).value,
          payload: [(form.elements.namedItem("patch-payload") as HTMLInputElement).value],
          topic_key: (form.elements.namedItem("patch-topic") as HTMLInputElement).value || "*",
        }
      : undefined;
    try {
      await s.client.returnCase(form.dataset.case!, feedback, patch);
      s.composerCase = null;
      await refresh();
    } catch (error) {
      mountError(error);
    }
  });

  root.querySelector<HTMLFormElement>("#policy-upload")?.addEventListener("submit", async (event) => {
    event.preventDefault();
    const form = event.target as HTMLFormElement;
    try {
      await s.client.uploadPolicy([
        {
          id: (form.elements.namedItem("doc-id") as HTMLInputElement).value,
          version: (form.elements.namedItem("doc-version") as HTMLInputElement).value,
          body: (form.elements.namedItem("doc-body") as HTMLTextAreaElement).value,
        },
      ]);
      await refresh();
    } catch (error) {
      mountError(error);
    }
  });

  root.querySelectorAll<HTMLButtonElement>(".practice-pass, .practice-fail").forEach((button) =>
    button.addEventListener("click", async () => {
      const success = button.classList.contains("practice-pass");
      try {
        await s.client.reviewPractice(me, button.dataset.item!, success);
        await refresh();
      } catch (error) {
        mountError(error);
      }
    }),
  );
}

function startSession(event: Event): void {
  event.preventDefault();
  const form = event.target as HTMLFormElement;
  const session: Session = {
    baseUrl: (form.elements.namedItem("base-url") as HTMLInputElement).value.replace(/\/$/, ""),
    token: (form.elements.namedItem("token") as HTMLInputElement).value,
    actorId: (form.elements.namedItem("actor") as HTMLInputElement).value,
    role: (form.elements.namedItem("role") as HTMLSelectElement).value as Role,
  };
  state = { client: new ApiClient(session), chat: [], composerCase: null };
  document.getElementById("session")!.classList.add("hidden");
  document.getElementById("workspace")!.classList.remove("hidden");
  void refresh();
  if (pollTimer !== undefined) window.clearInterval(pollTimer);
  pollTimer = window.setInterval(() => void refresh(), POLL_INTERVAL_MS);
}

document.getElementById("session-form")?.addEventListener("submit", startSession);
