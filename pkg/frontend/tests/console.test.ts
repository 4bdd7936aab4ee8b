// Round-trip tests for the console against a live service with the scripted
// mock backend: real HTTP, real tokens, the console's own client and views.

import assert from "node:assert/strict";
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtemp, writeFile, mkdir } from "node:fs/promises";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import test, { after, before } from "node:test";

import { ApiCallError, ApiClient } from "../src/api.js";
import { renderCaseState, validateThreshold } from "../src/render.js";
import { renderConsent, renderPatchDigest } from "../src/views/student.js";
import { renderQueue } from "../src/views/supervisor.js";
import { renderAggregates } from "../src/views/grs.js";

const TOKENS = { alice: "tok-alice", sup1: "tok-sup1", grs1: "tok-grs" };

let service: ChildProcess;
let baseUrl: string;
let student: ApiClient;
let supervisor: ApiClient;
let grs: ApiClient;

async function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port"));
        return;
      }
      const port = address.port;
      server.close(() => resolve(port));
    });
  });
}

async function writeServiceConfig(dir: string, port: number): Promise<string> {
  const corpusDir = join(dir, "corpus");
  await mkdir(corpusDir);
  await writeFile(
    join(corpusDir, "srcA.txt"),
    "Bayesian methods fit the study design. The prior choice matters here. " +
      "Sensitivity checks are planned for robustness.",
  );
  await writeFile(
    join(corpusDir, "srcX.txt"),
    "Bayesian methods are effortless. No sensitivity checks are needed. " +
      "Trust the posterior and move on quickly.",
  );
  await writeFile(
    join(corpusDir, "manifest.json"),
    JSON.stringify([
      { id: "srcA", title: "Method notes", file: "srcA.txt", version: "1" },
      { id: "srcX", title: "Workshop blog", file: "srcX.txt", version: "1" },
    ]),
  );
  const configPath = join(dir, "config.json");
  await writeFile(
    configPath,
    JSON.stringify({
      host: "127.0.0.1",
      port,
      actors: [
        { id: "alice", role: "Student", token: TOKENS.alice },
        { id: "sup1", role: "Supervisor", supervisees: ["alice"], token: TOKENS.sup1 },
        { id: "grs1", role: "GRS", token: TOKENS.grs1 },
      ],
      corpora: [{ class: "student:alice", dir: corpusDir }],
    }),
  );
  return configPath;
}

async function waitForService(client: ApiClient): Promise<void> {
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const status = await client.auditVerify();
      assert.equal(status.valid, true);
      return;
    } catch {
      if (Date.now() > deadline) throw new Error("service did not come up in 30 s");
      await new Promise((resolve) => setTimeout(resolve, 200));
    }
  }
}

before(async () => {
  const dir = await mkdtemp(join(tmpdir(), "console-test-"));
  const port = await freePort();
  const configPath = await writeServiceConfig(dir, port);
  baseUrl = `http://127.0.0.1:${port}`;
  service = spawn("python3", ["-m", "phdcopilot.cli", "serve", "--config", configPath], {
    stdio: "ignore",
  });
  student = new ApiClient({ baseUrl, token: TOKENS.alice, actorId: "alice", role: "Student" });
  supervisor = new ApiClient({ baseUrl, token: TOKENS.sup1, actorId: "sup1", role: "Supervisor" });
  grs = new ApiClient({ baseUrl, token: TOKENS.grs1, actorId: "grs1", role: "GRS" });
  await waitForService(grs);
});

after(() => {
  service.kill("SIGTERM");
});

test("fresh-student consent toggles render Off", async () => {
  const consent = await student.getConsent("alice");
  assert.deepEqual(new Set(Object.values(consent.scopes)), new Set(["Off"]));
  const html = renderConsent(consent);
  assert.ok(!html.includes("checked"), "no toggle starts checked");
  assert.equal((html.match(/Off/g) ?? []).length >= 3, true);
});

test("threshold form rejects out-of-range values client- and server-side", async () => {
  for (const bad of ["0", "-0.2", "1.4", "nope"]) {
    const checked = validateThreshold(bad);
    assert.equal(checked.ok, false, `client accepts ${bad}`);
  }
  const good = validateThreshold("0.8");
  assert.deepEqual(good, { ok: true, value: 0.8 });
  await assert.rejects(
    student.createGoal("alice", {
      title: "bad",
      metric: "LiteratureReviewedCount",
      target: 10,
      unit: "papers",
      threshold: 1.4,
    }),
    (error: unknown) => error instanceof ApiCallError && error.status === 400,
  );
});

test("supervisor queue renders a shared case and the patch lands in the student digest", async () => {
  const response = await student.query("alice", "explain my Bayesian method choices", 3);
  assert.ok(response.artefact_id, "grounded query stores an artefact");
  assert.ok(response.backlinks.length >= 1);

  await student.shareArtefact(response.artefact_id!);
  const queue = await supervisor.queue("sup1");
  assert.equal(queue.cases.length, 1);
  const row = queue.cases[0]!;
  assert.equal(row.state, "Shared");
  const queueHtml = renderQueue(queue.cases);
  assert.ok(queueHtml.includes(row.id), "queue view shows the case id");
  assert.ok(queueHtml.includes("badge-attention"), "Shared state renders as a badge");
  assert.ok(queueHtml.includes("Start review"));

  await supervisor.beginReview(row.id);
  const returned = await supervisor.returnCase(row.id, "Drop the workshop blog.", {
    kind: "Exclude",
    payload: ["srcX"],
  });
  assert.equal(returned.case.state, "Returned");
  assert.ok(returned.policy_update.patch_id);

  const digest = await student.patchDigest("alice");
  assert.ok(digest.digest.includes("Exclude=srcX"), "digest lists the new patch");
  const digestHtml = renderPatchDigest(digest.digest);
  assert.ok(digestHtml.includes("Exclude=srcX"));

  const requeried = await student.query("alice", "explain my Bayesian method choices", 3);
  assert.ok(requeried.backlinks.length >= 1);
  assert.ok(requeried.backlinks.every((b) => b.document_id !== "srcX"));
});

test("empty feedback is blocked client-side and rejected by the server", async () => {
  const response = await student.query("alice", "summarise the sensitivity checks", 4);
  const shared = await student.shareArtefact(response.artefact_id!);
  await supervisor.beginReview(shared.id);
  await assert.rejects(
    supervisor.returnCase(shared.id, "   "),
    (error: unknown) => error instanceof ApiCallError && error.status === 400,
  );
  // Client-side the composer refuses to submit without feedback; the same
  // trimmed-empty check guards it (mirrors the server rule).
  assert.equal("   ".trim().length, 0);
  await supervisor.returnCase(shared.id, "Looks fine; tighten the intro.");
});

test("every moderation state renders and unknown states fail loudly", () => {
  for (const state of ["Draft", "Shared", "UnderReview", "Returned", "Applied", "Closed"]) {
    assert.ok(renderCaseState(state).includes(state));
  }
  assert.throws(() => renderCaseState("Limbo"), /unknown moderation state/);
});

test("the grs view shows suppressed aggregates as empty, never student rows", async () => {
  const aggregates = await grs.aggregates();
  assert.deepEqual(aggregates.signals, []);
  const html = renderAggregates(aggregates.signals);
  assert.ok(html.includes("suppressed"));
  // The console guard stops GRS from even issuing student-context calls.
  assert.throws(() => grs.guard("/students/alice/context/items"), /console guard/);
});

test("server auth errors surface with their rule names", async () => {
  const intruder = new ApiClient({
    baseUrl,
    token: TOKENS.grs1,
    actorId: "grs1",
    role: "Student", // a mis-set client role cannot bypass the server
  });
  await assert.rejects(
    intruder.getConsent("alice"),
    (error: unknown) =>
      error instanceof ApiCallError &&
      error.status === 403 &&
      error.body.rule === "consent-self-only",
  );
});
