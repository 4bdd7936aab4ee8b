// Typed client over the service HTTP surface. The server stays authoritative;
// the role guard here only stops the console from issuing calls the signed-in
// role can never make.

import type {
  AggregateSignal,
  ApiError,
  ConsentScopes,
  Goal,
  ModerationCase,
  PatchSpecPayload,
  PolicyConflict,
  PolicyDiffEntry,
  PracticeItem,
  ProgressSummary,
  QueryResponse,
  Role,
} from "./types.js";

export class ApiCallError extends Error {
  constructor(
    public status: number,
    public body: ApiError,
  ) {
    super(`${status} ${body.code}${body.rule ? ` (rule: ${body.rule})` : ""}`);
  }
}

const ROLE_PREFIXES: Record<Role, string[]> = {
  Student: ["/students/", "/artefacts/", "/cases/", "/policy/search", "/audit/"],
  Supervisor: ["/supervisors/", "/cases/", "/students/", "/policy/search", "/audit/"],
  GRS: ["/grs/", "/policy/search", "/audit/"],
};

export interface Session {
  baseUrl: string;
  token: string;
  actorId: string;
  role: Role;
}

export class ApiClient {
  constructor(private session: Session) {}

  get actorId(): string {
    return this.session.actorId;
  }

  get role(): Role {
    return this.session.role;
  }

  guard(path: string): void {
    const allowed = ROLE_PREFIXES[this.session.role];
    if (!allowed.some((prefix) => path.startsWith(prefix))) {
      throw new Error(`console guard: role ${this.session.role} never calls ${path}`);
    }
  }

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    this.guard(path);
    const response = await fetch(this.session.baseUrl + path, {
      method,
      headers: {
        "Content-Type": "application/json",
        Authorization: `Bearer ${this.session.token}`,
      },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiCallError(response.status, payload as ApiError);
    }
    return payload as T;
  }

  // Student workspace -------------------------------------------------------

  query(studentId: string, text: string, seed?: number): Promise<QueryResponse> {
    return this.call("POST", `/students/${studentId}/query`, { text, seed });
  }

  getGoals(studentId: string): Promise<{ goals: Goal[] }> {
    return this.call("GET", `/students/${studentId}/goals`);
  }

  createGoal(studentId: string, goal: Record<string, unknown>): Promise<Goal> {
    return this.call("POST", `/students/${studentId}/goals`, goal);
  }

  editGoal(studentId: string, goalId: string, field: string, value: unknown): Promise<Goal> {
    return this.call("PATCH", `/students/${studentId}/goals/${goalId}`, { field, value });
  }

  getConsent(studentId: string): Promise<ConsentScopes> {
    return this.call("GET", `/students/${studentId}/consent`);
  }

  setConsent(studentId: string, scope: string, state: "On" | "Off"): Promise<unknown> {
    return this.call("POST", `/students/${studentId}/consent`, { scope, state });
  }

  shareArtefact(artefactId: string): Promise<ModerationCase> {
    return this.call("POST", `/artefacts/${artefactId}/share`);
  }

  acknowledgeCase(caseId: string): Promise<ModerationCase> {
    return this.call("POST", `/cases/${caseId}/acknowledge`);
  }

  closeCase(caseId: string): Promise<ModerationCase> {
    return this.call("POST", `/cases/${caseId}/close`);
  }

  patchDigest(studentId: string): Promise<{ digest: string }> {
    return this.call("GET", `/students/${studentId}/patches`);
  }

  practiceDue(studentId: string): Promise<{ items: PracticeItem[] }> {
    return this.call("GET", `/students/${studentId}/practice/due`);
  }

  reviewPractice(studentId: string, itemId: string, success: boolean): Promise<PracticeItem> {
    return this.call("POST", `/students/${studentId}/practice/${itemId}/review`, { success });
  }

  getSummaries(studentId: string): Promise<{ summaries: ProgressSummary[] }> {
    return this.call("GET", `/students/${studentId}/summaries`);
  }

  curateSummary(studentId: string, summaryId: string, narrative?: string): Promise<ProgressSummary> {
    return this.call("POST", `/students/${studentId}/summaries/${summaryId}/curate`, {
      narrative,
    });
  }

  releaseSummary(studentId: string, summaryId: string): Promise<ProgressSummary> {
    return this.call("POST", `/students/${studentId}/summaries/${summaryId}/release`);
  }

  // Supervisor console ------------------------------------------------------

  queue(supervisorId: string): Promise<{ cases: ModerationCase[] }> {
    return this.call("GET", `/supervisors/${supervisorId}/queue`);
  }

  beginReview(caseId: string): Promise<ModerationCase> {
    return this.call("POST", `/cases/${caseId}/review`);
  }

  returnCase(
    caseId: string,
    feedback: string,
    patch?: PatchSpecPayload,
  ): Promise<{ case: ModerationCase; policy_update: { id: string; patch_id: string | null } }> {
    return this.call("POST", `/cases/${caseId}/return`, { feedback, patch });
  }

  supervisorSummaries(supervisorId: string): Promise<{ summaries: ProgressSummary[] }> {
    return this.call("GET", `/supervisors/${supervisorId}/summaries`);
  }

  // GRS console --------------------------------------------------------------

  aggregates(cohort?: string): Promise<{ signals: AggregateSignal[] }> {
    const suffix = cohort ? `?cohort=${encodeURIComponent(cohort)}` : "";
    return this.call("GET", `/grs/aggregates${suffix}`);
  }

  policyDocuments(): Promise<{ documents: { id: string; title: string; version: string }[] }> {
    return this.call("GET", `/grs/policy`);
  }

  uploadPolicy(documents: { id: string; body: string; title?: string; version?: string }[]): Promise<unknown> {
    return this.call("POST", `/grs/policy`, { documents });
  }

  policyConflicts(): Promise<{ conflicts: PolicyConflict[]; warnings: string[] }> {
    return this.call("GET", `/grs/policy/conflicts`);
  }

  policyDiff(): Promise<{ entries: PolicyDiffEntry[] }> {
    return this.call("GET", `/grs/policy/diff`);
  }

  // Shared -------------------------------------------------------------------

  policySearch(q: string, k = 4): Promise<{ results: { passage: string; score: number }[] }> {
    return this.call("GET", `/policy/search?q=${encodeURIComponent(q)}&k=${k}`);
  }

  auditVerify(): Promise<{ valid: boolean; broken_at: number | null; status: string }> {
    return this.call("GET", `/audit/verify`);
  }
}
