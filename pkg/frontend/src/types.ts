// Wire types mirroring the service payloads one-to-one. The console never
// derives business state from these beyond presentation formatting.

export type Role = "Student" | "Supervisor" | "GRS";

export type CaseState =
  | "Draft"
  | "Shared"
  | "UnderReview"
  | "Returned"
  | "Applied"
  | "Closed";

export const CASE_STATES: readonly CaseState[] = [
  "Draft",
  "Shared",
  "UnderReview",
  "Returned",
  "Applied",
  "Closed",
];

export interface Backlink {
  document_id: string;
  start: number;
  end: number;
  document_version: string;
  quoted_text: string;
}

export interface QueryResponse {
  text: string;
  backlinks: Backlink[];
  route: string;
  bloom_level: string;
  artefact_id: string | null;
  plan_digest: string;
  agreement_ratio: number;
  contested: boolean;
  verified: boolean;
  awaiting_reply: boolean;
  trace: { steps: string[]; retrieved: string[]; samples: number; escalations: string[] };
}

export interface ModerationCase {
  id: string;
  artefact_id: string;
  student_id: string;
  supervisor_id: string;
  state: CaseState;
  shared_at: number | null;
  returned_at: number | null;
  closed_at: number | null;
  feedback: string | null;
  patch_id: string | null;
  history: CaseState[];
}

export interface Goal {
  id: string;
  student_id: string;
  title: string;
  metric: string;
  target: number;
  unit: string;
  threshold: number;
  release_rule: string;
  planned_sections: string[];
  created_at: number;
  edits: { at: number; field: string; old: string; new: string }[];
  completion?: number;
}

export interface ProgressSummary {
  id: string;
  goal_id: string;
  student_id: string;
  completion: number;
  narrative: string;
  artefact_links: string[];
  curated_by: string | null;
  released_to: string | null;
  released_at: number | null;
}

export interface ConsentScopes {
  scopes: Record<string, "On" | "Off">;
}

export interface PracticeItem {
  id: string;
  prompt_text: string;
  due_at: number;
  interval_index: number;
}

export interface AggregateSignal {
  cohort_key: string;
  metric: string;
  value: number;
  group_size: number;
}

export interface PolicyConflict {
  topic_key: string;
  a: { document_id: string; value: string; line: number };
  b: { document_id: string; value: string; line: number };
}

export interface PolicyDiffEntry {
  kind: "added" | "removed" | "changed";
  topic_key: string;
  before: string | null;
  after: string | null;
}

export interface PatchSpecPayload {
  kind: string;
  payload: string[];
  topic_key?: string;
  supersedes?: string;
}

export interface ApiError {
  code: string;
  rule: string;
  message: string;
}
