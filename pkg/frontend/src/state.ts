/**
 * Session state for the console.
 *
 * The state is a plain immutable value: reducers return new objects and
 * never mutate. The transcript is append-only in submission order; entries
 * settle in place when their response arrives, so a slow answer can never
 * reorder or drop history. At most one query is in flight at a time.
 */

import type { DatasetSummary, Failure, PlanStep } from "./api.js";

export interface TranscriptEntry {
  readonly question: string;
  readonly status: "pending" | "answered" | "failed";
  readonly plan: readonly PlanStep[];
  readonly answerText: string;
  readonly failure: Failure | null;
}

export interface SessionState {
  readonly dataset: DatasetSummary | null;
  readonly profile: string;
  readonly transcript: readonly TranscriptEntry[];
  readonly pendingIndex: number | null;
}

export type BeginResult =
  | { readonly ok: true; readonly state: SessionState }
  | { readonly ok: false; readonly reason: string };

export function initialState(): SessionState {
  return { dataset: null, profile: "", transcript: [], pendingIndex: null };
}

export function selectDataset(
  state: SessionState,
  dataset: DatasetSummary,
  profile: string,
): SessionState {
  return { ...state, dataset, profile };
}

/**
 * Validate and record a new question. Returns the reason instead of a new
 * state when the question must not be sent at all: no dataset yet, a blank
 * question, or a query still running.
 */
export function beginQuery(state: SessionState, question: string): BeginResult {
  if (state.dataset === null) {
    return { ok: false, reason: "upload and select a dataset first" };
  }
  if (state.pendingIndex !== null) {
    return { ok: false, reason: "a query is already running" };
  }
  if (question.trim() === "") {
    return { ok: false, reason: "question must not be empty" };
  }
  const entry: TranscriptEntry = {
    question,
    status: "pending",
    plan: [],
    answerText: "",
    failure: null,
  };
  return {
    ok: true,
    state: {
      ...state,
      transcript: [...state.transcript, entry],
      pendingIndex: state.transcript.length,
    },
  };
}

export type QueryOutcome =
  | { readonly kind: "answer"; readonly plan: readonly PlanStep[]; readonly answerText: string }
  | { readonly kind: "failure"; readonly failure: Failure };

/** Settle the pending entry with its answer or failure, in place. */
export function settleQuery(state: SessionState, outcome: QueryOutcome): SessionState {
  const index = state.pendingIndex;
  if (index === null) {
    return state;
  }
  const transcript = state.transcript.map((entry, i) => {
    if (i !== index) {
      return entry;
    }
    if (outcome.kind === "answer") {
      return {
        ...entry,
        status: "answered" as const,
        plan: outcome.plan,
        answerText: outcome.answerText,
      };
    }
    return { ...entry, status: "failed" as const, failure: outcome.failure };
  });
  return { ...state, transcript, pendingIndex: null };
}
