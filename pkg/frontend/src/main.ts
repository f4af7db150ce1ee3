/**
 * DOM wiring for the console page.
 *
 * All state lives in one SessionState value; every event handler computes
 * the next state and re-renders. Upload problems show inline next to the
 * picker; query failures become transcript entries so they are never lost.
 */

import { ApiClient, ApiError, type Failure } from "./api.js";
import {
  beginQuery,
  initialState,
  selectDataset,
  settleQuery,
  type SessionState,
} from "./state.js";
import { renderDatasetBadge, renderProfile, renderTranscript } from "./render.js";

function failureOf(error: unknown): Failure {
  if (error instanceof ApiError) {
    return error.failure;
  }
  const detail = error instanceof Error ? error.message : String(error);
  return { kind: "network-error", detail };
}

function byId<T extends HTMLElement>(id: string): T {
  const element = document.getElementById(id);
  if (element === null) {
    throw new Error(`missing element #${id}`);
  }
  return element as T;
}

export function wirePage(client: ApiClient): void {
  const fileInput = byId<HTMLInputElement>("csv-file");
  const uploadButton = byId<HTMLButtonElement>("upload");
  const uploadError = byId<HTMLElement>("upload-error");
  const badge = byId<HTMLElement>("dataset-badge");
  const profileBox = byId<HTMLElement>("profile");
  const questionInput = byId<HTMLInputElement>("question");
  const submitButton = byId<HTMLButtonElement>("submit");
  const queryError = byId<HTMLElement>("query-error");
  const transcriptBox = byId<HTMLElement>("transcript");

  let state: SessionState = initialState();

  function redraw(): void {
    badge.innerHTML = state.dataset === null ? "" : renderDatasetBadge(state.dataset);
    profileBox.innerHTML = state.profile === "" ? "" : renderProfile(state.profile);
    transcriptBox.innerHTML = renderTranscript(state);
    submitButton.disabled = state.pendingIndex !== null;
  }

  uploadButton.addEventListener("click", () => {
    void (async () => {
      uploadError.textContent = "";
      const file = fileInput.files?.[0];
      if (file === undefined) {
        uploadError.textContent = "choose a CSV file first";
        return;
      }
      const content = await file.text();
      if (content === "") {
        uploadError.textContent = "the file is empty";
        return;
      }
      try {
        const dataset = await client.uploadDataset(file.name, content);
        const profile = await client.fetchProfile(dataset.id);
        state = selectDataset(state, dataset, profile.profile);
      } catch (error) {
        const failure = failureOf(error);
        uploadError.textContent = `${failure.kind}: ${failure.detail}`;
      }
      redraw();
    })();
  });

  submitButton.addEventListener("click", () => {
    void (async () => {
      queryError.textContent = "";
      const began = beginQuery(state, questionInput.value);
      if (!began.ok) {
        queryError.textContent = began.reason;
        return;
      }
      state = began.state;
      redraw();
      const dataset = state.dataset;
      if (dataset === null) {
        return;
      }
      try {
        const response = await client.query(dataset.id, questionInput.value);
        state = settleQuery(state, {
          kind: "answer",
          plan: response.plan,
          answerText: response.answer_text,
        });
      } catch (error) {
        state = settleQuery(state, { kind: "failure", failure: failureOf(error) });
      }
      questionInput.value = "";
      redraw();
    })();
  });

  redraw();
}

if (typeof document !== "undefined" && document.getElementById("transcript") !== null) {
  wirePage(new ApiClient(""));
}
