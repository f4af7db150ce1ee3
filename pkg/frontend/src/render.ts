/**
 * Pure HTML renderers.
 *
 * Every number and string shown to the user is taken verbatim from an API
 * response; nothing is computed or reformatted here beyond escaping. Each
 * renderer returns a markup string so the functions stay trivially testable
 * without a DOM.
 */

import type { DatasetSummary, Failure, PlanStep } from "./api.js";
import type { SessionState, TranscriptEntry } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function renderDatasetBadge(dataset: DatasetSummary): string {
  const name = escapeHtml(dataset.name);
  const id = escapeHtml(dataset.id);
  const size = escapeHtml(dataset.size);
  return (
    `<div class="dataset-badge">` +
    `<strong>${name}</strong> ` +
    `<span class="dataset-meta">${dataset.rows} rows, ${dataset.columns} columns, ` +
    `${size}, id ${id}</span>` +
    `</div>`
  );
}

export function renderProfile(profile: string): string {
  return `<pre class="profile">${escapeHtml(profile)}</pre>`;
}

export function renderPlanSteps(plan: readonly PlanStep[]): string {
  const label = plan.length === 1 ? "1 step" : `${plan.length} steps`;
  const items = plan
    .map(
      (step) =>
        `<li>${escapeHtml(step.rationale)}<br>` +
        `<code>${escapeHtml(step.op)}</code> ` +
        `<span class="step-result">${escapeHtml(step.result)}</span></li>`,
    )
    .join("");
  return (
    `<details class="plan"><summary>plan (${label})</summary>` +
    `<ol>${items}</ol></details>`
  );
}

export function renderFailure(failure: Failure): string {
  return (
    `<div class="failure">` +
    `<span class="failure-kind">${escapeHtml(failure.kind)}</span> ` +
    `${escapeHtml(failure.detail)}</div>`
  );
}

export function renderEntry(entry: TranscriptEntry): string {
  const parts = [`<div class="question">${escapeHtml(entry.question)}</div>`];
  if (entry.status === "pending") {
    parts.push(`<div class="pending">running</div>`);
  } else if (entry.status === "answered") {
    parts.push(renderPlanSteps(entry.plan));
    parts.push(`<div class="answer">${escapeHtml(entry.answerText)}</div>`);
  } else if (entry.failure !== null) {
    parts.push(renderFailure(entry.failure));
  }
  return `<article class="entry">${parts.join("")}</article>`;
}

export function renderTranscript(state: SessionState): string {
  return state.transcript.map(renderEntry).join("");
}
