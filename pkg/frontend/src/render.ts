/**
 * Pure view functions: session state in, HTML string out. No DOM access
 * here, which keeps rendering testable in plain node.
 */

import { acceptEligible, type SessionState } from "./state.js";
import type { TablePayload } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function renderTable(table: TablePayload): string {
  const head = table.header.map((name) => `<th>${escapeHtml(name)}</th>`).join("");
  const body = table.rows
    .map((row) => `<tr>${row.map((cell) => `<td>${escapeHtml(cell)}</td>`).join("")}</tr>`)
    .join("");
  return `<table class="grid"><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table>`;
}

function renderAttempts(state: SessionState): string {
  if (state.attempts.length === 0) {
    return `<p class="hint">No attempts yet. Perturb the question so the model's prediction flips.</p>`;
  }
  const items = state.attempts
    .map((attempt) => {
      const badgeClass = attempt.badge === "FLIPPED" ? "badge flipped" : "badge unchanged";
      const prediction = attempt.result.prediction.map(escapeHtml).join(" | ");
      return `<li><span class="${badgeClass}">${attempt.badge}</span>` +
        `<span class="attempt-text">${escapeHtml(attempt.text)}</span>` +
        `<span class="attempt-pred">→ ${prediction}</span></li>`;
    })
    .join("");
  return `<ol class="attempts">${items}</ol>`;
}

export function render(state: SessionState): string {
  const banner = state.banner
    ? `<div class="banner" data-role="banner">${escapeHtml(state.banner)}` +
      `<button data-action="retry">Retry</button></div>`
    : "";

  if (state.phase === "loading") {
    return `${banner}<main class="panel"><p>Loading…</p></main>`;
  }
  if (state.phase === "done") {
    return `${banner}<main class="panel" data-role="summary">` +
      `<h2>Session complete</h2>` +
      `<p>${state.acceptedCount} perturbation(s) accepted.</p>` +
      `<p>Export the pairs from <code>/sessions/&lt;id&gt;/export</code>.</p></main>`;
  }
  if (state.phase === "error" || !state.item) {
    return `${banner}<main class="panel"><p>Could not reach the backend.</p></main>`;
  }

  const item = state.item;
  const gold = item.gold_answers
    ? `<p class="gold">Gold: ${item.gold_answers.map(escapeHtml).join(" | ")}</p>`
    : "";
  const notice = state.notice
    ? `<p class="notice" data-role="notice">${escapeHtml(state.notice)}</p>`
    : "";
  const disabled = state.busy ? "disabled" : "";
  const acceptDisabled = state.busy || !acceptEligible(state) ? "disabled" : "";

  return `${banner}<main class="panel" data-role="item">
<header>
  <span class="progress">Item ${item.position + 1} / ${item.total}</span>
  <span class="progress">${state.acceptedCount} accepted</span>
</header>
${renderTable(item.table)}
<p class="question">Original: <strong>${escapeHtml(item.question)}</strong></p>
<p class="prediction">Model answers
  <span class="badge orig" data-role="orig-prediction">${item.original_prediction.map(escapeHtml).join(" | ")}</span>
</p>
${gold}
<div class="attempt-box">
  <input data-role="draft" type="text" value="${escapeHtml(state.draft)}"
         placeholder="Type the perturbed question, Enter to test" ${disabled} />
  <button data-action="attempt" ${disabled}>Test (Enter)</button>
  <button data-action="accept" ${acceptDisabled}>Accept (Ctrl+A)</button>
  <button data-action="skip" ${disabled}>Skip (Ctrl+S)</button>
</div>
${notice}
${renderAttempts(state)}
</main>`;
}
