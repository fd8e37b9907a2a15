import type { InferResponse, SessionState, TriState } from "./types.js";

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

// Display formatting only; the numbers themselves come from the service.
function prob(value: number): string {
  return value.toFixed(4);
}

function days(value: number): string {
  return value.toFixed(1);
}

export function renderReport(
  response: InferResponse,
  labels: Record<string, string> = {},
): string {
  const rows = Object.entries(response.posteriors).sort((a, b) => b[1] - a[1]);
  const { decision } = response;
  const bars = rows
    .map(([id, p]) => {
      const marker =
        decision.switch_threshold !== null && id === decision.threshold_disease
          ? `<span class="threshold-marker" style="left: ${decision.switch_threshold * 100}%"` +
            ` title="treatment switch threshold ${prob(decision.switch_threshold)}"></span>`
          : "";
      return (
        `<li class="posterior-row" data-disease="${esc(id)}">` +
        `<span class="disease-label">${esc(labels[id] ?? id)}</span>` +
        `<span class="bar-track">` +
        `<span class="bar-fill" style="width: ${p * 100}%"></span>${marker}` +
        `</span>` +
        `<span class="posterior-value">${prob(p)}</span>` +
        `</li>`
      );
    })
    .join("");

  const morbidity = Object.entries(decision.expected_morbidity)
    .map(([treatment, d]) => `<dt>${esc(treatment)}</dt><dd>${days(d)} days</dd>`)
    .join("");

  return (
    `<section class="report">` +
    `<ol class="posterior-list">${bars}</ol>` +
    `<div class="decision">` +
    `<span class="recommendation-badge" data-treatment="${esc(decision.recommendation)}">` +
    `${esc(decision.recommendation)} (margin ${days(decision.margin)} days)` +
    `</span>` +
    `<dl class="morbidity">${morbidity}</dl>` +
    `</div>` +
    `</section>`
  );
}

export function renderBanner(state: SessionState): string {
  if (state.error) {
    return `<div class="banner error" role="alert">${esc(state.error)}</div>`;
  }
  if (state.pending) {
    return `<div class="banner pending">updating&hellip;</div>`;
  }
  return "";
}

const TRI_LABEL: Record<TriState, string> = {
  present: "present",
  absent: "absent",
  unknown: "unknown",
};

export function renderSymptomRow(
  id: string,
  label: string,
  value: TriState,
  which: "first" | "second",
): string {
  return (
    `<li class="symptom-row">` +
    `<button type="button" class="tri-state" data-symptom="${esc(id)}"` +
    ` data-which="${which}" data-value="${value}"` +
    ` aria-label="${esc(label)}: ${TRI_LABEL[value]}">` +
    `<span class="symptom-label">${esc(label)}</span>` +
    `<span class="tri-value">${TRI_LABEL[value]}</span>` +
    `</button>` +
    `</li>`
  );
}
