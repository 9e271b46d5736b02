/**
 * Render page models to HTML. Application HTML output is embedded verbatim —
 * that is the platform contract: applications produce the page's result
 * region. Everything else (names, descriptions, errors) is escaped.
 */

import type { IndexModel } from "./catalogue.js";
import type { FieldModel, RunFormModel } from "./forms.js";
import { runEnabled } from "./forms.js";
import type { RunOutcome } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderIndex(model: IndexModel): string {
  if (model.serverUnreachable) {
    return `<div class="banner error">The hub server is unreachable.</div>`;
  }
  if (model.empty) {
    return `<p class="empty-state">No applications match.</p>`;
  }
  const items = model.entries
    .map(
      (entry) => `
  <li class="application" data-name="${escapeHtml(entry.name)}" data-version="${escapeHtml(entry.version)}">
    <h3>${escapeHtml(entry.name)}</h3>
    <p>${escapeHtml(entry.short_description)}</p>
    <span class="tags">${entry.tags.map((t) => `<em>${escapeHtml(t)}</em>`).join(" ")}</span>
  </li>`,
    )
    .join("");
  return `<ul class="application-index">${items}</ul>`;
}

function renderField(field: FieldModel): string {
  const name = escapeHtml(field.spec.name);
  const description = escapeHtml(field.spec.description);
  const error = field.error ? `<span class="field-error">${escapeHtml(field.error)}</span>` : "";
  let control: string;
  switch (field.control) {
    case "checkbox":
      control = `<input type="checkbox" name="${name}"${field.rawInput === true ? " checked" : ""}>`;
      break;
    case "file-picker":
      control = `<input type="file" name="${name}">`;
      break;
    case "integer-field":
      control = `<input type="number" step="1" name="${name}" value="${escapeHtml(String(field.rawInput ?? ""))}">`;
      break;
    case "float-field":
      control = `<input type="number" step="any" name="${name}" value="${escapeHtml(String(field.rawInput ?? ""))}">`;
      break;
    default:
      control = `<input type="text" name="${name}" value="${escapeHtml(String(field.rawInput ?? ""))}">`;
  }
  return `<label class="field field-${field.control}">${name} — <small>${description}</small> ${control} ${error}</label>`;
}

export function renderRunPage(form: RunFormModel): string {
  const manifest = form.application;
  const fields = form.fields.map(renderField).join("\n");
  const disabled = runEnabled(form) ? "" : " disabled";
  return `
<section class="run-page">
  <h2>${escapeHtml(manifest.name)} <small class="version">${escapeHtml(manifest.version)}</small></h2>
  <p class="long-description">${escapeHtml(manifest.long_description)}</p>
  <form class="parameters">
${fields}
    <button class="run"${disabled}>Run</button>
  </form>
  <div class="result-region"></div>
</section>`;
}

export function renderOutcome(outcome: RunOutcome): string {
  const diagnostics = outcome.diagnostics
    ? `<details class="diagnostics"><summary>diagnostics</summary><pre>${escapeHtml(outcome.diagnostics)}</pre></details>`
    : "";
  if (outcome.kind === "html") {
    return `<div class="result-html">${outcome.html}</div>${diagnostics}`;
  }
  return (
    `<div class="result-file"><button class="save" data-file-name="${escapeHtml(outcome.fileName)}">` +
    `Save ${escapeHtml(outcome.fileName)} (${outcome.fileBytes.byteLength} bytes)</button></div>${diagnostics}`
  );
}

export function renderApplicationFailure(message: string, diagnostics: string): string {
  const details = diagnostics
    ? `<details class="diagnostics" open><summary>diagnostics</summary><pre>${escapeHtml(diagnostics)}</pre></details>`
    : "";
  return `<div class="result-error"><p>${escapeHtml(message)}</p>${details}</div>`;
}
