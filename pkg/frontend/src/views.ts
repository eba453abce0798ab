/**
 * Pure render functions returning HTML strings. No fetching, no label or
 * stat computation here: every number shown comes from an API payload.
 * Labels always render as rank number plus CWE name.
 */

import type { CatalogEntry, DatasetStats, RoundPayload, TaskView } from "./api.js";
import { parseLabel } from "./grammar.js";

export type CatalogByRank = Map<number, CatalogEntry>;

export function catalogByRank(entries: CatalogEntry[]): CatalogByRank {
  return new Map(entries.map((e) => [e.rank, e]));
}

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function labelWithName(rank: number, catalog: CatalogByRank): string {
  const entry = catalog.get(rank);
  const name = entry ? `${entry.cwe_id} ${entry.name}` : "unknown";
  return `${rank} (${esc(name)})`;
}

export function renderLabelChain(labels: string, catalog: CatalogByRank): string {
  const chain = parseLabel(labels);
  return chain.map((r) => labelWithName(r, catalog)).join(" leads to ");
}

function renderRound(title: string, round: RoundPayload | null, catalog: CatalogByRank): string {
  if (!round) {
    return "";
  }
  const labels = round.labels
    ? renderLabelChain(round.labels, catalog)
    : `<em>${esc(round.action)}</em>`;
  return `<div class="round"><span class="round-title">${esc(title)}</span> ` +
    `${esc(round.annotator)}: ${round.labels ? labels : labels}</div>`;
}

export function renderNvdLabels(nvdLabels: string[], entries: CatalogEntry[]): string {
  if (nvdLabels.length === 0) {
    return '<span class="nvd none">no NVD labels</span>';
  }
  const byId = new Map(entries.map((e) => [e.cwe_id, e]));
  return nvdLabels
    .map((id) => {
      const entry = byId.get(id);
      const text = entry ? `${entry.rank} (${id} ${entry.name})` : `${id} (outside Top 25)`;
      return `<span class="nvd">${esc(text)}</span>`;
    })
    .join(" ");
}

export function renderSuggestions(
  ranking: [number, number][] | null,
  catalog: CatalogByRank,
  topK = 5,
): string {
  if (!ranking || ranking.length === 0) {
    return '<div class="suggestions none">no model suggestions</div>';
  }
  const rows = ranking.slice(0, topK).map(([rank, score], i) => {
    return `<li><kbd>${rank}</kbd> ${esc(labelWithName(rank, catalog))} ` +
      `<span class="score">${score.toFixed(4)}</span>` +
      (i === 0 ? ' <span class="top1">top suggestion</span>' : "") +
      "</li>";
  });
  return `<ol class="suggestions">${rows.join("")}</ol>`;
}

export function renderTask(
  task: TaskView,
  entries: CatalogEntry[],
  annotator: string,
): string {
  const catalog = catalogByRank(entries);
  return [
    `<article class="task" data-version="${task.version}" data-cve="${esc(task.cve_id)}">`,
    `<h2>${esc(task.cve_id)} <span class="status">${esc(task.status)}</span></h2>`,
    task.title ? `<p class="title">${esc(task.title)}</p>` : "",
    `<p class="description">${esc(task.description)}</p>`,
    `<section><h3>NVD labels</h3>${renderNvdLabels(task.nvd_labels, entries)}</section>`,
    renderRound("Round 1", task.round1, catalog),
    renderRound("Round 2", task.round2, catalog),
    renderRound("Adjudication", task.adjudication, catalog),
    `<section><h3>Model suggestions</h3>${renderSuggestions(task.model_ranking, catalog)}</section>`,
    `<p class="hint">You are <strong>${esc(annotator)}</strong>. ` +
      "Type a rank 1-25 or a chain like 20-14 and press Enter; " +
      "<kbd>a</kbd> agree, <kbd>u</kbd> unmappable.</p>",
    "</article>",
  ].join("\n");
}

export function renderDashboard(stats: DatasetStats, entries: CatalogEntry[]): string {
  const catalog = catalogByRank(entries);
  const pending = Object.entries(stats.pending)
    .map(([who, n]) => `<li>${esc(who)}: <strong>${n}</strong> pending</li>`)
    .join("");
  const counts = Object.entries(stats.per_label_counts)
    .map(([rank, n]) => [parseInt(rank, 10), n] as [number, number])
    .filter(([, n]) => n > 0)
    .sort((a, b) => a[0] - b[0]);
  const maxCount = Math.max(1, ...counts.map(([, n]) => n));
  const bars = counts
    .map(([rank, n]) => {
      const width = Math.round((n / maxCount) * 100);
      return `<div class="bar-row"><span class="bar-label">${esc(
        labelWithName(rank, catalog),
      )}</span><div class="bar" style="width:${width}%"></div><span class="bar-count">${n}</span></div>`;
    })
    .join("");
  const agreement =
    stats.agreement_with_nvd === null
      ? "n/a"
      : `${(stats.agreement_with_nvd * 100).toFixed(1)}%`;
  return [
    '<section class="dashboard">',
    `<p class="totals">total <strong>${stats.total}</strong> ` +
      `(single <strong>${stats.single}</strong>, causal <strong>${stats.causal}</strong>)</p>`,
    `<p class="agreement">agreement with NVD: <strong>${agreement}</strong></p>`,
    `<p class="conflicts">adjudication queue: <strong>${stats.adjudication_queue}</strong></p>`,
    `<ul class="pending">${pending}</ul>`,
    `<div class="bars">${bars || '<p class="none">no finalized labels yet</p>'}</div>`,
    "</section>",
  ].join("\n");
}

export function renderBanner(kind: "info" | "error", message: string): string {
  return `<div class="banner ${kind}">${esc(message)}</div>`;
}
