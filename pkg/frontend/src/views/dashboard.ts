/** Read-only dashboard over /stats/summary: outcome counts, percentages and
 * origin splits, plus progress counts. Shows a banner while the service is
 * unreachable and keeps the last good numbers on screen. */

import { clear, el, formatPct } from "../dom.js";
import type { SummaryDto } from "../types.js";

export interface DashboardState {
  summary: SummaryDto | null;
  unreachable: boolean;
}

function splitCell(split: { dolce_pct: number; custom_pct: number }): string {
  return `${formatPct(split.dolce_pct)} / ${formatPct(split.custom_pct)}`;
}

export function renderDashboard(container: HTMLElement, state: DashboardState): void {
  clear(container);
  container.append(el("h2", {}, "Dashboard"));
  if (state.unreachable) {
    container.append(
      el("div", { class: "banner", "data-role": "unreachable-banner" }, "Service unreachable; retrying..."),
    );
  }
  const s = state.summary;
  if (s === null) {
    container.append(el("p", { "data-role": "dashboard-empty" }, "No summary loaded yet."));
    return;
  }
  const rows = [
    { label: "Direct", count: s.direct.count, pct: s.direct.pct, split: splitCell(s.direct.split) },
    { label: "Composite", count: s.composite.count, pct: s.composite.pct, split: splitCell(s.composite.split) },
    { label: "Unclassified", count: s.unclassified.count, pct: s.unclassified.pct, split: "-" },
  ];
  const body = el("tbody");
  for (const row of rows) {
    body.append(
      el(
        "tr",
        { "data-role": "summary-row", "data-outcome": row.label.toLowerCase() },
        el("td", {}, row.label),
        el("td", { class: "num", "data-role": "count" }, String(row.count)),
        el("td", { class: "num", "data-role": "pct" }, formatPct(row.pct)),
        el("td", { class: "num", "data-role": "split" }, row.split),
      ),
    );
  }
  body.append(
    el(
      "tr",
      { class: "total", "data-role": "summary-total" },
      el("td", {}, "Total"),
      el("td", { class: "num" }, String(s.total)),
      el("td", { class: "num" }, s.total > 0 ? "100.00" : "0.00"),
      el("td", { class: "num" }, "-"),
    ),
  );
  container.append(
    el(
      "table",
      { class: "summary" },
      el(
        "thead",
        {},
        el(
          "tr",
          {},
          el("th", {}, "Outcome"),
          el("th", {}, "Count"),
          el("th", {}, "%"),
          el("th", {}, "DOLCE / custom %"),
        ),
      ),
      body,
    ),
    el(
      "p",
      { "data-role": "progress" },
      `${s.total} classified, ${s.pending} pending`,
    ),
  );
}
