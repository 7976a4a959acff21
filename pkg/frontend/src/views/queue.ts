/** Work queue: one row per record, with the first term highlighted in its
 * sentence and a status badge. Rows only reflect the last poll; edits happen
 * in the annotate and relatedness screens. */

import { clear, el, formatScore } from "../dom.js";
import type { WorkQueueItem } from "../types.js";

export interface QueueActions {
  onAnnotate: (item: WorkQueueItem) => void;
  onRelatedness: (item: WorkQueueItem) => void;
}

export function statusBadge(status: string): HTMLElement {
  return el("span", { class: `badge badge-${status}`, "data-role": "status-badge" }, status);
}

function sentenceWithHighlight(item: WorkQueueItem): HTMLElement {
  const cell = el("span", { class: "sentence", "data-role": "queue-sentence" });
  const span = item.firstTermSpan;
  if (span && span[0] >= 0 && span[1] <= item.sentenceText.length && span[0] < span[1]) {
    cell.append(
      item.sentenceText.slice(0, span[0]),
      el("mark", { "data-role": "first-term" }, item.sentenceText.slice(span[0], span[1])),
      item.sentenceText.slice(span[1]),
    );
  } else {
    cell.append(item.sentenceText);
  }
  return cell;
}

export function renderQueue(container: HTMLElement, items: WorkQueueItem[], actions: QueueActions): void {
  clear(container);
  container.append(el("h2", {}, "Work queue"));
  if (items.length === 0) {
    container.append(el("p", { "data-role": "queue-empty" }, "No records yet."));
    return;
  }
  const body = el("tbody");
  for (const item of items) {
    body.append(
      el(
        "tr",
        { "data-role": "queue-row", "data-record": item.id },
        el("td", {}, item.id),
        el("td", {}, statusBadge(item.status)),
        el("td", {}, sentenceWithHighlight(item)),
        el("td", {}, item.secondTerm || "-"),
        el("td", { class: "num" }, formatScore(item.meanRelatedness)),
        el("td", { class: "num", "data-role": "version" }, `v${item.version}`),
        el(
          "td",
          {},
          el("button", { "data-role": "open-annotate", onclick: () => actions.onAnnotate(item) }, "Annotate"),
          el("button", { "data-role": "open-relatedness", onclick: () => actions.onRelatedness(item) }, "Relatedness"),
        ),
      ),
    );
  }
  container.append(
    el(
      "table",
      { class: "queue" },
      el(
        "thead",
        {},
        el(
          "tr",
          {},
          el("th", {}, "Record"),
          el("th", {}, "Status"),
          el("th", {}, "Sentence"),
          el("th", {}, "Second term"),
          el("th", {}, "Relatedness"),
          el("th", {}, "Version"),
          el("th", {}, "Actions"),
        ),
      ),
      body,
    ),
  );
}
