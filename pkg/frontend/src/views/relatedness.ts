/** Relatedness scoring screen. It deliberately shows only the two terms,
 * never the sentence, so the judgment stays context-free; the 0-10 integer
 * slider makes out-of-range scores impossible. */

import { ApiError, type ApiClient } from "../api.js";
import { clear, el, formatScore } from "../dom.js";
import type { RecordPayload } from "../types.js";

export interface RelatednessDeps {
  api: ApiClient;
  /** Annotator name to prefill; the field stays editable. */
  annotator: string;
  onSaved: (record: RecordPayload, annotator: string) => void;
  onConflict: (error: ApiError) => void;
  onBack: () => void;
}

export class RelatednessView {
  private readonly container: HTMLElement;
  private readonly deps: RelatednessDeps;
  private record: RecordPayload;

  constructor(container: HTMLElement, record: RecordPayload, deps: RelatednessDeps) {
    this.container = container;
    this.deps = deps;
    this.record = record;
    this.render();
  }

  private render(): void {
    clear(this.container);
    const record = this.record;
    const slider = el("input", {
      type: "range",
      min: 0,
      max: 10,
      step: 1,
      value: 5,
      "data-role": "score",
    });
    const sliderValue = el("output", { "data-role": "score-value" }, "5");
    slider.addEventListener("input", () => {
      sliderValue.textContent = slider.value;
    });
    const annotator = el("input", {
      type: "text",
      value: this.deps.annotator,
      placeholder: "annotator",
      "data-role": "annotator",
    });
    const message = el("p", { class: "message", "data-role": "message" });

    const submit = async () => {
      const name = annotator.value.trim();
      if (!name) {
        message.textContent = "Enter an annotator name first.";
        return;
      }
      try {
        const saved = await this.deps.api.postRelatedness(record.id, Number(slider.value), name);
        this.record = saved;
        message.textContent = `Saved: ${name} -> ${slider.value} (mean ${formatScore(saved.mean_relatedness)})`;
        this.deps.onSaved(saved, name);
      } catch (error) {
        if (error instanceof ApiError && error.isConflict) {
          this.deps.onConflict(error);
          return;
        }
        message.textContent = error instanceof Error ? error.message : String(error);
      }
    };

    this.container.append(
      el("h2", {}, "Relatedness"),
      el("p", { class: "hint" }, "How related are these two terms? Score without sentence context."),
      el(
        "div",
        { class: "term-pair" },
        el("span", { class: "term", "data-role": "term-a" }, record.pair[0].term),
        el("span", { class: "vs" }, "~"),
        el("span", { class: "term", "data-role": "term-b" }, record.pair[1].term),
      ),
      el("div", { class: "controls" }, slider, sliderValue),
      el(
        "div",
        { class: "controls" },
        el("label", {}, "Annotator: ", annotator),
        el("button", { "data-role": "submit-score", onclick: () => void submit() }, "Submit score"),
        el("button", { "data-role": "back", onclick: () => this.deps.onBack() }, "Back"),
      ),
      el(
        "p",
        { "data-role": "current-scores" },
        `Scores so far: ${Object.keys(record.relatedness_scores).length} (mean ${formatScore(record.mean_relatedness)})`,
      ),
      message,
    );
  }
}
