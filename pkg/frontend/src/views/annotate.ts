/** Annotation screen: pick the second term by click-drag over the sentence,
 * assign senses/classes from the alignment table, choose a candidate
 * relation (server order, described on hover), then save a direct link, a
 * composite chain built with live dry-run validation, or an unclassified
 * reason. All writes carry the record version; conflicts surface as a
 * reload prompt. */

import {
  ApiError,
  assignmentBody,
  type ApiClient,
  type AssignmentBody,
  type LinkBody,
  type MentionBody,
} from "../api.js";
import { clear, el } from "../dom.js";
import { normalizeTerm, tokenize } from "../text.js";
import { statusBadge } from "./queue.js";
import {
  POS_VALUES,
  REASON_CODES,
  type Candidate,
  type ChainValidateResponse,
  type Direction,
  type InventoryDoc,
  type Pos,
  type ReasonCode,
  type RecordPayload,
  type SenseOption,
  type TokenSpan,
  type Violation,
} from "../types.js";

interface MentionDraft {
  term: string;
  span: [number, number] | null;
  assignedClass: string | null;
  senseId: string | null;
  pos: Pos;
  senses: SenseOption[];
}

interface ChainRowDraft {
  sourceTerm: string;
  sourceClass: string;
  relation: string;
  direction: Direction;
  targetTerm: string;
  targetClass: string;
}

type AssignmentKind = "direct" | "composite" | "unclassified";

export interface AnnotateDeps {
  api: ApiClient;
  inventory: InventoryDoc;
  onSaved: (record: RecordPayload) => void;
  onBack: () => void;
}

export class AnnotateView {
  private readonly container: HTMLElement;
  private readonly deps: AnnotateDeps;
  private record!: RecordPayload;
  private tokens: TokenSpan[] = [];
  private drafts!: [MentionDraft, MentionDraft];
  private candidates: Candidate[] = [];
  private candidatesNote = "";
  private kind: AssignmentKind = "direct";
  private directRelation = "";
  private directDirection: Direction = "forward";
  private directViolations: Violation[] = [];
  private needsOverride = false;
  private override = false;
  private justification = "";
  private chain: ChainRowDraft[] = [];
  private chainVerdict: ChainValidateResponse | null = null;
  private chainSeq = 0;
  private reason: ReasonCode = REASON_CODES[0];
  private note = "";
  private conflict: ApiError | null = null;
  private message = "";
  private dragAnchor: number | null = null;

  constructor(container: HTMLElement, deps: AnnotateDeps) {
    this.container = container;
    this.deps = deps;
  }

  async load(recordId: string): Promise<void> {
    const record = await this.deps.api.record(recordId);
    let tokens: TokenSpan[];
    try {
      tokens = (await this.deps.api.sentence(record.sentence)).tokens;
    } catch {
      tokens = tokenize(record.sentence_text);
    }
    this.record = record;
    this.tokens = tokens;
    this.resetFromRecord();
    this.render();
    await this.refreshCandidates();
  }

  private resetFromRecord(): void {
    const record = this.record;
    this.drafts = [this.draftOf(0), this.draftOf(1)];
    this.conflict = null;
    this.directViolations = [];
    this.needsOverride = false;
    this.override = false;
    this.justification = "";
    this.chainVerdict = null;
    const a = record.assignment;
    if (a?.kind === "direct") {
      this.kind = "direct";
      this.directRelation = a.link.relation;
      this.directDirection = a.link.direction;
    } else if (a?.kind === "composite") {
      this.kind = "composite";
      this.chain = a.chain.map((link) => ({
        sourceTerm: link.source.term,
        sourceClass: link.source.assigned_class ?? "",
        relation: link.relation,
        direction: link.direction,
        targetTerm: link.target.term,
        targetClass: link.target.assigned_class ?? "",
      }));
    } else if (a?.kind === "unclassified") {
      this.kind = "unclassified";
      this.reason = a.reason;
      this.note = a.note ?? "";
    }
    // No assignment on the record: keep whatever the annotator is drafting.
  }

  private draftOf(index: 0 | 1): MentionDraft {
    const mention = this.record.pair[index];
    return {
      term: mention.term,
      span: mention.span,
      assignedClass: mention.assigned_class,
      senseId: mention.sense_id,
      pos: "noun",
      senses: [],
    };
  }

  private mentionBody(index: 0 | 1): MentionBody {
    const d = this.drafts[index];
    return { term: d.term, span: d.span, assigned_class: d.assignedClass, sense_id: d.senseId };
  }

  /** Full mention for chain endpoints, bare term for intermediates. */
  private chainMention(term: string, cls: string): MentionBody {
    for (const index of [0, 1] as const) {
      const d = this.drafts[index];
      if (d.term && normalizeTerm(term) === normalizeTerm(d.term)) return this.mentionBody(index);
    }
    return { term, assigned_class: cls || null };
  }

  private chainBodies(): LinkBody[] {
    return this.chain.map((row) => ({
      source: this.chainMention(row.sourceTerm, row.sourceClass),
      relation: row.relation,
      direction: row.direction,
      target: this.chainMention(row.targetTerm, row.targetClass),
    }));
  }

  // -- server round-trips -----------------------------------------------------

  private async refreshCandidates(): Promise<void> {
    const [a, b] = this.drafts;
    if (!a.assignedClass || !b.assignedClass) {
      this.candidates = [];
      this.candidatesNote = "Assign a class to both terms to list candidate relations.";
      this.renderCandidates();
      return;
    }
    try {
      const response = await this.deps.api.candidates(a.assignedClass, b.assignedClass);
      this.candidates = response.candidates;
      this.candidatesNote = response.candidates.length ? "" : "No relation admits this class pair.";
    } catch (error) {
      this.candidates = [];
      this.candidatesNote = error instanceof Error ? error.message : String(error);
    }
    this.renderCandidates();
  }

  private async fetchSenses(index: 0 | 1): Promise<void> {
    const draft = this.drafts[index];
    if (!draft.term) return;
    try {
      const response = await this.deps.api.alignment(normalizeTerm(draft.term), draft.pos);
      draft.senses = response.senses;
    } catch (error) {
      draft.senses = [];
      this.message = error instanceof Error ? error.message : String(error);
    }
    this.render();
    await this.refreshCandidates();
  }

  private async runChainValidation(): Promise<void> {
    const seq = ++this.chainSeq;
    this.chainVerdict = null;
    try {
      const verdict = await this.deps.api.validateChain(this.record.id, this.chainBodies());
      if (seq !== this.chainSeq) return;
      this.chainVerdict = verdict;
    } catch (error) {
      if (seq !== this.chainSeq) return;
      this.message = error instanceof Error ? error.message : String(error);
    }
    this.render();
  }

  private async applyPair(): Promise<void> {
    await this.patch({ version: this.record.version, pair: [this.mentionBody(0), this.mentionBody(1)] });
  }

  private async saveAssignment(): Promise<void> {
    let assignment: AssignmentBody;
    if (this.kind === "direct") {
      if (!this.directRelation) {
        this.message = "Pick a relation first.";
        this.render();
        return;
      }
      assignment = assignmentBody({
        kind: "direct",
        link: {
          source: { ...this.record.pair[0], ...this.mentionBody(0), sentence: this.record.sentence },
          relation: this.directRelation,
          direction: this.directDirection,
          target: { ...this.record.pair[1], ...this.mentionBody(1), sentence: this.record.sentence },
        },
        override: this.override,
        justification: this.justification.trim() || null,
      });
    } else if (this.kind === "composite") {
      assignment = { kind: "composite", chain: this.chainBodies() };
    } else {
      assignment = { kind: "unclassified", reason: this.reason, note: this.note.trim() || null };
    }
    await this.patch({
      version: this.record.version,
      pair: [this.mentionBody(0), this.mentionBody(1)],
      assignment,
    });
  }

  private async patch(body: {
    version: number;
    pair?: [MentionBody, MentionBody];
    assignment?: AssignmentBody | null;
  }): Promise<void> {
    try {
      const saved = await this.deps.api.patchRecord(this.record.id, body);
      this.record = saved;
      this.resetFromRecord();
      this.message = `Saved (now v${saved.version}).`;
      this.render();
      await this.refreshCandidates();
      this.deps.onSaved(saved);
    } catch (error) {
      if (error instanceof ApiError && error.isConflict) {
        this.conflict = error;
      } else if (error instanceof ApiError && error.isValidationFailure) {
        this.directViolations = error.violations;
        if (this.kind === "direct" && error.violations.some((v) => v.rule === "signature")) {
          this.needsOverride = true;
        }
        this.message = "Save rejected; see violations.";
      } else {
        this.message = error instanceof Error ? error.message : String(error);
      }
      this.render();
    }
  }

  // -- rendering ----------------------------------------------------------------

  private render(): void {
    clear(this.container);
    const record = this.record;
    this.container.append(
      el(
        "div",
        { class: "view-head" },
        el("h2", {}, `Annotate ${record.id}`),
        statusBadge(record.status),
        el("span", { "data-role": "version" }, `v${record.version}`),
        el("button", { "data-role": "back", onclick: () => this.deps.onBack() }, "Back"),
      ),
    );
    if (this.conflict) {
      const expected = this.conflict.expected ?? "?";
      const actual = this.conflict.actual ?? "?";
      this.container.append(
        el(
          "div",
          { class: "banner", "data-role": "conflict" },
          `Record changed on the server (you sent v${expected}, server has v${actual}). Reload to continue.`,
          el("button", { "data-role": "reload", onclick: () => void this.load(record.id) }, "Reload"),
        ),
      );
    }
    this.container.append(this.sentencePanel(), this.pairPanel());
    this.container.append(el("ul", { class: "candidates", "data-role": "candidates" }));
    this.renderCandidates();
    this.container.append(this.assignmentPanel());
    this.container.append(el("p", { class: "message", "data-role": "message" }, this.message));
  }

  private sentencePanel(): HTMLElement {
    const text = this.record.sentence_text;
    const first = this.drafts[0].span;
    const second = this.drafts[1].span;
    const panel = el("div", { class: "sentence", "data-role": "sentence" });
    const inSpan = (token: TokenSpan, span: [number, number] | null) =>
      span !== null && token.start >= span[0] && token.end <= span[1];
    let cursor = 0;
    this.tokens.forEach((token, idx) => {
      if (token.start > cursor) panel.append(text.slice(cursor, token.start));
      const classes = ["tok"];
      if (inSpan(token, first)) classes.push("first-term");
      if (inSpan(token, second)) classes.push("second-term");
      const node = el(
        "span",
        {
          class: classes.join(" "),
          "data-role": inSpan(token, first) ? "first-term" : inSpan(token, second) ? "second-term" : "tok",
          "data-idx": idx,
          onmousedown: (event) => {
            event.preventDefault();
            this.dragAnchor = idx;
          },
          onmouseup: () => this.finishDrag(idx),
        },
        token.surface,
      );
      panel.append(node);
      cursor = token.end;
    });
    if (cursor < text.length) panel.append(text.slice(cursor));
    return el(
      "div",
      { class: "panel" },
      el("h3", {}, "Sentence"),
      el("p", { class: "hint" }, "Click-drag across tokens to select the second term."),
      panel,
    );
  }

  private finishDrag(idx: number): void {
    const anchor = this.dragAnchor ?? idx;
    this.dragAnchor = null;
    const [from, to] = anchor <= idx ? [anchor, idx] : [idx, anchor];
    const firstTok = this.tokens[from];
    const lastTok = this.tokens[to];
    if (!firstTok || !lastTok) return;
    const span: [number, number] = [firstTok.start, lastTok.end];
    const draft = this.drafts[1];
    draft.span = span;
    draft.term = this.record.sentence_text.slice(span[0], span[1]);
    draft.assignedClass = null;
    draft.senseId = null;
    draft.senses = [];
    this.render();
    void this.fetchSenses(1);
  }

  private pairPanel(): HTMLElement {
    const panel = el("div", { class: "panel" }, el("h3", {}, "Term pair"));
    for (const index of [0, 1] as const) {
      panel.append(this.mentionEditor(index));
    }
    panel.append(
      el(
        "button",
        { "data-role": "apply-pair", onclick: () => void this.applyPair() },
        "Apply pair to record",
      ),
    );
    return panel;
  }

  private mentionEditor(index: 0 | 1): HTMLElement {
    const draft = this.drafts[index];
    const posSelect = el("select", { "data-role": `pos-${index}` });
    for (const pos of POS_VALUES) {
      posSelect.append(el("option", { value: pos, ...(pos === draft.pos ? { selected: true } : {}) }, pos));
    }
    posSelect.addEventListener("change", () => {
      draft.pos = posSelect.value as Pos;
      void this.fetchSenses(index);
    });
    const senseBox = el("div", { class: "senses", "data-role": `senses-${index}` });
    for (const sense of draft.senses) {
      const checked = sense.sense_id === draft.senseId && sense.class === draft.assignedClass;
      const input = el("input", {
        type: "radio",
        name: `sense-${index}`,
        value: sense.sense_id,
        "data-role": `sense-option-${index}`,
        "data-class": sense.class,
        ...(checked ? { checked: true } : {}),
      });
      input.addEventListener("change", () => {
        draft.senseId = sense.sense_id;
        draft.assignedClass = sense.class;
        this.render();
        void this.refreshCandidates();
      });
      senseBox.append(
        el("label", { class: "sense" }, input, ` ${sense.sense_id} -> ${sense.class}`,
          sense.gloss ? el("span", { class: "gloss" }, ` (${sense.gloss})`) : null),
      );
    }
    return el(
      "div",
      { class: "mention", "data-role": `mention-${index}` },
      el("div", {},
        el("strong", { "data-role": `term-${index}` }, draft.term || "(not selected)"),
        " ",
        el("span", { class: "cls", "data-role": `class-${index}` }, draft.assignedClass ?? "no class"),
      ),
      el("label", {}, "Part of speech: ", posSelect),
      el(
        "button",
        { "data-role": `lookup-${index}`, onclick: () => void this.fetchSenses(index) },
        "Look up senses",
      ),
      senseBox,
    );
  }

  private renderCandidates(): void {
    const list = this.container.querySelector<HTMLElement>("[data-role=candidates]");
    if (!list) return;
    clear(list);
    if (this.candidatesNote) {
      list.append(el("li", { class: "hint", "data-role": "candidates-note" }, this.candidatesNote));
    }
    for (const candidate of this.candidates) {
      const pick = el(
        "button",
        {
          "data-role": "candidate",
          "data-relation": candidate.relation,
          "data-direction": candidate.direction,
          title: `${candidate.description} Example: ${candidate.example}`,
          onclick: () => {
            this.kind = "direct";
            this.directRelation = candidate.relation;
            this.directDirection = candidate.direction;
            this.render();
          },
        },
        `${candidate.label} (${candidate.origin}, ${candidate.direction})`,
      );
      const item = el("li", {}, pick);
      if (candidate.relation === this.directRelation && candidate.direction === this.directDirection) {
        item.setAttribute("class", "selected");
      }
      list.append(item);
    }
  }

  private assignmentPanel(): HTMLElement {
    const tabs = el(
      "div",
      { class: "tabs" },
      ...(["direct", "composite", "unclassified"] as const).map((kind) =>
        el(
          "button",
          {
            "data-role": `tab-${kind}`,
            class: this.kind === kind ? "tab active" : "tab",
            onclick: () => {
              this.kind = kind;
              this.render();
              if (kind === "composite" && this.chain.length >= 1) void this.runChainValidation();
            },
          },
          kind,
        ),
      ),
    );
    const panel = el("div", { class: "panel" }, el("h3", {}, "Assignment"), tabs);
    if (this.kind === "direct") panel.append(this.directPanel());
    else if (this.kind === "composite") panel.append(this.compositePanel());
    else panel.append(this.unclassifiedPanel());
    return panel;
  }

  private violationsList(violations: Violation[]): HTMLElement {
    const list = el("ul", { class: "violations", "data-role": "violations" });
    for (const violation of violations) {
      list.append(
        el(
          "li",
          { "data-rule": violation.rule },
          `${violation.rule} @ ${violation.entity}: ${violation.message}`,
        ),
      );
    }
    return list;
  }

  private directPanel(): HTMLElement {
    const relationSelect = el("select", { "data-role": "direct-relation" });
    relationSelect.append(el("option", { value: "" }, "(pick a relation)"));
    for (const relation of this.deps.inventory.relations) {
      relationSelect.append(
        el(
          "option",
          { value: relation.id, ...(relation.id === this.directRelation ? { selected: true } : {}) },
          `${relation.id} [${relation.domain} -> ${relation.range}]`,
        ),
      );
    }
    relationSelect.addEventListener("change", () => {
      this.directRelation = relationSelect.value;
    });
    const directionSelect = el("select", { "data-role": "direct-direction" });
    for (const direction of ["forward", "inverse"] as const) {
      directionSelect.append(
        el(
          "option",
          { value: direction, ...(direction === this.directDirection ? { selected: true } : {}) },
          direction,
        ),
      );
    }
    directionSelect.addEventListener("change", () => {
      this.directDirection = directionSelect.value as Direction;
    });

    const overrideBox = el("input", {
      type: "checkbox",
      "data-role": "override",
      ...(this.override ? { checked: true } : {}),
    });
    overrideBox.addEventListener("change", () => {
      this.override = (overrideBox as HTMLInputElement).checked;
      this.render();
    });
    const justificationInput = el("input", {
      type: "text",
      value: this.justification,
      placeholder: "justification for override",
      "data-role": "justification",
    });
    justificationInput.addEventListener("input", () => {
      this.justification = justificationInput.value;
      const save = this.container.querySelector<HTMLButtonElement>("[data-role=save]");
      if (save) save.disabled = !this.canSaveDirect();
    });

    const save = el(
      "button",
      { "data-role": "save", onclick: () => void this.saveAssignment() },
      "Save direct",
    ) as HTMLButtonElement;
    save.disabled = !this.canSaveDirect();

    return el(
      "div",
      { class: "direct", "data-role": "direct-panel" },
      el("label", {}, "Relation: ", relationSelect),
      el("label", {}, "Direction: ", directionSelect),
      this.violationsList(this.directViolations),
      el(
        "label",
        { class: this.needsOverride ? "override-gate attention" : "override-gate" },
        overrideBox,
        " Override signature check (requires justification): ",
        justificationInput,
      ),
      save,
    );
  }

  private canSaveDirect(): boolean {
    if (!this.needsOverride) return true;
    return this.override && this.justification.trim().length > 0;
  }

  private compositePanel(): HTMLElement {
    const rows = el("div", { class: "chain", "data-role": "chain" });
    this.chain.forEach((row, idx) => rows.append(this.chainRow(row, idx)));
    const verdict = this.chainVerdict;
    const stateLine = el(
      "p",
      { "data-role": "chain-state" },
      this.chain.length === 0
        ? "No links yet."
        : verdict === null
          ? "Validating..."
          : verdict.valid
            ? "Chain is valid."
            : `${verdict.violations.length} violation(s).`,
    );
    const save = el(
      "button",
      { "data-role": "save", onclick: () => void this.saveAssignment() },
      "Save composite",
    ) as HTMLButtonElement;
    save.disabled = !(verdict?.valid ?? false);
    return el(
      "div",
      { class: "composite", "data-role": "composite-panel" },
      rows,
      el("button", { "data-role": "add-link", onclick: () => this.addLink() }, "Add link"),
      stateLine,
      this.violationsList(verdict?.violations ?? []),
      save,
    );
  }

  private addLink(): void {
    const previous = this.chain[this.chain.length - 1];
    this.chain.push({
      sourceTerm: previous ? previous.targetTerm : this.drafts[0].term,
      sourceClass: previous ? previous.targetClass : (this.drafts[0].assignedClass ?? ""),
      relation: this.deps.inventory.relations[0]?.id ?? "",
      direction: "forward",
      targetTerm: "",
      targetClass: "",
    });
    this.render();
    void this.runChainValidation();
  }

  private chainRow(row: ChainRowDraft, idx: number): HTMLElement {
    const onEdit = () => {
      this.chainVerdict = null;
      void this.runChainValidation();
    };
    const termInput = (value: string, role: string, apply: (v: string) => void) => {
      const input = el("input", { type: "text", value, "data-role": role });
      input.addEventListener("change", () => {
        apply(input.value);
        onEdit();
      });
      return input;
    };
    const classSelect = (value: string, role: string, apply: (v: string) => void) => {
      const select = el("select", { "data-role": role });
      select.append(el("option", { value: "" }, "(no class)"));
      for (const cls of this.deps.inventory.classes) {
        select.append(el("option", { value: cls.id, ...(cls.id === value ? { selected: true } : {}) }, cls.id));
      }
      select.addEventListener("change", () => {
        apply(select.value);
        onEdit();
      });
      return select;
    };
    const relationSelect = el("select", { "data-role": `chain-relation-${idx}` });
    for (const relation of this.deps.inventory.relations) {
      relationSelect.append(
        el(
          "option",
          { value: relation.id, ...(relation.id === row.relation ? { selected: true } : {}) },
          relation.id,
        ),
      );
    }
    relationSelect.addEventListener("change", () => {
      row.relation = relationSelect.value;
      onEdit();
    });
    const directionSelect = el("select", { "data-role": `chain-direction-${idx}` });
    for (const direction of ["forward", "inverse"] as const) {
      directionSelect.append(
        el("option", { value: direction, ...(direction === row.direction ? { selected: true } : {}) }, direction),
      );
    }
    directionSelect.addEventListener("change", () => {
      row.direction = directionSelect.value as Direction;
      onEdit();
    });
    return el(
      "div",
      { class: "chain-row", "data-role": "chain-row", "data-idx": idx },
      termInput(row.sourceTerm, `chain-source-${idx}`, (v) => (row.sourceTerm = v)),
      classSelect(row.sourceClass, `chain-source-class-${idx}`, (v) => (row.sourceClass = v)),
      relationSelect,
      directionSelect,
      termInput(row.targetTerm, `chain-target-${idx}`, (v) => (row.targetTerm = v)),
      classSelect(row.targetClass, `chain-target-class-${idx}`, (v) => (row.targetClass = v)),
      el(
        "button",
        {
          "data-role": `chain-remove-${idx}`,
          onclick: () => {
            this.chain.splice(idx, 1);
            this.render();
            void this.runChainValidation();
          },
        },
        "Remove",
      ),
    );
  }

  private unclassifiedPanel(): HTMLElement {
    const reasonSelect = el("select", { "data-role": "reason" });
    for (const reason of REASON_CODES) {
      reasonSelect.append(
        el("option", { value: reason, ...(reason === this.reason ? { selected: true } : {}) }, reason),
      );
    }
    reasonSelect.addEventListener("change", () => {
      this.reason = reasonSelect.value as ReasonCode;
    });
    const noteInput = el("input", { type: "text", value: this.note, placeholder: "note", "data-role": "note" });
    noteInput.addEventListener("input", () => {
      this.note = noteInput.value;
    });
    return el(
      "div",
      { class: "unclassified", "data-role": "unclassified-panel" },
      el("label", {}, "Reason: ", reasonSelect),
      el("label", {}, "Note: ", noteInput),
      el("button", { "data-role": "save", onclick: () => void this.saveAssignment() }, "Save unclassified"),
    );
  }
}
