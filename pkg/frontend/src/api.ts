/** Typed client for the annotation service. All state lives on the server;
 * the workbench only ever round-trips through these calls. */

import type {
  AlignmentResponse,
  Assignment,
  CandidatesResponse,
  ChainValidateResponse,
  Direction,
  InventoryDoc,
  LinkPayload,
  Mention,
  Pos,
  RecordListResponse,
  RecordPayload,
  SampleResponse,
  SentenceResponse,
  SummaryDto,
  Violation,
} from "./types.js";

export type ErrorCode = "not-found" | "conflict" | "validation-failed" | "bad-request";

export class ApiError extends Error {
  readonly status: number;
  readonly code: ErrorCode;
  readonly detail: string;
  readonly violations: Violation[];
  /** Version the server expected / found, present on conflicts. */
  readonly expected: number | null;
  readonly actual: number | null;

  constructor(status: number, payload: Record<string, unknown>) {
    const detail = typeof payload.detail === "string" ? payload.detail : JSON.stringify(payload.detail ?? "");
    super(detail);
    this.name = "ApiError";
    this.status = status;
    this.code = (payload.code as ErrorCode | undefined) ?? defaultCode(status);
    this.detail = detail;
    this.violations = Array.isArray(payload.violations) ? (payload.violations as Violation[]) : [];
    this.expected = typeof payload.expected === "number" ? payload.expected : null;
    this.actual = typeof payload.actual === "number" ? payload.actual : null;
  }

  get isConflict(): boolean {
    return this.code === "conflict";
  }

  get isValidationFailure(): boolean {
    return this.code === "validation-failed";
  }
}

function defaultCode(status: number): ErrorCode {
  if (status === 404) return "not-found";
  if (status === 409) return "conflict";
  if (status === 422) return "validation-failed";
  return "bad-request";
}

export interface MentionBody {
  term: string;
  span?: [number, number] | null;
  assigned_class?: string | null;
  sense_id?: string | null;
}

export interface LinkBody {
  source: MentionBody;
  relation: string;
  direction: Direction;
  target: MentionBody;
}

export interface AssignmentBody {
  kind: "direct" | "composite" | "unclassified";
  link?: LinkBody;
  chain?: LinkBody[];
  override?: boolean;
  justification?: string | null;
  reason?: string;
  note?: string | null;
}

export interface PatchBody {
  version: number;
  assignment?: AssignmentBody | null;
  pair?: [MentionBody, MentionBody];
  review_status?: string;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.endsWith("/") ? baseUrl.slice(0, -1) : baseUrl;
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request<T>(
    method: string,
    path: string,
    options: { query?: Record<string, string | undefined>; body?: unknown; headers?: Record<string, string> } = {},
  ): Promise<T> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(options.query ?? {})) {
      if (value !== undefined) params.set(key, value);
    }
    const qs = params.toString();
    const url = `${this.baseUrl}${path}${qs ? `?${qs}` : ""}`;
    const init: RequestInit = { method, headers: { ...options.headers } };
    if (options.body !== undefined) {
      init.body = JSON.stringify(options.body);
      (init.headers as Record<string, string>)["Content-Type"] = "application/json";
    }
    const response = await this.fetchFn(url, init);
    const payload = (await response.json().catch(() => ({}))) as Record<string, unknown>;
    if (!response.ok) throw new ApiError(response.status, payload);
    return payload as T;
  }

  // -- inventory --------------------------------------------------------------

  inventory(): Promise<InventoryDoc> {
    return this.request("GET", "/inventory");
  }

  candidates(a: string, b: string): Promise<CandidatesResponse> {
    return this.request("GET", "/candidates", { query: { a, b } });
  }

  alignment(lemma: string, pos: Pos): Promise<AlignmentResponse> {
    return this.request("GET", `/alignment/${encodeURIComponent(lemma)}`, { query: { pos } });
  }

  // -- corpus -----------------------------------------------------------------

  sentence(id: string): Promise<SentenceResponse> {
    return this.request("GET", `/corpus/sentences/${encodeURIComponent(id)}`);
  }

  sample(n: number, seed?: number): Promise<SampleResponse> {
    return this.request("POST", "/corpus/sample", { body: seed === undefined ? { n } : { n, seed } });
  }

  // -- records ----------------------------------------------------------------

  records(status?: string): Promise<RecordListResponse> {
    return this.request("GET", "/records", { query: { status } });
  }

  record(id: string): Promise<RecordPayload> {
    return this.request("GET", `/records/${encodeURIComponent(id)}`);
  }

  createRecord(
    body: { sentence: string; pair: [MentionBody, MentionBody]; sentence_text?: string; id?: string },
    annotator?: string,
  ): Promise<RecordPayload> {
    return this.request("POST", "/records", {
      body,
      headers: annotator ? { "X-Annotator": annotator } : {},
    });
  }

  patchRecord(id: string, body: PatchBody): Promise<RecordPayload> {
    return this.request("PATCH", `/records/${encodeURIComponent(id)}`, { body });
  }

  postRelatedness(id: string, score: number, annotator: string): Promise<RecordPayload> {
    return this.request("POST", `/records/${encodeURIComponent(id)}/relatedness`, {
      body: { score },
      headers: { "X-Annotator": annotator },
    });
  }

  validateChain(id: string, chain: LinkBody[]): Promise<ChainValidateResponse> {
    return this.request("POST", `/records/${encodeURIComponent(id)}/chain/validate`, { body: { chain } });
  }

  // -- stats ------------------------------------------------------------------

  statsSummary(): Promise<SummaryDto> {
    return this.request("GET", "/stats/summary");
  }
}

/** Full mention payload for a record endpoint; chain intermediates stay bare. */
export function mentionBody(m: Mention): MentionBody {
  return { term: m.term, span: m.span, assigned_class: m.assigned_class, sense_id: m.sense_id };
}

export function linkBody(link: LinkPayload): LinkBody {
  return {
    source: mentionBody(link.source),
    relation: link.relation,
    direction: link.direction,
    target: mentionBody(link.target),
  };
}

export function assignmentBody(a: Assignment): AssignmentBody {
  if (a.kind === "direct") {
    return { kind: "direct", link: linkBody(a.link), override: a.override, justification: a.justification };
  }
  if (a.kind === "composite") {
    return { kind: "composite", chain: a.chain.map(linkBody) };
  }
  return { kind: "unclassified", reason: a.reason, note: a.note };
}
