/** Shared fixtures and a tiny fetch fake for component tests. */

import type {
  InventoryDoc,
  Mention,
  RecordPayload,
  SummaryDto,
} from "../src/types.js";

export function mention(term: string, over: Partial<Mention> = {}): Mention {
  return { term, sentence: "doc#0001", span: null, assigned_class: null, sense_id: null, ...over };
}

export const SENTENCE_TEXT = "The bank approved the loan quickly.";

export function makeRecord(over: Partial<RecordPayload> = {}): RecordPayload {
  return {
    id: "r-0001",
    sentence: "doc#0001",
    sentence_text: SENTENCE_TEXT,
    pair: [mention("bank", { span: [4, 8] }), mention("loan", { span: [22, 26] })],
    assignment: null,
    relatedness_scores: {},
    review_status: "draft",
    version: 1,
    status: "pending",
    mean_relatedness: null,
    ...over,
  };
}

export function makeSummary(over: Partial<SummaryDto> = {}): SummaryDto {
  return {
    total: 300,
    pending: 0,
    direct: {
      count: 218,
      pct: 72.67,
      split: { dolce: 77, custom: 141, dolce_pct: 35.32, custom_pct: 64.68 },
    },
    composite: {
      count: 74,
      pct: 24.67,
      split: { dolce: 36, custom: 38, dolce_pct: 48.65, custom_pct: 51.35 },
    },
    unclassified: { count: 8, pct: 2.67 },
    ...over,
  };
}

export const TOY_INVENTORY: InventoryDoc = {
  version: "test",
  classes: [
    { id: "particular", label: "particular", parent: null, note: null },
    { id: "endurant", label: "endurant", parent: "particular", note: null },
    { id: "perdurant", label: "perdurant", parent: "particular", note: null },
    { id: "quality", label: "quality", parent: "particular", note: null },
  ],
  relations: [
    {
      id: "relates-to",
      label: "relates to",
      origin: "dolce",
      branch: "immediate",
      domain: "particular",
      range: "particular",
      parent: null,
      inverse: "relates-to",
      description: "Catch-all link.",
      example: "a relates to b",
    },
    {
      id: "qualifier",
      label: "qualifier",
      origin: "custom",
      branch: "custom",
      domain: "quality",
      range: "particular",
      parent: null,
      inverse: null,
      description: "One concept qualifies the other.",
      example: "solvent bank",
    },
  ],
  aliases: [],
};

export interface CapturedCall {
  method: string;
  url: string;
  body: unknown;
  headers: Record<string, string>;
}

export interface FakeRoute {
  method: string;
  pattern: RegExp;
  reply: (call: CapturedCall) => { status?: number; body: unknown };
}

export interface FakeFetch {
  fetchFn: (input: string, init?: RequestInit) => Promise<Response>;
  calls: CapturedCall[];
}

export function fakeFetch(routes: FakeRoute[]): FakeFetch {
  const calls: CapturedCall[] = [];
  const fetchFn = async (input: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const call: CapturedCall = {
      method,
      url: input,
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
      headers: (init?.headers as Record<string, string>) ?? {},
    };
    calls.push(call);
    for (const route of routes) {
      if (route.method === method && route.pattern.test(input)) {
        const { status = 200, body } = route.reply(call);
        return {
          ok: status < 400,
          status,
          json: async () => body,
        } as unknown as Response;
      }
    }
    throw new Error(`no fake route for ${method} ${input}`);
  };
  return { fetchFn, calls };
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
