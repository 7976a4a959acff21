/** Payload shapes of the annotation service HTTP API. */

export type Direction = "forward" | "inverse";
export type RecordStatus = "direct" | "composite" | "unclassified" | "pending";
export type ReviewStatus = "draft" | "reviewed";
export type Pos = "noun" | "verb" | "adjective" | "adverb";

export const POS_VALUES: readonly Pos[] = ["noun", "verb", "adjective", "adverb"];
export const REASON_CODES = ["too-distant", "different-clauses", "no-relation-found"] as const;
export type ReasonCode = (typeof REASON_CODES)[number];

export interface OntoClass {
  id: string;
  label: string;
  parent: string | null;
  note: string | null;
}

export interface RelationRow {
  id: string;
  label: string;
  origin: "dolce" | "custom";
  branch: string;
  domain: string;
  range: string;
  parent: string | null;
  inverse: string | null;
  description: string;
  example: string;
}

export interface AliasRow {
  name: string;
  relation: string;
  direction: Direction;
  note: string | null;
}

export interface InventoryDoc {
  version: string;
  classes: OntoClass[];
  relations: RelationRow[];
  aliases: AliasRow[];
}

export interface Candidate {
  relation: string;
  direction: Direction;
  label: string;
  origin: string;
  description: string;
  example: string;
}

export interface CandidatesResponse {
  a: string;
  b: string;
  candidates: Candidate[];
}

export interface SenseOption {
  sense_id: string;
  class: string;
  gloss: string | null;
}

export interface AlignmentResponse {
  lemma: string;
  pos: Pos;
  senses: SenseOption[];
}

export interface TokenSpan {
  surface: string;
  start: number;
  end: number;
}

export interface SentenceResponse {
  id: string;
  source: string;
  text: string;
  tokens: TokenSpan[];
}

export interface SampleItem {
  sentence: string;
  sentence_text: string;
  first_term: number;
  token: TokenSpan;
  seed: number;
}

export interface SampleResponse {
  seed: number;
  n: number;
  items: SampleItem[];
}

export interface Mention {
  term: string;
  sentence: string;
  span: [number, number] | null;
  assigned_class: string | null;
  sense_id: string | null;
}

export interface LinkPayload {
  source: Mention;
  relation: string;
  direction: Direction;
  target: Mention;
}

export type Assignment =
  | { kind: "direct"; link: LinkPayload; override: boolean; justification: string | null }
  | { kind: "composite"; chain: LinkPayload[] }
  | { kind: "unclassified"; reason: ReasonCode; note: string | null };

export interface RecordPayload {
  id: string;
  sentence: string;
  sentence_text: string;
  pair: [Mention, Mention];
  assignment: Assignment | null;
  relatedness_scores: Record<string, number>;
  review_status: ReviewStatus;
  version: number;
  status: RecordStatus;
  mean_relatedness: number | null;
}

export interface RecordListResponse {
  count: number;
  records: RecordPayload[];
}

export interface Violation {
  rule: string;
  entity: string;
  message: string;
}

export interface ChainValidateResponse {
  valid: boolean;
  violations: Violation[];
}

export interface OriginSplitDto {
  dolce: number;
  custom: number;
  dolce_pct: number;
  custom_pct: number;
}

export interface SummaryDto {
  total: number;
  pending: number;
  direct: { count: number; pct: number; split: OriginSplitDto };
  composite: { count: number; pct: number; split: OriginSplitDto };
  unclassified: { count: number; pct: number };
}

/** One row of the work queue, projected from a stored record. */
export interface WorkQueueItem {
  id: string;
  sentenceText: string;
  firstTerm: string;
  firstTermSpan: [number, number] | null;
  secondTerm: string;
  status: RecordStatus;
  reviewStatus: ReviewStatus;
  version: number;
  meanRelatedness: number | null;
}

export function toQueueItem(record: RecordPayload): WorkQueueItem {
  return {
    id: record.id,
    sentenceText: record.sentence_text,
    firstTerm: record.pair[0].term,
    firstTermSpan: record.pair[0].span,
    secondTerm: record.pair[1].term,
    status: record.status,
    reviewStatus: record.review_status,
    version: record.version,
    meanRelatedness: record.mean_relatedness,
  };
}
