/** Client-side text helpers mirroring the service's tokenizer and term
 * normalization, used only when a record's sentence is not in the corpus
 * (the server is authoritative whenever it knows the sentence). */

import type { TokenSpan } from "./types.js";

const TOKEN_RE = /[A-Za-z0-9]+(?:['’-][A-Za-z0-9]+)*/g;

export function tokenize(text: string): TokenSpan[] {
  const tokens: TokenSpan[] = [];
  TOKEN_RE.lastIndex = 0;
  for (let match = TOKEN_RE.exec(text); match !== null; match = TOKEN_RE.exec(text)) {
    tokens.push({ surface: match[0], start: match.index, end: match.index + match[0].length });
  }
  return tokens;
}

const EDGE_PUNCT = /^[!-/:-@[-`{-~\s]+|[!-/:-@[-`{-~\s]+$/g;

/** Lowercase and strip surrounding punctuation, like the server does when
 * matching chain endpoints against the record pair. */
export function normalizeTerm(surface: string): string {
  return surface.replace(EDGE_PUNCT, "").toLowerCase();
}
