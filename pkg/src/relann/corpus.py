"""Corpus ingestion, sentence splitting, glossary indexing, and pair sampling.

Local text files replace live crawling. The expected directory layout is

    <corpus dir>/glossaries/*.txt   blank-line-separated "term: definition" entries
    <corpus dir>/articles/*.txt     plain prose

Sentences split on ., ! or ? followed by whitespace and an uppercase letter,
with a configurable abbreviation stop-list suppressing spurious splits.
Tokens are maximal runs of word characters (with internal apostrophes or
hyphens); punctuation is not a token. First-term sampling draws uniformly,
without replacement, over (sentence, token) positions whose normalized
surface is a glossary headword, using the splitmix64 stream so a seed fully
determines the result on any machine.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .rng import SplitMix64

DEFAULT_ABBREVIATIONS = frozenset({
    "mr.", "mrs.", "ms.", "dr.", "st.", "no.", "inc.", "ltd.", "corp.", "co.",
    "vs.", "etc.", "e.g.", "i.e.", "u.s.", "u.k.", "a.m.", "p.m.", "fig.",
})

_WORD_CHARS = frozenset(string.ascii_letters + string.digits)
_JOINERS = frozenset("'’-")
_TERMINATORS = frozenset(".!?")


class SourceKind(str, Enum):
    GLOSSARY = "glossary"
    ARTICLE = "article"


class CorpusError(Exception):
    pass


class EmptyDocumentError(CorpusError):
    pass


class NoGlossaryEntriesError(CorpusError):
    pass


class InsufficientTokensError(CorpusError):
    pass


@dataclass(frozen=True)
class Token:
    surface: str
    start: int
    end: int


@dataclass(frozen=True)
class Sentence:
    id: str
    source: str
    text: str
    tokens: tuple[Token, ...]


@dataclass(frozen=True)
class DocumentSource:
    id: str
    kind: SourceKind
    name: str
    token_count: int


@dataclass(frozen=True)
class GlossaryIndex:
    headwords: frozenset[str]

    def __contains__(self, word: str) -> bool:
        return normalize(word) in self.headwords

    def __len__(self) -> int:
        return len(self.headwords)


@dataclass(frozen=True)
class PairCandidate:
    sentence: str
    first_term: int  # token index within the sentence
    sampled_with_seed: int


@dataclass
class Corpus:
    """In-memory corpus snapshot: sources plus their sentences."""

    sources: dict[str, DocumentSource] = field(default_factory=dict)
    sentences: dict[str, Sentence] = field(default_factory=dict)

    def sentences_of(self, source_id: str) -> list[Sentence]:
        return [s for s in self.sentences.values() if s.source == source_id]


def normalize(surface: str) -> str:
    """Lowercase and strip surrounding punctuation; no stemming."""
    return surface.strip(string.punctuation + string.whitespace).lower()


def tokenize(text: str) -> tuple[Token, ...]:
    """Offsets-preserving word tokens; punctuation separates but is dropped."""
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        if text[i] in _WORD_CHARS:
            j = i + 1
            while j < n and (
                text[j] in _WORD_CHARS
                or (text[j] in _JOINERS and j + 1 < n and text[j + 1] in _WORD_CHARS)
            ):
                j += 1
            tokens.append(Token(text[i:j], i, j))
            i = j
        else:
            i += 1
    return tuple(tokens)


def split_sentences(text: str, abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS) -> list[tuple[int, int]]:
    """(start, end) spans of sentences within text.

    A terminator followed by whitespace and an uppercase letter closes a
    sentence unless the word it ends is on the abbreviation stop-list.
    """
    spans: list[tuple[int, int]] = []
    start = 0
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in _TERMINATORS:
            # Look ahead: whitespace then an uppercase letter.
            j = i + 1
            while j < n and text[j] in " \t":
                j += 1
            boundary = j < n and (text[j].isupper() or text[j] == "\n")
            if j < n and text[j] == "\n":
                boundary = True
            if j >= n:
                boundary = True
            if boundary and ch == "." and _ends_with_abbreviation(text, i, abbreviations):
                boundary = False
            if boundary:
                spans.append((start, i + 1))
                while j < n and text[j].isspace():
                    j += 1
                start = j
                i = j
                continue
        elif ch == "\n" and i + 1 < n and text[i + 1] == "\n":
            # Paragraph break closes an unterminated sentence.
            if text[start:i].strip():
                spans.append((start, i))
            j = i
            while j < n and text[j].isspace():
                j += 1
            start = j
            i = j
            continue
        i += 1
    if text[start:].strip():
        spans.append((start, n))
    trimmed: list[tuple[int, int]] = []
    for s, e in spans:
        segment = text[s:e]
        lead = len(segment) - len(segment.lstrip())
        trail = len(segment) - len(segment.rstrip())
        if s + lead < e - trail:
            trimmed.append((s + lead, e - trail))
    return trimmed


def _ends_with_abbreviation(text: str, dot: int, abbreviations: frozenset[str]) -> bool:
    k = dot
    while k > 0 and not text[k - 1].isspace():
        k -= 1
    return text[k:dot + 1].lower() in abbreviations


def ingest(
    raw: str,
    kind: SourceKind,
    name: str,
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
) -> tuple[DocumentSource, list[Sentence]]:
    """Split a document into sentences with offset-true tokens."""
    if not raw.strip():
        raise EmptyDocumentError(f"document {name!r} is empty")
    source_id = _slug(name)
    sentences: list[Sentence] = []
    for n, (start, end) in enumerate(split_sentences(raw, abbreviations)):
        sentence_text = raw[start:end]
        sentences.append(Sentence(
            id=f"{source_id}#{n:04d}",
            source=source_id,
            text=sentence_text,
            tokens=tokenize(sentence_text),
        ))
    source = DocumentSource(
        id=source_id,
        kind=kind,
        name=name,
        token_count=sum(len(s.tokens) for s in sentences),
    )
    return source, sentences


def _slug(name: str) -> str:
    cleaned = "".join(c if c.isalnum() else "-" for c in name.lower()).strip("-")
    while "--" in cleaned:
        cleaned = cleaned.replace("--", "-")
    return cleaned or "source"


def default_headword_rule(entry_block: str) -> str | None:
    """Headword = first-line text before the first colon or tab."""
    first_line = entry_block.strip().splitlines()[0]
    for sep in (":", "\t"):
        if sep in first_line:
            first_line = first_line.split(sep, 1)[0]
            break
    word = normalize(first_line)
    return word or None


def glossary_entries(raw: str) -> list[str]:
    """Blank-line-separated entry blocks of a glossary document."""
    blocks, current = [], []
    for line in raw.splitlines():
        if line.strip():
            current.append(line)
        elif current:
            blocks.append("\n".join(current))
            current = []
    if current:
        blocks.append("\n".join(current))
    return blocks


def build_glossary_index(
    glossary_texts: Iterable[str],
    headword_rule: Callable[[str], str | None] = default_headword_rule,
) -> GlossaryIndex:
    """Union of normalized headwords across glossary documents."""
    headwords: set[str] = set()
    saw_source = False
    for raw in glossary_texts:
        saw_source = True
        for block in glossary_entries(raw):
            word = headword_rule(block)
            if word:
                headwords.add(word)
    if not saw_source:
        raise NoGlossaryEntriesError("no glossary sources given")
    if not headwords:
        raise NoGlossaryEntriesError("glossaries contain no entries")
    return GlossaryIndex(frozenset(headwords))


def eligible_positions(sentences: Iterable[Sentence], index: GlossaryIndex) -> list[tuple[str, int]]:
    """Canonically ordered (sentence id, token index) positions whose token
    is glossary-listed; independent of ingestion order."""
    by_id = {s.id: s for s in sentences}
    out: list[tuple[str, int]] = []
    for sid in sorted(by_id):
        for idx, token in enumerate(by_id[sid].tokens):
            if token.surface in index:
                out.append((sid, idx))
    return out


def sample_first_terms(
    sentences: Iterable[Sentence],
    index: GlossaryIndex,
    seed: int,
    n: int,
) -> list[PairCandidate]:
    """n uniform draws without replacement over glossary-listed positions."""
    if n < 0:
        raise ValueError("n must be non-negative")
    positions = eligible_positions(sentences, index)
    if n > len(positions):
        raise InsufficientTokensError(
            f"requested {n} draws but only {len(positions)} eligible tokens exist")
    rng = SplitMix64(seed)
    picked = rng.sample_indices(len(positions), n)
    return [
        PairCandidate(sentence=positions[i][0], first_term=positions[i][1], sampled_with_seed=seed)
        for i in picked
    ]


@dataclass(frozen=True)
class CorpusStats:
    per_source: dict[str, int]
    total: int


def corpus_stats(sources: Iterable[DocumentSource]) -> CorpusStats:
    per_source = {s.id: s.token_count for s in sources}
    return CorpusStats(per_source=per_source, total=sum(per_source.values()))


def _ingest_tree(
    documents: Iterable[tuple[SourceKind, str, str]],
    abbreviations: frozenset[str],
) -> tuple[Corpus, GlossaryIndex]:
    corpus = Corpus()
    glossary_texts: list[str] = []
    for kind, name, raw in documents:
        source, sentences = ingest(raw, kind, name, abbreviations)
        corpus.sources[source.id] = source
        for s in sentences:
            corpus.sentences[s.id] = s
        if kind is SourceKind.GLOSSARY:
            glossary_texts.append(raw)
    if not glossary_texts:
        raise NoGlossaryEntriesError("corpus has no glossaries")
    return corpus, build_glossary_index(glossary_texts)


def load_corpus_dir(
    corpus_dir: str | Path,
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
) -> tuple[Corpus, GlossaryIndex]:
    """Ingest every document under the standard corpus layout."""
    root = Path(corpus_dir)
    if not root.is_dir():
        raise CorpusError(f"corpus directory not found: {root}")
    documents = [
        (kind, path.stem, path.read_text("utf-8"))
        for kind, sub in ((SourceKind.GLOSSARY, "glossaries"), (SourceKind.ARTICLE, "articles"))
        for path in sorted((root / sub).glob("*.txt"))
    ]
    return _ingest_tree(documents, abbreviations)


def load_sample_corpus(
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
) -> tuple[Corpus, GlossaryIndex]:
    """The small financial corpus shipped with the package."""
    from importlib.resources import files

    root = files("relann").joinpath("data", "corpus")
    documents = []
    for kind, sub in ((SourceKind.GLOSSARY, "glossaries"), (SourceKind.ARTICLE, "articles")):
        entries = sorted(
            (e for e in root.joinpath(sub).iterdir() if e.name.endswith(".txt")),
            key=lambda e: e.name,
        )
        for entry in entries:
            name = entry.name[:-len(".txt")]
            documents.append((kind, name, entry.read_text("utf-8")))
    return _ingest_tree(documents, abbreviations)
