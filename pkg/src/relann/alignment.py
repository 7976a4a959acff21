"""Lemma-to-ontology-class alignment with the quality default.

A sense table maps (lemma, part of speech, sense id) to an ontology class.
Lookups return every known sense so the annotator can pick the right one;
adjectives and adverbs with no table entry fall back to a single synthetic
``quality`` sense, while unknown nouns and verbs return nothing and must be
classed manually.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from importlib import resources

import yaml

from .inventory import Inventory, UnknownIdError

QUALITY_CLASS = "quality"
DEFAULT_SENSE_ID = "default"


class Pos(str, Enum):
    NOUN = "noun"
    VERB = "verb"
    ADJECTIVE = "adjective"
    ADVERB = "adverb"


class AlignmentError(Exception):
    pass


class AlignmentParseError(AlignmentError):
    pass


class DuplicateSenseError(AlignmentError):
    pass


@dataclass(frozen=True)
class SenseEntry:
    lemma: str
    pos: Pos
    sense_id: str
    dolce_class: str
    gloss: str = ""


@dataclass(frozen=True)
class AlignmentTable:
    source_label: str
    entries: dict[tuple[str, Pos, str], SenseEntry]

    def __len__(self) -> int:
        return len(self.entries)


def load_alignment(document: str, inv: Inventory) -> AlignmentTable:
    """Parse a sense table and resolve every class against the inventory."""
    try:
        raw = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        raise AlignmentParseError(f"malformed alignment document: {exc}") from exc
    if not isinstance(raw, dict):
        raise AlignmentParseError("alignment document must be a mapping")

    entries: dict[tuple[str, Pos, str], SenseEntry] = {}
    for item in raw.get("entries") or []:
        if not isinstance(item, dict):
            raise AlignmentParseError(f"entries must be mappings, got {item!r}")
        try:
            entry = SenseEntry(
                lemma=str(item["lemma"]).lower(),
                pos=Pos(item["pos"]),
                sense_id=str(item["sense"]),
                dolce_class=str(item["class"]),
                gloss=str(item.get("gloss", "")),
            )
        except (KeyError, ValueError) as exc:
            raise AlignmentParseError(f"bad alignment entry {item!r}: {exc}") from exc
        if entry.dolce_class not in inv.classes:
            raise UnknownIdError(
                f"alignment entry {entry.lemma!r}/{entry.pos.value} uses unknown class "
                f"{entry.dolce_class!r}")
        key = (entry.lemma, entry.pos, entry.sense_id)
        if key in entries:
            raise DuplicateSenseError(f"duplicate sense entry: {key}")
        entries[key] = entry
    return AlignmentTable(source_label=str(raw.get("source", "")), entries=entries)


def load_alignment_path(path, inv: Inventory) -> AlignmentTable:
    with open(path, encoding="utf-8") as fh:
        return load_alignment(fh.read(), inv)


def load_sample_alignment(inv: Inventory) -> AlignmentTable:
    """The sample sense table shipped with the package."""
    text = resources.files("relann").joinpath("data/alignment_sample.yaml").read_text("utf-8")
    return load_alignment(text, inv)


def classes_for(table: AlignmentTable, lemma: str, pos: Pos) -> list[tuple[str, str]]:
    """All (sense_id, class) pairs for a lemma, in sense-id order.

    Adjectives and adverbs absent from the table get the synthetic
    ("default", "quality") sense; absent nouns and verbs get nothing.
    The default never overrides explicit entries.
    """
    lemma = lemma.lower()
    matches = sorted(
        (e.sense_id, e.dolce_class)
        for (lem, p, _), e in table.entries.items()
        if lem == lemma and p is pos
    )
    if not matches and pos in (Pos.ADJECTIVE, Pos.ADVERB):
        return [(DEFAULT_SENSE_ID, QUALITY_CLASS)]
    return matches


def dump_alignment(table: AlignmentTable) -> str:
    """Serialize a table back to the document format (round-trips load)."""
    entries = [
        {
            "lemma": e.lemma,
            "pos": e.pos.value,
            "sense": e.sense_id,
            "class": e.dolce_class,
            **({"gloss": e.gloss} if e.gloss else {}),
        }
        for e in sorted(table.entries.values(), key=lambda e: (e.lemma, e.pos.value, e.sense_id))
    ]
    return yaml.safe_dump({"source": table.source_label, "entries": entries}, sort_keys=False)
