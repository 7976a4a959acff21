"""Annotation records: mentions, relation assignments, chains, and scores.

A record holds one concept pair drawn from a corpus sentence. Its assignment
is a sum type: a single typed link (direct), a contiguous chain of links
joining the pair through intermediate concepts (composite), or an explicit
unclassified outcome with a reason code. Mutation helpers return new record
values with the version bumped; nothing here touches storage.

Validation reports problems as `Violation` data rather than raising, so a
caller can show every issue at once. Write-time enforcement (a composite must
validate cleanly, a direct link must fit the pair's classes unless an
override with justification is recorded) lives in `validate_record`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Mapping, Union

from .alignment import AlignmentTable
from .corpus import normalize
from .inventory import (
    Candidate,
    Direction,
    Inventory,
    UnknownIdError,
    Violation,
    candidate_relations,
    inverse_of,
    is_subclass,
)


class RecordError(Exception):
    pass


class MissingClassError(RecordError):
    pass


class ScoreOutOfRangeError(RecordError):
    pass


class NoChainLengthError(RecordError):
    """Raised when a length is requested for an unclassified assignment."""


class OverrideJustificationError(RecordError):
    pass


class ReasonCode(str, Enum):
    TOO_DISTANT = "too-distant"
    DIFFERENT_CLAUSES = "different-clauses"
    NO_RELATION_FOUND = "no-relation-found"


class ReviewStatus(str, Enum):
    DRAFT = "draft"
    REVIEWED = "reviewed"


class RecordStatus(str, Enum):
    DIRECT = "direct"
    COMPOSITE = "composite"
    UNCLASSIFIED = "unclassified"
    PENDING = "pending"


@dataclass(frozen=True)
class ConceptMention:
    """A term occurrence, optionally anchored to character offsets.

    Chain-intermediate concepts carry no span; only the record's pair
    mentions are usually anchored. `assigned_class` stays None until an
    annotator picks one.
    """

    term: str
    sentence: str
    span: tuple[int, int] | None = None
    assigned_class: str | None = None
    sense_id: str | None = None


@dataclass(frozen=True)
class RelationLink:
    source: ConceptMention
    relation: str
    direction: Direction
    target: ConceptMention


@dataclass(frozen=True)
class Direct:
    """Single-link assignment; override saves a link the signature rejects."""

    link: RelationLink
    override: bool = False
    justification: str | None = None


@dataclass(frozen=True)
class Composite:
    chain: tuple[RelationLink, ...]


@dataclass(frozen=True)
class Unclassified:
    reason: ReasonCode
    note: str | None = None


Assignment = Union[Direct, Composite, Unclassified]


@dataclass(frozen=True)
class AnnotationRecord:
    """One concept pair under annotation.

    The sentence text is denormalized onto the record so span checks and
    exports need no corpus lookup. Treat `relatedness_scores` as immutable;
    mutation helpers build a fresh mapping.
    """

    id: str
    sentence: str
    sentence_text: str
    pair: tuple[ConceptMention, ConceptMention]
    assignment: Assignment | None = None
    relatedness_scores: Mapping[str, float] = field(default_factory=dict)
    review_status: ReviewStatus = ReviewStatus.DRAFT
    version: int = 1


def classify_status(record: AnnotationRecord) -> RecordStatus:
    """Status derived solely from the assignment variant."""
    a = record.assignment
    if a is None:
        return RecordStatus.PENDING
    if isinstance(a, Direct):
        return RecordStatus.DIRECT
    if isinstance(a, Composite):
        return RecordStatus.COMPOSITE
    return RecordStatus.UNCLASSIFIED


def chain_length(assignment: Assignment) -> int:
    """Links in the assignment: 1 for direct, chain size for composite."""
    if isinstance(assignment, Direct):
        return 1
    if isinstance(assignment, Composite):
        return len(assignment.chain)
    raise NoChainLengthError("an unclassified assignment has no length")


def mean_relatedness(record: AnnotationRecord) -> float | None:
    scores = record.relatedness_scores
    if not scores:
        return None
    return sum(scores.values()) / len(scores)


def set_relatedness(record: AnnotationRecord, annotator: str, score: float) -> AnnotationRecord:
    """Store one annotator's score (overwriting any earlier one)."""
    if not 0 <= score <= 10:
        raise ScoreOutOfRangeError(f"score {score!r} outside [0, 10]")
    if not annotator:
        raise RecordError("annotator id must be non-empty")
    scores = dict(record.relatedness_scores)
    scores[annotator] = score
    return replace(record, relatedness_scores=scores, version=record.version + 1)


def set_review_status(record: AnnotationRecord, status: ReviewStatus) -> AnnotationRecord:
    return replace(record, review_status=status, version=record.version + 1)


def _class_via_table(mention: ConceptMention, table: AlignmentTable | None) -> str | None:
    if mention.assigned_class is not None:
        return mention.assigned_class
    if table is None or mention.sense_id is None:
        return None
    lemma = normalize(mention.term)
    for (entry_lemma, _pos, sense_id), entry in table.entries.items():
        if entry_lemma == lemma and sense_id == mention.sense_id:
            return entry.dolce_class
    return None


def suggest_relations(
    record: AnnotationRecord,
    inv: Inventory,
    table: AlignmentTable | None = None,
) -> list[Candidate]:
    """Candidates for the pair, most specific first, both argument orders.

    A mention without an assigned class may still be resolvable through the
    sense table when it carries a sense id; otherwise the pair cannot be
    looked up.
    """
    first, second = record.pair
    class_a = _class_via_table(first, table)
    class_b = _class_via_table(second, table)
    if class_a is None or class_b is None:
        missing = first.term if class_a is None else second.term
        raise MissingClassError(f"mention {missing!r} has no assigned class")
    return candidate_relations(inv, class_a, class_b, try_both_orders=True)


def _admits(inv: Inventory, link: RelationLink) -> tuple[bool, str]:
    """Does the link's relation accept its endpoint classes?"""
    rel = inv.relations[link.relation]
    domain, range_ = rel.domain, rel.range
    if link.direction is Direction.INVERSE:
        domain, range_ = range_, domain
    src, tgt = link.source.assigned_class, link.target.assigned_class
    if src is None or tgt is None:
        return False, "link endpoint lacks an assigned class"
    if not is_subclass(inv, src, domain):
        return False, f"source class {src!r} is not under domain {domain!r}"
    if not is_subclass(inv, tgt, range_):
        return False, f"target class {tgt!r} is not under range {range_!r}"
    return True, ""


def _link_violations(inv: Inventory, link: RelationLink, entity: str) -> list[Violation]:
    out: list[Violation] = []
    if link.relation not in inv.relations:
        out.append(Violation("unknown-relation", entity, f"relation {link.relation!r} not in inventory"))
        return out
    if link.direction is Direction.INVERSE and inverse_of(inv, link.relation) is None:
        out.append(Violation(
            "no-inverse", entity,
            f"relation {link.relation!r} has no inverse but the link reads it inverted"))
    for mention, side in ((link.source, "source"), (link.target, "target")):
        if mention.assigned_class is not None and mention.assigned_class not in inv.classes:
            out.append(Violation(
                "unknown-class", entity,
                f"{side} class {mention.assigned_class!r} not in inventory"))
    if not out:
        ok, why = _admits(inv, link)
        if not ok:
            out.append(Violation("signature", entity, why))
    return out


def validate_chain(
    chain: list[RelationLink] | tuple[RelationLink, ...],
    pair: tuple[ConceptMention, ConceptMention],
    inv: Inventory,
) -> list[Violation]:
    """Violations preventing the chain from serving as a composite assignment.

    Clean means: endpoints equal the pair terms, every adjacent link pair
    shares its junction term, each link's relation (read in its direction)
    admits the endpoint classes, and the chain has at least two links.
    """
    violations: list[Violation] = []
    if not chain:
        return [Violation("empty-chain", "chain", "chain has no links")]
    if len(chain) < 2:
        violations.append(Violation(
            "too-short", "chain",
            "a composite chain needs at least 2 links; a single link is a direct assignment"))
    first_term, second_term = pair[0].term, pair[1].term
    if normalize(chain[0].source.term) != normalize(first_term):
        violations.append(Violation(
            "endpoint", "chain[0].source",
            f"chain starts at {chain[0].source.term!r}, pair starts at {first_term!r}"))
    if normalize(chain[-1].target.term) != normalize(second_term):
        violations.append(Violation(
            "endpoint", f"chain[{len(chain) - 1}].target",
            f"chain ends at {chain[-1].target.term!r}, pair ends at {second_term!r}"))
    for i, (left, right) in enumerate(zip(chain, chain[1:])):
        if normalize(left.target.term) != normalize(right.source.term):
            violations.append(Violation(
                "contiguity", f"chain[{i}]",
                f"link {i} ends at {left.target.term!r} but link {i + 1} "
                f"starts at {right.source.term!r}"))
    for i, link in enumerate(chain):
        violations.extend(_link_violations(inv, link, f"chain[{i}]"))
    return violations


def make_link(
    inv: Inventory,
    source: ConceptMention,
    relation_name: str,
    target: ConceptMention,
    direction: Direction = Direction.FORWARD,
) -> RelationLink:
    """Build a link, resolving aliases to their canonical relation.

    An alias contributes its own direction; asking for the inverse of an
    inverse-reading alias lands back on forward.
    """
    definition, alias_direction = inv.resolve_relation(relation_name)
    if alias_direction is Direction.INVERSE:
        direction = Direction.INVERSE if direction is Direction.FORWARD else Direction.FORWARD
    return RelationLink(source=source, relation=definition.id, direction=direction, target=target)


def validate_record(record: AnnotationRecord, inv: Inventory) -> list[Violation]:
    """Everything that must hold before a record is stored."""
    violations: list[Violation] = []
    for label, mention in (("pair[0]", record.pair[0]), ("pair[1]", record.pair[1])):
        if mention.sentence != record.sentence:
            violations.append(Violation(
                "sentence-mismatch", label,
                f"mention cites sentence {mention.sentence!r}, record cites {record.sentence!r}"))
        if mention.span is not None:
            start, end = mention.span
            if not (0 <= start < end <= len(record.sentence_text)):
                violations.append(Violation(
                    "span-bounds", label,
                    f"span ({start}, {end}) outside sentence of length {len(record.sentence_text)}"))
            elif normalize(record.sentence_text[start:end]) != normalize(mention.term):
                violations.append(Violation(
                    "span-term-mismatch", label,
                    f"span covers {record.sentence_text[start:end]!r}, term is {mention.term!r}"))
        if mention.assigned_class is not None and mention.assigned_class not in inv.classes:
            violations.append(Violation(
                "unknown-class", label, f"class {mention.assigned_class!r} not in inventory"))
    a = record.assignment
    if isinstance(a, Direct):
        link_issues = _link_violations(inv, a.link, "direct")
        if a.override:
            if not (a.justification and a.justification.strip()):
                violations.append(Violation(
                    "override-justification", "direct",
                    "an override must carry a non-empty justification"))
            link_issues = [v for v in link_issues if v.rule != "signature"]
        violations.extend(link_issues)
        for mention, side in ((a.link.source, "source"), (a.link.target, "target")):
            if normalize(mention.term) not in (normalize(record.pair[0].term), normalize(record.pair[1].term)):
                violations.append(Violation(
                    "pair-mismatch", f"direct.{side}",
                    f"link {side} {mention.term!r} is not one of the pair terms"))
    elif isinstance(a, Composite):
        violations.extend(validate_chain(a.chain, record.pair, inv))
    if not record.id:
        violations.append(Violation("missing-id", "record", "record id must be non-empty"))
    if record.version < 1:
        violations.append(Violation("bad-version", "record", "version must be >= 1"))
    for annotator, score in record.relatedness_scores.items():
        if not 0 <= score <= 10:
            violations.append(Violation(
                "score-range", f"relatedness[{annotator}]", f"score {score!r} outside [0, 10]"))
    return violations


def assign(record: AnnotationRecord, assignment: Assignment, inv: Inventory) -> AnnotationRecord:
    """Attach an assignment, refusing one that fails write-time validation."""
    candidate = replace(record, assignment=assignment, version=record.version + 1)
    problems = validate_record(candidate, inv)
    if problems:
        detail = "; ".join(f"{v.rule}: {v.message}" for v in problems)
        if isinstance(assignment, Direct) and any(v.rule == "override-justification" for v in problems):
            raise OverrideJustificationError(detail)
        raise RecordError(f"assignment rejected: {detail}")
    return candidate


# --- JSON round-trip -------------------------------------------------------

def _mention_to_dict(m: ConceptMention) -> dict[str, Any]:
    return {
        "term": m.term,
        "sentence": m.sentence,
        "span": list(m.span) if m.span is not None else None,
        "assigned_class": m.assigned_class,
        "sense_id": m.sense_id,
    }


def _mention_from_dict(d: Mapping[str, Any]) -> ConceptMention:
    span = d.get("span")
    return ConceptMention(
        term=d["term"],
        sentence=d["sentence"],
        span=(span[0], span[1]) if span is not None else None,
        assigned_class=d.get("assigned_class"),
        sense_id=d.get("sense_id"),
    )


def _link_to_dict(link: RelationLink) -> dict[str, Any]:
    return {
        "source": _mention_to_dict(link.source),
        "relation": link.relation,
        "direction": link.direction.value,
        "target": _mention_to_dict(link.target),
    }


def _link_from_dict(d: Mapping[str, Any]) -> RelationLink:
    return RelationLink(
        source=_mention_from_dict(d["source"]),
        relation=d["relation"],
        direction=Direction(d["direction"]),
        target=_mention_from_dict(d["target"]),
    )


def assignment_to_dict(a: Assignment | None) -> dict[str, Any] | None:
    if a is None:
        return None
    if isinstance(a, Direct):
        return {
            "kind": "direct",
            "link": _link_to_dict(a.link),
            "override": a.override,
            "justification": a.justification,
        }
    if isinstance(a, Composite):
        return {"kind": "composite", "chain": [_link_to_dict(l) for l in a.chain]}
    return {"kind": "unclassified", "reason": a.reason.value, "note": a.note}


def assignment_from_dict(d: Mapping[str, Any] | None) -> Assignment | None:
    if d is None:
        return None
    kind = d.get("kind")
    if kind == "direct":
        return Direct(
            link=_link_from_dict(d["link"]),
            override=bool(d.get("override", False)),
            justification=d.get("justification"),
        )
    if kind == "composite":
        return Composite(chain=tuple(_link_from_dict(l) for l in d["chain"]))
    if kind == "unclassified":
        return Unclassified(reason=ReasonCode(d["reason"]), note=d.get("note"))
    raise RecordError(f"unknown assignment kind {kind!r}")


def record_to_dict(record: AnnotationRecord) -> dict[str, Any]:
    return {
        "id": record.id,
        "sentence": record.sentence,
        "sentence_text": record.sentence_text,
        "pair": [_mention_to_dict(record.pair[0]), _mention_to_dict(record.pair[1])],
        "assignment": assignment_to_dict(record.assignment),
        "relatedness_scores": dict(record.relatedness_scores),
        "review_status": record.review_status.value,
        "version": record.version,
    }


def record_from_dict(d: Mapping[str, Any]) -> AnnotationRecord:
    pair = d["pair"]
    return AnnotationRecord(
        id=d["id"],
        sentence=d["sentence"],
        sentence_text=d["sentence_text"],
        pair=(_mention_from_dict(pair[0]), _mention_from_dict(pair[1])),
        assignment=assignment_from_dict(d.get("assignment")),
        relatedness_scores=dict(d.get("relatedness_scores", {})),
        review_status=ReviewStatus(d.get("review_status", "draft")),
        version=int(d.get("version", 1)),
    )
