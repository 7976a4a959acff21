"""HTTP service exposing inventory lookup, corpus access, records, and stats.

Pydantic models guard the request boundary; everything behind it works on
the plain dataclasses. Errors leave as one JSON envelope:

    {"code": "...", "detail": "...", "violations": [...]?, ...}

with codes not-found (404), conflict (409), validation-failed (422), and
bad-request (400). A conflict carries the expected and actual versions.

Mutations are made retry-safe by deriving an idempotency key from the
record id, the stated version, and the canonical request body: replaying
the same request returns the first outcome instead of applying twice.
"""

from __future__ import annotations

import threading
from contextlib import asynccontextmanager
from dataclasses import replace
from typing import Any

from fastapi import FastAPI, Header, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .alignment import Pos, classes_for, load_alignment_path, load_sample_alignment
from .config import ServiceConfig
from .corpus import (
    InsufficientTokensError,
    load_corpus_dir,
    load_sample_corpus,
    sample_first_terms,
)
from .inventory import (
    Direction,
    Origin,
    UnknownIdError,
    candidate_relations,
    inventory_to_dict,
    load_inventory_path,
    load_seed_inventory,
)
from .records import (
    AnnotationRecord,
    Assignment,
    ConceptMention,
    Composite,
    Direct,
    ReasonCode,
    RecordError,
    RelationLink,
    ReviewStatus,
    ScoreOutOfRangeError,
    Unclassified,
    classify_status,
    make_link,
    mean_relatedness,
    record_to_dict,
    set_relatedness,
    validate_chain,
    validate_record,
)
from .stats import (
    FrequencyScope,
    NoCompositeRecordsError,
    UnknownScopeError,
    avg_chain_length,
    frequencies_to_dict,
    relatedness_report,
    relatedness_to_dict,
    relation_frequencies,
    summarize,
    summary_to_dict,
)
from .store import (
    RecordStore,
    RecordExistsError,
    UnknownRecordError,
    VersionConflictError,
    make_mutation_key,
)

_STATUS_OF_CODE = {
    "not-found": 404,
    "conflict": 409,
    "validation-failed": 422,
    "bad-request": 400,
}


class ApiError(Exception):
    def __init__(
        self,
        code: str,
        detail: str,
        violations: list[dict[str, str]] | None = None,
        extra: dict[str, Any] | None = None,
    ):
        super().__init__(detail)
        self.code = code
        self.detail = detail
        self.violations = violations
        self.extra = extra or {}

    def body(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"code": self.code, "detail": self.detail}
        if self.violations is not None:
            payload["violations"] = self.violations
        payload.update(self.extra)
        return payload


# --- request models ----------------------------------------------------------

class MentionBody(BaseModel):
    term: str
    span: tuple[int, int] | None = None
    assigned_class: str | None = None
    sense_id: str | None = None


class CreateRecordBody(BaseModel):
    sentence: str
    pair: tuple[MentionBody, MentionBody]
    sentence_text: str | None = None
    id: str | None = None


class LinkBody(BaseModel):
    source: MentionBody
    relation: str
    direction: str = "forward"
    target: MentionBody


class AssignmentBody(BaseModel):
    kind: str
    link: LinkBody | None = None
    override: bool = False
    justification: str | None = None
    chain: list[LinkBody] | None = None
    reason: str | None = None
    note: str | None = None


class PatchRecordBody(BaseModel):
    version: int
    assignment: AssignmentBody | None = None
    pair: tuple[MentionBody, MentionBody] | None = None
    review_status: str | None = None


class RelatednessBody(BaseModel):
    score: float
    annotator: str | None = None


class ChainValidateBody(BaseModel):
    chain: list[LinkBody]


class SampleBody(BaseModel):
    n: int = Field(ge=0)
    seed: int | None = None


# --- helpers -----------------------------------------------------------------

def _mention(body: MentionBody, sentence: str) -> ConceptMention:
    return ConceptMention(
        term=body.term,
        sentence=sentence,
        span=body.span,
        assigned_class=body.assigned_class,
        sense_id=body.sense_id,
    )


def _direction(raw: str) -> Direction:
    try:
        return Direction(raw)
    except ValueError:
        raise ApiError("bad-request", f"unknown direction {raw!r}") from None


def _link(inv, body: LinkBody, sentence: str) -> RelationLink:
    """Resolve a posted link; an unknown relation name is kept verbatim so
    chain validation can report it as a violation instead of failing hard."""
    source = _mention(body.source, sentence)
    target = _mention(body.target, sentence)
    direction = _direction(body.direction)
    try:
        return make_link(inv, source, body.relation, target, direction)
    except UnknownIdError:
        return RelationLink(source=source, relation=body.relation,
                            direction=direction, target=target)


def _assignment(inv, body: AssignmentBody, sentence: str) -> Assignment:
    if body.kind == "direct":
        if body.link is None:
            raise ApiError("bad-request", "direct assignment needs a link")
        return Direct(
            link=_link(inv, body.link, sentence),
            override=body.override,
            justification=body.justification,
        )
    if body.kind == "composite":
        if not body.chain:
            raise ApiError("bad-request", "composite assignment needs a chain")
        return Composite(chain=tuple(_link(inv, l, sentence) for l in body.chain))
    if body.kind == "unclassified":
        try:
            reason = ReasonCode(body.reason)
        except ValueError:
            raise ApiError(
                "bad-request",
                f"reason must be one of {[r.value for r in ReasonCode]}, got {body.reason!r}",
            ) from None
        return Unclassified(reason=reason, note=body.note)
    raise ApiError("bad-request", f"unknown assignment kind {body.kind!r}")


def _violations_payload(violations) -> list[dict[str, str]]:
    return [
        {"rule": v.rule, "entity": v.entity, "message": v.message}
        for v in violations
    ]


def _record_payload(record: AnnotationRecord) -> dict[str, Any]:
    payload = record_to_dict(record)
    payload["status"] = classify_status(record).value
    payload["mean_relatedness"] = mean_relatedness(record)
    return payload


class _ValidationFailed(Exception):
    def __init__(self, violations):
        self.violations = violations


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    cfg = (config or ServiceConfig()).validated()

    inv = (
        load_inventory_path(cfg.inventory_path)
        if cfg.inventory_path is not None else load_seed_inventory())
    table = (
        load_alignment_path(cfg.alignment_path, inv)
        if cfg.alignment_path is not None else load_sample_alignment(inv))
    corpus, glossary = (
        load_corpus_dir(cfg.corpus_dir)
        if cfg.corpus_dir is not None else load_sample_corpus())
    store = RecordStore(cfg.store_path, snapshot_every=500)
    id_lock = threading.Lock()

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        store.close()

    app = FastAPI(title="relann", lifespan=lifespan)
    app.state.store = store
    app.state.inventory = inv
    app.state.config = cfg

    @app.exception_handler(ApiError)
    async def on_api_error(_: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(status_code=_STATUS_OF_CODE[exc.code], content=exc.body())

    def next_record_id() -> str:
        with id_lock:
            highest = 0
            for record in store.list_records():
                head, _, tail = record.id.partition("-")
                if head == "r" and tail.isdigit():
                    highest = max(highest, int(tail))
            return f"r-{highest + 1:04d}"

    # -- inventory ------------------------------------------------------------

    @app.get("/inventory")
    def get_inventory() -> dict[str, Any]:
        return inventory_to_dict(inv)

    @app.get("/classes")
    def get_classes() -> dict[str, Any]:
        doc = inventory_to_dict(inv)
        return {"classes": doc["classes"]}

    @app.get("/candidates")
    def get_candidates(a: str, b: str) -> dict[str, Any]:
        try:
            candidates = candidate_relations(inv, a, b, try_both_orders=True)
        except UnknownIdError as exc:
            raise ApiError("bad-request", str(exc)) from None
        out = []
        for c in candidates:
            rel = inv.relations[c.relation]
            out.append({
                "relation": rel.id,
                "direction": c.direction.value,
                "label": rel.label,
                "origin": rel.origin.value,
                "description": rel.description,
                "example": rel.example,
            })
        return {"a": a, "b": b, "candidates": out}

    # -- alignment --------------------------------------------------------------

    @app.get("/alignment/{lemma}")
    def get_alignment(lemma: str, pos: str = "noun") -> dict[str, Any]:
        try:
            pos_value = Pos(pos)
        except ValueError:
            raise ApiError(
                "bad-request",
                f"pos must be one of {[p.value for p in Pos]}, got {pos!r}") from None
        senses = []
        for sense_id, dolce_class in classes_for(table, lemma, pos_value):
            entry = table.entries.get((lemma.lower(), pos_value, sense_id))
            senses.append({
                "sense_id": sense_id,
                "class": dolce_class,
                "gloss": entry.gloss if entry is not None else None,
            })
        return {"lemma": lemma, "pos": pos_value.value, "senses": senses}

    # -- corpus -----------------------------------------------------------------

    @app.get("/corpus/sentences/{sentence_id}")
    def get_sentence(sentence_id: str) -> dict[str, Any]:
        sentence = corpus.sentences.get(sentence_id)
        if sentence is None:
            raise ApiError("not-found", f"no sentence {sentence_id!r}")
        return {
            "id": sentence.id,
            "source": sentence.source,
            "text": sentence.text,
            "tokens": [
                {"surface": t.surface, "start": t.start, "end": t.end}
                for t in sentence.tokens
            ],
        }

    @app.post("/corpus/sample")
    def post_sample(body: SampleBody) -> dict[str, Any]:
        seed = body.seed if body.seed is not None else cfg.default_seed
        try:
            picks = sample_first_terms(corpus.sentences.values(), glossary, seed, body.n)
        except InsufficientTokensError as exc:
            raise ApiError("bad-request", str(exc)) from None
        items = []
        for pick in picks:
            sentence = corpus.sentences[pick.sentence]
            token = sentence.tokens[pick.first_term]
            items.append({
                "sentence": pick.sentence,
                "sentence_text": sentence.text,
                "first_term": pick.first_term,
                "token": {"surface": token.surface, "start": token.start, "end": token.end},
                "seed": pick.sampled_with_seed,
            })
        return {"seed": seed, "n": body.n, "items": items}

    # -- records ----------------------------------------------------------------

    @app.get("/records")
    def get_records(status: str | None = None) -> dict[str, Any]:
        records = store.list_records()
        if status is not None:
            records = [r for r in records if classify_status(r).value == status]
        return {"count": len(records), "records": [_record_payload(r) for r in records]}

    @app.get("/records/{record_id}")
    def get_record(record_id: str) -> dict[str, Any]:
        try:
            return _record_payload(store.get(record_id))
        except UnknownRecordError as exc:
            raise ApiError("not-found", str(exc)) from None

    @app.post("/records", status_code=201)
    def post_record(
        body: CreateRecordBody,
        x_annotator: str | None = Header(default=None, alias="X-Annotator"),
    ) -> dict[str, Any]:
        sentence = corpus.sentences.get(body.sentence)
        text = body.sentence_text
        if sentence is not None:
            if text is None:
                text = sentence.text
            elif text != sentence.text:
                raise ApiError(
                    "validation-failed",
                    "sentence_text does not match the corpus sentence",
                    violations=[{
                        "rule": "sentence-text-mismatch",
                        "entity": body.sentence,
                        "message": "posted text differs from the stored sentence",
                    }])
        elif text is None:
            raise ApiError(
                "bad-request",
                f"sentence {body.sentence!r} is not in the corpus; sentence_text is required")
        key = make_mutation_key("create", None, {
            "body": body.model_dump(mode="json"),
            "annotator": x_annotator,
        })
        record_id = body.id or next_record_id()
        record = AnnotationRecord(
            id=record_id,
            sentence=body.sentence,
            sentence_text=text,
            pair=(_mention(body.pair[0], body.sentence), _mention(body.pair[1], body.sentence)),
        )
        problems = validate_record(record, inv)
        if problems:
            raise ApiError(
                "validation-failed", "record is not valid",
                violations=_violations_payload(problems))
        try:
            stored = store.create(record, mutation_key=key)
        except RecordExistsError as exc:
            raise ApiError("conflict", str(exc)) from None
        return _record_payload(stored)

    @app.patch("/records/{record_id}")
    def patch_record(record_id: str, body: PatchRecordBody) -> dict[str, Any]:
        # Fields explicitly set distinguish "clear assignment" from "leave it",
        # so they are part of the retry identity alongside the body itself.
        payload = body.model_dump(mode="json")
        payload["fields_set"] = sorted(body.model_fields_set)
        key = make_mutation_key(record_id, body.version, payload)
        sets_assignment = "assignment" in body.model_fields_set

        def transform(current: AnnotationRecord) -> AnnotationRecord:
            updated = current
            if body.pair is not None:
                updated = replace(updated, pair=(
                    _mention(body.pair[0], updated.sentence),
                    _mention(body.pair[1], updated.sentence)))
            if body.review_status is not None:
                try:
                    updated = replace(updated, review_status=ReviewStatus(body.review_status))
                except ValueError:
                    raise ApiError(
                        "bad-request",
                        f"review_status must be one of "
                        f"{[s.value for s in ReviewStatus]}") from None
            if sets_assignment:
                assignment = (
                    _assignment(inv, body.assignment, updated.sentence)
                    if body.assignment is not None else None)
                updated = replace(updated, assignment=assignment)
            updated = replace(updated, version=current.version + 1)
            problems = validate_record(updated, inv)
            if problems:
                raise _ValidationFailed(problems)
            return updated

        try:
            stored = store.mutate(record_id, body.version, transform, mutation_key=key)
        except UnknownRecordError as exc:
            raise ApiError("not-found", str(exc)) from None
        except VersionConflictError as exc:
            raise ApiError(
                "conflict", str(exc),
                extra={"expected": exc.expected, "actual": exc.actual}) from None
        except _ValidationFailed as exc:
            raise ApiError(
                "validation-failed", "record update rejected",
                violations=_violations_payload(exc.violations)) from None
        return _record_payload(stored)

    @app.post("/records/{record_id}/relatedness")
    def post_relatedness(
        record_id: str,
        body: RelatednessBody,
        x_annotator: str | None = Header(default=None, alias="X-Annotator"),
    ) -> dict[str, Any]:
        annotator = body.annotator or x_annotator
        if not annotator:
            raise ApiError(
                "bad-request",
                "annotator required (body field or X-Annotator header)")
        key = make_mutation_key(record_id, None, {
            "op": "relatedness", "annotator": annotator, "score": body.score,
        })
        try:
            stored = store.mutate(
                record_id, None,
                lambda r: set_relatedness(r, annotator, body.score),
                mutation_key=key)
        except UnknownRecordError as exc:
            raise ApiError("not-found", str(exc)) from None
        except ScoreOutOfRangeError as exc:
            raise ApiError(
                "validation-failed", str(exc),
                violations=[{"rule": "score-range", "entity": record_id, "message": str(exc)}],
            ) from None
        return _record_payload(stored)

    @app.post("/records/{record_id}/chain/validate")
    def post_chain_validate(record_id: str, body: ChainValidateBody) -> dict[str, Any]:
        try:
            record = store.get(record_id)
        except UnknownRecordError as exc:
            raise ApiError("not-found", str(exc)) from None
        chain = [_link(inv, l, record.sentence) for l in body.chain]
        violations = validate_chain(chain, record.pair, inv)
        return {"valid": not violations, "violations": _violations_payload(violations)}

    # -- stats ------------------------------------------------------------------

    @app.get("/stats/summary")
    def get_summary() -> dict[str, Any]:
        return summary_to_dict(summarize(store.list_records(), inv))

    @app.get("/stats/frequencies")
    def get_frequencies(
        scope: str = "direct",
        origin: str | None = None,
        fold: bool = False,
    ) -> dict[str, Any]:
        origin_value: Origin | None = None
        if origin is not None:
            try:
                origin_value = Origin(origin)
            except ValueError:
                raise ApiError(
                    "bad-request",
                    f"origin must be one of {[o.value for o in Origin]}") from None
        try:
            report = relation_frequencies(
                store.list_records(), scope, inv,
                origin=origin_value, fold_directions=fold)
        except UnknownScopeError as exc:
            raise ApiError("bad-request", str(exc)) from None
        return frequencies_to_dict(report)

    @app.get("/stats/chain-length")
    def get_chain_length() -> dict[str, Any]:
        records = store.list_records()
        composite = [r for r in records if isinstance(r.assignment, Composite)]
        try:
            average: float | None = float(avg_chain_length(records))
        except NoCompositeRecordsError:
            average = None
        return {
            "average": average,
            "composite_records": len(composite),
            "total_links": sum(len(r.assignment.chain) for r in composite),
        }

    @app.get("/stats/relatedness")
    def get_relatedness() -> dict[str, Any]:
        return relatedness_to_dict(relatedness_report(store.list_records()))

    return app
