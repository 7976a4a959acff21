"""HTTP API behavior: endpoints, error envelope, idempotent mutations."""

from __future__ import annotations

import itertools
from urllib.parse import quote

import pytest
from fastapi.testclient import TestClient

from relann.config import ServiceConfig
from relann.service import create_app

EXT_SENTENCE = "ext#0001"
EXT_TEXT = "The loan funds the payment."

_ANNOTATOR_SEQ = itertools.count(1)


@pytest.fixture()
def client(tmp_path):
    cfg = ServiceConfig(store_path=tmp_path / "records.jsonl")
    with TestClient(create_app(cfg)) as c:
        yield c


@pytest.fixture()
def corpus_sentence_id(corpus_and_glossary):
    corpus, _ = corpus_and_glossary
    return sorted(corpus.sentences)[0]


def make_pair(first_class="legal-possession-entity", second_class="action"):
    return [
        {"term": "loan", "assigned_class": first_class},
        {"term": "payment", "assigned_class": second_class},
    ]


def create_external_record(client, pair=None, record_id=None):
    # A distinct annotator per call keeps otherwise-identical bodies from
    # being deduplicated as retries of the same create.
    body = {
        "sentence": EXT_SENTENCE,
        "sentence_text": EXT_TEXT,
        "pair": pair or make_pair(),
    }
    if record_id:
        body["id"] = record_id
    response = client.post("/records", json=body,
                           headers={"X-Annotator": f"setup-{next(_ANNOTATOR_SEQ)}"})
    assert response.status_code == 201, response.text
    return response.json()


def direct_assignment(relation="use-of", override=False, justification=None):
    return {
        "kind": "direct",
        "link": {
            "source": {"term": "loan", "assigned_class": "legal-possession-entity"},
            "relation": relation,
            "target": {"term": "payment", "assigned_class": "action"},
        },
        "override": override,
        "justification": justification,
    }


def composite_assignment():
    mid = {"term": "funds", "assigned_class": "situation"}
    return {
        "kind": "composite",
        "chain": [
            {"source": {"term": "loan", "assigned_class": "legal-possession-entity"},
             "relation": "use-of", "target": mid},
            {"source": mid, "relation": "use-of",
             "target": {"term": "payment", "assigned_class": "action"}},
        ],
    }


class TestInventoryEndpoints:
    def test_inventory_document(self, client):
        doc = client.get("/inventory").json()
        assert len(doc["classes"]) == 19
        assert len(doc["relations"]) == 56
        assert any(a["name"] == "used-in" for a in doc["aliases"])

    def test_classes_view(self, client):
        doc = client.get("/classes").json()
        assert set(doc) == {"classes"}
        assert any(c["id"] == "particular" for c in doc["classes"])

    def test_candidates(self, client):
        doc = client.get("/candidates", params={"a": "event", "b": "endurant"}).json()
        top = doc["candidates"][0]
        assert {"relation", "direction", "label", "origin", "description", "example"} <= set(top)
        names = [(c["relation"], c["direction"]) for c in doc["candidates"]]
        assert ("patient", "forward") in names
        assert ("patient-of", "inverse") in names

    def test_candidates_unknown_class(self, client):
        response = client.get("/candidates", params={"a": "event", "b": "ghost"})
        assert response.status_code == 400
        assert response.json()["code"] == "bad-request"


class TestAlignmentEndpoints:
    def test_known_lemma(self, client):
        doc = client.get("/alignment/bank").json()
        assert doc["pos"] == "noun"
        senses = {s["sense_id"]: s["class"] for s in doc["senses"]}
        assert senses == {"bank.n.01": "social-role", "bank.n.09": "physical-object"}
        assert all(s["gloss"] for s in doc["senses"])

    def test_adjective_fallback(self, client):
        doc = client.get("/alignment/purple", params={"pos": "adjective"}).json()
        assert doc["senses"] == [{"sense_id": "default", "class": "quality", "gloss": None}]

    def test_unknown_noun_has_no_senses(self, client):
        assert client.get("/alignment/xylophone").json()["senses"] == []

    def test_bad_pos(self, client):
        response = client.get("/alignment/bank", params={"pos": "gerund"})
        assert response.status_code == 400
        assert response.json()["code"] == "bad-request"


class TestCorpusEndpoints:
    def test_sentence_lookup(self, client, corpus_sentence_id):
        doc = client.get(f"/corpus/sentences/{quote(corpus_sentence_id, safe='')}").json()
        assert doc["id"] == corpus_sentence_id
        for token in doc["tokens"]:
            assert doc["text"][token["start"]:token["end"]] == token["surface"]

    def test_sentence_not_found(self, client):
        response = client.get("/corpus/sentences/ghost%230001")
        assert response.status_code == 404
        assert response.json()["code"] == "not-found"

    def test_sample_is_deterministic(self, client):
        a = client.post("/corpus/sample", json={"n": 5, "seed": 42}).json()
        b = client.post("/corpus/sample", json={"n": 5, "seed": 42}).json()
        assert a == b
        assert len(a["items"]) == 5
        assert a["seed"] == 42

    def test_sample_items_are_consistent(self, client):
        doc = client.post("/corpus/sample", json={"n": 3, "seed": 1}).json()
        for item in doc["items"]:
            token = item["token"]
            assert item["sentence_text"][token["start"]:token["end"]] == token["surface"]

    def test_sample_overdraw(self, client):
        response = client.post("/corpus/sample", json={"n": 100000, "seed": 0})
        assert response.status_code == 400

    def test_sample_negative_n_fails_model_validation(self, client):
        assert client.post("/corpus/sample", json={"n": -1}).status_code == 422


class TestRecordCreation:
    def test_create_with_corpus_sentence_fills_text(self, client, corpus_sentence_id,
                                                    corpus_and_glossary):
        corpus, _ = corpus_and_glossary
        response = client.post("/records", json={
            "sentence": corpus_sentence_id, "pair": make_pair()})
        assert response.status_code == 201
        doc = response.json()
        assert doc["id"] == "r-0001"
        assert doc["status"] == "pending"
        assert doc["sentence_text"] == corpus.sentences[corpus_sentence_id].text
        assert doc["version"] == 1

    def test_create_rejects_wrong_text_for_corpus_sentence(self, client, corpus_sentence_id):
        response = client.post("/records", json={
            "sentence": corpus_sentence_id, "sentence_text": "Not that sentence.",
            "pair": make_pair()})
        assert response.status_code == 422
        doc = response.json()
        assert doc["code"] == "validation-failed"
        assert doc["violations"][0]["rule"] == "sentence-text-mismatch"

    def test_create_unknown_sentence_requires_text(self, client):
        response = client.post("/records", json={"sentence": EXT_SENTENCE, "pair": make_pair()})
        assert response.status_code == 400
        assert response.json()["code"] == "bad-request"

    def test_create_with_explicit_id_and_duplicate_conflict(self, client):
        create_external_record(client, record_id="r-7777")
        response = client.post("/records", json={
            "sentence": EXT_SENTENCE, "sentence_text": EXT_TEXT,
            "pair": make_pair(), "id": "r-7777"})
        assert response.status_code == 409
        assert response.json()["code"] == "conflict"

    def test_create_validates_record(self, client):
        pair = [
            {"term": "loan", "assigned_class": "vaporware"},
            {"term": "payment", "assigned_class": "action"},
        ]
        response = client.post("/records", json={
            "sentence": EXT_SENTENCE, "sentence_text": EXT_TEXT, "pair": pair})
        assert response.status_code == 422
        rules = {v["rule"] for v in response.json()["violations"]}
        assert rules == {"unknown-class"}

    def test_create_validates_span(self, client):
        pair = [
            {"term": "loan", "assigned_class": "action", "span": [4, 8]},
            {"term": "payment", "assigned_class": "action", "span": [0, 3]},
        ]
        response = client.post("/records", json={
            "sentence": EXT_SENTENCE, "sentence_text": EXT_TEXT, "pair": pair})
        assert response.status_code == 422
        rules = {v["rule"] for v in response.json()["violations"]}
        assert rules == {"span-term-mismatch"}

    def test_retried_create_same_annotator_dedupes(self, client):
        body = {"sentence": EXT_SENTENCE, "sentence_text": EXT_TEXT, "pair": make_pair()}
        first = client.post("/records", json=body, headers={"X-Annotator": "ann-1"}).json()
        retry = client.post("/records", json=body, headers={"X-Annotator": "ann-1"}).json()
        assert retry == first
        assert client.get("/records").json()["count"] == 1

    def test_same_body_other_annotator_creates_new_record(self, client):
        body = {"sentence": EXT_SENTENCE, "sentence_text": EXT_TEXT, "pair": make_pair()}
        client.post("/records", json=body, headers={"X-Annotator": "ann-1"})
        client.post("/records", json=body, headers={"X-Annotator": "ann-2"})
        assert client.get("/records").json()["count"] == 2

    def test_record_ids_increment(self, client):
        first = create_external_record(client)
        second = create_external_record(client)
        assert (first["id"], second["id"]) == ("r-0001", "r-0002")


class TestRecordReads:
    def test_get_record(self, client):
        created = create_external_record(client)
        doc = client.get(f"/records/{created['id']}").json()
        assert doc == created

    def test_get_unknown_record(self, client):
        response = client.get("/records/r-9999")
        assert response.status_code == 404
        assert response.json()["code"] == "not-found"

    def test_status_filter(self, client):
        created = create_external_record(client)
        client.patch(f"/records/{created['id']}", json={
            "version": 1, "assignment": direct_assignment()})
        create_external_record(client)
        assert client.get("/records", params={"status": "direct"}).json()["count"] == 1
        assert client.get("/records", params={"status": "pending"}).json()["count"] == 1
        assert client.get("/records").json()["count"] == 2


class TestRecordPatch:
    def test_assign_direct(self, client):
        created = create_external_record(client)
        response = client.patch(f"/records/{created['id']}", json={
            "version": 1, "assignment": direct_assignment()})
        assert response.status_code == 200
        doc = response.json()
        assert doc["status"] == "direct"
        assert doc["version"] == 2
        assert doc["assignment"]["link"]["relation"] == "use-of"

    def test_assign_composite(self, client):
        created = create_external_record(client)
        doc = client.patch(f"/records/{created['id']}", json={
            "version": 1, "assignment": composite_assignment()}).json()
        assert doc["status"] == "composite"
        assert len(doc["assignment"]["chain"]) == 2

    def test_assign_unclassified(self, client):
        created = create_external_record(client)
        doc = client.patch(f"/records/{created['id']}", json={
            "version": 1,
            "assignment": {"kind": "unclassified", "reason": "too-distant", "note": "far"},
        }).json()
        assert doc["status"] == "unclassified"

    def test_alias_resolves_in_posted_link(self, client):
        created = create_external_record(client)
        assignment = direct_assignment(relation="used-in")
        doc = client.patch(f"/records/{created['id']}", json={
            "version": 1, "assignment": assignment}).json()
        assert doc["assignment"]["link"]["relation"] == "used-for"
        assert doc["assignment"]["link"]["direction"] == "inverse"

    def test_clear_assignment_with_null(self, client):
        created = create_external_record(client)
        client.patch(f"/records/{created['id']}", json={
            "version": 1, "assignment": direct_assignment()})
        doc = client.patch(f"/records/{created['id']}", json={
            "version": 2, "assignment": None}).json()
        assert doc["status"] == "pending"
        assert doc["version"] == 3

    def test_patch_without_assignment_keeps_it(self, client):
        created = create_external_record(client)
        client.patch(f"/records/{created['id']}", json={
            "version": 1, "assignment": direct_assignment()})
        doc = client.patch(f"/records/{created['id']}", json={
            "version": 2, "review_status": "reviewed"}).json()
        assert doc["status"] == "direct"
        assert doc["review_status"] == "reviewed"

    def test_stale_version_conflict_carries_versions(self, client):
        created = create_external_record(client)
        client.patch(f"/records/{created['id']}", json={
            "version": 1, "assignment": direct_assignment()})
        response = client.patch(f"/records/{created['id']}", json={
            "version": 1, "review_status": "reviewed"})
        assert response.status_code == 409
        doc = response.json()
        assert doc["code"] == "conflict"
        assert (doc["expected"], doc["actual"]) == (1, 2)

    def test_validation_failure_reports_violations(self, client):
        created = create_external_record(client)
        response = client.patch(f"/records/{created['id']}", json={
            "version": 1, "assignment": direct_assignment(relation="happens-at")})
        assert response.status_code == 422
        doc = response.json()
        assert doc["code"] == "validation-failed"
        assert {v["rule"] for v in doc["violations"]} == {"signature"}

    def test_override_with_justification_saves(self, client):
        created = create_external_record(client)
        assignment = direct_assignment(relation="happens-at", override=True,
                                       justification="temporal idiom")
        response = client.patch(f"/records/{created['id']}", json={
            "version": 1, "assignment": assignment})
        assert response.status_code == 200
        assert response.json()["status"] == "direct"

    def test_override_without_justification_rejected(self, client):
        created = create_external_record(client)
        assignment = direct_assignment(relation="happens-at", override=True)
        response = client.patch(f"/records/{created['id']}", json={
            "version": 1, "assignment": assignment})
        assert response.status_code == 422
        assert {v["rule"] for v in response.json()["violations"]} == {"override-justification"}

    def test_bad_review_status(self, client):
        created = create_external_record(client)
        response = client.patch(f"/records/{created['id']}", json={
            "version": 1, "review_status": "golden"})
        assert response.status_code == 400

    def test_bad_direction(self, client):
        created = create_external_record(client)
        assignment = direct_assignment()
        assignment["link"]["direction"] = "sideways"
        response = client.patch(f"/records/{created['id']}", json={
            "version": 1, "assignment": assignment})
        assert response.status_code == 400

    def test_unknown_record(self, client):
        response = client.patch("/records/r-9999", json={
            "version": 1, "review_status": "reviewed"})
        assert response.status_code == 404

    def test_retried_patch_replays_first_outcome(self, client):
        created = create_external_record(client)
        body = {"version": 1, "assignment": direct_assignment()}
        first = client.patch(f"/records/{created['id']}", json=body).json()
        retry = client.patch(f"/records/{created['id']}", json=body).json()
        assert retry == first
        assert client.get(f"/records/{created['id']}").json()["version"] == 2

    def test_different_intent_same_version_conflicts(self, client):
        created = create_external_record(client)
        client.patch(f"/records/{created['id']}", json={
            "version": 1, "assignment": direct_assignment()})
        response = client.patch(f"/records/{created['id']}", json={
            "version": 1, "assignment": composite_assignment()})
        assert response.status_code == 409

    def test_explicit_null_and_omitted_assignment_are_distinct_intents(self, client):
        created = create_external_record(client)
        noop = client.patch(f"/records/{created['id']}", json={"version": 1})
        assert noop.status_code == 200
        cleared = client.patch(f"/records/{created['id']}", json={
            "version": 1, "assignment": None})
        assert cleared.status_code == 409


class TestRelatedness:
    def test_score_via_body(self, client):
        created = create_external_record(client)
        doc = client.post(f"/records/{created['id']}/relatedness", json={
            "score": 7, "annotator": "ann-1"}).json()
        assert doc["relatedness_scores"] == {"ann-1": 7}
        assert doc["mean_relatedness"] == 7

    def test_score_via_header(self, client):
        created = create_external_record(client)
        doc = client.post(f"/records/{created['id']}/relatedness", json={"score": 4},
                          headers={"X-Annotator": "ann-2"}).json()
        assert doc["relatedness_scores"] == {"ann-2": 4}

    def test_missing_annotator(self, client):
        created = create_external_record(client)
        response = client.post(f"/records/{created['id']}/relatedness", json={"score": 4})
        assert response.status_code == 400

    def test_out_of_range_score(self, client):
        created = create_external_record(client)
        response = client.post(f"/records/{created['id']}/relatedness", json={
            "score": 11, "annotator": "a"})
        assert response.status_code == 422
        assert {v["rule"] for v in response.json()["violations"]} == {"score-range"}

    def test_mean_over_two_annotators(self, client):
        created = create_external_record(client)
        client.post(f"/records/{created['id']}/relatedness", json={"score": 3, "annotator": "a"})
        doc = client.post(f"/records/{created['id']}/relatedness",
                          json={"score": 4, "annotator": "b"}).json()
        assert doc["mean_relatedness"] == 3.5

    def test_same_score_resubmission_is_noop(self, client):
        created = create_external_record(client)
        first = client.post(f"/records/{created['id']}/relatedness", json={
            "score": 5, "annotator": "a"}).json()
        retry = client.post(f"/records/{created['id']}/relatedness", json={
            "score": 5, "annotator": "a"}).json()
        assert retry == first
        assert retry["version"] == 2

    def test_changed_score_applies(self, client):
        created = create_external_record(client)
        client.post(f"/records/{created['id']}/relatedness", json={"score": 5, "annotator": "a"})
        doc = client.post(f"/records/{created['id']}/relatedness",
                          json={"score": 6, "annotator": "a"}).json()
        assert doc["relatedness_scores"] == {"a": 6}
        assert doc["version"] == 3

    def test_unknown_record(self, client):
        response = client.post("/records/r-9999/relatedness", json={"score": 4, "annotator": "a"})
        assert response.status_code == 404


class TestChainValidation:
    def test_valid_chain(self, client):
        created = create_external_record(client)
        doc = client.post(f"/records/{created['id']}/chain/validate",
                          json={"chain": composite_assignment()["chain"]}).json()
        assert doc == {"valid": True, "violations": []}

    def test_dry_run_does_not_mutate(self, client):
        created = create_external_record(client)
        client.post(f"/records/{created['id']}/chain/validate",
                    json={"chain": composite_assignment()["chain"]})
        doc = client.get(f"/records/{created['id']}").json()
        assert doc["status"] == "pending"
        assert doc["version"] == 1

    def test_invalid_chain_reports_rules(self, client):
        created = create_external_record(client)
        chain = composite_assignment()["chain"]
        chain[1]["source"] = {"term": "elsewhere", "assigned_class": "situation"}
        doc = client.post(f"/records/{created['id']}/chain/validate",
                          json={"chain": chain}).json()
        assert doc["valid"] is False
        assert {v["rule"] for v in doc["violations"]} == {"contiguity"}

    def test_unknown_relation_reported_not_crashed(self, client):
        created = create_external_record(client)
        chain = composite_assignment()["chain"]
        chain[0]["relation"] = "warp-drive"
        doc = client.post(f"/records/{created['id']}/chain/validate",
                          json={"chain": chain}).json()
        assert {v["rule"] for v in doc["violations"]} == {"unknown-relation"}

    def test_unknown_record(self, client):
        response = client.post("/records/r-9999/chain/validate", json={"chain": []})
        assert response.status_code == 404


class TestStats:
    def _populate(self, client):
        first = create_external_record(client)
        client.patch(f"/records/{first['id']}", json={
            "version": 1, "assignment": direct_assignment()})
        client.post(f"/records/{first['id']}/relatedness", json={"score": 8, "annotator": "a"})
        second = create_external_record(client)
        client.patch(f"/records/{second['id']}", json={
            "version": 1, "assignment": composite_assignment()})
        third = create_external_record(client)
        client.patch(f"/records/{third['id']}", json={
            "version": 1,
            "assignment": {"kind": "unclassified", "reason": "no-relation-found"}})
        create_external_record(client)  # stays pending

    def test_summary(self, client):
        self._populate(client)
        doc = client.get("/stats/summary").json()
        assert doc["total"] == 3
        assert doc["pending"] == 1
        assert doc["direct"]["count"] == 1
        assert doc["composite"]["count"] == 1
        assert doc["unclassified"]["count"] == 1

    def test_empty_summary(self, client):
        doc = client.get("/stats/summary").json()
        assert doc["total"] == 0

    def test_frequencies(self, client):
        self._populate(client)
        doc = client.get("/stats/frequencies", params={"scope": "composite-all-links"}).json()
        assert doc["total"] == 2
        assert doc["entries"]["use-of"]["count"] == 2

    def test_frequencies_origin_filter(self, client):
        self._populate(client)
        doc = client.get("/stats/frequencies", params={"scope": "direct", "origin": "dolce"}).json()
        assert doc["total"] == 1

    def test_frequencies_bad_scope(self, client):
        assert client.get("/stats/frequencies", params={"scope": "bogus"}).status_code == 400

    def test_frequencies_bad_origin(self, client):
        response = client.get("/stats/frequencies", params={"origin": "martian"})
        assert response.status_code == 400

    def test_chain_length(self, client):
        self._populate(client)
        doc = client.get("/stats/chain-length").json()
        assert doc == {"average": 2.0, "composite_records": 1, "total_links": 2}

    def test_chain_length_without_composites(self, client):
        doc = client.get("/stats/chain-length").json()
        assert doc == {"average": None, "composite_records": 0, "total_links": 0}

    def test_relatedness_report(self, client):
        self._populate(client)
        doc = client.get("/stats/relatedness").json()
        assert doc["by_relation"]["use-of"] == {"mean": 8.0, "pairs": 1}
        assert doc["by_category"]["direct"] == {"mean": 8.0, "pairs": 1}


class TestPersistence:
    def test_records_survive_app_restart(self, tmp_path):
        cfg = ServiceConfig(store_path=tmp_path / "records.jsonl")
        with TestClient(create_app(cfg)) as client:
            created = create_external_record(client)
            client.patch(f"/records/{created['id']}", json={
                "version": 1, "assignment": direct_assignment()})
        with TestClient(create_app(cfg)) as client:
            doc = client.get(f"/records/{created['id']}").json()
            assert doc["status"] == "direct"
            assert doc["version"] == 2
