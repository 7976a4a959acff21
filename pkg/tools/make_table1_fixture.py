"""Generate the 300-record benchmark fixture shipped with the package.

The dataset is shaped to exact totals:

  direct        218  (77 dolce / 141 custom)
  composite      74  (first links 36 dolce / 38 custom; 197 links total,
                      111 dolce / 86 custom; lengths 35x2 + 29x3 + 10x4)
  unclassified    8  (3 too-distant, 3 different-clauses, 2 no-relation-found)

and to exact per-relation mean relatedness values for the pinned relations
(specialisation 9.5, component-of 9.0, descriptive-place-of 9.0, product 9.0,
use-of 8.5, part-of 8.25, unit-of 8.25, happens-at 3.0, involves 3.5,
result 3.5, source 11/3). Everything else is filled deterministically from a
fixed splitmix64 stream, so rerunning this script reproduces the same bytes.

Run from the repository root:

    python3 tools/make_table1_fixture.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from relann.inventory import Origin, load_seed_inventory
from relann.records import (
    AnnotationRecord,
    Composite,
    ConceptMention,
    Direct,
    ReasonCode,
    RelationLink,
    ReviewStatus,
    Unclassified,
    record_to_dict,
    validate_record,
)
from relann.inventory import Direction
from relann.rng import SplitMix64

OUT_PATH = Path(__file__).resolve().parent.parent / "src/relann/data/fixtures/table1_records.jsonl"
SEED = 0x7E1A_71B1

# structural roots of the relation hierarchy; never annotate with these
STRUCTURAL = {"immediate-relation", "mediated-relation"}

# direct records per relation: dolce side (77 total)
DIRECT_DOLCE = {
    "patient": 12, "patient-of": 8, "target": 7, "target-of": 5,
    "component-of": 2, "descriptive-place-of": 2, "product": 2, "use-of": 2,
    "part-of": 2, "unit-of": 2, "happens-at": 2, "involves": 1, "result": 1,
    "references": 6, "theme": 4, "performs": 6, "performed-by": 3,
    "prescribes": 3, "instrument": 3, "resource": 2, "precedes": 1,
    "co-participates-with": 1,
}

# custom side (141 total); qualifier + indirect-target + ownership = 67
DIRECT_CUSTOM = {
    "qualifier": 30, "indirect-target": 20, "ownership": 17,
    "specialisation": 4, "source": 3,
    "affects": 5, "common-ownership": 4, "condition": 4,
    "co-occurring-qualifier": 3, "coreference": 4, "correlated-variation": 3,
    "destination": 4, "indirect-ownership": 3, "indirect-qualifier": 4,
    "indirect-reference": 3, "indirect-result": 3, "instantiation": 4,
    "membership": 4, "opposition": 3, "represented-in": 3,
    "sibling-concept": 3, "theme-component": 3, "used-for": 4,
    "value-component": 3,
}

# per-record annotator score pairs for the relatedness-pinned relations
PINNED_SCORES = {
    "specialisation": [(9, 10), (9, 10), (9, 10), (9, 10)],
    "component-of": [(9, 9), (9, 9)],
    "descriptive-place-of": [(9, 9), (9, 9)],
    "product": [(9, 9), (9, 9)],
    "use-of": [(8, 9), (8, 9)],
    "part-of": [(8, 9), (8, 8)],
    "unit-of": [(8, 9), (8, 8)],
    "happens-at": [(3, 3), (3, 3)],
    "involves": [(3, 4)],
    "result": [(3, 4)],
    "source": [(3, 4), (3, 4), (4, 4)],
}

CHAIN_LENGTHS = [2] * 35 + [3] * 29 + [4] * 10          # 74 chains, 197 links
FIRST_LINK_ORIGINS = ["dolce"] * 36 + ["custom"] * 38   # table footnote split
REST_LINK_ORIGINS = ["dolce"] * 75 + ["custom"] * 48    # 111/86 overall

UNCLASSIFIED_REASONS = (
    [ReasonCode.TOO_DISTANT] * 3
    + [ReasonCode.DIFFERENT_CLAUSES] * 3
    + [ReasonCode.NO_RELATION_FOUND] * 2
)

TERMS = [
    "money", "loan", "mortgage", "interest", "account", "deposit", "balance",
    "credit", "debt", "bank", "payment", "currency", "funds", "investment",
    "shares", "capital", "income", "profit", "revenue", "assets", "market",
    "price", "value", "demand", "risk", "dividend", "portfolio", "financing",
    "investor", "merger", "acquisition", "liquidation", "audit", "transaction",
    "sale", "company", "employer", "seller", "manager", "accountant",
    "regulator", "creditworthiness", "insolvency", "agreement", "examination",
    "trend", "statement", "budget", "contract", "pension", "refund", "lease",
    "invoice", "collateral", "premium", "annuity", "broker", "treasury",
    "surplus", "deficit", "quota", "draft", "voucher", "ledger", "margin",
]


def shuffled(rng: SplitMix64, items: list) -> list:
    order = rng.sample_indices(len(items), len(items))
    return [items[i] for i in order]


def main() -> None:
    inv = load_seed_inventory()
    rng = SplitMix64(SEED)

    def term_stream():
        i = 0
        while True:
            yield TERMS[i % len(TERMS)]
            i += 1

    terms = term_stream()

    def distinct_terms(n: int) -> list[str]:
        out: list[str] = []
        while len(out) < n:
            t = next(terms)
            if t not in out:
                out.append(t)
        return out

    def mention(term: str, cls: str, sentence: str) -> ConceptMention:
        return ConceptMention(term=term, sentence=sentence, assigned_class=cls)

    records: list[AnnotationRecord] = []
    counter = 0

    def new_ids() -> tuple[str, str]:
        nonlocal counter
        counter += 1
        return f"fx-{counter:04d}", f"fx-sent#{counter:04d}"

    def unpinned_scores(low: int, spread: int) -> dict[str, int]:
        return {"a1": low + rng.below(spread), "a2": low + rng.below(spread)}

    # --- direct records ------------------------------------------------------
    direct_plan: list[str] = []
    for rel_id, count in {**DIRECT_DOLCE, **DIRECT_CUSTOM}.items():
        direct_plan.extend([rel_id] * count)
    direct_plan = shuffled(rng, direct_plan)

    pinned_queues = {rel: list(pairs) for rel, pairs in PINNED_SCORES.items()}

    for rel_id in direct_plan:
        rel = inv.relations[rel_id]
        rid, sid = new_ids()
        a, b = distinct_terms(2)
        text = f"The {a} was weighed against the {b} in the quarterly filing."
        src = mention(a, rel.domain, sid)
        tgt = mention(b, rel.range, sid)
        link = RelationLink(source=src, relation=rel_id, direction=Direction.FORWARD, target=tgt)
        if rel_id in pinned_queues and pinned_queues[rel_id]:
            s1, s2 = pinned_queues[rel_id].pop(0)
            scores = {"a1": s1, "a2": s2}
        else:
            scores = unpinned_scores(5, 5)
        records.append(AnnotationRecord(
            id=rid, sentence=sid, sentence_text=text, pair=(src, tgt),
            assignment=Direct(link=link),
            relatedness_scores=scores,
            review_status=ReviewStatus.REVIEWED,
        ))

    for queue in pinned_queues.values():
        assert not queue, "pinned scores left over; counts out of sync"

    # --- composite records ---------------------------------------------------
    def origin_pool(origin: Origin, liberal: bool) -> list[str]:
        out = []
        for r in inv.relations.values():
            if r.id in STRUCTURAL or r.origin is not origin:
                continue
            if liberal and not (r.domain == "particular" and r.range == "particular"):
                continue
            out.append(r.id)
        return sorted(out)

    first_pools = {
        "dolce": origin_pool(Origin.DOLCE, liberal=False),
        "custom": origin_pool(Origin.CUSTOM, liberal=False),
    }
    rest_pools = {
        "dolce": origin_pool(Origin.DOLCE, liberal=True),
        "custom": origin_pool(Origin.CUSTOM, liberal=True),
    }
    pool_cursor = {key: 0 for key in ("first-dolce", "first-custom", "rest-dolce", "rest-custom")}

    def next_from(pool_key: str, pools: dict[str, list[str]], origin: str) -> str:
        pool = pools[origin]
        cursor = pool_cursor[f"{pool_key}-{origin}"]
        pool_cursor[f"{pool_key}-{origin}"] = cursor + 1
        return pool[cursor % len(pool)]

    lengths = shuffled(rng, list(CHAIN_LENGTHS))
    first_origins = shuffled(rng, list(FIRST_LINK_ORIGINS))
    rest_origins = shuffled(rng, list(REST_LINK_ORIGINS))
    rest_cursor = 0

    for length, first_origin in zip(lengths, first_origins):
        rid, sid = new_ids()
        chain_terms = distinct_terms(length + 1)
        text = "The " + " fed the ".join(chain_terms) + " across the reporting period."
        links: list[RelationLink] = []
        first_rel = inv.relations[next_from("first", first_pools, first_origin)]
        links.append(RelationLink(
            source=mention(chain_terms[0], first_rel.domain, sid),
            relation=first_rel.id,
            direction=Direction.FORWARD,
            target=mention(chain_terms[1], first_rel.range, sid),
        ))
        junction_class = first_rel.range
        for hop in range(1, length):
            origin = rest_origins[rest_cursor]
            rest_cursor += 1
            rel = inv.relations[next_from("rest", rest_pools, origin)]
            links.append(RelationLink(
                source=mention(chain_terms[hop], junction_class, sid),
                relation=rel.id,
                direction=Direction.FORWARD,
                target=mention(chain_terms[hop + 1], rel.range, sid),
            ))
            junction_class = rel.range
        pair = (links[0].source, links[-1].target)
        records.append(AnnotationRecord(
            id=rid, sentence=sid, sentence_text=text, pair=pair,
            assignment=Composite(chain=tuple(links)),
            relatedness_scores=unpinned_scores(1, 3),
            review_status=ReviewStatus.REVIEWED,
        ))
    assert rest_cursor == len(rest_origins), "rest-link origin plan not exhausted"

    # --- unclassified records --------------------------------------------------
    for reason in UNCLASSIFIED_REASONS:
        rid, sid = new_ids()
        a, b = distinct_terms(2)
        text = (
            f"Although the {a} appeared early in the clause, the {b} sat in a "
            f"different construction entirely."
        )
        records.append(AnnotationRecord(
            id=rid, sentence=sid, sentence_text=text,
            pair=(mention(a, "particular", sid), mention(b, "particular", sid)),
            assignment=Unclassified(reason=reason),
            relatedness_scores=unpinned_scores(2, 3),
            review_status=ReviewStatus.REVIEWED,
        ))

    # --- verify against independent recomputation ------------------------------
    from decimal import Decimal
    from relann.stats import (
        FrequencyScope, avg_chain_length, relation_frequencies,
        relatedness_report, summarize,
    )

    assert len(records) == 300
    for record in records:
        problems = validate_record(record, inv)
        assert not problems, (record.id, problems)

    summary = summarize(records, inv)
    assert (summary.direct, summary.composite, summary.unclassified) == (218, 74, 8)
    assert (summary.direct_split.dolce, summary.direct_split.custom) == (77, 141)
    assert (summary.composite_split.dolce, summary.composite_split.custom) == (36, 38)

    links = [l for r in records if isinstance(r.assignment, Composite) for l in r.assignment.chain]
    dolce_links = sum(1 for l in links if inv.relations[l.relation].origin is Origin.DOLCE)
    assert (len(links), dolce_links, len(links) - dolce_links) == (197, 111, 86)
    assert avg_chain_length(records) == Decimal("2.66")

    folded = relation_frequencies(
        records, FrequencyScope.DIRECT, inv, origin=Origin.DOLCE, fold_directions=True)
    family = folded.entries["patient"].count + folded.entries["target"].count
    assert (family, folded.total) == (32, 77), (family, folded.total)

    custom = relation_frequencies(records, FrequencyScope.DIRECT, inv, origin=Origin.CUSTOM)
    trio = sum(custom.entries[r].count for r in ("qualifier", "indirect-target", "ownership"))
    assert (trio, custom.total) == (67, 141)

    rel_report = relatedness_report(records)
    for rel_id, pairs in PINNED_SCORES.items():
        expected = sum(sum(p) / 2 for p in pairs) / len(pairs)
        got = rel_report.by_relation[rel_id][0]
        assert abs(got - expected) < 1e-9, (rel_id, got, expected)
    assert rel_report.by_category["direct"][0] > rel_report.by_category["composite"][0]

    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT_PATH, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_dict(record), sort_keys=True) + "\n")
    print(f"wrote {len(records)} records to {OUT_PATH}")
    print(f"direct {summary.direct} ({summary.direct_split.dolce}/{summary.direct_split.custom}) "
          f"composite {summary.composite} ({summary.composite_split.dolce}/{summary.composite_split.custom}) "
          f"unclassified {summary.unclassified}")
    print(f"links {len(links)} ({dolce_links}/{len(links) - dolce_links}), "
          f"avg chain length {avg_chain_length(records)}")


if __name__ == "__main__":
    main()
