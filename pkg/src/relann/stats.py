"""Aggregate reports over annotation records.

All percentages are computed with decimal arithmetic and rounded half-up to
two places; on an empty scope a percentage is defined as 0. Functions here
are pure: they take record snapshots plus the inventory (for relation
origins and inverses) and return report values. Rendering to aligned
plain-text tables and to export dictionaries is kept separate so the same
report feeds the CLI, the HTTP API, and tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Any, Iterable

from .inventory import Inventory, Origin, inverse_of
from .records import (
    AnnotationRecord,
    Composite,
    Direct,
    RecordStatus,
    classify_status,
    mean_relatedness,
)

TWO_PLACES = Decimal("0.01")


class StatsError(Exception):
    pass


class NoCompositeRecordsError(StatsError):
    pass


class UnknownScopeError(StatsError):
    pass


class FrequencyScope(str, Enum):
    DIRECT = "direct"
    COMPOSITE_FIRST_PAIR = "composite-first-pair"
    COMPOSITE_ALL_LINKS = "composite-all-links"


def percentage(part: int, whole: int) -> Decimal:
    """part/whole as a percentage, half-up to 2 decimals; 0 when whole is 0."""
    if whole == 0:
        return Decimal("0.00")
    return (Decimal(part) * 100 / Decimal(whole)).quantize(TWO_PLACES, rounding=ROUND_HALF_UP)


@dataclass(frozen=True)
class OriginSplit:
    """DOLCE/custom breakdown of one summary row."""

    dolce: int
    custom: int
    dolce_pct: Decimal
    custom_pct: Decimal


@dataclass(frozen=True)
class ClassificationSummary:
    total: int
    pending: int
    direct: int
    direct_pct: Decimal
    direct_split: OriginSplit
    composite: int
    composite_pct: Decimal
    composite_split: OriginSplit
    unclassified: int
    unclassified_pct: Decimal


@dataclass(frozen=True)
class FrequencyEntry:
    count: int
    share: Decimal


@dataclass(frozen=True)
class RelationFrequencyReport:
    scope: FrequencyScope
    total: int
    entries: dict[str, FrequencyEntry]


@dataclass(frozen=True)
class RelatednessByRelation:
    by_relation: dict[str, tuple[float, int]]
    by_category: dict[str, tuple[float, int]]


def _origin(inv: Inventory, relation_id: str) -> Origin:
    return inv.relations[relation_id].origin


def _split(inv: Inventory, relation_ids: list[str]) -> OriginSplit:
    dolce = sum(1 for r in relation_ids if _origin(inv, r) is Origin.DOLCE)
    custom = len(relation_ids) - dolce
    row = len(relation_ids)
    return OriginSplit(
        dolce=dolce,
        custom=custom,
        dolce_pct=percentage(dolce, row),
        custom_pct=percentage(custom, row),
    )


def summarize(records: Iterable[AnnotationRecord], inv: Inventory) -> ClassificationSummary:
    """Counts and percentages per outcome, with origin splits per row.

    A composite record contributes the origin of its first link's relation.
    Pending records are excluded from the total and reported on the side.
    """
    direct_rels: list[str] = []
    composite_first_rels: list[str] = []
    unclassified = 0
    pending = 0
    for rec in records:
        status = classify_status(rec)
        if status is RecordStatus.PENDING:
            pending += 1
        elif status is RecordStatus.DIRECT:
            assert isinstance(rec.assignment, Direct)
            direct_rels.append(rec.assignment.link.relation)
        elif status is RecordStatus.COMPOSITE:
            assert isinstance(rec.assignment, Composite)
            composite_first_rels.append(rec.assignment.chain[0].relation)
        else:
            unclassified += 1
    total = len(direct_rels) + len(composite_first_rels) + unclassified
    return ClassificationSummary(
        total=total,
        pending=pending,
        direct=len(direct_rels),
        direct_pct=percentage(len(direct_rels), total),
        direct_split=_split(inv, direct_rels),
        composite=len(composite_first_rels),
        composite_pct=percentage(len(composite_first_rels), total),
        composite_split=_split(inv, composite_first_rels),
        unclassified=unclassified,
        unclassified_pct=percentage(unclassified, total),
    )


def _family(inv: Inventory, relation_id: str) -> str:
    """Canonical name of the relation's direction-folded family."""
    inverse = inverse_of(inv, relation_id)
    if inverse is None:
        return relation_id
    return min(relation_id, inverse)


def _scoped_relations(
    records: Iterable[AnnotationRecord],
    scope: FrequencyScope,
) -> list[str]:
    out: list[str] = []
    for rec in records:
        a = rec.assignment
        if scope is FrequencyScope.DIRECT:
            if isinstance(a, Direct):
                out.append(a.link.relation)
        elif scope is FrequencyScope.COMPOSITE_FIRST_PAIR:
            if isinstance(a, Composite):
                out.append(a.chain[0].relation)
        elif scope is FrequencyScope.COMPOSITE_ALL_LINKS:
            if isinstance(a, Composite):
                out.extend(link.relation for link in a.chain)
        else:
            raise UnknownScopeError(f"unknown scope {scope!r}")
    return out


def relation_frequencies(
    records: Iterable[AnnotationRecord],
    scope: FrequencyScope | str,
    inv: Inventory,
    origin: Origin | None = None,
    fold_directions: bool = False,
) -> RelationFrequencyReport:
    """Relation usage counts within a scope, with shares of the scope total.

    `origin` narrows both the counted relations and the denominator to one
    origin. `fold_directions` merges each relation with its inverse into one
    family keyed by the lexicographically smaller id; folding regroups
    counts but never changes their sum.
    """
    try:
        scope = FrequencyScope(scope)
    except ValueError:
        raise UnknownScopeError(f"unknown scope {scope!r}") from None
    relations = _scoped_relations(records, scope)
    if origin is not None:
        relations = [r for r in relations if _origin(inv, r) is origin]
    counts: dict[str, int] = {}
    for r in relations:
        key = _family(inv, r) if fold_directions else r
        counts[key] = counts.get(key, 0) + 1
    total = len(relations)
    entries = {
        key: FrequencyEntry(count=n, share=percentage(n, total))
        for key, n in counts.items()
    }
    return RelationFrequencyReport(scope=scope, total=total, entries=entries)


def avg_chain_length(records: Iterable[AnnotationRecord]) -> Decimal:
    """Mean number of links per composite record, half-up to 2 decimals."""
    lengths = [
        len(rec.assignment.chain)
        for rec in records
        if isinstance(rec.assignment, Composite)
    ]
    if not lengths:
        raise NoCompositeRecordsError("no composite records to average over")
    return (Decimal(sum(lengths)) / Decimal(len(lengths))).quantize(
        TWO_PLACES, rounding=ROUND_HALF_UP)


def relatedness_report(records: Iterable[AnnotationRecord]) -> RelatednessByRelation:
    """Mean relatedness per direct relation and per outcome category.

    Records without any score are skipped. Means are unrounded; rendering
    decides display precision.
    """
    per_relation: dict[str, list[float]] = {}
    per_category: dict[str, list[float]] = {}
    for rec in records:
        mean = mean_relatedness(rec)
        if mean is None:
            continue
        status = classify_status(rec)
        if status is RecordStatus.PENDING:
            continue
        per_category.setdefault(status.value, []).append(mean)
        if isinstance(rec.assignment, Direct):
            per_relation.setdefault(rec.assignment.link.relation, []).append(mean)
    return RelatednessByRelation(
        by_relation={
            rel: (sum(scores) / len(scores), len(scores))
            for rel, scores in per_relation.items()
        },
        by_category={
            cat: (sum(scores) / len(scores), len(scores))
            for cat, scores in per_category.items()
        },
    )


# --- rendering -------------------------------------------------------------

def _table(rows: list[tuple[str, ...]], header: tuple[str, ...]) -> str:
    widths = [
        max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i])
        for i in range(len(header))
    ]
    def fmt(row: tuple[str, ...]) -> str:
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
    lines = [fmt(header), fmt(tuple("-" * w for w in widths))]
    lines.extend(fmt(r) for r in rows)
    return "\n".join(lines)


def render_summary(s: ClassificationSummary) -> str:
    rows = [
        ("direct", str(s.direct), f"{s.direct_pct}",
         f"dolce {s.direct_split.dolce} ({s.direct_split.dolce_pct}%) / "
         f"custom {s.direct_split.custom} ({s.direct_split.custom_pct}%)"),
        ("composite", str(s.composite), f"{s.composite_pct}",
         f"first link: dolce {s.composite_split.dolce} ({s.composite_split.dolce_pct}%) / "
         f"custom {s.composite_split.custom} ({s.composite_split.custom_pct}%)"),
        ("unclassified", str(s.unclassified), f"{s.unclassified_pct}", ""),
        ("total", str(s.total), "100.00" if s.total else "0.00", ""),
    ]
    table = _table(rows, ("outcome", "count", "%", "origin split"))
    if s.pending:
        table += f"\npending (excluded): {s.pending}"
    return table


def render_frequencies(report: RelationFrequencyReport) -> str:
    ordered = sorted(report.entries.items(), key=lambda kv: (-kv[1].count, kv[0]))
    rows = [(key, str(e.count), f"{e.share}") for key, e in ordered]
    rows.append(("total", str(report.total), "100.00" if report.total else "0.00"))
    return _table(rows, (f"relation ({report.scope.value})", "count", "%"))


def render_chain_length(value: Decimal) -> str:
    return f"average chain length: {value}"


def render_relatedness(report: RelatednessByRelation) -> str:
    rel_rows = [
        (rel, f"{mean:.2f}", str(n))
        for rel, (mean, n) in sorted(
            report.by_relation.items(), key=lambda kv: (-kv[1][0], kv[0]))
    ]
    cat_rows = [
        (cat, f"{mean:.2f}", str(n))
        for cat, (mean, n) in sorted(
            report.by_category.items(), key=lambda kv: (-kv[1][0], kv[0]))
    ]
    return (
        _table(rel_rows, ("relation", "mean relatedness", "pairs"))
        + "\n\n"
        + _table(cat_rows, ("category", "mean relatedness", "pairs"))
    )


# --- export dictionaries ---------------------------------------------------

def summary_to_dict(s: ClassificationSummary) -> dict[str, Any]:
    def split(x: OriginSplit) -> dict[str, Any]:
        return {
            "dolce": x.dolce,
            "custom": x.custom,
            "dolce_pct": float(x.dolce_pct),
            "custom_pct": float(x.custom_pct),
        }
    return {
        "total": s.total,
        "pending": s.pending,
        "direct": {"count": s.direct, "pct": float(s.direct_pct), "split": split(s.direct_split)},
        "composite": {
            "count": s.composite,
            "pct": float(s.composite_pct),
            "split": split(s.composite_split),
        },
        "unclassified": {"count": s.unclassified, "pct": float(s.unclassified_pct)},
    }


def frequencies_to_dict(report: RelationFrequencyReport) -> dict[str, Any]:
    return {
        "scope": report.scope.value,
        "total": report.total,
        "entries": {
            key: {"count": e.count, "share": float(e.share)}
            for key, e in sorted(report.entries.items())
        },
    }


def relatedness_to_dict(report: RelatednessByRelation) -> dict[str, Any]:
    return {
        "by_relation": {
            rel: {"mean": mean, "pairs": n}
            for rel, (mean, n) in sorted(report.by_relation.items())
        },
        "by_category": {
            cat: {"mean": mean, "pairs": n}
            for cat, (mean, n) in sorted(report.by_category.items())
        },
    }
