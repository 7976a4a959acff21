"""Relation inventory: class hierarchy, typed relations, and candidate lookup.

The inventory is a single YAML document with a ``classes`` section (a tree of
ontology classes rooted at ``particular``), a ``relations`` section (each
relation with origin, branch, optional hierarchy parent, domain/range class
signature, and optional inverse), and an optional ``aliases`` section mapping
alternate relation spellings to a (relation, direction) pair.

Everything is immutable after load; all query operations are pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Iterable

import yaml

ROOT_CLASS_ID = "particular"

_IDENT_RE = re.compile(r"^[a-z][a-z0-9]*(-[a-z0-9]+)*$")


class Origin(str, Enum):
    DOLCE = "dolce"
    CUSTOM = "custom"


class Branch(str, Enum):
    IMMEDIATE = "immediate"
    MEDIATED = "mediated"
    CUSTOM = "custom"


class Direction(str, Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


class InventoryError(Exception):
    """Base class for inventory load failures."""


class InventoryParseError(InventoryError):
    pass


class UnknownIdError(InventoryError):
    pass


class DanglingReferenceError(InventoryError):
    pass


class DuplicateIdError(InventoryError):
    pass


class CycleError(InventoryError):
    pass


class InverseMismatchError(InventoryError):
    pass


class HierarchyNarrowingError(InventoryError):
    pass


@dataclass(frozen=True)
class OntoClass:
    id: str
    label: str
    parent: str | None = None
    note: str = ""


@dataclass(frozen=True)
class RelationDef:
    id: str
    label: str
    origin: Origin
    branch: Branch
    domain: str
    range: str
    parent: str | None = None
    inverse: str | None = None
    description: str = ""
    example: str = ""


@dataclass(frozen=True)
class RelationAlias:
    """Alternate spelling for a relation used in a fixed direction.

    Kept explicit in the inventory document rather than silently merged, so
    the alternate name stays visible to annotators and reviewers.
    """

    name: str
    relation: str
    direction: Direction
    note: str = ""


@dataclass(frozen=True)
class Violation:
    rule: str
    entity: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.entity}: {self.message}"


@dataclass(frozen=True)
class Candidate:
    relation: str
    direction: Direction


@dataclass(frozen=True)
class Inventory:
    version: str
    classes: dict[str, OntoClass]
    relations: dict[str, RelationDef]
    aliases: dict[str, RelationAlias] = field(default_factory=dict)

    def class_ids(self) -> list[str]:
        return sorted(self.classes)

    def relation_ids(self) -> list[str]:
        return sorted(self.relations)

    def require_class(self, class_id: str) -> OntoClass:
        try:
            return self.classes[class_id]
        except KeyError:
            raise UnknownIdError(f"unknown class id: {class_id!r}") from None

    def require_relation(self, relation_id: str) -> RelationDef:
        try:
            return self.relations[relation_id]
        except KeyError:
            raise UnknownIdError(f"unknown relation id: {relation_id!r}") from None

    def resolve_relation(self, name: str) -> tuple[RelationDef, Direction]:
        """Resolve a relation id or alias to (definition, direction)."""
        if name in self.relations:
            return self.relations[name], Direction.FORWARD
        if name in self.aliases:
            alias = self.aliases[name]
            return self.relations[alias.relation], alias.direction
        raise UnknownIdError(f"unknown relation or alias: {name!r}")

    def class_depth(self, class_id: str) -> int:
        """Number of parent edges from class_id up to the root."""
        node = self.require_class(class_id)
        depth = 0
        while node.parent is not None:
            node = self.classes[node.parent]
            depth += 1
        return depth


def is_subclass(inv: Inventory, a: str, b: str) -> bool:
    """True iff b is reachable from a by following zero or more parent edges."""
    inv.require_class(b)
    node = inv.require_class(a)
    while True:
        if node.id == b:
            return True
        if node.parent is None:
            return False
        node = inv.classes[node.parent]


def inverse_of(inv: Inventory, relation_id: str) -> str | None:
    return inv.require_relation(relation_id).inverse


def candidate_relations(
    inv: Inventory, class_a: str, class_b: str, try_both_orders: bool = True
) -> list[Candidate]:
    """Relations whose signature admits the ordered class pair (a, b).

    A relation r is listed forward when a is subsumed by domain(r) and b by
    range(r); with try_both_orders it is also listed with direction=inverse
    when the swapped test passes and r declares an inverse. Results are
    ordered most-specific-first by depth(domain)+depth(range) descending,
    ties broken by relation id ascending, forward before inverse.
    """
    inv.require_class(class_a)
    inv.require_class(class_b)
    found: list[Candidate] = []
    for rel in inv.relations.values():
        if is_subclass(inv, class_a, rel.domain) and is_subclass(inv, class_b, rel.range):
            found.append(Candidate(rel.id, Direction.FORWARD))
        if (
            try_both_orders
            and rel.inverse is not None
            and is_subclass(inv, class_b, rel.domain)
            and is_subclass(inv, class_a, rel.range)
        ):
            found.append(Candidate(rel.id, Direction.INVERSE))

    def sort_key(c: Candidate) -> tuple[int, str, int]:
        rel = inv.relations[c.relation]
        specificity = inv.class_depth(rel.domain) + inv.class_depth(rel.range)
        return (-specificity, c.relation, 0 if c.direction is Direction.FORWARD else 1)

    return sorted(set(found), key=sort_key)


def validate_inventory(inv: Inventory) -> list[Violation]:
    """All invariant violations in the inventory; empty when it is well formed.

    Violations are returned as data so callers can lint without exceptions.
    """
    out: list[Violation] = []
    out.extend(_check_class_hierarchy(inv))
    out.extend(_check_relations(inv))
    return out


def _check_class_hierarchy(inv: Inventory) -> list[Violation]:
    out: list[Violation] = []
    roots = []
    for cls in inv.classes.values():
        if not _IDENT_RE.match(cls.id):
            out.append(Violation("bad-identifier", cls.id, "class ids are lowercase-hyphenated ASCII"))
        if cls.parent is None:
            roots.append(cls.id)
        elif cls.parent not in inv.classes:
            out.append(Violation("dangling-class-parent", cls.id, f"parent {cls.parent!r} does not exist"))
    if len(roots) != 1:
        out.append(Violation("root-count", ",".join(sorted(roots)) or "<none>",
                             f"expected exactly one root class, found {len(roots)}"))
    elif roots[0] != ROOT_CLASS_ID:
        out.append(Violation("root-name", roots[0], f"root class must be {ROOT_CLASS_ID!r}"))
    out.extend(_find_cycles(
        {c.id: c.parent for c in inv.classes.values() if c.parent in inv.classes},
        "class-cycle",
    ))
    return out


def _check_relations(inv: Inventory) -> list[Violation]:
    out: list[Violation] = []
    for rel in inv.relations.values():
        if not _IDENT_RE.match(rel.id):
            out.append(Violation("bad-identifier", rel.id, "relation ids are lowercase-hyphenated ASCII"))
        for side, class_id in (("domain", rel.domain), ("range", rel.range)):
            if class_id not in inv.classes:
                out.append(Violation("dangling-signature", rel.id, f"{side} {class_id!r} does not exist"))
        if rel.parent is not None and rel.parent not in inv.relations:
            out.append(Violation("dangling-relation-parent", rel.id, f"parent {rel.parent!r} does not exist"))
        if rel.inverse is not None and rel.inverse not in inv.relations:
            out.append(Violation("dangling-inverse", rel.id, f"inverse {rel.inverse!r} does not exist"))

    out.extend(_find_cycles(
        {r.id: r.parent for r in inv.relations.values() if r.parent in inv.relations},
        "relation-cycle",
    ))
    if out:
        # Signature checks below assume references resolve and graphs are acyclic.
        return out

    for rel in inv.relations.values():
        if rel.inverse is not None:
            twin = inv.relations[rel.inverse]
            if twin.inverse != rel.id:
                out.append(Violation(
                    "inverse-involution", rel.id,
                    f"inverse {twin.id!r} declares inverse {twin.inverse!r}, expected {rel.id!r}"))
            if rel.domain != twin.range or rel.range != twin.domain:
                out.append(Violation(
                    "inverse-signature-swap", rel.id,
                    f"signature ({rel.domain}, {rel.range}) does not swap with "
                    f"{twin.id!r} ({twin.domain}, {twin.range})"))
        if rel.parent is not None:
            parent = inv.relations[rel.parent]
            if not is_subclass(inv, rel.domain, parent.domain):
                out.append(Violation(
                    "hierarchy-narrowing", rel.id,
                    f"domain {rel.domain!r} is not subsumed by parent domain {parent.domain!r}"))
            if not is_subclass(inv, rel.range, parent.range):
                out.append(Violation(
                    "hierarchy-narrowing", rel.id,
                    f"range {rel.range!r} is not subsumed by parent range {parent.range!r}"))
    for alias in inv.aliases.values():
        if alias.relation not in inv.relations:
            out.append(Violation("dangling-alias", alias.name, f"relation {alias.relation!r} does not exist"))
        elif alias.direction is Direction.INVERSE and inv.relations[alias.relation].inverse is None:
            out.append(Violation("alias-direction", alias.name,
                                 f"inverse-direction alias of {alias.relation!r}, which has no inverse"))
    return out


def _find_cycles(parent_of: dict[str, str | None], rule: str) -> list[Violation]:
    out = []
    state: dict[str, int] = {}  # 0 visiting, 1 done
    for start in parent_of:
        if state.get(start) == 1:
            continue
        path = []
        node: str | None = start
        while node is not None and state.get(node) != 1:
            if state.get(node) == 0:
                cycle = path[path.index(node):]
                out.append(Violation(rule, node, "cycle: " + " -> ".join(cycle + [node])))
                break
            state[node] = 0
            path.append(node)
            node = parent_of.get(node)
        for seen in path:
            state[seen] = 1
    return out


_VIOLATION_EXC = {
    "dangling-class-parent": DanglingReferenceError,
    "dangling-signature": DanglingReferenceError,
    "dangling-relation-parent": DanglingReferenceError,
    "dangling-inverse": DanglingReferenceError,
    "dangling-alias": DanglingReferenceError,
    "class-cycle": CycleError,
    "relation-cycle": CycleError,
    "inverse-involution": InverseMismatchError,
    "inverse-signature-swap": InverseMismatchError,
    "hierarchy-narrowing": HierarchyNarrowingError,
}


def parse_inventory(document: str) -> Inventory:
    """Parse an inventory document without running the semantic checks.

    Structural problems (bad YAML, missing fields, duplicate ids) still
    raise; use validate_inventory on the result to collect rule violations.
    """
    try:
        raw = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        raise InventoryParseError(f"malformed inventory document: {exc}") from exc
    if not isinstance(raw, dict):
        raise InventoryParseError("inventory document must be a mapping")

    classes: dict[str, OntoClass] = {}
    for entry in _require_list(raw, "classes"):
        cls = OntoClass(
            id=_require_str(entry, "id", "class"),
            label=str(entry.get("label", entry["id"])),
            parent=_opt_str(entry, "parent"),
            note=str(entry.get("note", "")),
        )
        if cls.id in classes:
            raise DuplicateIdError(f"duplicate class id: {cls.id!r}")
        classes[cls.id] = cls

    relations: dict[str, RelationDef] = {}
    for entry in _require_list(raw, "relations", allow_missing=True):
        try:
            rel = RelationDef(
                id=_require_str(entry, "id", "relation"),
                label=str(entry.get("label", entry["id"])),
                origin=Origin(entry.get("origin", "custom")),
                branch=Branch(entry.get("branch", "custom")),
                domain=_require_str(entry, "domain", "relation"),
                range=_require_str(entry, "range", "relation"),
                parent=_opt_str(entry, "parent"),
                inverse=_opt_str(entry, "inverse"),
                description=str(entry.get("description", "")),
                example=str(entry.get("example", "")),
            )
        except ValueError as exc:
            raise InventoryParseError(f"bad relation entry {entry.get('id')!r}: {exc}") from exc
        if rel.id in relations:
            raise DuplicateIdError(f"duplicate relation id: {rel.id!r}")
        relations[rel.id] = rel

    aliases: dict[str, RelationAlias] = {}
    for name, spec in (raw.get("aliases") or {}).items():
        try:
            aliases[str(name)] = RelationAlias(
                name=str(name),
                relation=str(spec["relation"]),
                direction=Direction(spec.get("direction", "forward")),
                note=str(spec.get("note", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InventoryParseError(f"bad alias entry {name!r}: {exc}") from exc

    return Inventory(
        version=str(raw.get("version", "0")),
        classes=classes,
        relations=relations,
        aliases=aliases,
    )


def load_inventory(document: str) -> Inventory:
    """Parse and validate an inventory document; raises on any violation."""
    inv = parse_inventory(document)
    violations = validate_inventory(inv)
    if violations:
        exc_cls = _VIOLATION_EXC.get(violations[0].rule, InventoryError)
        summary = "; ".join(str(v) for v in violations[:5])
        raise exc_cls(f"{len(violations)} violation(s): {summary}")
    return inv


def load_inventory_path(path) -> Inventory:
    with open(path, encoding="utf-8") as fh:
        return load_inventory(fh.read())


def load_seed_inventory() -> Inventory:
    """The inventory shipped with the package."""
    text = resources.files("relann").joinpath("data/inventory.yaml").read_text("utf-8")
    return load_inventory(text)


def inventory_to_dict(inv: Inventory) -> dict:
    """Plain-JSON view of the inventory, stable key order."""
    return {
        "version": inv.version,
        "classes": [
            {"id": c.id, "label": c.label, "parent": c.parent, "note": c.note}
            for c in (inv.classes[i] for i in inv.class_ids())
        ],
        "relations": [
            {
                "id": r.id,
                "label": r.label,
                "origin": r.origin.value,
                "branch": r.branch.value,
                "domain": r.domain,
                "range": r.range,
                "parent": r.parent,
                "inverse": r.inverse,
                "description": r.description,
                "example": r.example,
            }
            for r in (inv.relations[i] for i in inv.relation_ids())
        ],
        "aliases": [
            {
                "name": a.name,
                "relation": a.relation,
                "direction": a.direction.value,
                "note": a.note,
            }
            for a in (inv.aliases[n] for n in sorted(inv.aliases))
        ],
    }


def _require_list(raw: dict, key: str, allow_missing: bool = False) -> Iterable[dict]:
    value = raw.get(key)
    if value is None:
        if allow_missing:
            return []
        raise InventoryParseError(f"missing section: {key}")
    if not isinstance(value, list):
        raise InventoryParseError(f"section {key!r} must be a list")
    for entry in value:
        if not isinstance(entry, dict):
            raise InventoryParseError(f"entries in {key!r} must be mappings")
    return value


def _require_str(entry: dict, key: str, kind: str) -> str:
    value = entry.get(key)
    if not isinstance(value, str) or not value:
        raise InventoryParseError(f"{kind} entry missing field {key!r}: {entry!r}")
    return value


def _opt_str(entry: dict, key: str) -> str | None:
    value = entry.get(key)
    if value is None:
        return None
    return str(value)
