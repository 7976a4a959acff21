"""File-backed record store: append-only log plus snapshot.

Every accepted write appends one full record state as a JSON line and is
fsynced before the call returns. Restart replays the snapshot (if any) and
then the log; a torn final line, the footprint of a crash mid-append, is
tolerated with a warning, while a malformed line anywhere earlier means real
corruption and refuses to open with a recovery hint.

Mutations use optimistic concurrency: the caller states the version it read,
and a mismatch rejects the write. A mutation may carry an idempotency key;
replaying a key returns the outcome of the first application instead of
applying twice, which makes client retries safe.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable

from .records import AnnotationRecord, record_from_dict, record_to_dict

logger = logging.getLogger(__name__)


class StoreError(Exception):
    pass


class UnknownRecordError(StoreError):
    pass


class RecordExistsError(StoreError):
    pass


class VersionConflictError(StoreError):
    def __init__(self, record_id: str, expected: int, actual: int):
        super().__init__(
            f"record {record_id!r}: expected version {expected}, store has {actual}")
        self.record_id = record_id
        self.expected = expected
        self.actual = actual


class CorruptLogError(StoreError):
    pass


def make_mutation_key(record_id: str, expected_version: int | None, payload: Any) -> str:
    """Deterministic key for retry detection: same intent, same key."""
    body = json.dumps(
        {"record": record_id, "expected": expected_version, "payload": payload},
        sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class AppliedMutation:
    record: AnnotationRecord


class RecordStore:
    """In-memory record map kept durable through a JSON-lines log."""

    def __init__(
        self,
        log_path: str | Path,
        snapshot_path: str | Path | None = None,
        snapshot_every: int | None = None,
    ):
        self.log_path = Path(log_path)
        self.snapshot_path = (
            Path(snapshot_path) if snapshot_path is not None
            else self.log_path.with_suffix(".snapshot.json"))
        self.snapshot_every = snapshot_every
        self._writes_since_snapshot = 0
        self._records: dict[str, AnnotationRecord] = {}
        self._applied: dict[str, AppliedMutation] = {}
        self._lock = threading.Lock()
        self._log_file = None
        self._needs_newline = False
        self._load()
        self._log_file = open(self.log_path, "a", encoding="utf-8")
        if self._needs_newline:
            self._log_file.write("\n")
            self._log_file.flush()
            os.fsync(self._log_file.fileno())

    # -- loading ------------------------------------------------------------

    def _load(self) -> None:
        if self.snapshot_path.exists():
            self._load_snapshot()
        if self.log_path.exists():
            self._replay_log()

    def _load_snapshot(self) -> None:
        try:
            doc = json.loads(self.snapshot_path.read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise CorruptLogError(
                f"snapshot {self.snapshot_path} is not valid JSON: {exc}; "
                f"delete it to rebuild from the log, or restore from backup") from exc
        for item in doc.get("records", []):
            record = record_from_dict(item)
            self._records[record.id] = record
        for key, record_id in doc.get("applied", {}).items():
            record = self._records.get(record_id)
            if record is not None:
                self._applied[key] = AppliedMutation(record)

    def _replay_log(self) -> None:
        raw = self.log_path.read_bytes()
        if not raw:
            return
        lines = raw.split(b"\n")
        trailing_complete = raw.endswith(b"\n")
        if trailing_complete:
            lines = lines[:-1]
        offset = 0
        for i, line in enumerate(lines):
            is_last = i == len(lines) - 1
            try:
                entry = json.loads(line.decode("utf-8"))
                if not isinstance(entry, dict) or "record" not in entry:
                    raise ValueError("log entry missing 'record'")
            except (ValueError, UnicodeDecodeError) as exc:
                if is_last and not trailing_complete:
                    logger.warning(
                        "dropping torn final log line (%d bytes at offset %d): %s",
                        len(line), offset, exc)
                    self._truncate_log(offset)
                    return
                raise CorruptLogError(
                    f"{self.log_path} line {i + 1} (byte offset {offset}) is corrupt: {exc}; "
                    f"truncate the file to {offset} bytes to recover the records before it, "
                    f"or restore from the snapshot") from exc
            self._apply_entry(entry)
            if is_last and not trailing_complete:
                # A complete entry missing only its newline: close the line
                # before appending anything after it.
                self._needs_newline = True
            offset += len(line) + 1

    def _truncate_log(self, size: int) -> None:
        with open(self.log_path, "r+b") as fh:
            fh.truncate(size)
            fh.flush()
            os.fsync(fh.fileno())

    def _apply_entry(self, entry: dict[str, Any]) -> None:
        record = record_from_dict(entry["record"])
        current = self._records.get(record.id)
        if current is None or record.version >= current.version:
            self._records[record.id] = record
        key = entry.get("mutation_key")
        if key:
            self._applied[key] = AppliedMutation(self._records[record.id])

    # -- durability ---------------------------------------------------------

    def _append(self, record: AnnotationRecord, mutation_key: str | None) -> None:
        entry: dict[str, Any] = {"record": record_to_dict(record)}
        if mutation_key:
            entry["mutation_key"] = mutation_key
        line = json.dumps(entry, sort_keys=True, separators=(",", ":"))
        self._log_file.write(line + "\n")
        self._log_file.flush()
        os.fsync(self._log_file.fileno())

    def snapshot(self) -> None:
        """Write the full state atomically, then start a fresh log."""
        with self._lock:
            self._snapshot_locked()

    def _snapshot_locked(self) -> None:
        doc = {
            "records": [record_to_dict(r) for r in self._records.values()],
            "applied": {k: m.record.id for k, m in self._applied.items()},
        }
        tmp = self.snapshot_path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self.snapshot_path)
        self._log_file.close()
        self._log_file = open(self.log_path, "w", encoding="utf-8")
        self._writes_since_snapshot = 0

    def _maybe_snapshot_locked(self) -> None:
        self._writes_since_snapshot += 1
        if self.snapshot_every and self._writes_since_snapshot >= self.snapshot_every:
            self._snapshot_locked()

    def close(self) -> None:
        if self._log_file and not self._log_file.closed:
            self._log_file.close()

    # -- reads --------------------------------------------------------------

    def get(self, record_id: str) -> AnnotationRecord:
        try:
            return self._records[record_id]
        except KeyError:
            raise UnknownRecordError(f"no record {record_id!r}") from None

    def list_records(self) -> list[AnnotationRecord]:
        return sorted(self._records.values(), key=lambda r: r.id)

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, record_id: str) -> bool:
        return record_id in self._records

    # -- writes -------------------------------------------------------------

    def create(self, record: AnnotationRecord, mutation_key: str | None = None) -> AnnotationRecord:
        with self._lock:
            if mutation_key and mutation_key in self._applied:
                return self._applied[mutation_key].record
            if record.id in self._records:
                raise RecordExistsError(f"record {record.id!r} already exists")
            self._append(record, mutation_key)
            self._records[record.id] = record
            if mutation_key:
                self._applied[mutation_key] = AppliedMutation(record)
            self._maybe_snapshot_locked()
            return record

    def mutate(
        self,
        record_id: str,
        expected_version: int | None,
        transform: Callable[[AnnotationRecord], AnnotationRecord],
        mutation_key: str | None = None,
    ) -> AnnotationRecord:
        """Apply a transform under the version check and persist the result.

        The transform must return the same record id with the version bumped
        by exactly one (the mutation helpers in `records` do this).
        """
        with self._lock:
            if mutation_key and mutation_key in self._applied:
                return self._applied[mutation_key].record
            current = self._records.get(record_id)
            if current is None:
                raise UnknownRecordError(f"no record {record_id!r}")
            if expected_version is not None and current.version != expected_version:
                raise VersionConflictError(record_id, expected_version, current.version)
            updated = transform(current)
            if updated.id != record_id or updated.version != current.version + 1:
                raise StoreError(
                    f"transform must keep id {record_id!r} and bump version "
                    f"{current.version} -> {current.version + 1}, got "
                    f"{updated.id!r} v{updated.version}")
            self._append(updated, mutation_key)
            self._records[record_id] = updated
            if mutation_key:
                self._applied[mutation_key] = AppliedMutation(updated)
            self._maybe_snapshot_locked()
            return updated


def load_records_jsonl(path: str | Path) -> list[AnnotationRecord]:
    """Read records from a plain JSON-lines file (one record per line)."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(record_from_dict(json.loads(line)))
    return records


def export_dataset(records: Iterable[AnnotationRecord], inventory_version: str) -> dict[str, Any]:
    """Single-document export of the full dataset, inventory version stamped."""
    items = [record_to_dict(r) for r in sorted(records, key=lambda r: r.id)]
    return {
        "inventory_version": inventory_version,
        "record_count": len(items),
        "records": items,
    }
