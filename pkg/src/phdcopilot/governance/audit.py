"""Append-only, hash-chained audit log.

Each event links to its predecessor through ``prev_hash`` and carries a
``self_hash`` over its own fields, so any after-the-fact edit breaks the chain
at or before the edited event. The log can be persisted to an append-only file
of length-prefixed records and exported as line-delimited JSON for external
verification.
"""

from __future__ import annotations

import os
import struct
import threading
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable

from ..canonical import canonical_encode, digest, jsonable, zero_digest

FORMAT_VERSION = 1
_LEN = struct.Struct(">I")


class AuditStorageError(Exception):
    """Raised when an append cannot be durably written; nothing is recorded."""


@dataclass(frozen=True)
class AuditEvent:
    seq: int
    actor_id: str
    action: str
    resource: str
    payload_digest: str
    prev_hash: str
    timestamp: float
    self_hash: str = ""

    def hash_fields(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "actor_id": self.actor_id,
            "action": self.action,
            "resource": self.resource,
            "payload_digest": self.payload_digest,
            "prev_hash": self.prev_hash,
            "timestamp": self.timestamp,
        }


def _sealed(event: AuditEvent, algorithm: str) -> AuditEvent:
    return replace(event, self_hash=digest(event.hash_fields(), algorithm))


@dataclass(frozen=True)
class ChainStatus:
    valid: bool
    broken_at: int | None = None

    def __str__(self) -> str:
        return "Valid" if self.valid else f"BrokenAt({self.broken_at})"


class AuditLog:
    """Single-writer audit log; appends are serialized, reads are lock-free.

    ``path`` enables persistence: a header record (digest algorithm, format
    version) followed by one length-prefixed JSON record per event. Appends
    write the full record in one call and only update in-memory state after
    the write succeeds, so a storage failure never leaves a partial event.
    """

    def __init__(
        self,
        algorithm: str = "sha256",
        path: str | os.PathLike[str] | None = None,
        clock: Callable[[], float] | None = None,
    ):
        self.algorithm = algorithm
        self.path = os.fspath(path) if path is not None else None
        self._clock = clock or _wall_clock
        self._events: list[AuditEvent] = []
        self._lock = threading.Lock()
        if self.path is not None:
            if os.path.exists(self.path) and os.path.getsize(self.path) > 0:
                self._load()
            else:
                self._write_record({"algorithm": algorithm, "format_version": FORMAT_VERSION})

    @property
    def events(self) -> tuple[AuditEvent, ...]:
        return tuple(self._events)

    def __len__(self) -> int:
        return len(self._events)

    def append(self, actor_id: str, action: str, resource: str, payload: Any) -> AuditEvent:
        with self._lock:
            prev = self._events[-1].self_hash if self._events else zero_digest(self.algorithm)
            event = _sealed(
                AuditEvent(
                    seq=len(self._events),
                    actor_id=actor_id,
                    action=action,
                    resource=resource,
                    payload_digest=digest(payload, self.algorithm),
                    prev_hash=prev,
                    timestamp=self._clock(),
                ),
                self.algorithm,
            )
            if self.path is not None:
                self._write_record(jsonable(event))
            self._events.append(event)
            return event

    def verify(self) -> ChainStatus:
        return verify_chain(self._events, self.algorithm)

    def export_jsonl(self) -> str:
        """Line-delimited JSON export (header line first) for external tools."""
        import json

        lines = [
            json.dumps(
                {"algorithm": self.algorithm, "format_version": FORMAT_VERSION},
                sort_keys=True,
            )
        ]
        lines.extend(json.dumps(jsonable(e), sort_keys=True) for e in self._events)
        return "\n".join(lines) + "\n"

    def _write_record(self, record: Any) -> None:
        data = canonical_encode(record)
        try:
            with open(self.path, "ab") as fh:  # type: ignore[arg-type]
                fh.write(_LEN.pack(len(data)) + data)
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            raise AuditStorageError(f"append rejected: {exc}") from exc

    def _load(self) -> None:
        import json

        records = list(read_log_records(self.path))  # type: ignore[arg-type]
        if not records:
            raise AuditStorageError(f"{self.path}: missing log header")
        header = records[0]
        if header.get("format_version") != FORMAT_VERSION:
            raise AuditStorageError(f"{self.path}: unsupported format version")
        self.algorithm = header["algorithm"]
        for raw in records[1:]:
            self._events.append(AuditEvent(**raw))
        del json


def verify_chain(events: Iterable[AuditEvent], algorithm: str = "sha256") -> ChainStatus:
    """Valid iff every event recomputes and links; else the smallest broken seq.

    An empty log is Valid.
    """
    prev = zero_digest(algorithm)
    for i, event in enumerate(events):
        expected = digest(event.hash_fields(), algorithm)
        if (
            event.seq != i
            or event.prev_hash != prev
            or event.self_hash != expected
        ):
            return ChainStatus(valid=False, broken_at=i)
        prev = event.self_hash
    return ChainStatus(valid=True)


def read_log_records(path: str) -> Iterable[dict[str, Any]]:
    """Yield raw records (header first) from a length-prefixed log file."""
    import json

    with open(path, "rb") as fh:
        while True:
            head = fh.read(_LEN.size)
            if not head:
                return
            if len(head) < _LEN.size:
                raise AuditStorageError(f"{path}: truncated length prefix")
            (size,) = _LEN.unpack(head)
            data = fh.read(size)
            if len(data) < size:
                raise AuditStorageError(f"{path}: truncated record")
            yield json.loads(data.decode("utf-8"))


def load_log(path: str) -> AuditLog:
    """Open an existing persisted log (verification is the caller's call)."""
    return AuditLog(path=path)


def _wall_clock() -> float:
    import time

    return time.time()
