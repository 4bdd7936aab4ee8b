"""Per-student private store of context items.

One store per student holds their profile, research description, documents,
accepted decisions, produced artefacts, and summaries. Purge is a hard delete
of the body: only the payload digest already written to the audit log remains.
Cross-student reads cannot be expressed against this type; callers obtain a
store by student id and every item in it carries that id.
"""

from __future__ import annotations

import io
import json
import threading
import zipfile
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

from ..retrieval.bm25 import SourceBacklink


class ItemKind(str, Enum):
    PROFILE = "Profile"
    RESEARCH_DESCRIPTION = "ResearchDescription"
    DOCUMENT = "Document"
    DECISION = "Decision"
    ARTEFACT = "Artefact"
    SUMMARY = "Summary"


class Verification(str, Enum):
    UNVERIFIED = "Unverified"
    VERIFIED = "Verified"
    FAILED = "Failed"


class RetentionClass(str, Enum):
    UNTIL_PURGE = "UntilPurge"
    ONE_YEAR = "OneYear"


class ItemNotFoundError(Exception):
    pass


@dataclass(frozen=True)
class ContextItem:
    id: str
    student_id: str
    kind: ItemKind
    body: str
    media_type: str = "text/plain"
    citations: tuple[SourceBacklink, ...] = ()
    verification: Verification = Verification.UNVERIFIED
    tags: tuple[str, ...] = ()
    parent_id: str | None = None
    created_at: float = 0.0
    updated_at: float = 0.0
    retention: RetentionClass = RetentionClass.UNTIL_PURGE

    def __post_init__(self) -> None:
        if self.verification is Verification.VERIFIED and not self.citations:
            raise ValueError("a verified item needs at least one citation")


class ContextStore:
    """Single-writer store for one student; reads are concurrent."""

    def __init__(self, student_id: str, clock: Callable[[], float]):
        self.student_id = student_id
        self._clock = clock
        self._items: dict[str, ContextItem] = {}
        self._counter = 0
        self.lock = threading.RLock()

    def _next_id(self) -> str:
        self._counter += 1
        return f"{self.student_id}-item-{self._counter}"

    def put_item(
        self,
        kind: ItemKind,
        body: str,
        media_type: str = "text/plain",
        citations: tuple[SourceBacklink, ...] = (),
        verification: Verification = Verification.UNVERIFIED,
        tags: tuple[str, ...] = (),
        parent_id: str | None = None,
        retention: RetentionClass | None = None,
    ) -> ContextItem:
        with self.lock:
            now = self._clock()
            if retention is None:
                retention = (
                    RetentionClass.ONE_YEAR if kind is ItemKind.SUMMARY else RetentionClass.UNTIL_PURGE
                )
            item = ContextItem(
                id=self._next_id(),
                student_id=self.student_id,
                kind=kind,
                body=body,
                media_type=media_type,
                citations=tuple(citations),
                verification=verification,
                tags=tuple(tags),
                parent_id=parent_id,
                created_at=now,
                updated_at=now,
                retention=retention,
            )
            self._items[item.id] = item
            return item

    def update_item(self, item_id: str, body: str | None = None, tags: tuple[str, ...] | None = None) -> ContextItem:
        with self.lock:
            item = self.get_item(item_id)
            updated = replace(
                item,
                body=item.body if body is None else body,
                tags=item.tags if tags is None else tuple(tags),
                updated_at=self._clock(),
            )
            self._items[item_id] = updated
            return updated

    def set_verification(self, item_id: str, state: Verification) -> ContextItem:
        with self.lock:
            item = self.get_item(item_id)
            updated = replace(item, verification=state, updated_at=self._clock())
            self._items[item_id] = updated
            return updated

    def get_item(self, item_id: str) -> ContextItem:
        item = self._items.get(item_id)
        if item is None:
            raise ItemNotFoundError(f"no item {item_id} for student {self.student_id}")
        return item

    def get_items(
        self,
        kind: ItemKind | None = None,
        tag: str | None = None,
        parent_id: str | None = None,
    ) -> tuple[ContextItem, ...]:
        out = []
        for item in self._items.values():
            if kind is not None and item.kind is not kind:
                continue
            if tag is not None and tag not in item.tags:
                continue
            if parent_id is not None and item.parent_id != parent_id:
                continue
            out.append(item)
        return tuple(sorted(out, key=lambda i: i.id))

    def purge_item(self, item_id: str) -> str:
        """Hard-delete the item; returns its id for the audit trail."""
        with self.lock:
            if item_id not in self._items:
                raise ItemNotFoundError(f"no item {item_id} for student {self.student_id}")
            del self._items[item_id]
            return item_id

    def export_zip(self) -> bytes:
        """Portable zip of structured-text records, one file per item."""
        buffer = io.BytesIO()
        with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as zf:
            for item in self.get_items():
                record = {
                    "id": item.id,
                    "student_id": item.student_id,
                    "kind": item.kind.value,
                    "body": item.body,
                    "media_type": item.media_type,
                    "citations": [
                        {
                            "document_id": c.document_id,
                            "start": c.start,
                            "end": c.end,
                            "document_version": c.document_version,
                            "quoted_text": c.quoted_text,
                        }
                        for c in item.citations
                    ],
                    "verification": item.verification.value,
                    "tags": list(item.tags),
                    "parent_id": item.parent_id,
                    "created_at": item.created_at,
                    "updated_at": item.updated_at,
                    "retention": item.retention.value,
                }
                zf.writestr(f"{item.id}.json", json.dumps(record, sort_keys=True, indent=2))
        return buffer.getvalue()
