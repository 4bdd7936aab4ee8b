"""Corpora and their strict class separation.

Two corpus classes exist: per-student corpora (thesis material, literature,
local documents) and the institution-managed policy index. A retrieval request
is built over exactly one class; nothing at query time can cross from one
class into the other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class CorpusClass:
    kind: str  # "student" | "policy"
    student_id: str | None = None

    def __post_init__(self) -> None:
        if self.kind == "policy" and self.student_id is not None:
            raise ValueError("the policy index carries no student id")
        if self.kind == "student" and not self.student_id:
            raise ValueError("a student corpus needs a student id")
        if self.kind not in ("student", "policy"):
            raise ValueError(f"unknown corpus class: {self.kind}")

    @staticmethod
    def student(student_id: str) -> "CorpusClass":
        return CorpusClass(kind="student", student_id=student_id)

    @staticmethod
    def policy() -> "CorpusClass":
        return CorpusClass(kind="policy")


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    body: str
    version: str = "1"
    effective_date: str = ""


@dataclass(frozen=True)
class Corpus:
    id: str
    corpus_class: CorpusClass
    documents: tuple[Document, ...] = ()

    def __post_init__(self) -> None:
        ids = [d.id for d in self.documents]
        if len(ids) != len(set(ids)):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate document ids: {', '.join(dupes)}")

    def document(self, doc_id: str) -> Document:
        for d in self.documents:
            if d.id == doc_id:
                return d
        raise KeyError(doc_id)


def load_corpus_dir(directory: str | Path, corpus_class: CorpusClass, corpus_id: str | None = None) -> Corpus:
    """Build a corpus from a directory of plain-text files plus a manifest.

    The manifest (``manifest.json``) lists one record per document:
    ``{"id", "title", "file", "version", "effective_date"}``.
    """
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"no manifest.json in {directory}")
    entries = json.loads(manifest_path.read_text(encoding="utf-8"))
    documents = []
    for entry in entries:
        body = (directory / entry["file"]).read_text(encoding="utf-8")
        documents.append(
            Document(
                id=entry["id"],
                title=entry.get("title", entry["id"]),
                body=body,
                version=str(entry.get("version", "1")),
                effective_date=entry.get("effective_date", ""),
            )
        )
    if corpus_id is None:
        corpus_id = (
            "policy"
            if corpus_class.kind == "policy"
            else f"student:{corpus_class.student_id}:{directory.name}"
        )
    return Corpus(id=corpus_id, corpus_class=corpus_class, documents=tuple(documents))
