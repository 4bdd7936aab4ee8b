"""Grounding layer: corpora, BM25 passage retrieval, policy tooling."""

from .bm25 import Bm25Index, IndexStats, SearchResult, SourceBacklink, index_corpus, tokenize
from .corpus import Corpus, CorpusClass, Document, load_corpus_dir
from .passages import Passage, passage_windows, sentence_spans
from .policy import (
    Clause,
    ClauseConflict,
    DiffEntry,
    apply_diff,
    clause_value_sets,
    conflict_scan,
    extract_clauses,
    policy_diff,
)

__all__ = [
    "Bm25Index",
    "IndexStats",
    "SearchResult",
    "SourceBacklink",
    "index_corpus",
    "tokenize",
    "Corpus",
    "CorpusClass",
    "Document",
    "load_corpus_dir",
    "Passage",
    "passage_windows",
    "sentence_spans",
    "Clause",
    "ClauseConflict",
    "DiffEntry",
    "apply_diff",
    "clause_value_sets",
    "conflict_scan",
    "extract_clauses",
    "policy_diff",
]
