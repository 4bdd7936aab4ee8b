"""Lexical passage retrieval: an inverted-index BM25 ranker with backlinks.

Scoring (k1=1.2, b=0.75, applied per passage):

    score(q, p) = sum over unique query terms t, in first-appearance order, of
        qcount(t) * idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len/avgdl))
    idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))

with N the passage count, df the passage frequency of t, len the passage token
count, and avgdl the mean passage token count. Only passages with score > 0
are returned; ties break by (document id, start offset) ascending. Indexes are
immutable once built, so queries are lock-free and reproducible.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

from .corpus import Corpus, CorpusClass
from .passages import Passage, passage_windows

K1 = 1.2
B = 0.75

_TOKEN = re.compile(r"\w+")


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


@dataclass(frozen=True)
class SourceBacklink:
    document_id: str
    start: int
    end: int
    document_version: str
    quoted_text: str


@dataclass(frozen=True)
class SearchResult:
    passage_text: str
    backlink: SourceBacklink
    score: float


@dataclass(frozen=True)
class IndexStats:
    document_count: int
    passage_count: int
    avg_passage_len: float
    document_frequencies: tuple[tuple[str, int], ...]


class Bm25Index:
    """Immutable passage index over one corpus."""

    def __init__(self, corpus: Corpus, k1: float = K1, b: float = B):
        self.corpus = corpus
        self.corpus_class: CorpusClass = corpus.corpus_class
        self.k1 = k1
        self.b = b
        self._passages: list[Passage] = []
        self._versions: dict[str, str] = {d.id: d.version for d in corpus.documents}
        for doc in corpus.documents:
            self._passages.extend(passage_windows(doc.id, doc.body))
        self._tf: list[Counter[str]] = [Counter(tokenize(p.text)) for p in self._passages]
        self._lengths = [sum(tf.values()) for tf in self._tf]
        self._n = len(self._passages)
        self._avgdl = (sum(self._lengths) / self._n) if self._n else 0.0
        self._postings: dict[str, list[tuple[int, int]]] = {}
        for pid, tf in enumerate(self._tf):
            for term, count in tf.items():
                self._postings.setdefault(term, []).append((pid, count))

    @property
    def passages(self) -> tuple[Passage, ...]:
        return tuple(self._passages)

    def stats(self) -> IndexStats:
        freqs = tuple(sorted((t, len(p)) for t, p in self._postings.items()))
        return IndexStats(
            document_count=len(self.corpus.documents),
            passage_count=self._n,
            avg_passage_len=self._avgdl,
            document_frequencies=freqs,
        )

    def idf(self, term: str) -> float:
        df = len(self._postings.get(term, ()))
        return math.log(1.0 + (self._n - df + 0.5) / (df + 0.5))

    def query(
        self,
        text: str,
        k: int,
        allowed_documents: set[str] | None = None,
    ) -> list[SearchResult]:
        """Top-k passages by BM25 score; never pads below the match count.

        ``allowed_documents``, when given, restricts results to passages from
        those documents (used to apply patch exclusions at retrieval time).
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        if self._n == 0:
            return []
        tokens = tokenize(text)
        query_counts: dict[str, int] = {}
        for t in tokens:
            query_counts[t] = query_counts.get(t, 0) + 1

        scores: dict[int, float] = {}
        for term, qcount in query_counts.items():
            postings = self._postings.get(term)
            if not postings:
                continue
            idf = self.idf(term)
            for pid, tf in postings:
                norm = self.k1 * (1 - self.b + self.b * self._lengths[pid] / self._avgdl)
                contribution = qcount * idf * tf * (self.k1 + 1) / (tf + norm)
                scores[pid] = scores.get(pid, 0.0) + contribution

        hits = []
        for pid, score in scores.items():
            if score <= 0.0:
                continue
            passage = self._passages[pid]
            if allowed_documents is not None and passage.document_id not in allowed_documents:
                continue
            hits.append((score, passage))
        hits.sort(key=lambda h: (-h[0], h[1].document_id, h[1].start))
        results = []
        for score, passage in hits[:k]:
            results.append(
                SearchResult(
                    passage_text=passage.text,
                    backlink=SourceBacklink(
                        document_id=passage.document_id,
                        start=passage.start,
                        end=passage.end,
                        document_version=self._versions[passage.document_id],
                        quoted_text=passage.text,
                    ),
                    score=score,
                )
            )
        return results


def index_corpus(corpus: Corpus) -> Bm25Index:
    return Bm25Index(corpus)
