from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from phdcopilot.retrieval import (
    Corpus,
    CorpusClass,
    Document,
    apply_diff,
    clause_value_sets,
    conflict_scan,
    extract_clauses,
    index_corpus,
    passage_windows,
    policy_diff,
    sentence_spans,
)

from .oracles import bm25_rank

VOCAB = (
    "ethics approval review thesis data methods analysis committee deadline "
    "candidature submission draft chapter results model survey pilot consent "
    "archive corpus index query passage ranking evidence"
).split()


def toy_corpus(documents: tuple[Document, ...], kind: str = "student") -> Corpus:
    corpus_class = CorpusClass.policy() if kind == "policy" else CorpusClass.student("s1")
    return Corpus(id="toy", corpus_class=corpus_class, documents=documents)


def random_document(rng: random.Random, doc_id: str) -> Document:
    sentences = []
    for _ in range(rng.randint(1, 8)):
        words = rng.choices(VOCAB, k=rng.randint(3, 12))
        sentences.append(" ".join(words).capitalize() + ".")
    return Document(id=doc_id, title=doc_id, body=" ".join(sentences))


def test_sentence_spans_index_into_the_original_text():
    body = "First sentence here. Second one follows!  Third, with a pause? Tail without end"
    spans = sentence_spans(body)
    assert [body[s:e] for s, e in spans] == [
        "First sentence here.",
        "Second one follows!",
        "Third, with a pause?",
        "Tail without end",
    ]


def test_passage_windows_are_three_sentences_overlap_one():
    body = "One. Two. Three. Four. Five."
    passages = passage_windows("d", body)
    assert [p.text for p in passages] == ["One. Two. Three.", "Three. Four. Five."]


def test_empty_corpus_returns_empty_results():
    index = index_corpus(toy_corpus(()))
    assert index.query("anything", k=3) == []


def test_reindexing_is_deterministic():
    docs = tuple(random_document(random.Random(4), f"d{i}") for i in range(3))
    first = index_corpus(toy_corpus(docs)).stats()
    second = index_corpus(toy_corpus(docs)).stats()
    assert first == second


def test_document_frequencies_match_hand_count():
    docs = (
        Document("d1", "t", "Ethics approval matters."),
        Document("d2", "t", "Approval of data plans."),
        Document("d3", "t", "Methods and data."),
    )
    stats = index_corpus(toy_corpus(docs)).stats()
    freqs = dict(stats.document_frequencies)
    assert freqs["approval"] == 2
    assert freqs["data"] == 2
    assert freqs["ethics"] == 1


def test_duplicate_document_ids_rejected():
    with pytest.raises(ValueError):
        toy_corpus((Document("d", "a", "x."), Document("d", "b", "y.")))


def test_only_matching_document_ranks_first():
    docs = (
        Document("hit", "t", "Ethics approval is pending review."),
        Document("miss", "t", "Unrelated draft chapter text entirely."),
    )
    results = index_corpus(toy_corpus(docs)).query("ethics approval", k=5)
    assert results
    assert results[0].backlink.document_id == "hit"
    assert all(r.backlink.document_id == "hit" for r in results)


def test_three_document_corpus_matches_brute_force_bm25():
    docs = (
        Document("d1", "t", "Ethics approval is required before data collection. The committee meets monthly. Late requests stall."),
        Document("d2", "t", "Approval workflows differ by faculty. Ethics forms are online. Deadlines are strict."),
        Document("d3", "t", "Survey methods and pilot analysis notes. Data cleaning steps. Model fitting plans."),
    )
    corpus = toy_corpus(docs)
    results = index_corpus(corpus).query("ethics approval", k=10)
    expected = bm25_rank(corpus, "ethics approval", 10)
    assert [(r.backlink.document_id, r.backlink.start) for r in results] == [
        (doc, start) for doc, start, _ in expected
    ]
    for r, (_, _, score) in zip(results, expected):
        assert r.score == pytest.approx(score, rel=1e-12)


def test_random_corpora_match_brute_force_rankings_exactly():
    rng = random.Random(99)
    for round_no in range(40):
        docs = tuple(
            random_document(rng, f"d{i}") for i in range(rng.randint(1, 20))
        )
        corpus = toy_corpus(docs)
        index = index_corpus(corpus)
        for _ in range(5):
            query = " ".join(rng.choices(VOCAB, k=rng.randint(1, 4)))
            k = rng.randint(1, 8)
            got = [(r.backlink.document_id, r.backlink.start) for r in index.query(query, k=k)]
            want = [(d, s) for d, s, _ in bm25_rank(corpus, query, k)]
            assert got == want, f"round {round_no}: {query!r}"


def test_k_larger_than_matches_returns_only_matches():
    docs = (Document("d1", "t", "Ethics approval text."),)
    results = index_corpus(toy_corpus(docs)).query("ethics", k=50)
    assert len(results) == 1


def test_k_must_be_positive():
    index = index_corpus(toy_corpus((Document("d1", "t", "Some text."),)))
    with pytest.raises(ValueError):
        index.query("text", k=0)


def test_backlink_quotes_reproduce_source_bytes():
    rng = random.Random(3)
    docs = tuple(random_document(rng, f"d{i}") for i in range(6))
    corpus = toy_corpus(docs)
    index = index_corpus(corpus)
    for _ in range(30):
        query = " ".join(rng.choices(VOCAB, k=2))
        for result in index.query(query, k=6):
            b = result.backlink
            assert corpus.document(b.document_id).body[b.start : b.end] == b.quoted_text


def test_identical_inputs_give_identical_ranked_lists():
    docs = tuple(random_document(random.Random(8), f"d{i}") for i in range(5))
    index = index_corpus(toy_corpus(docs))
    assert index.query("ethics data", k=4) == index.query("ethics data", k=4)


def policy_corpus(*bodies: str) -> Corpus:
    docs = tuple(
        Document(f"p{i}", f"p{i}", body, version=str(i + 1)) for i, body in enumerate(bodies)
    )
    return Corpus(id="policy", corpus_class=CorpusClass.policy(), documents=docs)


def test_clause_extraction_reads_the_micro_format():
    corpus = policy_corpus("Intro prose.\nmax-candidature: 4 years\nMore prose.")
    clauses, warnings = extract_clauses(corpus)
    assert [(c.topic_key, c.value) for c in clauses] == [("max-candidature", "4 years")]
    assert warnings == []


def test_unmarked_documents_are_skipped_with_a_warning():
    corpus = policy_corpus("Just prose, no markers at all.")
    clauses, warnings = extract_clauses(corpus)
    assert clauses == []
    assert len(warnings) == 1


def test_conflicting_values_on_one_key_make_one_pair():
    corpus = policy_corpus("max-candidature: 4 years", "max-candidature: 3 years")
    conflicts, _ = conflict_scan(corpus)
    assert len(conflicts) == 1
    assert conflicts[0].topic_key == "max-candidature"


def test_consistent_clauses_scan_clean():
    corpus = policy_corpus("max-candidature: 4 years", "max-candidature: 4 years")
    conflicts, _ = conflict_scan(corpus)
    assert conflicts == []


def test_three_way_conflict_yields_three_pairs():
    corpus = policy_corpus(
        "max-candidature: 4 years", "max-candidature: 3 years", "max-candidature: 5 years"
    )
    conflicts, _ = conflict_scan(corpus)
    assert len(conflicts) == 3


def test_identical_versions_diff_empty():
    v = policy_corpus("max-candidature: 4 years\nreview-cycle: annual")
    assert policy_diff(v, v) == []


def test_single_value_edit_is_one_changed_entry():
    v1 = policy_corpus("max-candidature: 4 years")
    v2 = policy_corpus("max-candidature: 3 years")
    entries = policy_diff(v1, v2)
    assert len(entries) == 1
    assert (entries[0].kind, entries[0].before, entries[0].after) == (
        "changed",
        "4 years",
        "3 years",
    )


@settings(max_examples=200, deadline=None)
@given(
    keys1=st.lists(st.sampled_from(["a-key", "b-key", "c-key", "d-key"]), max_size=6),
    keys2=st.lists(st.sampled_from(["a-key", "b-key", "c-key", "d-key"]), max_size=6),
    data=st.data(),
)
def test_applying_the_diff_reconstructs_v2(keys1, keys2, data):
    values = ["1", "2", "3"]
    body1 = "\n".join(f"{k}: {data.draw(st.sampled_from(values))}" for k in keys1)
    body2 = "\n".join(f"{k}: {data.draw(st.sampled_from(values))}" for k in keys2)
    v1 = policy_corpus(body1 or "prose only")
    v2 = policy_corpus(body2 or "prose only")
    set1 = {(k, v) for k, vs in clause_value_sets(v1).items() for v in vs}
    set2 = {(k, v) for k, vs in clause_value_sets(v2).items() for v in vs}
    entries = policy_diff(v1, v2)
    assert apply_diff(set1, entries) == set2
