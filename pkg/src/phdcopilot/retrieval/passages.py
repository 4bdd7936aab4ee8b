"""Sentence segmentation and passage windowing.

Passages are windows of 3 sentences with an overlap of 1, expressed as
character spans into the original document body so that the quoted text of a
backlink always reproduces the exact source bytes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_SENTENCE = re.compile(r"[^.!?]+[.!?]+|[^.!?]+$")

WINDOW_SENTENCES = 3
WINDOW_OVERLAP = 1


@dataclass(frozen=True)
class Passage:
    document_id: str
    start: int
    end: int
    text: str


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """Character spans of sentences, trimmed of surrounding whitespace."""
    spans = []
    for match in _SENTENCE.finditer(text):
        start, end = match.span()
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if end > start:
            spans.append((start, end))
    return spans


def passage_windows(
    document_id: str,
    body: str,
    window: int = WINDOW_SENTENCES,
    overlap: int = WINDOW_OVERLAP,
) -> list[Passage]:
    if overlap >= window:
        raise ValueError("overlap must be smaller than the window")
    spans = sentence_spans(body)
    if not spans:
        return []
    step = window - overlap
    passages = []
    i = 0
    while True:
        group = spans[i : i + window]
        start, end = group[0][0], group[-1][1]
        passages.append(Passage(document_id=document_id, start=start, end=end, text=body[start:end]))
        if i + window >= len(spans):
            break
        i += step
    return passages
