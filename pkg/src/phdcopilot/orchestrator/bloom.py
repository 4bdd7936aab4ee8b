"""Cognitive-level classification from a shipped verb lexicon.

Queries are assigned the highest level among the lexicon verbs they contain,
so "compare X and critique Y" lands on Evaluate rather than Analyse. Queries
with no lexicon verb default to Understand.
"""

from __future__ import annotations

import json
import re
from enum import IntEnum
from functools import lru_cache
from importlib import resources


class BloomLevel(IntEnum):
    REMEMBER = 1
    UNDERSTAND = 2
    APPLY = 3
    ANALYSE = 4
    EVALUATE = 5
    CREATE = 6

    @property
    def label(self) -> str:
        return self.name.capitalize()


_LEVELS_BY_NAME = {
    "Remember": BloomLevel.REMEMBER,
    "Understand": BloomLevel.UNDERSTAND,
    "Apply": BloomLevel.APPLY,
    "Analyse": BloomLevel.ANALYSE,
    "Evaluate": BloomLevel.EVALUATE,
    "Create": BloomLevel.CREATE,
}

DEFAULT_LEVEL = BloomLevel.UNDERSTAND


@lru_cache(maxsize=1)
def verb_lexicon() -> dict[str, BloomLevel]:
    raw = json.loads(
        resources.files("phdcopilot.orchestrator")
        .joinpath("data/bloom_verbs.json")
        .read_text(encoding="utf-8")
    )
    lexicon: dict[str, BloomLevel] = {}
    for name, verbs in raw.items():
        level = _LEVELS_BY_NAME[name]
        for verb in verbs:
            lexicon[verb.lower()] = level
    return lexicon


def classify_bloom(query: str) -> BloomLevel:
    text = query.lower()
    best = None
    for verb, level in verb_lexicon().items():
        pattern = r"\b" + re.escape(verb) + r"\b" if " " not in verb else re.escape(verb)
        if re.search(pattern, text):
            if best is None or level > best:
                best = level
    return best if best is not None else DEFAULT_LEVEL
