"""Canonical payload encoding and digests.

Every payload that gets hashed (audit events, plan digests, transcript
fingerprints) goes through the same canonical form: key-sorted JSON with no
whitespace, UTF-8 encoded. This keeps digests stable across processes and
makes chains verifiable by an external tool that follows the same rule.
"""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
from typing import Any

SUPPORTED_DIGESTS = ("sha256", "sha384", "sha512")


def jsonable(value: Any) -> Any:
    """Reduce a value to plain JSON types (dict/list/str/num/bool/None)."""
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {k: jsonable(v) for k, v in dataclasses.asdict(value).items()}
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in value]
        if isinstance(value, (set, frozenset)):
            items.sort(key=lambda x: json.dumps(x, sort_keys=True))
        return items
    if isinstance(value, bytes):
        return value.hex()
    return value


def canonical_encode(payload: Any) -> bytes:
    """Key-sorted, whitespace-free JSON encoding of *payload*."""
    return json.dumps(
        jsonable(payload), sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


def digest(payload: Any, algorithm: str = "sha256") -> str:
    """Hex digest of the canonical encoding of *payload*."""
    if algorithm not in SUPPORTED_DIGESTS:
        raise ValueError(f"unsupported digest algorithm: {algorithm!r}")
    h = hashlib.new(algorithm)
    h.update(canonical_encode(payload))
    return h.hexdigest()


def zero_digest(algorithm: str = "sha256") -> str:
    """All-zero digest string sized for *algorithm* (genesis link)."""
    if algorithm not in SUPPORTED_DIGESTS:
        raise ValueError(f"unsupported digest algorithm: {algorithm!r}")
    return "0" * (hashlib.new(algorithm).digest_size * 2)
