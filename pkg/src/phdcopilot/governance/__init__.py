"""Identity, roles, consent, access control, and the audit chain."""

from .actors import Actor, ActorRegistry, Role, UnknownActorError
from .audit import (
    AuditEvent,
    AuditLog,
    AuditStorageError,
    ChainStatus,
    load_log,
    verify_chain,
)
from .consent import ConsentRecord, ConsentRegistry, ConsentScope, ConsentState
from .rbac import Decision, Rel, ResourceRef, RULES, authorize, deny_rule_for

__all__ = [
    "Actor",
    "ActorRegistry",
    "Role",
    "UnknownActorError",
    "AuditEvent",
    "AuditLog",
    "AuditStorageError",
    "ChainStatus",
    "load_log",
    "verify_chain",
    "ConsentRecord",
    "ConsentRegistry",
    "ConsentScope",
    "ConsentState",
    "Decision",
    "Rel",
    "ResourceRef",
    "RULES",
    "authorize",
    "deny_rule_for",
]
