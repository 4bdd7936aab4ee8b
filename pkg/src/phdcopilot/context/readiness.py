"""The five-component readiness vector that keeps responses state-aware."""

from __future__ import annotations

from dataclasses import dataclass, replace

READINESS_COMPONENTS = (
    "question_maturity",
    "design_readiness",
    "data_readiness",
    "ethics_risk",
    "citation_coverage",
)


@dataclass(frozen=True)
class ReadinessState:
    student_id: str
    question_maturity: float = 0.0
    design_readiness: float = 0.0
    data_readiness: float = 0.0
    ethics_risk: float = 0.0
    citation_coverage: float = 0.0
    as_of: float = 0.0

    def __post_init__(self) -> None:
        for name in READINESS_COMPONENTS:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be within [0, 1], got {value}")

    def with_component(self, component: str, value: float, as_of: float) -> "ReadinessState":
        if component not in READINESS_COMPONENTS:
            raise ValueError(f"unknown readiness component: {component}")
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{component} must be within [0, 1], got {value}")
        return replace(self, **{component: value, "as_of": as_of})


def citation_coverage(cited_claims: int, total_claims: int) -> float:
    """Share of tagged claims that carry citations; 1.0 when nothing is claimed."""
    if total_claims < 0 or cited_claims < 0 or cited_claims > total_claims:
        raise ValueError("claim counts must satisfy 0 <= cited <= total")
    if total_claims == 0:
        return 1.0
    return cited_claims / total_claims
