"""Severity banding and risk rubric for the issue triage.

Severity is the half-up rounded mean of two banded estimates: prevalence P and
consequence C, each in {1, 2, 3}. Half-up matters: (P+C)/2 = 2.5 must band to
3, which many default rounding modes (half-even) would not do. Prevalence
bands: below 20% is Low, 20-40% inclusive is Moderate, above 40% is High.

The risk label is separate from severity: it grades the *new* exposure a
deployed assistant would introduce, over five dimensions. Low means limited
new exposure under strong guardrails, Medium means meaningful but mitigable
exposure, High means credible exposure in a sensitive domain even with
guardrails in place.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

BANDS = (1, 2, 3)
MITIGATION_SCALE = (0, 1, 2, 3)  # None(0) .. High(3)


class RiskLabel(str, Enum):
    LOW = "L"
    MEDIUM = "M"
    HIGH = "H"


class RiskDimension(str, Enum):
    PRIVACY_SURVEILLANCE = "PrivacySurveillance"
    AGENCY_POWER_SHIFT = "AgencyPowerShift"
    INTEGRITY_POLICY_DRIFT = "IntegrityPolicyDrift"
    GAMING_METRIC_FIXATION = "GamingMetricFixation"
    BIAS_DISPARATE_IMPACT = "BiasDisparateImpact"


def band_prevalence(fraction: float) -> int:
    """Band a prevalence fraction: <0.20 -> 1, [0.20, 0.40] -> 2, >0.40 -> 3."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"prevalence fraction must be within [0, 1], got {fraction}")
    if fraction < 0.20:
        return 1
    if fraction <= 0.40:
        return 2
    return 3


def severity(prevalence_band: int, consequence_band: int) -> int:
    """Half-up rounded mean of the two bands; integer arithmetic, no floats."""
    if prevalence_band not in BANDS or consequence_band not in BANDS:
        raise ValueError(
            f"bands must be in {BANDS}, got P={prevalence_band}, C={consequence_band}"
        )
    return (prevalence_band + consequence_band + 1) // 2


@dataclass(frozen=True)
class RiskAssessment:
    """Flagged exposure dimensions for one issue.

    ``flagged`` maps each flagged dimension to whether the exposure is judged
    credible in a sensitive domain even with guardrails; that marker is what
    separates High from Medium.
    """

    issue_id: str
    flagged: tuple[tuple[RiskDimension, bool], ...] = ()

    @property
    def label(self) -> RiskLabel:
        if any(sensitive for _, sensitive in self.flagged):
            return RiskLabel.HIGH
        if self.flagged:
            return RiskLabel.MEDIUM
        return RiskLabel.LOW
