"""Linear-velocity milestone forecasting and slippage early warning.

Velocity is completed checkpoints per unit of time since the first completion;
the projection extrapolates the remaining checkpoints at that rate. No
learning, no seasonality: the simplest model that can raise a warning early.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Checkpoint:
    id: str
    completed_at: float | None = None


@dataclass(frozen=True)
class MilestonePlan:
    milestone_id: str
    due_at: float
    checkpoints: tuple[Checkpoint, ...]

    def __post_init__(self) -> None:
        if not self.checkpoints:
            raise ValueError("a plan needs at least one checkpoint")
        done = [c.completed_at for c in self.checkpoints if c.completed_at is not None]
        if any(b < a for a, b in zip(done, done[1:])):
            raise ValueError("completion timestamps must be non-decreasing in list order")


@dataclass(frozen=True)
class Forecast:
    projected_completion_at: float | None
    slippage_warning: str | None

    @property
    def on_track(self) -> bool:
        return self.slippage_warning is None


def forecast(plan: MilestonePlan, as_of: float) -> Forecast:
    completions = [
        c.completed_at
        for c in plan.checkpoints
        if c.completed_at is not None and c.completed_at <= as_of
    ]
    total = len(plan.checkpoints)
    done = len(completions)
    remaining = total - done

    if remaining == 0:
        return Forecast(projected_completion_at=max(completions), slippage_warning=None)

    if done == 0:
        return Forecast(
            projected_completion_at=None,
            slippage_warning=f"{plan.milestone_id}: no checkpoint activity, velocity is zero",
        )

    elapsed = as_of - min(completions)
    if elapsed <= 0:
        # All completions landed at as_of itself; extrapolation collapses to now.
        projected = as_of
    else:
        velocity = done / elapsed
        projected = as_of + remaining / velocity

    warning = None
    if projected > plan.due_at:
        warning = (
            f"{plan.milestone_id}: projected completion {projected:g} "
            f"is past due date {plan.due_at:g}"
        )
    return Forecast(projected_completion_at=projected, slippage_warning=warning)
