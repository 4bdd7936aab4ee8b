"""Temporal knowledge graph: timestamped facts, snapshots, diffs, forecasts."""

from .constraints import ConstraintViolation, OrderingConstraint, check_constraints
from .forecast import Checkpoint, Forecast, MilestonePlan, forecast
from .store import (
    DuplicateFactError,
    FactNotFoundError,
    GraphDiff,
    TemporalFact,
    TemporalGraph,
    export_facts,
    import_facts,
)

__all__ = [
    "ConstraintViolation",
    "OrderingConstraint",
    "check_constraints",
    "Checkpoint",
    "Forecast",
    "MilestonePlan",
    "forecast",
    "DuplicateFactError",
    "FactNotFoundError",
    "GraphDiff",
    "TemporalFact",
    "TemporalGraph",
    "export_facts",
    "import_facts",
]
