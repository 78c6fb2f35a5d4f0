"""Traffic performance measures and the strategy-comparison heuristic.

Per-vehicle trace records aggregate into four standard measures (mean speed,
mean waiting time, mean time loss, mean travel time). Strategies are compared
through a weighted sum of min-max normalized measure values; orientation
flags let cost-like measures (waiting, delay) count downward so that a higher
heuristic is unambiguously better. Marking every measure Benefit recovers the
plain normalized sum.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

from .errors import ResplanError

logger = logging.getLogger(__name__)

V_AVG = "V_avg"
W_AVG = "W_avg"
TL_AVG = "TL_avg"
MT_TRAV = "MT_trav"


class Orientation(str, Enum):
    BENEFIT = "Benefit"
    COST = "Cost"


class EmptyTraceError(ResplanError):
    pass


class MissingMeasureError(ResplanError):
    pass


class DegenerateBoundsError(ResplanError):
    pass


class EmptyOutcomesError(ResplanError):
    pass


@dataclass(frozen=True)
class VehicleRecord:
    vehicle_id: str
    speed: float            # mean speed, km/h
    waiting_time: float     # seconds
    time_loss: float        # seconds; includes waiting time
    total_travel_time: float  # seconds

    def __post_init__(self):
        if self.speed < 0 or self.waiting_time < 0 or self.time_loss < 0:
            raise ValueError(f"vehicle {self.vehicle_id}: negative measure value")
        if self.total_travel_time <= 0:
            raise ValueError(f"vehicle {self.vehicle_id}: travel time must be > 0")
        if self.waiting_time > self.time_loss:
            raise ValueError(
                f"vehicle {self.vehicle_id}: waiting time exceeds time loss"
            )


@dataclass(frozen=True)
class MeasureSpec:
    name: str
    weight: float
    lower_bound: float
    upper_bound: float
    orientation: Orientation = Orientation.BENEFIT

    def __post_init__(self):
        if not (math.isfinite(self.lower_bound) and math.isfinite(self.upper_bound)):
            raise ValueError(f"measure {self.name!r}: bounds must be finite")
        if not math.isfinite(self.weight) or self.weight < 0:
            raise ValueError(f"measure {self.name!r}: weight must be finite and >= 0")
        if self.lower_bound >= self.upper_bound:
            raise DegenerateBoundsError(
                f"measure {self.name!r}: lower bound must be < upper bound"
            )


@dataclass(frozen=True)
class StrategyOutcome:
    strategy_id: str
    values: Mapping[str, float]
    heuristic: float


def aggregate_measures(trace: Sequence[VehicleRecord]) -> dict[str, float]:
    """Mean of each per-vehicle column over the whole trace."""
    if not trace:
        raise EmptyTraceError("trace contains no vehicle records")
    n = len(trace)
    return {
        V_AVG: math.fsum(r.speed for r in trace) / n,
        W_AVG: math.fsum(r.waiting_time for r in trace) / n,
        TL_AVG: math.fsum(r.time_loss for r in trace) / n,
        MT_TRAV: math.fsum(r.total_travel_time for r in trace) / n,
    }


def heuristic_score(values: Mapping[str, float], specs: Sequence[MeasureSpec]) -> float:
    """H = sum_j w_j * n_j with n_j the min-max normalized value of measure j.

    Cost measures contribute (1 - normalized). Values outside a measure's
    bounds are clamped with a warning rather than rejected.
    """
    total = 0.0
    for spec in specs:
        if spec.name not in values:
            raise MissingMeasureError(f"value for measure {spec.name!r} missing")
        v = values[spec.name]
        if v < spec.lower_bound or v > spec.upper_bound:
            logger.warning(
                "measure %s value %s outside bounds [%s, %s]; clamping",
                spec.name, v, spec.lower_bound, spec.upper_bound,
            )
            v = min(max(v, spec.lower_bound), spec.upper_bound)
        normalized = (v - spec.lower_bound) / (spec.upper_bound - spec.lower_bound)
        if spec.orientation is Orientation.COST:
            normalized = 1.0 - normalized
        total += spec.weight * normalized
    return total


class Objective(str, Enum):
    MAXIMIZE = "Maximize"
    MINIMIZE = "Minimize"


def best_outcome(
    outcomes: Sequence[StrategyOutcome],
    objective: Objective = Objective.MAXIMIZE,
) -> str:
    """Strategy id with the extremal heuristic; ties go to the lowest index."""
    if not outcomes:
        raise EmptyOutcomesError("no outcomes to compare")
    if objective is Objective.MAXIMIZE:
        best = max(range(len(outcomes)), key=lambda i: (outcomes[i].heuristic, -i))
    else:
        best = min(range(len(outcomes)), key=lambda i: (outcomes[i].heuristic, i))
    return outcomes[best].strategy_id


def evaluate_strategies(
    traces: Mapping[str, Sequence[VehicleRecord]],
    specs: Sequence[MeasureSpec],
) -> list[StrategyOutcome]:
    """Aggregate each strategy's trace and score it with the heuristic."""
    outcomes = []
    for strategy_id, trace in traces.items():
        values = aggregate_measures(trace)
        outcomes.append(
            StrategyOutcome(
                strategy_id=strategy_id,
                values=values,
                heuristic=heuristic_score(values, specs),
            )
        )
    return outcomes


def derive_bounds(
    values_per_strategy: Sequence[Mapping[str, float]],
    name: str,
    weight: float,
    orientation: Orientation = Orientation.BENEFIT,
) -> MeasureSpec:
    """Fallback bounds from the observed outcomes when config supplies none."""
    observed = [values[name] for values in values_per_strategy if name in values]
    if not observed:
        raise MissingMeasureError(f"no observed values for measure {name!r}")
    lower, upper = min(observed), max(observed)
    logger.warning(
        "deriving bounds for %s from observed outcomes: [%s, %s]", name, lower, upper
    )
    return MeasureSpec(name, weight, lower, upper, orientation)


# --- file formats ---------------------------------------------------------

TRACE_COLUMNS = ["vehicle_id", "speed", "waiting_time", "time_loss", "total_travel_time"]


def read_trace_csv(path: str | Path) -> list[VehicleRecord]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        missing = [c for c in TRACE_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"trace file missing columns: {missing}")
        return [
            VehicleRecord(
                vehicle_id=row["vehicle_id"],
                speed=float(row["speed"]),
                waiting_time=float(row["waiting_time"]),
                time_loss=float(row["time_loss"]),
                total_travel_time=float(row["total_travel_time"]),
            )
            for row in reader
        ]


def read_tripinfo_xml(path: str | Path) -> list[VehicleRecord]:
    """Adapter for SUMO tripinfo-style XML exports.

    Mean speed is derived as routeLength / duration and converted to km/h.
    This is an import path only; no simulator is embedded.
    """
    root = ET.parse(path).getroot()
    records = []
    for trip in root.iter("tripinfo"):
        duration = float(trip.get("duration", 0))
        length = float(trip.get("routeLength", 0))
        records.append(
            VehicleRecord(
                vehicle_id=trip.get("id", ""),
                speed=(length / duration) * 3.6 if duration > 0 else 0.0,
                waiting_time=float(trip.get("waitingTime", 0)),
                time_loss=float(trip.get("timeLoss", 0)),
                total_travel_time=duration,
            )
        )
    return records


def load_measure_specs(path: str | Path) -> list[MeasureSpec]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return [
        MeasureSpec(
            name=entry["name"],
            weight=float(entry["weight"]),
            lower_bound=float(entry["lower"]),
            upper_bound=float(entry["upper"]),
            orientation=Orientation(entry.get("orientation", "Benefit")),
        )
        for entry in raw
    ]


def outcomes_to_csv(outcomes: Sequence[StrategyOutcome], specs: Sequence[MeasureSpec]) -> str:
    # weights need not sum to 1, so the attainable maximum is reported next
    # to H for context
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = [spec.name for spec in specs]
    weight_total = math.fsum(spec.weight for spec in specs)
    writer.writerow(["strategy_id"] + names + ["H", "weight_total"])
    for outcome in outcomes:
        writer.writerow(
            [outcome.strategy_id]
            + [f"{outcome.values[name]:.6f}" for name in names]
            + [f"{outcome.heuristic:.6f}", f"{weight_total:.6f}"]
        )
    return buf.getvalue()
