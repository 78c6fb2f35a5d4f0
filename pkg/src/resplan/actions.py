"""Permitted traffic-management actions, lanes, and strategy composition.

The system is only ever allowed to recommend interventions drawn from this
constrained action space: a lane, an imposed speed limit, a variable message
sign text, and a closure state. Free-form recommendations are rejected by
construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

from .errors import ResplanError

CATALOG_SIZE = 10
MAX_VMS_LENGTH = 120  # wire-safety cap; the message vocabulary itself is open


class Closure(str, Enum):
    OPEN = "Open"
    CLOSED = "Closed"


class UnknownLaneError(ResplanError):
    """An action references a lane id that is not part of the network."""


class InvalidActionError(ResplanError):
    """An action failed validation against the network."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("; ".join(v.message for v in report.violations))


class ConflictingLaneStateError(ResplanError):
    """A strategy opens and closes the same lane."""


@dataclass(frozen=True)
class NetworkLane:
    """A lane with its legal speed range in km/h."""

    id: str
    v_min: float
    v_max: float

    def __post_init__(self):
        if not self.id:
            raise ValueError("lane id must be non-empty")
        if self.v_min < 0:
            raise ValueError(f"lane {self.id}: v_min must be >= 0")
        if not self.v_min < self.v_max:
            raise ValueError(f"lane {self.id}: v_min must be < v_max")


@dataclass(frozen=True)
class PermittedAction:
    """One intervention: (lane, speed limit, VMS message, closure state).

    A closed lane carries speed 0 as the canonical sentinel for "unusable";
    any other speed on a closed lane is rejected so equal strategies always
    compare equal.
    """

    lane: str
    speed: int
    vms: str = ""
    closure: Closure = Closure.OPEN


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...] = ()


@dataclass(frozen=True)
class CatalogAction:
    """One row of the ranked action catalog with its criterion scores."""

    index: int
    name: str
    impact: float
    resource_engagement: float


@dataclass(frozen=True)
class Strategy:
    """An ordered sequence of permitted actions."""

    id: str
    actions: tuple[PermittedAction, ...]

    def __len__(self) -> int:
        return len(self.actions)


# Canonical catalog: the ten ranked incident-management actions with their
# Impact / Resource Engagement scores. Order is fixed; binary plans index
# into this sequence.
_CANONICAL = (
    CatalogAction(0, "Deploy IRV", 9, 7),
    CatalogAction(1, "Temporary Lane Closure", 8, 6),
    CatalogAction(2, "Use VMS to Warn Drivers", 7, 5),
    CatalogAction(3, "Notify Police & EMS", 6, 4),
    CatalogAction(4, "Quick Clearance Policy", 5, 6),
    CatalogAction(5, "Use VMS & Social Media", 4, 3),
    CatalogAction(6, "Full or Partial Lane Closures", 3, 5),
    CatalogAction(7, "Divert Traffic to Detour Routes", 2, 7),
    CatalogAction(8, "Activate EOC", 1, 8),
    CatalogAction(9, "Full Road Closure", 10, 9),
)


def canonical_catalog() -> tuple[CatalogAction, ...]:
    """Return the ten canonical actions in fixed order."""
    return _CANONICAL


def load_catalog(path: str | Path) -> tuple[CatalogAction, ...]:
    """Load a catalog override: same ten rows, possibly different scores.

    The override must keep the canonical names and indices; only the two
    criterion scores may change.
    """
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list) or len(raw) != CATALOG_SIZE:
        raise ValueError(f"catalog override must contain exactly {CATALOG_SIZE} rows")
    rows = []
    for entry in raw:
        action = CatalogAction(
            index=int(entry["index"]),
            name=str(entry["name"]),
            impact=float(entry["impact"]),
            resource_engagement=float(entry["resource_engagement"]),
        )
        if not (1 <= action.impact <= 10 and 1 <= action.resource_engagement <= 10):
            raise ValueError(f"catalog row {action.index}: scores must lie in 1..10")
        rows.append(action)
    rows.sort(key=lambda a: a.index)
    for row, canonical in zip(rows, _CANONICAL):
        if row.index != canonical.index or row.name != canonical.name:
            raise ValueError(
                f"catalog override row {row.index!r} ({row.name!r}) does not match "
                f"the canonical catalog"
            )
    return tuple(rows)


def load_network(path: str | Path) -> list[NetworkLane]:
    """Load a network definition file: JSON array of {id, v_min, v_max}."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    lanes = [NetworkLane(str(e["id"]), float(e["v_min"]), float(e["v_max"])) for e in raw]
    _lane_index(lanes)
    return lanes


def _lane_index(network: Sequence[NetworkLane]) -> dict[str, NetworkLane]:
    index: dict[str, NetworkLane] = {}
    for lane in network:
        if lane.id in index:
            raise ValueError(f"duplicate lane id {lane.id!r} in network definition")
        index[lane.id] = lane
    return index


def validate_action(
    action: PermittedAction, network: Sequence[NetworkLane]
) -> ValidationReport:
    """Check one action against the network; violations name the failed rule."""
    if not network:
        raise ValueError("network must be non-empty")
    lanes = _lane_index(network)
    violations: list[Violation] = []

    lane = lanes.get(action.lane)
    if lane is None:
        violations.append(
            Violation("unknown_lane", f"lane {action.lane!r} is not in the network")
        )
    if len(action.vms) > MAX_VMS_LENGTH:
        violations.append(
            Violation("vms_too_long", f"VMS text exceeds {MAX_VMS_LENGTH} characters")
        )
    if action.closure is Closure.CLOSED:
        if action.speed != 0:
            violations.append(
                Violation(
                    "closed_speed_nonzero",
                    "closed lanes must carry speed 0 (unusable-state sentinel)",
                )
            )
    elif lane is not None:
        if action.speed < lane.v_min:
            violations.append(
                Violation(
                    "speed_below_v_min",
                    f"speed {action.speed} below v_min {lane.v_min} on {lane.id}",
                )
            )
        if action.speed > lane.v_max:
            violations.append(
                Violation(
                    "speed_above_v_max",
                    f"speed {action.speed} above v_max {lane.v_max} on {lane.id}",
                )
            )
    return ValidationReport(ok=not violations, violations=tuple(violations))


def compose_strategy(
    actions: Sequence[PermittedAction],
    network: Sequence[NetworkLane],
    strategy_id: str = "strategy",
) -> Strategy:
    """Build a strategy from individually valid actions, order preserved.

    Raises ConflictingLaneStateError when the same lane appears both Open
    and Closed. A lane may receive several speed limits in one strategy;
    no ordering semantics are attached to that.
    """
    lane_state: dict[str, Closure] = {}
    for action in actions:
        report = validate_action(action, network)
        if not report.ok:
            raise InvalidActionError(report)
        seen = lane_state.get(action.lane)
        if seen is not None and seen is not action.closure:
            raise ConflictingLaneStateError(
                f"lane {action.lane!r} appears both {seen.value} and {action.closure.value}"
            )
        lane_state[action.lane] = action.closure
    return Strategy(id=strategy_id, actions=tuple(actions))
