"""TOPSIS engine: rank alternatives by closeness to the ideal solution.

The six classic steps over a decision matrix: vector normalization, criterion
weighting, positive/negative ideal solutions, Euclidean separations, and the
relative closeness coefficient. Closeness values double as per-action weights
when comparing binary response plans.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .actions import CatalogAction
from .errors import DimensionMismatchError, ResplanError


class Kind(str, Enum):
    BENEFIT = "Benefit"
    COST = "Cost"


class ZeroColumnError(ResplanError):
    """A criterion column is identically zero and cannot be normalized."""


@dataclass(frozen=True)
class CriterionSpec:
    name: str
    weight: float
    kind: Kind = Kind.BENEFIT

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError(f"criterion {self.name!r}: weight must be >= 0")


# Default criteria for the canonical action catalog. Both are treated as
# Benefit: the positive ideal takes the maximum of Resource Engagement as
# well, which is what the reference ranking does.
DEFAULT_CRITERIA = (
    CriterionSpec("Impact", 0.7, Kind.BENEFIT),
    CriterionSpec("Resource Engagement", 0.3, Kind.BENEFIT),
)


@dataclass(frozen=True)
class DecisionMatrix:
    """m alternatives x n criteria of nonnegative performance scores."""

    alternatives: tuple[str, ...]
    criteria: tuple[CriterionSpec, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        m, n = len(self.alternatives), len(self.criteria)
        if m < 1 or n < 1:
            raise ValueError("decision matrix needs at least one row and one column")
        if values.shape != (m, n):
            raise DimensionMismatchError(
                f"values shape {values.shape} does not match {m} alternatives x {n} criteria"
            )
        if np.any(values < 0):
            raise ValueError("decision matrix values must be nonnegative")
        if sum(c.weight for c in self.criteria) <= 0:
            raise ValueError("criterion weights must sum to a positive value")


@dataclass(frozen=True)
class TopsisResult:
    alternatives: tuple[str, ...]
    normalized: np.ndarray
    weighted: np.ndarray
    a_plus: np.ndarray
    a_minus: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    closeness: np.ndarray
    ranks: tuple[int, ...]


def normalize(matrix: DecisionMatrix) -> np.ndarray:
    """Vector-normalize each column: r_ij = x_ij / sqrt(sum_k x_kj^2)."""
    norms = np.sqrt(np.sum(matrix.values**2, axis=0))
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        names = ", ".join(matrix.criteria[j].name for j in zero)
        raise ZeroColumnError(f"criterion column(s) all zero: {names}")
    return matrix.values / norms


def _normalized_weights(criteria: Sequence[CriterionSpec]) -> np.ndarray:
    weights = np.array([c.weight for c in criteria], dtype=float)
    return weights / weights.sum()


def apply_weights(normalized: np.ndarray, criteria: Sequence[CriterionSpec]) -> np.ndarray:
    """Scale each normalized column by its criterion weight.

    Weights are renormalized to sum to 1 on the way in, so callers may pass
    any positive weighting.
    """
    if normalized.shape[1] != len(criteria):
        raise DimensionMismatchError(
            f"{normalized.shape[1]} columns vs {len(criteria)} criteria"
        )
    return normalized * _normalized_weights(criteria)


def ideal_solutions(
    weighted: np.ndarray, criteria: Sequence[CriterionSpec]
) -> tuple[np.ndarray, np.ndarray]:
    """Per-column best (A+) and worst (A-) values.

    Benefit columns contribute their maximum to A+ and minimum to A-;
    Cost columns the other way around.
    """
    if weighted.shape[1] != len(criteria):
        raise DimensionMismatchError(
            f"{weighted.shape[1]} columns vs {len(criteria)} criteria"
        )
    col_max = weighted.max(axis=0)
    col_min = weighted.min(axis=0)
    benefit = np.array([c.kind is Kind.BENEFIT for c in criteria])
    a_plus = np.where(benefit, col_max, col_min)
    a_minus = np.where(benefit, col_min, col_max)
    return a_plus, a_minus


def separations(
    weighted: np.ndarray, a_plus: np.ndarray, a_minus: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Euclidean distance of every row from A+ and from A-."""
    if weighted.shape[1] != a_plus.shape[0] or weighted.shape[1] != a_minus.shape[0]:
        raise DimensionMismatchError("ideal vectors do not match matrix width")
    s_plus = np.sqrt(np.sum((weighted - a_plus) ** 2, axis=1))
    s_minus = np.sqrt(np.sum((weighted - a_minus) ** 2, axis=1))
    return s_plus, s_minus


def closeness(
    s_plus: np.ndarray, s_minus: np.ndarray
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Relative closeness C* = S- / (S+ + S-) and 1-based ranks.

    A degenerate row with S+ = S- = 0 (all alternatives identical) gets
    C* = 1 rather than NaN. Ranks are descending by C*; ties break toward
    the lower row index.
    """
    if s_plus.shape != s_minus.shape:
        raise DimensionMismatchError("separation vectors differ in length")
    total = s_plus + s_minus
    c = np.ones_like(total)
    nonzero = total > 0
    c[nonzero] = s_minus[nonzero] / total[nonzero]
    order = sorted(range(len(c)), key=lambda i: (-c[i], i))
    ranks = [0] * len(c)
    for position, row in enumerate(order, start=1):
        ranks[row] = position
    return c, tuple(ranks)


def solve(matrix: DecisionMatrix) -> TopsisResult:
    """Run all six steps and collect every intermediate."""
    r = normalize(matrix)
    v = apply_weights(r, matrix.criteria)
    a_plus, a_minus = ideal_solutions(v, matrix.criteria)
    s_plus, s_minus = separations(v, a_plus, a_minus)
    c, ranks = closeness(s_plus, s_minus)
    return TopsisResult(
        alternatives=matrix.alternatives,
        normalized=r,
        weighted=v,
        a_plus=a_plus,
        a_minus=a_minus,
        s_plus=s_plus,
        s_minus=s_minus,
        closeness=c,
        ranks=ranks,
    )


@dataclass(frozen=True)
class WeightTable:
    """Ordered per-action weights in [0, 1], keyed by action label."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        for label, weight in self.entries:
            if not 0.0 <= weight <= 1.0:
                raise ValueError(f"weight for {label!r} must lie in [0, 1]")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.entries)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(weight for _, weight in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def as_mapping(self) -> dict[str, float]:
        return dict(self.entries)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float]) -> "WeightTable":
        return cls(tuple((str(k), float(v)) for k, v in mapping.items()))

    @classmethod
    def load_json(cls, path: str | Path) -> "WeightTable":
        return cls.from_mapping(json.loads(Path(path).read_text(encoding="utf-8")))

    def dump_json(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.as_mapping(), indent=2) + "\n", encoding="utf-8"
        )

    def to_csv(self) -> str:
        """CSV mirror (label,weight) for spreadsheets."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["label", "weight"])
        for label, weight in self.entries:
            writer.writerow([label, f"{weight:.6f}"])
        return buf.getvalue()


def derive_action_weights(matrix: DecisionMatrix) -> WeightTable:
    """Full pipeline: the closeness of each alternative becomes its weight."""
    result = solve(matrix)
    return WeightTable(tuple(zip(matrix.alternatives, result.closeness.tolist())))


def catalog_matrix(
    catalog: Iterable[CatalogAction],
    criteria: Sequence[CriterionSpec] = DEFAULT_CRITERIA,
) -> DecisionMatrix:
    """Decision matrix over the action catalog (Impact, Resource Engagement)."""
    actions = sorted(catalog, key=lambda a: a.index)
    return DecisionMatrix(
        alternatives=tuple(a.name for a in actions),
        criteria=tuple(criteria),
        values=np.array([[a.impact, a.resource_engagement] for a in actions]),
    )


def load_decision_matrix(path: str | Path) -> DecisionMatrix:
    """Read {criteria: [...], alternatives: [{label, values}]} JSON."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    criteria = tuple(
        CriterionSpec(c["name"], float(c["weight"]), Kind(c.get("kind", "Benefit")))
        for c in raw["criteria"]
    )
    alternatives = tuple(str(a["label"]) for a in raw["alternatives"])
    values = np.array([[float(v) for v in a["values"]] for a in raw["alternatives"]])
    return DecisionMatrix(alternatives=alternatives, criteria=criteria, values=values)
