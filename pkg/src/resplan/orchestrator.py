"""End-to-end orchestration: incident -> generations -> fusion -> score.

The PlanningEngine is the one shared core behind both the HTTP service and
the CLI; neither front end carries any plan logic of its own. Jobs persist
as JSON files under the configured data directory so every run stays
diffable and auditable.
"""

from __future__ import annotations

import csv
import io
import json
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .accidents import IncidentRecord, parse_accidents_csv, render_incident_report
from .actions import CatalogAction, canonical_catalog, load_catalog
from .backends import (
    GenerationBackend,
    backend_from_config,
    call_with_retries,
    resolve_retries,
)
from .config import WEIGHT_SOURCE_FILE, AppConfig, data_path, packaged_data_dir
from .errors import LengthMismatchError, ResplanError
from .fusion import fuse
from .plans import (
    BinaryPlan,
    PlanNotFoundError,
    compare_to_manual,
    extract_binary_plan,
    load_score_table_csv,
    score_breakdown,
    score_plan,
)
from .synthesis import GuidelineTable, synthesize_guidelines
from .topsis import (
    DecisionMatrix,
    WeightTable,
    catalog_matrix,
    derive_action_weights,
    solve,
)


class UnknownIncidentError(ResplanError):
    pass


class UnknownBackendError(ResplanError):
    pass


class FixtureMissingError(ResplanError):
    pass


class ExtractionExhaustedError(ResplanError):
    """One generation never produced a usable vector within the budget."""

    def __init__(self, generation: int, last_error: Exception):
        self.generation = generation
        super().__init__(
            f"generation {generation} exhausted its reprompt budget: {last_error}"
        )


class JobStatus(str, Enum):
    PENDING = "Pending"
    RUNNING = "Running"
    DONE = "Done"
    FAILED = "Failed"


@dataclass(frozen=True)
class Attempt:
    kind: str  # "initial" | "reprompt"
    response: str


@dataclass(frozen=True)
class GenerationRecord:
    source: str
    bits: tuple[int, ...]
    score: float
    raw_text: str
    reprompts: int
    attempts: tuple[Attempt, ...]


@dataclass(frozen=True)
class PlanJobResult:
    generations: tuple[GenerationRecord, ...]
    fused_bits: tuple[int, ...]
    fused_source: str
    score: float

    def audit_texts(self) -> list[str]:
        """Every raw response, in order: m finals plus one per reprompt."""
        return [a.response for g in self.generations for a in g.attempts]


@dataclass
class PlanJob:
    job_id: str
    incident_id: str
    guidelines_ref: str
    backend_id: str
    m: int
    retry_budget: int
    status: JobStatus = JobStatus.PENDING
    result: PlanJobResult | None = None
    error: str | None = None
    created_at: str = ""

    def to_dict(self) -> dict:
        payload = {
            "job_id": self.job_id,
            "incident_id": self.incident_id,
            "guidelines_ref": self.guidelines_ref,
            "backend_id": self.backend_id,
            "m": self.m,
            "retry_budget": self.retry_budget,
            "status": self.status.value,
            "error": self.error,
            "created_at": self.created_at,
            "result": None,
        }
        if self.result is not None:
            payload["result"] = {
                "fused_bits": list(self.result.fused_bits),
                "fused_source": self.result.fused_source,
                "score": self.result.score,
                "generations": [
                    {
                        "source": g.source,
                        "bits": list(g.bits),
                        "score": g.score,
                        "raw_text": g.raw_text,
                        "reprompts": g.reprompts,
                        "attempts": [
                            {"kind": a.kind, "response": a.response} for a in g.attempts
                        ],
                    }
                    for g in self.result.generations
                ],
            }
        return payload

    @classmethod
    def from_dict(cls, payload: Mapping) -> "PlanJob":
        result = None
        if payload.get("result"):
            raw = payload["result"]
            result = PlanJobResult(
                generations=tuple(
                    GenerationRecord(
                        source=g["source"],
                        bits=tuple(g["bits"]),
                        score=float(g["score"]),
                        raw_text=g["raw_text"],
                        reprompts=int(g["reprompts"]),
                        attempts=tuple(
                            Attempt(a["kind"], a["response"]) for a in g["attempts"]
                        ),
                    )
                    for g in raw["generations"]
                ),
                fused_bits=tuple(raw["fused_bits"]),
                fused_source=raw["fused_source"],
                score=float(raw["score"]),
            )
        return cls(
            job_id=payload["job_id"],
            incident_id=payload["incident_id"],
            guidelines_ref=payload["guidelines_ref"],
            backend_id=payload["backend_id"],
            m=int(payload["m"]),
            retry_budget=int(payload["retry_budget"]),
            status=JobStatus(payload["status"]),
            result=result,
            error=payload.get("error"),
            created_at=payload.get("created_at", ""),
        )


class PlanningEngine:
    """Shared core for the service and the CLI.

    Safe to share across request handlers: catalog, weights, and guidelines
    are immutable after construction, backends enforce their own in-flight
    limits, and every job writes only its own file.
    """

    def __init__(self, config: AppConfig | None = None):
        self.config = config or AppConfig()
        self.catalog: tuple[CatalogAction, ...] = (
            load_catalog(self.config.catalog_path)
            if self.config.catalog_path
            else canonical_catalog()
        )
        self.criteria = self.config.criteria
        self.weights = self._resolve_weights()
        self.backends: dict[str, GenerationBackend] = {}
        for spec in self.config.backends:
            backend = backend_from_config(spec)
            self.backends[backend.id] = backend
        guidelines_path = self.config.guidelines_path or data_path("guideline_table.json")
        self.guidelines = GuidelineTable.load(guidelines_path)
        self.guidelines_ref = str(guidelines_path)
        self._incidents: dict[str, IncidentRecord] | None = None

    def _resolve_weights(self) -> WeightTable:
        if self.config.weight_source == WEIGHT_SOURCE_FILE:
            table = WeightTable.load_json(self.config.weights_file)
            by_label = table.as_mapping()
            missing = [a.name for a in self.catalog if a.name not in by_label]
            if missing:
                raise ValueError(f"weight file missing actions: {missing}")
            return WeightTable(
                tuple((a.name, by_label[a.name]) for a in self.catalog)
            )
        return derive_action_weights(catalog_matrix(self.catalog, self.criteria))

    # --- lookups ----------------------------------------------------------

    def backend(self, backend_id: str | None = None) -> GenerationBackend:
        backend_id = backend_id or self.config.default_backend
        try:
            return self.backends[backend_id]
        except KeyError:
            raise UnknownBackendError(f"no backend configured with id {backend_id!r}")

    def incidents(self) -> dict[str, IncidentRecord]:
        if self._incidents is None:
            path = self.config.accidents_path or data_path("accidents.csv")
            self._incidents = parse_accidents_csv(path).by_id()
        return self._incidents

    def incident(self, incident_id: str) -> IncidentRecord:
        record = self.incidents().get(incident_id)
        if record is None:
            raise UnknownIncidentError(f"unknown incident id {incident_id!r}")
        return record

    # --- scoring and fusion ------------------------------------------------

    def actions_with_weights(self) -> list[dict]:
        weights = self.weights.as_mapping()
        return [
            {
                "index": a.index,
                "name": a.name,
                "impact": a.impact,
                "resource_engagement": a.resource_engagement,
                "weight": weights[a.name],
            }
            for a in self.catalog
        ]

    def score_bits(self, bits: Sequence[int]) -> dict:
        plan = BinaryPlan(bits=tuple(int(b) for b in bits), source="request")
        return {
            "score": score_plan(plan, self.weights),
            "per_action": score_breakdown(plan, self.weights),
        }

    def fuse_bits(self, bit_lists: Sequence[Sequence[int]]) -> dict:
        plans = [
            BinaryPlan(bits=tuple(int(b) for b in bits), source=f"input#{i}")
            for i, bits in enumerate(bit_lists)
        ]
        fused = fuse(plans)
        # scoring needs catalog-length plans; shorter vectors fuse fine but
        # carry no score
        score = (
            score_plan(fused, self.weights)
            if len(fused.bits) == len(self.weights)
            else None
        )
        return {"bits": list(fused.bits), "source": fused.source, "score": score}

    def topsis_weights(self, matrix: DecisionMatrix) -> WeightTable:
        return derive_action_weights(matrix)

    # --- pipeline ----------------------------------------------------------

    def synthesize(self, document: str, backend_id: str | None = None) -> GuidelineTable:
        backend = self.backend(backend_id)
        return synthesize_guidelines(
            document,
            backend,
            chunk_limit=self.config.chunk_limit,
            retries=resolve_retries(backend, self.config.retry_budget),
            prompts=self.config.prompts,
        )

    def jobs_dir(self) -> Path:
        path = Path(self.config.data_dir) / "jobs"
        path.mkdir(parents=True, exist_ok=True)
        return path

    def save_job(self, job: PlanJob) -> Path:
        path = self.jobs_dir() / f"{job.job_id}.json"
        path.write_text(json.dumps(job.to_dict(), indent=2) + "\n", encoding="utf-8")
        return path

    def load_job(self, job_id: str) -> PlanJob:
        path = self.jobs_dir() / f"{job_id}.json"
        if not path.exists():
            raise UnknownIncidentError(f"no job with id {job_id!r}")
        return PlanJob.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def generate_plan(
        self,
        incident: str | IncidentRecord,
        m: int | None = None,
        backend_id: str | None = None,
        guidelines: GuidelineTable | None = None,
        save: bool = True,
    ) -> PlanJob:
        """Run m generations, extract (reprompting up to R times each), fuse,
        and score. The finished job carries every raw response for audit.

        Raises BackendFailure or ExtractionExhaustedError after persisting
        the job in its Failed state; the exception carries the job.
        """
        record = self.incident(incident) if isinstance(incident, str) else incident
        table = guidelines or self.guidelines
        backend = self.backend(backend_id)
        m = m if m is not None else self.config.fusion_m
        if m < 1:
            raise ValueError("generation count m must be >= 1")
        budget = resolve_retries(backend, self.config.retry_budget)
        n = len(self.catalog)
        job = PlanJob(
            job_id=uuid.uuid4().hex[:12],
            incident_id=record.id,
            guidelines_ref=self.guidelines_ref if guidelines is None else "inline",
            backend_id=backend.id,
            m=m,
            retry_budget=budget,
            status=JobStatus.RUNNING,
            created_at=datetime.now(timezone.utc).isoformat(),
        )
        report = render_incident_report(record)
        table_md = table.to_markdown()
        prompt = self.config.prompts["plan"].format(
            incident_report=report, guideline_table=table_md, n_actions=n
        )
        try:
            generations = []
            for g in range(m):
                response = call_with_retries(backend, prompt, budget)
                attempts = [Attempt("initial", response)]
                plan: BinaryPlan | None = None
                failure: Exception | None = None
                source = f"{backend.id}#{g + 1}"
                try:
                    plan = extract_binary_plan(response, n, source=source)
                except (LengthMismatchError, PlanNotFoundError) as err:
                    failure = err
                reprompts = 0
                while plan is None:
                    if reprompts >= budget:
                        raise ExtractionExhaustedError(g, failure)
                    reprompt = self.config.prompts["plan_reprompt"].format(
                        failure=failure,
                        n_actions=n,
                        incident_report=report,
                        guideline_table=table_md,
                    )
                    response = call_with_retries(backend, reprompt, budget)
                    reprompts += 1
                    attempts.append(Attempt("reprompt", response))
                    try:
                        plan = extract_binary_plan(response, n, source=source)
                    except (LengthMismatchError, PlanNotFoundError) as err:
                        failure = err
                generations.append(
                    GenerationRecord(
                        source=plan.source,
                        bits=plan.bits,
                        score=score_plan(plan, self.weights),
                        raw_text=response,
                        reprompts=reprompts,
                        attempts=tuple(attempts),
                    )
                )
            fused = fuse(
                [BinaryPlan(bits=g.bits, source=g.source) for g in generations]
            )
            job.result = PlanJobResult(
                generations=tuple(generations),
                fused_bits=fused.bits,
                fused_source=fused.source,
                score=score_plan(fused, self.weights),
            )
            job.status = JobStatus.DONE
        except ResplanError as err:
            job.status = JobStatus.FAILED
            job.error = str(err)
            if save:
                self.save_job(job)
            err.job = job  # expose the failed job to API handlers
            raise
        if save:
            self.save_job(job)
        return job

    def compare_scores(
        self,
        per_incident: Mapping[str, Mapping[str, float]],
        manual_label: str = "Manual solution",
    ):
        return compare_to_manual(per_incident, manual_label)


# --- fixture table reproduction --------------------------------------------


@dataclass(frozen=True)
class TableCheck:
    name: str
    csv_text: str
    passed: bool
    failures: tuple[str, ...] = ()


@dataclass(frozen=True)
class ReportBundle:
    checks: tuple[TableCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def write(self, out_dir: str | Path) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for check in self.checks:
            path = out / f"{check.name}.csv"
            path.write_text(check.csv_text, encoding="utf-8")
            paths.append(path)
        return paths


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def reproduce_tables(data_dir: str | Path | None = None) -> ReportBundle:
    """Recompute every reference table and annotate each row pass/fail.

    Emits the normalized matrix, weighted matrix, ideal solutions, closeness
    scores with ranks, plan-score spot checks, and the average-difference
    table, each checked against the expected fixture at its tolerance.
    """
    base = Path(data_dir) if data_dir is not None else packaged_data_dir()
    expected_path = base / "expected_tables.json"
    scores_path = base / "model_scores.csv"
    if not expected_path.exists() or not scores_path.exists():
        raise FixtureMissingError(
            f"expected fixtures not found under {base} "
            "(need expected_tables.json and model_scores.csv)"
        )
    expected = json.loads(expected_path.read_text(encoding="utf-8"))
    tol = expected["tolerances"]

    catalog = canonical_catalog()
    matrix = catalog_matrix(catalog)
    result = solve(matrix)
    labels = matrix.alternatives
    checks: list[TableCheck] = []

    def matrix_check(name: str, computed: np.ndarray, key: str, tolerance: float):
        rows, failures = [], []
        for i, label in enumerate(labels):
            exp = expected[key][label]
            ok = all(abs(computed[i, j] - exp[j]) <= tolerance for j in range(len(exp)))
            if not ok:
                failures.append(label)
            rows.append(
                [label]
                + [f"{computed[i, j]:.6f}" for j in range(computed.shape[1])]
                + [f"{v}" for v in exp]
                + ["pass" if ok else "fail"]
            )
        header = (
            ["action"]
            + [c.name for c in matrix.criteria]
            + [f"expected {c.name}" for c in matrix.criteria]
            + ["status"]
        )
        checks.append(TableCheck(name, _csv_text(header, rows), not failures, tuple(failures)))

    matrix_check("normalized_matrix", result.normalized, "normalized", tol["normalized"])
    matrix_check("weighted_matrix", result.weighted, "weighted", tol["weighted"])

    ideal_rows, ideal_failures = [], []
    for label, vector in (("A+", result.a_plus), ("A-", result.a_minus)):
        exp = expected["ideal"][label]
        ok = all(abs(vector[j] - exp[j]) <= tol["ideal"] for j in range(len(exp)))
        if not ok:
            ideal_failures.append(label)
        ideal_rows.append(
            [label]
            + [f"{v:.6f}" for v in vector]
            + [f"{v}" for v in exp]
            + ["pass" if ok else "fail"]
        )
    checks.append(
        TableCheck(
            "ideal_solutions",
            _csv_text(
                ["optimum"]
                + [c.name for c in matrix.criteria]
                + [f"expected {c.name}" for c in matrix.criteria]
                + ["status"],
                ideal_rows,
            ),
            not ideal_failures,
            tuple(ideal_failures),
        )
    )

    close_rows, close_failures = [], []
    for i, label in enumerate(labels):
        exp_value, exp_rank = expected["closeness"][label]
        ok = (
            abs(result.closeness[i] - exp_value) <= tol["closeness"]
            and result.ranks[i] == exp_rank
        )
        if not ok:
            close_failures.append(label)
        close_rows.append(
            [
                label,
                f"{result.closeness[i]:.6f}",
                f"{exp_value:.6f}",
                result.ranks[i],
                exp_rank,
                "pass" if ok else "fail",
            ]
        )
    checks.append(
        TableCheck(
            "topsis_scores",
            _csv_text(
                ["action", "closeness", "expected", "rank", "expected rank", "status"],
                close_rows,
            ),
            not close_failures,
            tuple(close_failures),
        )
    )

    weights = WeightTable(tuple(zip(labels, result.closeness.tolist())))
    plan_rows, plan_failures = [], []
    for check in expected["plan_checks"]:
        plan = BinaryPlan(bits=tuple(check["bits"]), source="fixture")
        score = score_plan(plan, weights)
        ok = abs(score - check["expected"]) <= check["tolerance"]
        if not ok:
            plan_failures.append(check["label"])
        plan_rows.append(
            [
                check["label"],
                "".join(str(b) for b in check["bits"]),
                f"{score:.6f}",
                check["expected"],
                check["tolerance"],
                "pass" if ok else "fail",
            ]
        )
    checks.append(
        TableCheck(
            "plan_scores",
            _csv_text(
                ["plan", "bits", "computed", "expected", "tolerance", "status"],
                plan_rows,
            ),
            not plan_failures,
            tuple(plan_failures),
        )
    )

    report = compare_to_manual(load_score_table_csv(scores_path))
    avg_rows, avg_failures = [], []
    for model, value in report.average_difference:
        exp_value = expected["average_difference"].get(model)
        ok = exp_value is not None and abs(value - exp_value) <= tol["average_difference"]
        if not ok:
            avg_failures.append(model)
        avg_rows.append(
            [model, f"{value:.4f}", exp_value, "pass" if ok else "fail"]
        )
    checks.append(
        TableCheck(
            "average_difference",
            _csv_text(["model", "computed", "expected", "status"], avg_rows),
            not avg_failures,
            tuple(avg_failures),
        )
    )
    return ReportBundle(checks=tuple(checks))
