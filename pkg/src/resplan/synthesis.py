"""Guideline synthesis: chunk-process-synthesize cycles over a backend.

The pipeline condenses a long guideline document into a structured
scenario-action table. It runs in stages: four modality extractions
(decision tables, keypoints, incident aspects, response actions), atomic
fact listing, scenario-action pairing, mass concatenation of everything
into one generation prompt, and a final generate-then-refine pass whose
output must parse against the guideline table schema.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping

from .backends import GenerationBackend, call_with_retries
from .chunking import DEFAULT_CHUNK_LIMIT, Chunk, chunk_text, count_tokens
from .errors import ResplanError
from .prompts import DEFAULT_PROMPTS

DEFAULT_RETRIES = 3
MODALITIES = ("decision_tables", "keypoints", "incident_aspects", "response_actions")

# Soft cap on capacity-driven condensation rounds; each round shrinks the
# material, so hitting the cap means the backend capacity is pathological.
_MAX_CONDENSE_ROUNDS = 5


class EmptyDocumentError(ResplanError):
    """The pipeline was handed an empty (or whitespace-only) document."""


class MalformedResultError(ResplanError):
    """A per-chunk response never parsed as a table within the retry budget."""


class SchemaViolationError(ResplanError):
    """The refined output does not conform to the guideline table schema."""


class ModalityPullError(ResplanError):
    """One or more modality extractions failed."""

    def __init__(self, failures: Mapping[str, Exception]):
        self.failures = dict(failures)
        detail = "; ".join(f"{name}: {err}" for name, err in failures.items())
        super().__init__(f"modality pull failed for {detail}")


class Severity(str, Enum):
    LOW = "Low"
    MODERATE = "Moderate"
    HIGH = "High"
    VERY_HIGH = "Very High"
    VARIABLE = "Variable"


_SEVERITIES = {s.value.lower(): s for s in Severity}

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class GuidelineRow:
    scenario_id: int
    incident_type: str
    severity: Severity
    location: str
    actions: tuple[str, ...]
    equipment: tuple[str, ...]

    def __post_init__(self):
        if not self.actions:
            raise SchemaViolationError(
                f"scenario {self.scenario_id}: actions must be non-empty"
            )


@dataclass(frozen=True)
class GuidelineTable:
    rows: tuple[GuidelineRow, ...]
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        ids = [row.scenario_id for row in self.rows]
        if len(ids) != len(set(ids)):
            raise SchemaViolationError("scenario ids must be unique")

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "rows": [
                {
                    "scenario_id": row.scenario_id,
                    "incident_type": row.incident_type,
                    "severity": row.severity.value,
                    "location": row.location,
                    "actions": list(row.actions),
                    "equipment": list(row.equipment),
                }
                for row in self.rows
            ],
        }

    @classmethod
    def from_dict(cls, payload: Mapping) -> "GuidelineTable":
        rows = tuple(
            GuidelineRow(
                scenario_id=int(r["scenario_id"]),
                incident_type=str(r["incident_type"]),
                severity=Severity(r["severity"]),
                location=str(r["location"]),
                actions=tuple(r["actions"]),
                equipment=tuple(r.get("equipment", ())),
            )
            for r in payload["rows"]
        )
        return cls(rows=rows, schema_version=int(payload.get("schema_version", 1)))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "GuidelineTable":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_markdown(self) -> str:
        """Pipe-table form, used verbatim inside plan-generation prompts."""
        header = (
            "| Scenario ID | Incident Type | Severity | Location | Action "
            "| Equipment/Technology Required |"
        )
        lines = [header, "| --- | --- | --- | --- | --- | --- |"]
        for row in self.rows:
            actions = "<br>".join(f"- {a}" for a in row.actions)
            equipment = "<br>".join(f"- {e}" for e in row.equipment)
            lines.append(
                f"| {row.scenario_id} | {row.incident_type} | {row.severity.value} "
                f"| {row.location} | {actions} | {equipment} |"
            )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ModalityBundle:
    """Structured text rows pulled per modality from the source document."""

    decision_tables: tuple[str, ...]
    keypoints: tuple[str, ...]
    incident_aspects: tuple[str, ...]
    response_actions: tuple[str, ...]


@dataclass(frozen=True)
class SCycleResult:
    chunk_results: tuple[str, ...]
    combined: str
    synthesis: str
    backend_calls: int


def _split_row(line: str) -> list[str]:
    cells = [c.strip() for c in line.split("|")]
    if cells and cells[0] == "":
        cells = cells[1:]
    if cells and cells[-1] == "":
        cells = cells[:-1]
    return cells


_SEPARATOR_CELL = re.compile(r"^:?-{2,}:?$")


def parse_pipe_table(text: str) -> tuple[list[str], list[list[str]]]:
    """First pipe table in the text as (header cells, data rows).

    Raises MalformedResultError when no table-shaped line exists.
    """
    header: list[str] | None = None
    rows: list[list[str]] = []
    for line in text.splitlines():
        if "|" not in line:
            if header is not None:
                break
            continue
        cells = _split_row(line)
        if len(cells) < 2:
            continue
        if all(_SEPARATOR_CELL.match(c) for c in cells):
            continue
        if header is None:
            header = cells
        else:
            rows.append(cells)
    if header is None:
        raise MalformedResultError("response contains no pipe table")
    return header, rows


def _data_row_texts(text: str) -> list[str]:
    _, rows = parse_pipe_table(text)
    return [" | ".join(cells) for cells in rows]


def _split_items(cell: str) -> tuple[str, ...]:
    parts = re.split(r"<br\s*/?>|\n", cell, flags=re.IGNORECASE)
    items = []
    for part in parts:
        item = part.strip()
        if item.startswith("-"):
            item = item[1:].strip()
        if item:
            items.append(item)
    return tuple(items)


_COLUMN_KEYS = {
    "scenario_id": ("scenario",),
    "incident_type": ("incident type",),
    "severity": ("severity",),
    "location": ("location",),
    "actions": ("action",),
    "equipment": ("equipment",),
}


def parse_guideline_table(text: str) -> GuidelineTable:
    """Parse model output into a schema-checked guideline table."""
    try:
        header, rows = parse_pipe_table(text)
    except MalformedResultError as err:
        raise SchemaViolationError(str(err)) from err
    lowered = [h.lower() for h in header]
    columns: dict[str, int] = {}
    for field, keys in _COLUMN_KEYS.items():
        for i, cell in enumerate(lowered):
            if any(key in cell for key in keys) and i not in columns.values():
                columns[field] = i
                break
        else:
            raise SchemaViolationError(f"missing column for {field!r}")
    parsed = []
    for cells in rows:
        if len(cells) < len(header):
            raise SchemaViolationError(f"row has {len(cells)} cells, expected {len(header)}")
        severity_text = cells[columns["severity"]].strip().lower()
        severity = _SEVERITIES.get(severity_text)
        if severity is None:
            raise SchemaViolationError(f"unknown severity {cells[columns['severity']]!r}")
        try:
            scenario_id = int(cells[columns["scenario_id"]])
        except ValueError as err:
            raise SchemaViolationError(
                f"scenario id {cells[columns['scenario_id']]!r} is not an integer"
            ) from err
        parsed.append(
            GuidelineRow(
                scenario_id=scenario_id,
                incident_type=cells[columns["incident_type"]],
                severity=severity,
                location=cells[columns["location"]],
                actions=_split_items(cells[columns["actions"]]),
                equipment=_split_items(cells[columns["equipment"]]),
            )
        )
    if not parsed:
        raise SchemaViolationError("table has no data rows")
    return GuidelineTable(rows=tuple(parsed))


def _tabular_call(
    backend: GenerationBackend,
    prompt: str,
    retries: int,
    prompts: Mapping[str, str],
) -> tuple[str, int]:
    """One logical backend call whose response must contain a pipe table.

    A malformed response triggers a targeted reformat reprompt, up to the
    retry budget; returns (response, successful call count).
    """
    calls = 0
    response = call_with_retries(backend, prompt, retries)
    calls += 1
    for _ in range(retries):
        try:
            parse_pipe_table(response)
            return response, calls
        except MalformedResultError:
            reprompt = prompts["table_reprompt"].format(response=response)
            response = call_with_retries(backend, reprompt, retries)
            calls += 1
    parse_pipe_table(response)  # raises MalformedResultError if still bad
    return response, calls


def run_s_cycle(
    doc: str,
    query: str,
    backend: GenerationBackend,
    *,
    synthesis_query: str | None = None,
    chunk_limit: int = DEFAULT_CHUNK_LIMIT,
    retries: int = DEFAULT_RETRIES,
    max_workers: int = 1,
    prompts: Mapping[str, str] | None = None,
) -> SCycleResult:
    """Apply a query to every chunk, then synthesize the combined results.

    Exactly len(chunks) + 1 logical backend calls on the happy path. Chunk
    queries may run concurrently (max_workers > 1) but results are always
    combined in chunk-index order. When the synthesis prompt would exceed
    the backend's capacity, the combined material is condensed by a further
    chunked pass before synthesis.
    """
    prompts = {**DEFAULT_PROMPTS, **(prompts or {})}
    chunks = chunk_text(doc, chunk_limit)
    if not chunks:
        raise EmptyDocumentError("document is empty")
    calls = 0

    def process(chunk: Chunk) -> tuple[str, int]:
        return _tabular_call(backend, f"{query}\n\n{chunk.text}", retries, prompts)

    if max_workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(process, chunks))
    else:
        outcomes = [process(chunk) for chunk in chunks]
    chunk_results = tuple(text for text, _ in outcomes)
    calls += sum(n for _, n in outcomes)

    template = synthesis_query or prompts["synthesis"]
    combined = "\n\n".join(chunk_results)
    for _ in range(_MAX_CONDENSE_ROUNDS):
        prompt = template.format(material=combined)
        if count_tokens(prompt) <= backend.max_prompt_tokens:
            break
        parts = []
        for part in chunk_text(combined, chunk_limit):
            text, n = _tabular_call(
                backend, template.format(material=part.text), retries, prompts
            )
            parts.append(text)
            calls += n
        combined = "\n\n".join(parts)
    else:
        raise MalformedResultError(
            "synthesis prompt still exceeds backend capacity after condensation"
        )
    final, n = _tabular_call(backend, prompt, retries, prompts)
    calls += n
    return SCycleResult(
        chunk_results=chunk_results,
        combined=combined,
        synthesis=final,
        backend_calls=calls,
    )


def modality_pull(
    doc: str,
    backend: GenerationBackend,
    *,
    chunk_limit: int = DEFAULT_CHUNK_LIMIT,
    retries: int = DEFAULT_RETRIES,
    max_workers: int = 1,
    prompts: Mapping[str, str] | None = None,
) -> ModalityBundle:
    """Project the document into the four modalities via dedicated cycles.

    All four must succeed; otherwise the aggregate error names every failed
    modality.
    """
    if not doc or not doc.strip():
        raise EmptyDocumentError("document is empty")
    prompts = {**DEFAULT_PROMPTS, **(prompts or {})}
    collections: dict[str, tuple[str, ...]] = {}
    failures: dict[str, Exception] = {}
    for name in MODALITIES:
        try:
            cycle = run_s_cycle(
                doc,
                prompts[name],
                backend,
                chunk_limit=chunk_limit,
                retries=retries,
                max_workers=max_workers,
                prompts=prompts,
            )
            collections[name] = tuple(_data_row_texts(cycle.synthesis))
        except ResplanError as err:
            failures[name] = err
    if failures:
        raise ModalityPullError(failures)
    return ModalityBundle(**collections)


_SECTION_TITLES = {
    "decision_tables": "Decision tables",
    "keypoints": "Keypoints and highlights",
    "incident_aspects": "Incident aspects",
    "response_actions": "Response actions",
}


def synthesize_guidelines(
    doc: str,
    backend: GenerationBackend,
    *,
    chunk_limit: int = DEFAULT_CHUNK_LIMIT,
    retries: int = DEFAULT_RETRIES,
    max_workers: int = 1,
    prompts: Mapping[str, str] | None = None,
) -> GuidelineTable:
    """Full dataflow: modalities + fact extraction -> generate -> refine.

    The mass-concatenated material feeds one table-generation prompt; the
    result is refined once, then parsed. Refinement reprompts carry the
    schema complaint until the budget runs out (SchemaViolationError).
    """
    if not doc or not doc.strip():
        raise EmptyDocumentError("document is empty")
    prompts = {**DEFAULT_PROMPTS, **(prompts or {})}
    bundle = modality_pull(
        doc,
        backend,
        chunk_limit=chunk_limit,
        retries=retries,
        max_workers=max_workers,
        prompts=prompts,
    )
    atomic = run_s_cycle(
        doc, prompts["atomic_facts"], backend,
        chunk_limit=chunk_limit, retries=retries,
        max_workers=max_workers, prompts=prompts,
    )
    cojoint = run_s_cycle(
        doc, prompts["cojoint_pairs"], backend,
        chunk_limit=chunk_limit, retries=retries,
        max_workers=max_workers, prompts=prompts,
    )

    sections = []
    for name in MODALITIES:
        rows = getattr(bundle, name)
        sections.append(f"## {_SECTION_TITLES[name]}\n" + "\n".join(rows))
    sections.append("## Extracted facts\n" + atomic.synthesis)
    sections.append("## Scenario-action pairs\n" + cojoint.synthesis)
    material = "\n\n".join(sections)

    template = prompts["table_generation"]
    for _ in range(_MAX_CONDENSE_ROUNDS):
        gen_prompt = template.format(material=material)
        if count_tokens(gen_prompt) <= backend.max_prompt_tokens:
            break
        condensed = run_s_cycle(
            material, prompts["synthesis"].format(material=""),
            backend, chunk_limit=chunk_limit, retries=retries,
            max_workers=max_workers, prompts=prompts,
        )
        material = condensed.synthesis
    else:
        raise MalformedResultError(
            "generation prompt still exceeds backend capacity after condensation"
        )

    candidate = call_with_retries(backend, gen_prompt, retries)
    refined = call_with_retries(
        backend, prompts["refine"].format(table=candidate), retries
    )
    last_error: SchemaViolationError | None = None
    for attempt in range(retries + 1):
        try:
            return parse_guideline_table(refined)
        except SchemaViolationError as err:
            last_error = err
            if attempt == retries:
                break
            refined = call_with_retries(
                backend,
                prompts["refine_reprompt"].format(table=refined, failure=err),
                retries,
            )
    raise last_error if last_error else SchemaViolationError("unparseable output")
