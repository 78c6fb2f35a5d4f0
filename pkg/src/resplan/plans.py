"""Binary response plans: extraction from model text, scoring, comparison.

A response plan is a fixed-length 0/1 vector over the action catalog. Model
responses rarely arrive as a clean vector: observed failure modes include
wrong-length arrays, answers wrapped in Markdown or LaTeX markup, code that
would *print* the array instead of the array itself, and reasoning prose
interleaved with the answer. The extractor here tolerates the markup cases,
never executes code, and treats the last length-matching vector in the text
as the answer (reasoning tends to precede the final vector).
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .errors import DimensionMismatchError, LengthMismatchError, ResplanError
from .topsis import WeightTable


class PlanNotFoundError(ResplanError):
    """The text contains no literal 0/1 vector at all."""


class MissingManualError(ResplanError):
    """A score row lacks the manual reference value."""


@dataclass(frozen=True)
class BinaryPlan:
    """Fixed-length 0/1 action vector with provenance."""

    bits: tuple[int, ...]
    source: str
    raw_text: str | None = None

    def __post_init__(self):
        if not self.bits:
            raise ValueError("plan must have at least one bit")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("plan bits must be 0 or 1")

    def __len__(self) -> int:
        return len(self.bits)


def render_plan(bits: Sequence[int]) -> str:
    """Canonical text form: "[1, 0, 1, ...]". Extraction inverts this."""
    return "[" + ", ".join(str(int(b)) for b in bits) + "]"


# Markup stripped before scanning. Order matters: LaTeX environments and the
# row separator go first so that the generic \command pattern does not eat
# half of them; fence markers are removed but fenced content is kept.
_STRIP_PATTERNS = (
    re.compile(r"```[^\n`]*"),          # opening fence with info string, closing fence
    re.compile(r"`"),                   # inline code markers
    re.compile(r"[*_]{1,3}(?=\S)|(?<=\S)[*_]{1,3}"),  # bold/italic markers
    re.compile(r"\\begin\{[a-zA-Z*]+\}"),
    re.compile(r"\\end\{[a-zA-Z*]+\}"),
    re.compile(r"\\\\"),                # LaTeX row separator
    re.compile(r"\\[\[\]()]"),          # display/inline math delimiters
    re.compile(r"\\[a-zA-Z]+"),         # remaining LaTeX commands
    re.compile(r"[${}&]"),              # math dollars, braces, alignment tabs
)

# A bracketed group: only 0/1 digits separated by commas and/or whitespace
# between one pair of brackets. Braces are handled by the markup strip above,
# so brackets and parentheses remain.
_GROUP = re.compile(r"[\[(]\s*([01](?:\s*[,\s]\s*[01])*)\s*[\])]")

# An opening bracket glued to an identifier, a dot, or a closing bracket is
# call syntax or indexing (randint(0, 1), bits[0]), not a literal vector.
_CALL_CONTEXT = frozenset("._)]")

# An unbracketed run: at least two standalone 0/1 tokens in a row. Single
# bare digits in prose ("reduce to 0") never count as a vector.
_RUN = re.compile(r"(?<![\w.])[01](?:[ \t]*[,\s][ \t\r\n]*[01])+(?![\w.])")

_DIGITS = re.compile(r"[01]")


def _strip_markup(text: str) -> str:
    for pattern in _STRIP_PATTERNS:
        text = pattern.sub(" ", text)
    return text


def _candidates(text: str) -> list[tuple[int, tuple[int, ...]]]:
    """All 0/1 vectors in the text as (position, bits), in reading order.

    Every bracket-shaped 0/1 group is masked off before the run scan so call
    arguments are neither counted as vectors nor re-found as bare runs.
    """
    cleaned = _strip_markup(text)
    found: list[tuple[int, tuple[int, ...]]] = []
    masked = list(cleaned)
    for match in _GROUP.finditer(cleaned):
        start = match.start()
        for i in range(start, match.end()):
            masked[i] = " "
        preceding = cleaned[start - 1] if start else ""
        if preceding and (preceding.isalnum() or preceding in _CALL_CONTEXT):
            continue
        bits = tuple(int(d) for d in _DIGITS.findall(match.group(1)))
        found.append((start, bits))
    remainder = "".join(masked)
    for match in _RUN.finditer(remainder):
        bits = tuple(int(d) for d in _DIGITS.findall(match.group(0)))
        found.append((match.start(), bits))
    found.sort(key=lambda item: item[0])
    return found


def extract_binary_plan(text: str, n: int, source: str = "unknown") -> BinaryPlan:
    """Pull the final length-n 0/1 vector out of free-form response text.

    Markdown fences, inline code, bold markers, and LaTeX wrapping are
    stripped first; the remaining text is scanned for literal 0/1 vectors,
    bracketed or separated by commas/whitespace. The LAST vector of length n
    wins. Code in the response is never executed.

    Raises LengthMismatchError (carrying every length that was seen) when
    vectors exist but none has length n, and PlanNotFoundError when there is
    no literal vector at all. Both signal the caller to reprompt.
    """
    if n < 1:
        raise ValueError("expected length must be >= 1")
    found = _candidates(text)
    if not found:
        raise PlanNotFoundError("no binary action vector in response")
    matching = [bits for _, bits in found if len(bits) == n]
    if not matching:
        lengths: list[int] = []
        for _, bits in found:
            if len(bits) not in lengths:
                lengths.append(len(bits))
        raise LengthMismatchError(lengths, expected=n)
    return BinaryPlan(bits=matching[-1], source=source, raw_text=text)


def score_plan(plan: BinaryPlan, weights: WeightTable) -> float:
    """Weighted sum of the included actions: sum_i w_i * a_i."""
    if len(plan.bits) != len(weights):
        raise DimensionMismatchError(
            f"plan has {len(plan.bits)} bits, weight table has {len(weights)} entries"
        )
    return float(sum(w * b for w, b in zip(weights.weights, plan.bits)))


def score_breakdown(plan: BinaryPlan, weights: WeightTable) -> list[dict]:
    """Per-action contribution rows for reports and the API."""
    if len(plan.bits) != len(weights):
        raise DimensionMismatchError(
            f"plan has {len(plan.bits)} bits, weight table has {len(weights)} entries"
        )
    return [
        {"index": i, "name": label, "weight": weight, "included": bool(bit)}
        for i, ((label, weight), bit) in enumerate(zip(weights.entries, plan.bits))
    ]


@dataclass(frozen=True)
class ScoreReport:
    """Per-incident scores plus each model's mean absolute gap to manual."""

    per_incident: tuple[tuple[str, tuple[tuple[str, float], ...]], ...]
    manual_label: str
    average_difference: tuple[tuple[str, float], ...]

    def incident_scores(self) -> dict[str, dict[str, float]]:
        return {inc: dict(scores) for inc, scores in self.per_incident}

    def averages(self) -> dict[str, float]:
        return dict(self.average_difference)

    def to_csv(self) -> str:
        """Rows = incidents, columns = models, final row = average difference.

        Scores are carried as floats internally; rounding to two decimals
        happens here, at presentation.
        """
        models = [model for model, _ in self.average_difference]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["incident"] + models)
        for incident, scores in self.per_incident:
            row = dict(scores)
            writer.writerow([incident] + [f"{row[m]:.2f}" for m in models])
        writer.writerow(
            ["Average Difference"] + [f"{d:.2f}" for _, d in self.average_difference]
        )
        return buf.getvalue()


def compare_to_manual(
    per_incident: Mapping[str, Mapping[str, float]],
    manual_label: str = "Manual solution",
) -> ScoreReport:
    """Average absolute score difference of every model vs the manual column.

    Input ordering (incidents and model columns) is preserved in the report.
    """
    if not per_incident:
        raise ValueError("score table must contain at least one incident")
    models: list[str] = []
    for incident, scores in per_incident.items():
        if manual_label not in scores:
            raise MissingManualError(
                f"incident {incident!r} has no {manual_label!r} score"
            )
        for model in scores:
            if model not in models:
                models.append(model)
    diffs = {model: 0.0 for model in models}
    for incident, scores in per_incident.items():
        manual = scores[manual_label]
        for model in models:
            if model not in scores:
                raise ValueError(f"incident {incident!r} missing score for {model!r}")
            diffs[model] += abs(scores[model] - manual)
    count = len(per_incident)
    averages = tuple((model, diffs[model] / count) for model in models)
    return ScoreReport(
        per_incident=tuple(
            (incident, tuple(scores.items())) for incident, scores in per_incident.items()
        ),
        manual_label=manual_label,
        average_difference=averages,
    )


def load_score_table_csv(path: str | Path) -> dict[str, dict[str, float]]:
    """Read a per-incident score table (first column = incident id)."""
    table: dict[str, dict[str, float]] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        models = header[1:]
        for row in reader:
            if not row or row[0] == "Average Difference":
                continue
            table[row[0]] = {m: float(v) for m, v in zip(models, row[1:])}
    return table


def plan_to_dict(plan: BinaryPlan, incident_id: str | None = None) -> dict:
    payload = {"source": plan.source, "bits": list(plan.bits)}
    if incident_id is not None:
        payload["incident_id"] = incident_id
    return payload


def load_plans_file(path: str | Path) -> list[BinaryPlan]:
    """Read plan files: one {incident_id?, source?, bits} object, a list of
    them, or (shorthand) a bare list of bit vectors."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(raw, dict):
        raw = [raw]

    def as_plan(entry, i):
        if isinstance(entry, dict):
            return BinaryPlan(
                bits=tuple(int(b) for b in entry["bits"]),
                source=str(entry.get("source", f"file#{i}")),
            )
        return BinaryPlan(bits=tuple(int(b) for b in entry), source=f"file#{i}")

    return [as_plan(entry, i) for i, entry in enumerate(raw)]
