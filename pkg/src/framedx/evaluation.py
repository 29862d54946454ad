"""Validation statistics for diagnostic output.

Covers deviation of observed chances from an acceptance level, contingency
tables over age bands, Pearson homogeneity against expected frequencies,
and per-patient set-overlap metrics (recall / precision / harmonic
accuracy).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

DEFAULT_ACCEPTANCE_LEVEL = 0.75
DEFAULT_AGE_BAND_EDGES = (20, 40, 60)


@dataclass(frozen=True)
class OutcomePair:
    """Expert vs software diagnoses for one patient.

    Expert chances are clinical certainties and must lie in [0.75, 1.0];
    software chances span [0, 1].
    """

    patient_id: str
    expert: tuple[tuple[str, float], ...]
    software: tuple[tuple[str, float], ...]
    age: float | None = None


def parse_outcome_pair(obj: Mapping) -> OutcomePair:
    if not isinstance(obj, Mapping):
        raise ValueError("outcome pair must be an object")
    patient_id = obj.get("patient_id")
    if not isinstance(patient_id, str) or not patient_id:
        raise ValueError("outcome pair needs a patient_id")
    expert = _parse_outcomes(obj.get("expert"), "expert", 0.75, 1.0)
    if not expert:
        raise ValueError(f"{patient_id}: expert set must be non-empty")
    software = _parse_outcomes(obj.get("software"), "software", 0.0, 1.0)
    age = obj.get("age")
    if age is not None and (not isinstance(age, (int, float)) or age < 0):
        raise ValueError(f"{patient_id}: age must be a non-negative number")
    return OutcomePair(patient_id=patient_id, expert=expert, software=software, age=age)


def _parse_outcomes(raw, label: str, lo: float, hi: float) -> tuple[tuple[str, float], ...]:
    if raw is None:
        raw = []
    if not isinstance(raw, list):
        raise ValueError(f"{label} must be a list")
    outcomes = []
    seen: set[str] = set()
    for entry in raw:
        disease = entry.get("disease") if isinstance(entry, Mapping) else None
        chance = entry.get("chance") if isinstance(entry, Mapping) else None
        if not isinstance(disease, str) or not isinstance(chance, (int, float)):
            raise ValueError(f"{label} entries need disease and chance fields")
        if disease in seen:
            raise ValueError(f"{label}: duplicate disease {disease!r}")
        seen.add(disease)
        if not lo <= chance <= hi:
            raise ValueError(
                f"{label}: chance {chance} for {disease!r} outside [{lo}, {hi}]"
            )
        outcomes.append((disease, float(chance)))
    return tuple(outcomes)


def parse_outcome_lines(lines: Iterable[str]) -> tuple[list[OutcomePair], list[str]]:
    """Parse JSON-lines input; malformed lines are skipped and reported."""
    pairs: list[OutcomePair] = []
    skipped: list[str] = []
    for i, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            pairs.append(parse_outcome_pair(json.loads(line)))
        except (json.JSONDecodeError, ValueError) as exc:
            skipped.append(f"line {i}: {exc}")
    return pairs, skipped


def observed_chances(pairs: Sequence[OutcomePair]) -> list[float]:
    """One datapoint per expert diagnosis: the software chance, or 0 if the
    software missed the disease entirely."""
    observed = []
    for pair in pairs:
        software = dict(pair.software)
        for disease, _ in pair.expert:
            observed.append(software.get(disease, 0.0))
    return observed


def standard_deviation(observed: Sequence[float], mu: float, mode: str = "paper") -> float:
    """Deviation of observed values from the acceptance level mu.

    ``paper`` mode computes sqrt(sum((x-mu)^2)) / N; ``population`` mode is
    the conventional sqrt(sum((x-mu)^2) / N).  Both are exposed because the
    radical placement is ambiguous in the source formula and the original
    per-patient data is unavailable for arbitration.
    """
    if not observed:
        raise ValueError("observed values must be non-empty")
    if mode not in ("paper", "population"):
        raise ValueError(f"unknown mode {mode!r}")
    total = sum((x - mu) ** 2 for x in observed)
    n = len(observed)
    if mode == "paper":
        return math.sqrt(total) / n
    return math.sqrt(total / n)


# ---------------------------------------------------------------------------
# Contingency tables


@dataclass(frozen=True)
class ContingencyTable:
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.cells) != len(self.row_labels):
            raise ValueError("one row of cells per row label required")
        for row in self.cells:
            if len(row) != len(self.col_labels):
                raise ValueError("one cell per column label required")
            for value in row:
                if not isinstance(value, int) or value < 0:
                    raise ValueError("cell counts must be non-negative integers")
        if self.grand_total() == 0:
            raise ValueError("grand total must be positive")

    def row_totals(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.cells)

    def col_totals(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.cells))

    def grand_total(self) -> int:
        return sum(sum(row) for row in self.cells)


def build_contingency(
    cases: Sequence[tuple[float, Sequence[str]]],
    age_band_edges: Sequence[float] = DEFAULT_AGE_BAND_EDGES,
    row_labels: Sequence[str] | None = None,
) -> ContingencyTable:
    """Count (patient, disease) pairs into age bands.

    A patient with several diseases contributes one count per disease, so
    the grand total can exceed the patient count.  Bands are half-open on
    the right: [0, e1), [e1, e2), ..., [ek, inf).
    """
    if not cases:
        raise ValueError("at least one case is required")
    edges = tuple(age_band_edges)
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise ValueError("age band edges must be strictly increasing")
    if row_labels is None:
        row_labels = sorted({d for _, diseases in cases for d in diseases})
    col_labels = age_band_labels(edges)
    counts = {label: [0] * len(col_labels) for label in row_labels}
    for age, diseases in cases:
        if age < 0:
            raise ValueError(f"negative age {age}")
        band = _band_index(age, edges)
        for disease in diseases:
            if disease not in counts:
                raise ValueError(f"disease {disease!r} not among row labels")
            counts[disease][band] += 1
    return ContingencyTable(
        row_labels=tuple(row_labels),
        col_labels=col_labels,
        cells=tuple(tuple(counts[label]) for label in row_labels),
    )


def age_band_labels(edges: Sequence[float]) -> tuple[str, ...]:
    def fmt(v: float) -> str:
        return str(int(v)) if float(v).is_integer() else str(v)

    labels = [f"<{fmt(edges[0])}"]
    labels += [f"{fmt(a)}-{fmt(b)}" for a, b in zip(edges, edges[1:])]
    labels.append(f">{fmt(edges[-1])}")
    return tuple(labels)


def _band_index(age: float, edges: Sequence[float]) -> int:
    for i, edge in enumerate(edges):
        if age < edge:
            return i
    return len(edges)


def expected_frequencies(table: ContingencyTable) -> tuple[tuple[float, ...], ...]:
    """Expected cell frequencies from the marginals: row x column / N."""
    n = table.grand_total()
    if n == 0:
        raise ValueError("grand total must be positive")
    rows = table.row_totals()
    cols = table.col_totals()
    return tuple(
        tuple(r * c / n for c in cols)
        for r in rows
    )


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int


def chi_square(
    observed: ContingencyTable, expected: Sequence[Sequence[float]]
) -> ChiSquareResult:
    """Pearson statistic sum((o-e)^2 / e) over cells with e > 0.

    Zero-expected cells are skipped in the sum but the degrees of freedom
    (rows-1)(cols-1) are computed on the full table.
    """
    if len(expected) != len(observed.cells) or any(
        len(erow) != len(orow) for erow, orow in zip(expected, observed.cells)
    ):
        raise ValueError("observed and expected tables must have the same shape")
    statistic = 0.0
    for orow, erow in zip(observed.cells, expected):
        for o, e in zip(orow, erow):
            if e > 0:
                statistic += (o - e) ** 2 / e
    df = (len(observed.row_labels) - 1) * (len(observed.col_labels) - 1)
    return ChiSquareResult(statistic=statistic, df=df)


def homogeneity_verdict(statistic: float, df: int, critical: float) -> bool:
    """True when the statistic stays at or below the critical value."""
    if critical <= 0:
        raise ValueError("critical value must be positive")
    return statistic <= critical


# ---------------------------------------------------------------------------
# Recall / precision / accuracy


def harmonic_accuracy(precision: float, recall: float) -> float:
    """Harmonic combination 2PR / (P + R); 0 when both rates are 0."""
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class PatientMetrics:
    patient_id: str
    recall: float
    precision: float
    accuracy: float
    expert_count: int
    predicted_count: int
    hit_count: int


@dataclass(frozen=True)
class PrfReport:
    recall: float
    precision: float
    accuracy: float
    per_patient: tuple[PatientMetrics, ...]


def prf_metrics(
    pairs: Sequence[OutcomePair], threshold: float = DEFAULT_ACCEPTANCE_LEVEL
) -> PrfReport:
    """Per-patient recall/precision/accuracy, arithmetically averaged.

    Software predictions are the diseases at or above the chance threshold.
    An empty prediction set scores precision 1 only when the expert set is
    also empty (which the input invariants forbid), otherwise 0.  Accuracy
    is the per-patient harmonic combination, averaged over patients; note
    the mean of per-patient accuracies is not the harmonic combination of
    the mean rates.
    """
    if not pairs:
        raise ValueError("at least one outcome pair is required")
    per_patient = []
    for pair in pairs:
        expert = {d for d, _ in pair.expert}
        predicted = {d for d, ch in pair.software if ch >= threshold}
        hits = expert & predicted
        recall = len(hits) / len(expert) if expert else 1.0
        if predicted:
            precision = len(hits) / len(predicted)
        else:
            precision = 1.0 if not expert else 0.0
        accuracy = harmonic_accuracy(precision, recall)
        per_patient.append(
            PatientMetrics(
                patient_id=pair.patient_id,
                recall=recall,
                precision=precision,
                accuracy=accuracy,
                expert_count=len(expert),
                predicted_count=len(predicted),
                hit_count=len(hits),
            )
        )
    n = len(per_patient)
    return PrfReport(
        recall=sum(m.recall for m in per_patient) / n,
        precision=sum(m.precision for m in per_patient) / n,
        accuracy=sum(m.accuracy for m in per_patient) / n,
        per_patient=tuple(per_patient),
    )
