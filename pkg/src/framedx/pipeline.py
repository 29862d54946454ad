"""End-to-end diagnosis: match, fuse, detect conflicts, resolve.

Both the CLI and the HTTP service run exactly this pipeline and serialize
its report with the same renderer, so the two shells emit byte-identical
differential JSON for identical inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .bayes import (
    ConflictSet,
    construct_bn,
    detect_conflicts,
    evidence_from_patient,
    resolve,
)
from .errors import CptMissingError, EvidenceError
from .inference import (
    Differential,
    MatchClass,
    PatientInput,
    classify_match,
    match_phase,
    match_strength,
    provisional_diagnosis,
)
from .kb import KnowledgeBase, Phase

DEFAULT_EPSILON = 0.02


@dataclass(frozen=True)
class ConflictOutcome:
    group: tuple[str, ...]
    resolved: bool
    joints: Mapping[str, float] | None
    order: tuple[str, ...] | None
    tie: bool
    reason: str | None


@dataclass(frozen=True)
class DiagnosisReport:
    patient_id: str
    phases_performed: tuple[Phase, ...]
    divisor_used: int
    epsilon: float
    entries: tuple[tuple[str, Fraction], ...]
    match_classes: Mapping[str, Mapping[Phase, MatchClass]]
    conflicts: tuple[ConflictOutcome, ...]

    def order(self) -> tuple[str, ...]:
        return tuple(d for d, _ in self.entries)


def diagnose(
    kb: KnowledgeBase, patient: PatientInput, epsilon: float = DEFAULT_EPSILON
) -> DiagnosisReport:
    """Run the full pipeline for one patient.

    Conflict groups whose probability tables are incomplete are surfaced as
    unresolved, never silently ordered.
    """
    performed = patient.performed_in_order()
    lists = {
        phase: match_strength(match_phase(patient, kb, phase), kb)
        for phase in performed
    }
    diff = provisional_diagnosis(lists, performed)
    conflicts = detect_conflicts(diff, epsilon)

    outcomes: list[ConflictOutcome] = []
    resolvable: list[tuple[tuple[str, ...], object]] = []
    for group in conflicts.groups:
        try:
            bn = construct_bn(patient, group, kb)
        except (CptMissingError, EvidenceError) as exc:
            outcomes.append(
                ConflictOutcome(
                    group=group,
                    resolved=False,
                    joints=None,
                    order=None,
                    tie=False,
                    reason=str(exc),
                )
            )
        else:
            resolvable.append((group, bn))

    final = diff
    if resolvable:
        evidence = evidence_from_patient(patient)
        subset = ConflictSet(groups=tuple(g for g, _ in resolvable), epsilon=epsilon)
        final, audits = resolve(diff, subset, [bn for _, bn in resolvable], evidence)
        for audit in audits:
            outcomes.append(
                ConflictOutcome(
                    group=audit.group,
                    resolved=True,
                    joints=audit.joints,
                    order=audit.order,
                    tie=audit.tie,
                    reason=None,
                )
            )
    # Keep the report's conflict list in detection order.
    by_group = {o.group: o for o in outcomes}
    ordered_outcomes = tuple(by_group[g] for g in conflicts.groups)

    match_classes = {
        disease_id: {
            phase: classify_match(lists[phase].strength(disease_id))
            for phase in performed
        }
        for disease_id, _ in final.entries
    }
    return DiagnosisReport(
        patient_id=patient.patient_id,
        phases_performed=performed,
        divisor_used=diff.divisor_used,
        epsilon=epsilon,
        entries=final.entries,
        match_classes=match_classes,
        conflicts=ordered_outcomes,
    )


def differential_of(report: DiagnosisReport) -> Differential:
    return Differential(entries=report.entries, divisor_used=report.divisor_used)


def report_payload(report: DiagnosisReport, kb: KnowledgeBase) -> dict:
    """JSON-ready view of a diagnosis report; chances rounded to 4 places."""
    return {
        "patient_id": report.patient_id,
        "phases_performed": [p.value for p in report.phases_performed],
        "divisor_used": report.divisor_used,
        "epsilon": report.epsilon,
        "differential": [
            {
                "disease": disease_id,
                "display_name": kb.disease(disease_id).display_name,
                "chance": round(float(chance), 4),
                "match_class_per_phase": {
                    phase.value: cls.value
                    for phase, cls in report.match_classes[disease_id].items()
                },
            }
            for disease_id, chance in report.entries
        ],
        "conflicts": [
            {
                "group": list(outcome.group),
                "resolved": outcome.resolved,
                "joints": dict(outcome.joints) if outcome.joints is not None else None,
                "order": list(outcome.order) if outcome.order is not None else None,
                "tie": outcome.tie,
                "reason": outcome.reason,
            }
            for outcome in report.conflicts
        ],
    }


def render_json(payload: Mapping) -> str:
    """Canonical JSON rendering shared by every shell."""
    return json.dumps(payload, ensure_ascii=False, separators=(",", ":"))
