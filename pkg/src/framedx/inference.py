"""Phase-wise matching of patient findings against disease profiles.

The match pipeline has three steps: intersect patient tokens with every
disease slot (``match_phase``), turn each disease column into a match
strength ls/ts (``match_strength``), and fuse the per-phase lists into one
ranked differential (``provisional_diagnosis``).  All scores are exact
rationals; rounding happens only at the serialization boundary.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping

from .errors import CaseInputError, PhaseNotPerformedError, UnknownDiseaseError
from .kb import PHASE_ORDER, AttributeCatalog, KnowledgeBase, Phase, parse_phase

logger = logging.getLogger(__name__)

# Later phases carry more diagnostic weight: examination doubles history,
# investigation triples it.
PHASE_PRIORITY: dict[Phase, int] = {
    Phase.HISTORY: 1,
    Phase.EXAMINATION: 2,
    Phase.INVESTIGATION: 3,
}


@dataclass(frozen=True)
class PatientInput:
    """One patient's findings, grouped by phase.

    ``phase_inputs`` holds (attribute, tokens) pairs for each performed
    phase; attributes without findings are simply absent.
    """

    patient_id: str
    phase_inputs: Mapping[Phase, tuple[tuple[str, frozenset[str]], ...]]
    phases_performed: frozenset[Phase]

    def findings(self, phase: Phase) -> dict[str, frozenset[str]]:
        return dict(self.phase_inputs.get(phase, ()))

    def performed_in_order(self) -> tuple[Phase, ...]:
        return tuple(p for p in PHASE_ORDER if p in self.phases_performed)


def parse_case(document: str | bytes | Mapping, catalog: AttributeCatalog) -> PatientInput:
    """Parse and validate a patient case document against the catalog.

    The catalog is closed-world: unknown attributes, unknown tokens, and
    multiple tokens for a single-valued attribute are rejected with the
    offending value and the legal choices.
    """
    if isinstance(document, (str, bytes)):
        try:
            raw = json.loads(document)
        except json.JSONDecodeError as exc:
            raise CaseInputError(f"malformed case document: {exc}") from exc
    else:
        raw = document
    if not isinstance(raw, Mapping):
        raise CaseInputError("case document must be a JSON object")
    patient_id = raw.get("patient_id")
    if not isinstance(patient_id, str) or not patient_id:
        raise CaseInputError("case document must carry a non-empty patient_id")
    phases_raw = raw.get("phases")
    if not isinstance(phases_raw, Mapping):
        raise CaseInputError("case document must carry a phases object")
    for key in phases_raw:
        if key not in {p.value for p in PHASE_ORDER}:
            raise CaseInputError(f"unknown phase {key!r}")
    phase_inputs: dict[Phase, tuple[tuple[str, frozenset[str]], ...]] = {}
    performed: set[Phase] = set()
    for phase in PHASE_ORDER:
        if phase.value not in phases_raw:
            continue
        performed.add(phase)
        findings_raw = phases_raw[phase.value]
        if not isinstance(findings_raw, Mapping):
            raise CaseInputError(f"phases.{phase.value} must be an object")
        entries = []
        for attr_id, tokens in findings_raw.items():
            entries.append((attr_id, _check_finding(attr_id, tokens, phase, catalog)))
        # Empty token lists mean "no finding"; drop them.
        phase_inputs[phase] = tuple((a, t) for a, t in entries if t)
    return PatientInput(
        patient_id=patient_id,
        phase_inputs=phase_inputs,
        phases_performed=frozenset(performed),
    )


def _check_finding(
    attr_id: str, tokens, phase: Phase, catalog: AttributeCatalog
) -> frozenset[str]:
    attr = catalog.get(attr_id)
    if attr is None:
        raise CaseInputError(f"unknown attribute {attr_id!r}", attribute=attr_id)
    if attr.phase is not phase:
        raise CaseInputError(
            f"attribute {attr_id!r} belongs to phase {attr.phase.value!r}, "
            f"not {phase.value!r}",
            attribute=attr_id,
        )
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise CaseInputError(
            f"findings for {attr_id!r} must be a list of tokens", attribute=attr_id
        )
    for token in tokens:
        if not attr.allows(token):
            raise CaseInputError(
                f"value {token!r} is not a legal token for attribute {attr_id!r}",
                attribute=attr_id,
                value=token,
                allowed=sorted(attr.allowed_values),
            )
    if len(tokens) > 1 and not attr.multi_valued:
        raise CaseInputError(
            f"attribute {attr_id!r} accepts a single value, got {len(tokens)}",
            attribute=attr_id,
            value=",".join(tokens),
            allowed=sorted(attr.allowed_values),
        )
    if len(set(tokens)) != len(tokens):
        raise CaseInputError(
            f"duplicate tokens for attribute {attr_id!r}", attribute=attr_id
        )
    return frozenset(tokens)


# ---------------------------------------------------------------------------
# Matching


@dataclass(frozen=True)
class MatchCell:
    matched_values: frozenset[str]
    significance: int


@dataclass(frozen=True)
class MatchMatrix:
    """Match information for one phase: attribute rows, disease columns.

    A cell exists exactly where the disease slot is non-empty; its
    ``matched_values`` is the intersection of patient and slot tokens
    (possibly empty) and its significance is the slot's.
    """

    phase: Phase
    attribute_ids: tuple[str, ...]
    disease_ids: tuple[str, ...]
    entries: Mapping[tuple[str, str], MatchCell]

    def cell(self, attribute_id: str, disease_id: str) -> MatchCell | None:
        return self.entries.get((attribute_id, disease_id))

    def column(self, disease_id: str) -> dict[str, MatchCell]:
        return {
            attr: cell
            for (attr, d), cell in self.entries.items()
            if d == disease_id
        }


def match_phase(patient: PatientInput, kb: KnowledgeBase, phase: Phase) -> MatchMatrix:
    """Intersect the patient's tokens with every disease slot of one phase."""
    phase = parse_phase(phase)
    if phase not in patient.phases_performed:
        raise PhaseNotPerformedError(phase.value, patient.patient_id)
    findings = patient.findings(phase)
    attribute_ids = tuple(a.id for a in kb.catalog.phase_attributes(phase))
    entries: dict[tuple[str, str], MatchCell] = {}
    for profile in kb.diseases:
        for slot in profile.frame(phase):
            if slot.is_empty:
                continue
            patient_tokens = findings.get(slot.attribute_id, frozenset())
            entries[(slot.attribute_id, profile.disease_id)] = MatchCell(
                matched_values=patient_tokens & slot.tokens(),
                significance=slot.significance,
            )
    return MatchMatrix(
        phase=phase,
        attribute_ids=attribute_ids,
        disease_ids=kb.disease_ids,
        entries=entries,
    )


@dataclass(frozen=True)
class PhaseDiseaseList:
    phase: Phase
    entries: tuple[tuple[str, Fraction], ...]

    def strength(self, disease_id: str) -> Fraction:
        for d, ms in self.entries:
            if d == disease_id:
                return ms
        return Fraction(0)

    def disease_ids(self) -> tuple[str, ...]:
        return tuple(d for d, _ in self.entries)


def match_strength(matrix: MatchMatrix, kb: KnowledgeBase) -> PhaseDiseaseList:
    """Score each candidate disease column as an exact rational ls/ts.

    ts sums max-weight x significance over all non-empty slots of the
    disease's frame; ls sums best-matched-weight x significance over the
    slots where the intersection is non-empty.  Diseases with no matched
    values are omitted, so every emitted strength lies in (0, 1].
    """
    entries = []
    for disease_id in matrix.disease_ids:
        profile = kb.disease(disease_id)
        column = matrix.column(disease_id)
        if not any(cell.matched_values for cell in column.values()):
            continue
        ts = Fraction(0)
        ls = Fraction(0)
        for slot in profile.frame(matrix.phase):
            if slot.is_empty:
                continue
            ts += slot.max_weight() * slot.significance
            cell = column.get(slot.attribute_id)
            if cell is None or not cell.matched_values:
                continue
            matched_max = max(slot.weight_of(t) for t in cell.matched_values)
            ls += matched_max * cell.significance
        if ts == 0:
            logger.warning(
                "disease %s has no non-empty %s slots; skipped",
                disease_id,
                matrix.phase.value,
            )
            continue
        ms = ls / ts
        if ms != 0:
            entries.append((disease_id, ms))
    return PhaseDiseaseList(phase=matrix.phase, entries=tuple(entries))


class MatchClass(str, Enum):
    FULL = "full"
    PARTIAL = "partial"
    ZERO = "zero"


def classify_match(ms) -> MatchClass:
    """Map a match strength in [0,1] to full / partial / zero."""
    value = Fraction(ms) if not isinstance(ms, Fraction) else ms
    if not 0 <= value <= 1:
        raise ValueError(f"match strength {ms} outside [0, 1]")
    if value == 1:
        return MatchClass.FULL
    if value == 0:
        return MatchClass.ZERO
    return MatchClass.PARTIAL


# ---------------------------------------------------------------------------
# Fusion


@dataclass(frozen=True)
class Differential:
    """Ranked disease list; chances sorted descending, ties by disease id."""

    entries: tuple[tuple[str, Fraction], ...]
    divisor_used: int

    def chance(self, disease_id: str) -> Fraction:
        for d, c in self.entries:
            if d == disease_id:
                return c
        raise UnknownDiseaseError(disease_id)

    def order(self) -> tuple[str, ...]:
        return tuple(d for d, _ in self.entries)


def provisional_diagnosis(
    lists: Mapping[Phase, PhaseDiseaseList],
    phases_performed,
) -> Differential:
    """Fuse per-phase lists into one differential.

    Each phase contributes priority x strength; the divisor is the sum of
    the performed phases' priorities (6 when all three ran), so a disease
    matching fully in every performed phase lands at exactly 1.  A disease
    absent from a phase's list contributes 0 for that phase.
    """
    performed = [parse_phase(p) for p in phases_performed]
    if not performed:
        raise ValueError("at least one phase must be performed")
    if set(lists) != set(performed):
        raise ValueError("lists must cover exactly the performed phases")
    divisor = sum(PHASE_PRIORITY[p] for p in performed)
    combined: dict[str, Fraction] = {}
    for phase in performed:
        priority = PHASE_PRIORITY[phase]
        for disease_id, ms in lists[phase].entries:
            combined[disease_id] = combined.get(disease_id, Fraction(0)) + priority * ms
    ranked = sorted(
        ((d, total / divisor) for d, total in combined.items()),
        key=lambda item: (-item[1], item[0]),
    )
    return Differential(entries=tuple(ranked), divisor_used=divisor)
