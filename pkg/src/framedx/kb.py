"""Frame-structured knowledge base.

A knowledge base is a closed-world attribute catalog, one weighted profile
per disease (three frames each, one per clinical phase), a root/sub-root
reference index used for traversal, and an optional store of conditional
probability tables for tie-breaking.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .errors import (
    KBInvariantError,
    KBParseError,
    KBSchemaError,
    UnknownDiseaseError,
    UnknownPhaseError,
)


class Phase(str, Enum):
    HISTORY = "history"
    EXAMINATION = "examination"
    INVESTIGATION = "investigation"


PHASE_ORDER: tuple[Phase, ...] = (Phase.HISTORY, Phase.EXAMINATION, Phase.INVESTIGATION)


def parse_phase(value: object) -> Phase:
    try:
        return Phase(value)
    except ValueError:
        raise UnknownPhaseError(value) from None


# ---------------------------------------------------------------------------
# Catalog


@dataclass(frozen=True)
class AttributeDef:
    """One clinical attribute with its finite set of legal value tokens."""

    id: str
    phase: Phase
    allowed_values: tuple[str, ...]
    multi_valued: bool = False

    def allows(self, token: str) -> bool:
        return token in self.allowed_values


@dataclass(frozen=True)
class AttributeCatalog:
    """The universal attribute/value space all frames draw from."""

    attributes: tuple[AttributeDef, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_id", {a.id: a for a in self.attributes})

    def get(self, attribute_id: str) -> AttributeDef | None:
        return self._by_id.get(attribute_id)

    def __contains__(self, attribute_id: str) -> bool:
        return attribute_id in self._by_id

    def phase_attributes(self, phase: Phase) -> tuple[AttributeDef, ...]:
        return tuple(a for a in self.attributes if a.phase == phase)

    def phase_counts(self) -> dict[Phase, int]:
        counts = {p: 0 for p in PHASE_ORDER}
        for a in self.attributes:
            counts[a.phase] += 1
        return counts

    def value_space(self) -> frozenset[tuple[str, str]]:
        """All legal (attribute, token) pairs."""
        return frozenset(
            (a.id, token) for a in self.attributes for token in a.allowed_values
        )


# ---------------------------------------------------------------------------
# Disease profiles


@dataclass(frozen=True)
class WeightedSlot:
    """One attribute slot of a disease frame.

    ``values`` pairs each token with its weightage; weightages are natural
    numbers bounded by the number of values in the slot.  An empty slot has
    no values and significance 0.
    """

    attribute_id: str
    values: tuple[tuple[str, int], ...]
    significance: int

    @property
    def is_empty(self) -> bool:
        return not self.values

    def tokens(self) -> frozenset[str]:
        return frozenset(token for token, _ in self.values)

    def max_weight(self) -> int:
        return max((w for _, w in self.values), default=0)

    def weight_of(self, token: str) -> int:
        for t, w in self.values:
            if t == token:
                return w
        raise KeyError(token)


def empty_slot(attribute_id: str) -> WeightedSlot:
    return WeightedSlot(attribute_id=attribute_id, values=(), significance=0)


PhaseFrame = tuple[WeightedSlot, ...]


@dataclass(frozen=True)
class DiseaseProfile:
    disease_id: str
    display_name: str
    frames: Mapping[Phase, PhaseFrame]

    def frame(self, phase: Phase) -> PhaseFrame:
        return self.frames[phase]

    def slot(self, phase: Phase, attribute_id: str) -> WeightedSlot:
        for s in self.frames[phase]:
            if s.attribute_id == attribute_id:
                return s
        raise KeyError(attribute_id)


@dataclass(frozen=True)
class ProductionRule:
    """Single-slot rule view of a profile entry: antecedent -> disease."""

    attribute_id: str
    values: tuple[tuple[str, int], ...]
    significance: int
    disease_id: str


# ---------------------------------------------------------------------------
# Reference index (root frame and per-phase sub-root frames)


@dataclass(frozen=True)
class SubRootFrame:
    id: str
    phase: Phase
    slots: tuple[str, ...]  # disease ids, one slot per disease


@dataclass(frozen=True)
class RootFrame:
    slots: tuple[tuple[Phase, str], ...]  # (phase, sub-root id)

    def sub_root_id(self, phase: Phase) -> str:
        for p, sid in self.slots:
            if p == phase:
                return sid
        raise UnknownPhaseError(phase)


# ---------------------------------------------------------------------------
# Conditional probability tables

AssignmentKey = tuple[str, ...]
HistoryContext = tuple[tuple[str, "AssignmentKey"], ...]


def assignment_key(tokens: Iterable[str]) -> AssignmentKey:
    """Canonical key for a value assignment: the sorted token tuple."""
    return tuple(sorted(tokens))


def history_context(assignments: Mapping[str, Iterable[str]]) -> HistoryContext:
    """Canonical key for a full assignment over history attributes."""
    return tuple(
        sorted((attr, assignment_key(tokens)) for attr, tokens in assignments.items())
    )


@dataclass(frozen=True)
class ConditionalTables:
    """Probability store for the tie-breaking network.

    * ``priors``: attribute -> assignment -> p(assignment)
    * ``disease_given_history``: disease -> history context -> p(disease true)
    * ``finding_given_disease``: (attribute, disease, disease_state) ->
      assignment -> p(assignment | disease_state)
    """

    priors: Mapping[str, Mapping[AssignmentKey, float]] = field(default_factory=dict)
    disease_given_history: Mapping[str, Mapping[HistoryContext, float]] = field(
        default_factory=dict
    )
    finding_given_disease: Mapping[
        tuple[str, str, bool], Mapping[AssignmentKey, float]
    ] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not (
            self.priors or self.disease_given_history or self.finding_given_disease
        )


# ---------------------------------------------------------------------------
# Knowledge base


@dataclass(frozen=True)
class KnowledgeBase:
    catalog: AttributeCatalog
    diseases: tuple[DiseaseProfile, ...]
    root: RootFrame
    sub_roots: Mapping[str, SubRootFrame]
    cpts: ConditionalTables

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_id", {d.disease_id: d for d in self.diseases})

    @property
    def disease_ids(self) -> tuple[str, ...]:
        return tuple(d.disease_id for d in self.diseases)

    def disease(self, disease_id: str) -> DiseaseProfile:
        try:
            return self._by_id[disease_id]
        except KeyError:
            raise UnknownDiseaseError(disease_id) from None

    def has_disease(self, disease_id: str) -> bool:
        return disease_id in self._by_id

    def link_count(self) -> int:
        """Reference links in the index: root->sub-roots plus sub-root->frames."""
        return len(self.root.slots) + sum(len(s.slots) for s in self.sub_roots.values())


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    warnings: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, path: str, message: str) -> None:
        self.violations.append(Violation(path, message))

    def warn(self, path: str, message: str) -> None:
        self.warnings.append(Violation(path, message))

    def format(self) -> str:
        lines = [f"violation  {v}" for v in self.violations]
        lines += [f"warning    {w}" for w in self.warnings]
        return "\n".join(lines) if lines else "ok"


def validate_kb(kb: KnowledgeBase, strict: bool = False) -> ValidationReport:
    """Check every structural invariant; violations are data, not errors.

    With ``strict`` the report additionally warns when parts of the catalog's
    value space are unused by every disease profile.
    """
    report = ValidationReport()
    _validate_catalog(kb.catalog, report)
    counts = kb.catalog.phase_counts()
    seen: set[str] = set()
    for d in kb.diseases:
        path = f"diseases[{d.disease_id}]"
        if d.disease_id in seen:
            report.add(path, "duplicate disease id")
        seen.add(d.disease_id)
        _validate_profile(d, kb.catalog, counts, report)
    _validate_index(kb, report)
    _validate_cpts(kb, report)
    if strict:
        used = set()
        for d in kb.diseases:
            for frame in d.frames.values():
                for slot in frame:
                    used.update((slot.attribute_id, t) for t, _ in slot.values)
        unused = kb.catalog.value_space() - used
        for attr, token in sorted(unused):
            report.warn(
                f"catalog[{attr}]", f"value {token!r} is unused by every disease profile"
            )
    return report


def _validate_catalog(catalog: AttributeCatalog, report: ValidationReport) -> None:
    seen: set[str] = set()
    for a in catalog.attributes:
        path = f"catalog[{a.id}]"
        if a.id in seen:
            report.add(path, "duplicate attribute id")
        seen.add(a.id)
        if not a.allowed_values:
            report.add(path, "allowed_values must be non-empty")
        if len(set(a.allowed_values)) != len(a.allowed_values):
            report.add(path, "allowed_values contains duplicates")
    for phase, n in catalog.phase_counts().items():
        if n == 0:
            report.add("catalog", f"no attributes declared for phase {phase.value!r}")


def _validate_profile(
    profile: DiseaseProfile,
    catalog: AttributeCatalog,
    counts: Mapping[Phase, int],
    report: ValidationReport,
) -> None:
    base = f"diseases[{profile.disease_id}]"
    for phase in PHASE_ORDER:
        frame = profile.frames.get(phase)
        fpath = f"{base}.frames.{phase.value}"
        if frame is None:
            report.add(fpath, "missing phase frame")
            continue
        expected = tuple(a.id for a in catalog.phase_attributes(phase))
        got = tuple(s.attribute_id for s in frame)
        if got != expected:
            report.add(
                fpath,
                f"frame must hold one slot per catalog attribute in catalog order "
                f"(expected {list(expected)}, got {list(got)})",
            )
            continue
        n_slots = counts[phase]
        for slot in frame:
            spath = f"{fpath}[{slot.attribute_id}]"
            attr = catalog.get(slot.attribute_id)
            if slot.is_empty:
                if slot.significance != 0:
                    report.add(spath, "empty slot must carry significance 0")
                continue
            m = len(slot.values)
            tokens = [t for t, _ in slot.values]
            if len(set(tokens)) != m:
                report.add(spath, "slot value tokens must be distinct")
            for token, weight in slot.values:
                if attr is not None and not attr.allows(token):
                    report.add(
                        spath,
                        f"value token {token!r} is not in the catalog for "
                        f"{slot.attribute_id!r}",
                    )
                if not 1 <= weight <= m:
                    report.add(
                        spath,
                        f"weightage {weight} outside 1..{m} for token {token!r}",
                    )
            if not 1 <= slot.significance <= n_slots:
                report.add(
                    spath,
                    f"significance {slot.significance} outside 1..{n_slots}",
                )


def _validate_index(kb: KnowledgeBase, report: ValidationReport) -> None:
    x = len(kb.diseases)
    if len(kb.root.slots) != 3:
        report.add("root", f"root frame must hold exactly 3 slots, got {len(kb.root.slots)}")
    root_phases = [p for p, _ in kb.root.slots]
    if sorted(root_phases, key=list(PHASE_ORDER).index) != list(PHASE_ORDER):
        report.add("root", "root slots must reference one sub-root per phase")
    for p, sid in kb.root.slots:
        if sid not in kb.sub_roots:
            report.add("root", f"dangling sub-root reference {sid!r}")
    for sid, sub in kb.sub_roots.items():
        path = f"sub_roots[{sid}]"
        if len(sub.slots) != x:
            report.add(path, f"must hold one slot per disease ({x}), got {len(sub.slots)}")
        for disease_id in sub.slots:
            if not kb.has_disease(disease_id):
                report.add(path, f"dangling disease reference {disease_id!r}")
    expected_links = 3 * x + 3
    if kb.link_count() != expected_links:
        report.add(
            "structure",
            f"reference link count {kb.link_count()} != 3x+3 = {expected_links}",
        )


def _validate_cpts(kb: KnowledgeBase, report: ValidationReport) -> None:
    tol = 1e-9
    cpts = kb.cpts
    for attr_id, dist in cpts.priors.items():
        path = f"cpts.priors[{attr_id}]"
        attr = kb.catalog.get(attr_id)
        if attr is None:
            report.add(path, "unknown attribute")
            continue
        if attr.phase is not Phase.HISTORY:
            report.add(path, "priors are only defined for history attributes")
        _check_distribution(dist, attr, path, report, tol)
    for disease_id, contexts in cpts.disease_given_history.items():
        path = f"cpts.disease_given_history[{disease_id}]"
        if not kb.has_disease(disease_id):
            report.add(path, "unknown disease")
        for ctx, p in contexts.items():
            if not 0.0 <= p <= 1.0:
                report.add(path, f"probability {p} outside [0,1]")
            for attr_id, key in ctx:
                attr = kb.catalog.get(attr_id)
                if attr is None:
                    report.add(path, f"unknown attribute {attr_id!r} in context")
                elif attr.phase is not Phase.HISTORY:
                    report.add(path, f"context attribute {attr_id!r} is not a history attribute")
                else:
                    _check_assignment(key, attr, path, report)
    finding_outcomes: dict[str, frozenset[AssignmentKey]] = {}
    for (attr_id, disease_id, state), dist in cpts.finding_given_disease.items():
        path = f"cpts.finding_given_disease[{attr_id}|{disease_id}={str(state).lower()}]"
        attr = kb.catalog.get(attr_id)
        if attr is None:
            report.add(path, "unknown attribute")
            continue
        if attr.phase is Phase.HISTORY:
            report.add(path, "finding tables are only defined for examination/investigation attributes")
        if not kb.has_disease(disease_id):
            report.add(path, "unknown disease")
        _check_distribution(dist, attr, path, report, tol)
        outcomes = frozenset(dist)
        if attr_id in finding_outcomes and finding_outcomes[attr_id] != outcomes:
            report.add(path, "outcome set differs between conditioning contexts")
        finding_outcomes.setdefault(attr_id, outcomes)


def _check_distribution(
    dist: Mapping[AssignmentKey, float],
    attr: AttributeDef,
    path: str,
    report: ValidationReport,
    tol: float,
) -> None:
    total = 0.0
    for key, p in dist.items():
        _check_assignment(key, attr, path, report)
        if not 0.0 <= p <= 1.0:
            report.add(path, f"probability {p} outside [0,1]")
        total += p
    if dist and abs(total - 1.0) > tol:
        report.add(path, f"outcome probabilities sum to {total!r}, expected 1")


def _check_assignment(
    key: AssignmentKey, attr: AttributeDef, path: str, report: ValidationReport
) -> None:
    if len(key) > 1 and not attr.multi_valued:
        report.add(path, f"multi-token assignment {list(key)} on single-valued attribute")
    for token in key:
        if not attr.allows(token):
            report.add(path, f"assignment token {token!r} is not in the catalog")


# ---------------------------------------------------------------------------
# Loading

ROOT_FRAME_ID = "root"


def _sub_root_id(phase: Phase) -> str:
    return f"sub_root:{phase.value}"


def build_index(disease_ids: Iterable[str]) -> tuple[RootFrame, dict[str, SubRootFrame]]:
    ids = tuple(disease_ids)
    root = RootFrame(slots=tuple((p, _sub_root_id(p)) for p in PHASE_ORDER))
    sub_roots = {
        _sub_root_id(p): SubRootFrame(id=_sub_root_id(p), phase=p, slots=ids)
        for p in PHASE_ORDER
    }
    return root, sub_roots


def load_kb(document: str | bytes | Mapping) -> KnowledgeBase:
    """Build a knowledge base from its JSON document.

    Loading is deterministic and ends with a full invariant check; a KB that
    loads is a KB that validates.  Raises ``KBParseError`` for malformed
    JSON, ``KBSchemaError`` for missing/mistyped fields, and
    ``KBInvariantError`` (carrying the report) for invariant violations.
    """
    if isinstance(document, (str, bytes)):
        try:
            raw = json.loads(document)
        except json.JSONDecodeError as exc:
            raise KBParseError(f"malformed KB document: {exc}") from exc
    else:
        raw = document
    if not isinstance(raw, Mapping):
        raise KBSchemaError("KB document must be a JSON object")

    catalog = _parse_catalog(_require(raw, "catalog", "document"))
    diseases_raw = _require(raw, "diseases", "document")
    if not isinstance(diseases_raw, list) or not diseases_raw:
        raise KBSchemaError("diseases: at least one disease profile is required")
    diseases = tuple(
        _parse_disease(entry, i, catalog) for i, entry in enumerate(diseases_raw)
    )
    ids = [d.disease_id for d in diseases]
    if len(set(ids)) != len(ids):
        dup = next(d for d in ids if ids.count(d) > 1)
        raise KBSchemaError(f"diseases: duplicate disease id {dup!r}")
    cpts = _parse_cpts(raw.get("cpts") or {})
    root, sub_roots = build_index(ids)
    kb = KnowledgeBase(
        catalog=catalog, diseases=diseases, root=root, sub_roots=sub_roots, cpts=cpts
    )
    report = validate_kb(kb)
    if not report.ok:
        raise KBInvariantError(report)
    return kb


def load_kb_file(path) -> KnowledgeBase:
    with open(path, "rb") as fh:
        return load_kb(fh.read())


def _require(mapping: Mapping, key: str, path: str):
    if not isinstance(mapping, Mapping) or key not in mapping:
        raise KBSchemaError(f"{path}: missing required field {key!r}")
    return mapping[key]


def _parse_catalog(raw) -> AttributeCatalog:
    entries = _require(raw, "attributes", "catalog")
    if not isinstance(entries, list):
        raise KBSchemaError("catalog.attributes: expected a list")
    attrs = []
    seen: set[str] = set()
    for i, entry in enumerate(entries):
        path = f"catalog.attributes[{i}]"
        attr_id = _require(entry, "id", path)
        phase_raw = _require(entry, "phase", path)
        try:
            phase = parse_phase(phase_raw)
        except UnknownPhaseError:
            raise KBSchemaError(f"{path}: unknown phase {phase_raw!r}") from None
        allowed = _require(entry, "allowed_values", path)
        multi = _require(entry, "multi_valued", path)
        if not isinstance(allowed, list) or not all(isinstance(v, str) for v in allowed):
            raise KBSchemaError(f"{path}: allowed_values must be a list of strings")
        if attr_id in seen:
            raise KBSchemaError(f"{path}: duplicate attribute id {attr_id!r}")
        seen.add(attr_id)
        attrs.append(
            AttributeDef(
                id=attr_id,
                phase=phase,
                allowed_values=tuple(allowed),
                multi_valued=bool(multi),
            )
        )
    return AttributeCatalog(attributes=tuple(attrs))


def _parse_disease(entry, index: int, catalog: AttributeCatalog) -> DiseaseProfile:
    path = f"diseases[{index}]"
    disease_id = _require(entry, "id", path)
    display = _require(entry, "display_name", path)
    frames_raw = _require(entry, "frames", path)
    frames: dict[Phase, PhaseFrame] = {}
    for phase in PHASE_ORDER:
        fpath = f"{path}.frames.{phase.value}"
        slot_entries = frames_raw.get(phase.value, []) if isinstance(frames_raw, Mapping) else None
        if slot_entries is None or not isinstance(slot_entries, list):
            raise KBSchemaError(f"{fpath}: expected a list of slots")
        by_attr: dict[str, WeightedSlot] = {}
        for j, slot_raw in enumerate(slot_entries):
            spath = f"{fpath}[{j}]"
            attr_id = _require(slot_raw, "attribute", spath)
            attr = catalog.get(attr_id)
            if attr is None:
                raise KBSchemaError(f"{spath}: unknown attribute {attr_id!r}")
            if attr.phase is not phase:
                raise KBSchemaError(
                    f"{spath}: attribute {attr_id!r} belongs to phase {attr.phase.value!r}"
                )
            if attr_id in by_attr:
                raise KBSchemaError(f"{spath}: duplicate slot for attribute {attr_id!r}")
            significance = _require(slot_raw, "significance", spath)
            values_raw = _require(slot_raw, "values", spath)
            if not isinstance(values_raw, list):
                raise KBSchemaError(f"{spath}: values must be a list")
            values = []
            for k, v in enumerate(values_raw):
                vpath = f"{spath}.values[{k}]"
                token = _require(v, "token", vpath)
                weight = _require(v, "weight", vpath)
                if not isinstance(weight, int) or isinstance(weight, bool):
                    raise KBSchemaError(f"{vpath}: weight must be an integer")
                values.append((token, weight))
            if not isinstance(significance, int) or isinstance(significance, bool):
                raise KBSchemaError(f"{spath}: significance must be an integer")
            by_attr[attr_id] = WeightedSlot(
                attribute_id=attr_id, values=tuple(values), significance=significance
            )
        # Omitted attributes load as explicit empty slots; every frame holds
        # one slot per catalog attribute of its phase, in catalog order.
        frame = tuple(
            by_attr.get(a.id, empty_slot(a.id)) for a in catalog.phase_attributes(phase)
        )
        frames[phase] = frame
    return DiseaseProfile(disease_id=disease_id, display_name=display, frames=frames)


def _parse_probability(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise KBSchemaError(f"{path}: p must be a number")
    return float(value)


def _parse_cpts(raw) -> ConditionalTables:
    if not isinstance(raw, Mapping):
        raise KBSchemaError("cpts: expected an object")
    priors: dict[str, dict[AssignmentKey, float]] = {}
    for i, entry in enumerate(raw.get("priors", [])):
        path = f"cpts.priors[{i}]"
        attr = _require(entry, "attribute", path)
        key = _parse_assignment(_require(entry, "assignment", path), path)
        p = _parse_probability(_require(entry, "p", path), path)
        dist = priors.setdefault(attr, {})
        if key in dist:
            raise KBSchemaError(f"{path}: duplicate assignment {list(key)}")
        dist[key] = p
    given_history: dict[str, dict[HistoryContext, float]] = {}
    for i, entry in enumerate(raw.get("disease_given_history", [])):
        path = f"cpts.disease_given_history[{i}]"
        disease = _require(entry, "disease", path)
        ctx_raw = _require(entry, "history_assignment", path)
        if not isinstance(ctx_raw, Mapping):
            raise KBSchemaError(f"{path}: history_assignment must be an object")
        ctx = history_context(
            {attr: _parse_assignment(v, path) for attr, v in ctx_raw.items()}
        )
        p = _parse_probability(_require(entry, "p", path), path)
        contexts = given_history.setdefault(disease, {})
        if ctx in contexts:
            raise KBSchemaError(f"{path}: duplicate history context")
        contexts[ctx] = p
    finding: dict[tuple[str, str, bool], dict[AssignmentKey, float]] = {}
    for i, entry in enumerate(raw.get("finding_given_disease", [])):
        path = f"cpts.finding_given_disease[{i}]"
        attr = _require(entry, "attribute", path)
        disease = _require(entry, "disease", path)
        state = _require(entry, "disease_state", path)
        if not isinstance(state, bool):
            raise KBSchemaError(f"{path}: disease_state must be a boolean")
        key = _parse_assignment(_require(entry, "assignment", path), path)
        p = _parse_probability(_require(entry, "p", path), path)
        dist = finding.setdefault((attr, disease, state), {})
        if key in dist:
            raise KBSchemaError(f"{path}: duplicate assignment {list(key)}")
        dist[key] = p
    return ConditionalTables(
        priors=priors,
        disease_given_history=given_history,
        finding_given_disease=finding,
    )


def _parse_assignment(raw, path: str) -> AssignmentKey:
    if not isinstance(raw, list) or not all(isinstance(t, str) for t in raw):
        raise KBSchemaError(f"{path}: assignment must be a list of tokens")
    return assignment_key(raw)


# ---------------------------------------------------------------------------
# Traversal and rule export


def traverse(
    kb: KnowledgeBase,
    phase: Phase,
    disease_id: str,
    trace: list[str] | None = None,
) -> PhaseFrame:
    """Walk root -> sub-root(phase) -> instance frame and return the frame.

    The walk goes through the reference index, never directly to the
    profile; ``trace`` (if given) collects the visited frame ids in order.
    """
    phase = parse_phase(phase)
    if trace is not None:
        trace.append(ROOT_FRAME_ID)
    sid = kb.root.sub_root_id(phase)
    sub_root = kb.sub_roots[sid]
    if trace is not None:
        trace.append(sid)
    if disease_id not in sub_root.slots:
        raise UnknownDiseaseError(disease_id)
    if trace is not None:
        trace.append(f"instance:{disease_id}:{phase.value}")
    return kb.disease(disease_id).frame(phase)


def export_rules(kb: KnowledgeBase, disease_id: str) -> tuple[ProductionRule, ...]:
    """One production rule per non-empty slot, phases in order."""
    profile = kb.disease(disease_id)
    rules = []
    for phase in PHASE_ORDER:
        for slot in profile.frame(phase):
            if slot.is_empty:
                continue
            rules.append(
                ProductionRule(
                    attribute_id=slot.attribute_id,
                    values=slot.values,
                    significance=slot.significance,
                    disease_id=disease_id,
                )
            )
    return tuple(rules)


def catalog_payload(catalog: AttributeCatalog) -> dict:
    """JSON-ready view of the catalog (drives dynamic form generation)."""
    return {
        "attributes": [
            {
                "id": a.id,
                "phase": a.phase.value,
                "multi_valued": a.multi_valued,
                "allowed_values": list(a.allowed_values),
            }
            for a in catalog.attributes
        ]
    }
