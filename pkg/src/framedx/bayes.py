"""Exact probabilistic tie-breaking over near-equal differential entries.

Conflicted diseases and the patient's non-empty findings become a
three-layer network (history -> diseases -> findings).  Each candidate's
joint probability is the product of its history priors, its probability
given the full history assignment, and its finding likelihoods; the
brute-force chain-rule evaluator is the independent oracle for that
product.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import CptMissingError, EvidenceError, UnknownDiseaseError
from .inference import Differential, PatientInput
from .kb import (
    PHASE_ORDER,
    AssignmentKey,
    ConditionalTables,
    KnowledgeBase,
    Phase,
    assignment_key,
    history_context,
)

__all__ = [
    "BayesianNetwork",
    "BnNode",
    "ConditionalTables",
    "ConflictSet",
    "ResolutionAudit",
    "all_assignments",
    "brute_force_joint",
    "construct_bn",
    "detect_conflicts",
    "evidence_from_patient",
    "joint_probability",
    "resolve",
]


@dataclass(frozen=True)
class ConflictSet:
    """Groups of diseases whose chances are mutually within epsilon."""

    groups: tuple[tuple[str, ...], ...]
    epsilon: float

    def __bool__(self) -> bool:
        return bool(self.groups)


def detect_conflicts(diff: Differential, epsilon: float) -> ConflictSet:
    """Chain adjacent differential entries whose gap is at most epsilon.

    Groups are connected components of the adjacency relation on the sorted
    list, so a run like 0.80/0.79/0.78 at epsilon 0.01 forms one group even
    though its extremes differ by more.  Singletons are dropped.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    eps = Fraction(epsilon)
    groups: list[tuple[str, ...]] = []
    current: list[str] = []
    prev_chance: Fraction | None = None
    for disease_id, chance in diff.entries:
        if prev_chance is not None and abs(prev_chance - chance) <= eps:
            current.append(disease_id)
        else:
            if len(current) > 1:
                groups.append(tuple(current))
            current = [disease_id]
        prev_chance = chance
    if len(current) > 1:
        groups.append(tuple(current))
    return ConflictSet(groups=tuple(groups), epsilon=epsilon)


# ---------------------------------------------------------------------------
# Network construction


@dataclass(frozen=True)
class BnNode:
    id: str
    kind: str  # "history" | "disease" | "examination" | "investigation"
    outcomes: tuple
    attribute: str | None = None
    disease: str | None = None


@dataclass(frozen=True)
class BayesianNetwork:
    """Strictly layered DAG: history roots, disease layer, finding leaves."""

    history: tuple[BnNode, ...]
    diseases: tuple[BnNode, ...]
    examinations: tuple[BnNode, ...]
    investigations: tuple[BnNode, ...]
    cpts: ConditionalTables = field(default_factory=ConditionalTables)

    @property
    def findings(self) -> tuple[BnNode, ...]:
        return self.examinations + self.investigations

    @property
    def nodes(self) -> tuple[BnNode, ...]:
        return self.history + self.diseases + self.findings

    def node(self, node_id: str) -> BnNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def parents(self, node: BnNode) -> tuple[BnNode, ...]:
        if node.kind == "history":
            return ()
        if node.kind == "disease":
            return self.history
        return self.diseases

    def edge_count(self) -> int:
        return len(self.history) * len(self.diseases) + len(self.diseases) * len(
            self.findings
        )


def _node_id(kind: str, name: str) -> str:
    prefix = {"history": "h", "disease": "d", "examination": "g", "investigation": "i"}
    return f"{prefix[kind]}:{name}"


def construct_bn(
    patient: PatientInput,
    conflicted: Iterable[str],
    kb: KnowledgeBase,
) -> BayesianNetwork:
    """Build the tie-breaking network for one conflict group.

    Only the patient's non-empty slots become evidence nodes; CPT coverage
    for the nodes actually built is checked here so a missing table fails
    fast with its node and conditioning context.
    """
    wanted = set(conflicted)
    for disease_id in wanted:
        if not kb.has_disease(disease_id):
            raise UnknownDiseaseError(disease_id)
    disease_ids = tuple(d for d in kb.disease_ids if d in wanted)
    if len(disease_ids) < 2:
        raise ValueError("conflict resolution needs at least 2 diseases")

    cpts = kb.cpts
    layers: dict[str, list[BnNode]] = {
        "history": [],
        "examination": [],
        "investigation": [],
    }
    kind_by_phase = {
        Phase.HISTORY: "history",
        Phase.EXAMINATION: "examination",
        Phase.INVESTIGATION: "investigation",
    }
    for phase in PHASE_ORDER:
        findings = patient.findings(phase)
        kind = kind_by_phase[phase]
        for attr in kb.catalog.phase_attributes(phase):
            tokens = findings.get(attr.id)
            if not tokens:
                continue
            observed = assignment_key(tokens)
            if kind == "history":
                dist = cpts.priors.get(attr.id)
                if dist is None:
                    raise CptMissingError(_node_id(kind, attr.id), "priors")
                if observed not in dist:
                    raise CptMissingError(
                        _node_id(kind, attr.id), f"assignment {observed}"
                    )
                outcomes = tuple(sorted(dist))
            else:
                outcomes = None
                for disease_id in disease_ids:
                    dist = cpts.finding_given_disease.get((attr.id, disease_id, True))
                    if dist is None:
                        raise CptMissingError(
                            _node_id(kind, attr.id), f"{disease_id}=true"
                        )
                    if observed not in dist:
                        raise CptMissingError(
                            _node_id(kind, attr.id),
                            f"{disease_id}=true, assignment {observed}",
                        )
                    if outcomes is None:
                        outcomes = tuple(sorted(dist))
                    elif outcomes != tuple(sorted(dist)):
                        raise CptMissingError(
                            _node_id(kind, attr.id),
                            "inconsistent outcome sets across diseases",
                        )
            layers[kind].append(
                BnNode(
                    id=_node_id(kind, attr.id),
                    kind=kind,
                    outcomes=outcomes,
                    attribute=attr.id,
                )
            )
    if not (layers["history"] or layers["examination"] or layers["investigation"]):
        raise EvidenceError(
            f"patient {patient.patient_id!r} supplies no findings; "
            "nothing to condition on"
        )

    ctx = history_context(
        {n.attribute: _patient_assignment(patient, Phase.HISTORY, n.attribute)
         for n in layers["history"]}
    )
    disease_nodes = []
    for disease_id in disease_ids:
        contexts = cpts.disease_given_history.get(disease_id, {})
        if ctx not in contexts:
            raise CptMissingError(
                _node_id("disease", disease_id), _format_context(ctx)
            )
        disease_nodes.append(
            BnNode(
                id=_node_id("disease", disease_id),
                kind="disease",
                outcomes=(True, False),
                disease=disease_id,
            )
        )
    return BayesianNetwork(
        history=tuple(layers["history"]),
        diseases=tuple(disease_nodes),
        examinations=tuple(layers["examination"]),
        investigations=tuple(layers["investigation"]),
        cpts=cpts,
    )


def _patient_assignment(patient: PatientInput, phase: Phase, attribute: str) -> frozenset[str]:
    return patient.findings(phase).get(attribute, frozenset())


def _format_context(ctx) -> str:
    if not ctx:
        return "(empty history)"
    return ", ".join(f"{attr}={'+'.join(key)}" for attr, key in ctx)


def evidence_from_patient(patient: PatientInput) -> dict[str, AssignmentKey]:
    """Canonical assignment per non-empty patient attribute, all phases."""
    evidence: dict[str, AssignmentKey] = {}
    for phase in PHASE_ORDER:
        for attr, tokens in patient.findings(phase).items():
            evidence[attr] = assignment_key(tokens)
    return evidence


# ---------------------------------------------------------------------------
# Evaluation


def joint_probability(
    bn: BayesianNetwork,
    disease_id: str,
    evidence: Mapping[str, Iterable[str]],
) -> float:
    """Joint probability of the evidence with one candidate disease true.

    Product of: every history node's prior at its observed assignment, the
    candidate's probability given the full history assignment, and every
    finding node's likelihood given the candidate alone.
    """
    node_ids = {n.disease for n in bn.diseases}
    if disease_id not in node_ids:
        raise UnknownDiseaseError(disease_id)
    keys: dict[str, AssignmentKey] = {}
    for node in bn.history + bn.findings:
        if node.attribute not in evidence:
            raise EvidenceError(f"evidence missing for attribute {node.attribute!r}")
        keys[node.attribute] = assignment_key(evidence[node.attribute])

    result = 1.0
    for node in bn.history:
        dist = bn.cpts.priors.get(node.attribute)
        key = keys[node.attribute]
        if dist is None or key not in dist:
            raise CptMissingError(node.id, f"assignment {key}")
        result *= dist[key]
    ctx = history_context({n.attribute: keys[n.attribute] for n in bn.history})
    contexts = bn.cpts.disease_given_history.get(disease_id, {})
    if ctx not in contexts:
        raise CptMissingError(_node_id("disease", disease_id), _format_context(ctx))
    result *= contexts[ctx]
    for node in bn.findings:
        dist = bn.cpts.finding_given_disease.get((node.attribute, disease_id, True))
        key = keys[node.attribute]
        if dist is None or key not in dist:
            raise CptMissingError(node.id, f"{disease_id}=true, assignment {key}")
        result *= dist[key]
    return result


def _combined_finding_distribution(
    cpts: ConditionalTables,
    node: BnNode,
    disease_states: Sequence[tuple[str, bool]],
) -> Mapping[AssignmentKey, float]:
    """Finding distribution under a full disease-layer assignment.

    With exactly one disease true this is that disease's table verbatim;
    with several true it is their uniform mixture; with none true it is the
    uniform mixture of the false-state tables.  Every case stays normalized.
    """
    true_set = [d for d, s in disease_states if s]
    if true_set:
        tables = [(d, True) for d in true_set]
    else:
        tables = [(d, False) for d, _ in disease_states]
    dists = []
    for disease_id, state in tables:
        dist = cpts.finding_given_disease.get((node.attribute, disease_id, state))
        if dist is None:
            raise CptMissingError(node.id, f"{disease_id}={str(state).lower()}")
        dists.append(dist)
    outcomes = set(dists[0])
    if any(set(d) != outcomes for d in dists):
        raise CptMissingError(node.id, "inconsistent outcome sets")
    n = len(dists)
    return {key: sum(d[key] for d in dists) / n for key in dists[0]}


def brute_force_joint(
    bn: BayesianNetwork,
    assignment: Mapping[str, object],
    clamped: Iterable[str] = (),
) -> float:
    """Chain-rule product over every node: p(value | parent values).

    ``assignment`` maps node id to its value (an assignment key for
    attribute nodes, a bool for disease nodes) and must cover every node.
    Nodes listed in ``clamped`` are fixed from outside: they contribute no
    factor of their own but still condition their children.
    """
    clamped = set(clamped)
    for node in bn.nodes:
        if node.id not in assignment:
            raise EvidenceError(f"assignment missing for node {node.id!r}")
    disease_states = [(n.disease, bool(assignment[n.id])) for n in bn.diseases]
    hist_ctx = history_context(
        {n.attribute: assignment[n.id] for n in bn.history}
    )
    result = 1.0
    for node in bn.nodes:
        if node.id in clamped:
            continue
        if node.kind == "history":
            dist = bn.cpts.priors.get(node.attribute)
            key = assignment_key(assignment[node.id])
            if dist is None or key not in dist:
                raise CptMissingError(node.id, f"assignment {key}")
            result *= dist[key]
        elif node.kind == "disease":
            contexts = bn.cpts.disease_given_history.get(node.disease, {})
            if hist_ctx not in contexts:
                raise CptMissingError(node.id, _format_context(hist_ctx))
            p_true = contexts[hist_ctx]
            result *= p_true if assignment[node.id] else 1.0 - p_true
        else:
            dist = _combined_finding_distribution(bn.cpts, node, disease_states)
            key = assignment_key(assignment[node.id])
            if key not in dist:
                raise CptMissingError(node.id, f"assignment {key}")
            result *= dist[key]
    return result


def all_assignments(bn: BayesianNetwork):
    """Yield every complete assignment (node id -> value) of the network."""
    nodes = bn.nodes
    for combo in itertools.product(*(n.outcomes for n in nodes)):
        yield {node.id: value for node, value in zip(nodes, combo)}


# ---------------------------------------------------------------------------
# Resolution


@dataclass(frozen=True)
class ResolutionAudit:
    group: tuple[str, ...]
    joints: Mapping[str, float]
    order: tuple[str, ...]
    tie: bool


def resolve(
    diff: Differential,
    conflicts: ConflictSet,
    bns: Sequence[BayesianNetwork],
    evidence: Mapping[str, Iterable[str]],
) -> tuple[Differential, tuple[ResolutionAudit, ...]]:
    """Reorder each conflict group by descending joint probability.

    Chances are never altered and entries outside the groups keep their
    positions; the multiset of (disease, chance) pairs is preserved.  Equal
    joints keep the incoming order and flag the group as a tie.
    """
    if len(bns) != len(conflicts.groups):
        raise ValueError("one network per conflict group is required")
    entries = list(diff.entries)
    audits = []
    for group, bn in zip(conflicts.groups, bns):
        joints = {d: joint_probability(bn, d, evidence) for d in group}
        positions = [i for i, (d, _) in enumerate(entries) if d in group]
        by_chance = {d: c for d, c in diff.entries}
        reordered = sorted(group, key=lambda d: -joints[d])
        for pos, disease_id in zip(positions, reordered):
            entries[pos] = (disease_id, by_chance[disease_id])
        tie = len(set(joints.values())) < len(group)
        audits.append(
            ResolutionAudit(
                group=tuple(group),
                joints=joints,
                order=tuple(reordered),
                tie=tie,
            )
        )
    return Differential(entries=tuple(entries), divisor_used=diff.divisor_used), tuple(
        audits
    )
