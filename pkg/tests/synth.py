"""Synthetic KBs, patients, and networks for oracle-based testing."""

from __future__ import annotations

from fractions import Fraction
from random import Random

from framedx.bayes import BayesianNetwork, BnNode
from framedx.kb import (
    PHASE_ORDER,
    AttributeCatalog,
    AttributeDef,
    ConditionalTables,
    DiseaseProfile,
    KnowledgeBase,
    Phase,
    WeightedSlot,
    build_index,
    history_context,
)
from framedx.inference import PatientInput


def random_catalog(rng: Random, max_attrs_per_phase: int = 6, max_tokens: int = 5) -> AttributeCatalog:
    attrs = []
    for phase in PHASE_ORDER:
        for i in range(rng.randint(1, max_attrs_per_phase)):
            attr_id = f"{phase.value[:4]}_a{i}"
            tokens = tuple(f"{attr_id}_v{j}" for j in range(rng.randint(1, max_tokens)))
            attrs.append(
                AttributeDef(
                    id=attr_id,
                    phase=phase,
                    allowed_values=tokens,
                    multi_valued=rng.random() < 0.7,
                )
            )
    return AttributeCatalog(attributes=tuple(attrs))


def random_kb(
    rng: Random,
    max_diseases: int = 5,
    max_attrs_per_phase: int = 6,
    max_values_per_slot: int = 4,
) -> KnowledgeBase:
    catalog = random_catalog(rng, max_attrs_per_phase=max_attrs_per_phase)
    disease_count = rng.randint(1, max_diseases)
    diseases = []
    for k in range(disease_count):
        frames = {}
        for phase in PHASE_ORDER:
            phase_attrs = catalog.phase_attributes(phase)
            n_slots = len(phase_attrs)
            slots = []
            for attr in phase_attrs:
                if rng.random() < 0.25:
                    slots.append(WeightedSlot(attr.id, (), 0))
                    continue
                m = rng.randint(1, min(max_values_per_slot, len(attr.allowed_values)))
                tokens = rng.sample(attr.allowed_values, m)
                values = tuple((t, rng.randint(1, m)) for t in tokens)
                slots.append(
                    WeightedSlot(attr.id, values, rng.randint(1, n_slots))
                )
            frames[phase] = tuple(slots)
        diseases.append(
            DiseaseProfile(disease_id=f"dz{k}", display_name=f"Disease {k}", frames=frames)
        )
    root, sub_roots = build_index(d.disease_id for d in diseases)
    return KnowledgeBase(
        catalog=catalog,
        diseases=tuple(diseases),
        root=root,
        sub_roots=sub_roots,
        cpts=ConditionalTables(),
    )


def random_findings(rng: Random, catalog: AttributeCatalog, phase: Phase) -> dict[str, list[str]]:
    findings: dict[str, list[str]] = {}
    for attr in catalog.phase_attributes(phase):
        if rng.random() >= 0.7:
            continue
        limit = min(3, len(attr.allowed_values)) if attr.multi_valued else 1
        count = rng.randint(1, limit)
        findings[attr.id] = rng.sample(attr.allowed_values, count)
    return findings


def random_case_dict(rng: Random, catalog: AttributeCatalog, patient_id: str) -> dict:
    performed = [p for p in PHASE_ORDER if rng.random() < 0.8]
    if not performed:
        performed = [Phase.HISTORY]
    return {
        "patient_id": patient_id,
        "phases": {p.value: random_findings(rng, catalog, p) for p in performed},
    }


def random_patient(rng: Random, catalog: AttributeCatalog, patient_id: str = "pt") -> PatientInput:
    case = random_case_dict(rng, catalog, patient_id)
    phase_inputs = {
        Phase(p): tuple((a, frozenset(tokens)) for a, tokens in findings.items() if tokens)
        for p, findings in case["phases"].items()
    }
    return PatientInput(
        patient_id=patient_id,
        phase_inputs=phase_inputs,
        phases_performed=frozenset(phase_inputs),
    )


def brute_force_phase_scores(
    kb: KnowledgeBase, patient: PatientInput, phase: Phase
) -> tuple[tuple[str, Fraction], ...]:
    """Independent scorer straight off the raw frames (no match matrix)."""
    findings = patient.findings(phase)
    scores = []
    for profile in kb.diseases:
        ts = 0
        ls = 0
        matched_any = False
        for slot in profile.frame(phase):
            if slot.is_empty:
                continue
            ts += slot.max_weight() * slot.significance
            overlap = findings.get(slot.attribute_id, frozenset()) & slot.tokens()
            if overlap:
                matched_any = True
                ls += max(slot.weight_of(t) for t in overlap) * slot.significance
        if matched_any and ts > 0 and ls > 0:
            scores.append((profile.disease_id, Fraction(ls, ts)))
    return tuple(scores)


# ---------------------------------------------------------------------------
# Fully-specified binary networks for enumeration tests


def _rand_binary_dist(rng: Random, outcomes) -> dict:
    p = round(rng.uniform(0.05, 0.95), 3)
    return {outcomes[0]: p, outcomes[1]: 1.0 - p}


def random_binary_network(
    rng: Random, n_h: int, n_d: int, n_g: int, n_i: int
) -> BayesianNetwork:
    """Layered network of binary nodes with complete probability tables."""
    outcomes = (("neg",), ("pos",))
    h_attrs = [f"h{i}" for i in range(n_h)]
    g_attrs = [f"g{i}" for i in range(n_g)]
    i_attrs = [f"i{i}" for i in range(n_i)]
    disease_ids = [f"d{i}" for i in range(n_d)]

    priors = {attr: _rand_binary_dist(rng, outcomes) for attr in h_attrs}

    def contexts():
        def expand(idx):
            if idx == len(h_attrs):
                yield {}
                return
            for rest in expand(idx + 1):
                for value in outcomes:
                    ctx = dict(rest)
                    ctx[h_attrs[idx]] = value
                    yield ctx
        yield from expand(0)

    disease_given_history = {
        d: {history_context(ctx): round(rng.uniform(0.05, 0.95), 3) for ctx in contexts()}
        for d in disease_ids
    }
    finding = {}
    for attr in g_attrs + i_attrs:
        for d in disease_ids:
            for state in (True, False):
                finding[(attr, d, state)] = _rand_binary_dist(rng, outcomes)
    cpts = ConditionalTables(
        priors=priors,
        disease_given_history=disease_given_history,
        finding_given_disease=finding,
    )
    return BayesianNetwork(
        history=tuple(
            BnNode(id=f"h:{a}", kind="history", outcomes=outcomes, attribute=a)
            for a in h_attrs
        ),
        diseases=tuple(
            BnNode(id=f"d:{d}", kind="disease", outcomes=(True, False), disease=d)
            for d in disease_ids
        ),
        examinations=tuple(
            BnNode(id=f"g:{a}", kind="examination", outcomes=outcomes, attribute=a)
            for a in g_attrs
        ),
        investigations=tuple(
            BnNode(id=f"i:{a}", kind="investigation", outcomes=outcomes, attribute=a)
            for a in i_attrs
        ),
        cpts=cpts,
    )
