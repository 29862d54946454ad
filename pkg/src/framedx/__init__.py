"""framedx: frame-based diagnostic inference with probabilistic tie-breaking."""

from .bayes import (
    BayesianNetwork,
    BnNode,
    ConflictSet,
    all_assignments,
    brute_force_joint,
    construct_bn,
    detect_conflicts,
    evidence_from_patient,
    joint_probability,
    resolve,
)
from .errors import (
    CaseInputError,
    CptMissingError,
    EvidenceError,
    FramedxError,
    KBInvariantError,
    KBParseError,
    KBSchemaError,
    PhaseNotPerformedError,
    UnknownDiseaseError,
    UnknownPhaseError,
)
from .evaluation import (
    ChiSquareResult,
    ContingencyTable,
    OutcomePair,
    PrfReport,
    build_contingency,
    chi_square,
    expected_frequencies,
    harmonic_accuracy,
    homogeneity_verdict,
    observed_chances,
    parse_outcome_lines,
    parse_outcome_pair,
    prf_metrics,
    standard_deviation,
)
from .inference import (
    Differential,
    MatchClass,
    MatchCell,
    MatchMatrix,
    PatientInput,
    PhaseDiseaseList,
    classify_match,
    match_phase,
    match_strength,
    parse_case,
    provisional_diagnosis,
)
from .kb import (
    AttributeCatalog,
    AttributeDef,
    ConditionalTables,
    DiseaseProfile,
    KnowledgeBase,
    Phase,
    ProductionRule,
    ValidationReport,
    WeightedSlot,
    export_rules,
    load_kb,
    load_kb_file,
    traverse,
    validate_kb,
)
from .pipeline import DEFAULT_EPSILON, DiagnosisReport, diagnose, render_json, report_payload

__version__ = "0.1.0"
