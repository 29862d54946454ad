"""Exception types shared across the engine."""

from __future__ import annotations


class FramedxError(Exception):
    """Base class for all framedx errors."""


class KBParseError(FramedxError):
    """The knowledge-base document is not well-formed (not valid JSON)."""


class KBSchemaError(FramedxError):
    """The document parsed but a required field is missing or mistyped."""


class KBInvariantError(FramedxError):
    """A structural invariant of the knowledge base is violated.

    Carries the full validation report so callers can list every
    violation with its path.
    """

    def __init__(self, report) -> None:
        self.report = report
        first = report.violations[0] if report.violations else None
        detail = f"{first.path}: {first.message}" if first else "invalid knowledge base"
        extra = len(report.violations) - 1
        if extra > 0:
            detail += f" (+{extra} more)"
        super().__init__(detail)


class UnknownDiseaseError(FramedxError):
    def __init__(self, disease_id: str) -> None:
        self.disease_id = disease_id
        super().__init__(f"unknown disease: {disease_id!r}")


class UnknownPhaseError(FramedxError):
    def __init__(self, phase: object) -> None:
        self.phase = phase
        super().__init__(f"unknown phase: {phase!r}")


class PhaseNotPerformedError(FramedxError):
    def __init__(self, phase, patient_id: str) -> None:
        self.phase = phase
        self.patient_id = patient_id
        super().__init__(f"phase {phase} was not performed for patient {patient_id!r}")


class CaseInputError(FramedxError):
    """Patient findings rejected at the door (closed-world catalog).

    ``attribute``/``value``/``allowed`` are filled in when the problem is a
    specific token, so shells can echo the legal choices back to the user.
    """

    def __init__(
        self,
        message: str,
        attribute: str | None = None,
        value: str | None = None,
        allowed: list[str] | None = None,
    ) -> None:
        self.attribute = attribute
        self.value = value
        self.allowed = allowed
        super().__init__(message)


class CptMissingError(FramedxError):
    """A conditional-probability lookup has no entry for the given context."""

    def __init__(self, node: str, context: str) -> None:
        self.node = node
        self.context = context
        super().__init__(f"no conditional probability for {node} given {context}")


class EvidenceError(FramedxError):
    """Evidence is missing, incomplete, or inconsistent with the network."""
