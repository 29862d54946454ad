"""Consultation sessions and the append-only case store.

A session accumulates one patient's findings phase by phase, recomputing
the differential after every submission.  Finalizing freezes the session
into an immutable case record appended to a JSON-lines store, which is the
audit trail for later replay.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FramedxError
from .inference import PatientInput, parse_case
from .kb import PHASE_ORDER, KnowledgeBase, Phase, parse_phase
from .pipeline import DEFAULT_EPSILON, DiagnosisReport, diagnose, report_payload


class SessionNotFoundError(FramedxError):
    def __init__(self, session_id: str) -> None:
        self.session_id = session_id
        super().__init__(f"unknown session: {session_id!r}")


class PhaseOrderError(FramedxError):
    """Submission violates the history -> examination -> investigation order."""


@dataclass
class ConsultationSession:
    session_id: str
    patient_id: str
    created_at: float
    updated_at: float
    findings: dict[Phase, dict[str, list[str]]] = field(default_factory=dict)
    report: DiagnosisReport | None = None
    finalized_record_id: str | None = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def phase_status(self) -> dict[str, str]:
        return {
            p.value: "submitted" if p in self.findings else "pending"
            for p in PHASE_ORDER
        }

    def case_document(self) -> dict:
        return {
            "patient_id": self.patient_id,
            "phases": {
                p.value: dict(self.findings[p]) for p in PHASE_ORDER if p in self.findings
            },
        }


class CaseStore:
    """Append-only JSON-lines store of finalized case records."""

    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.path = self.directory / "cases.jsonl"
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        line = json.dumps(record, ensure_ascii=False, separators=(",", ":"))
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()

    def records(self) -> list[dict]:
        if not self.path.exists():
            return []
        with open(self.path, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]

    def lookup(
        self, record_id: str | None = None, patient_id: str | None = None,
        session_id: str | None = None,
    ) -> list[dict]:
        found = []
        for record in self.records():
            if record_id is not None and record.get("record_id") != record_id:
                continue
            if patient_id is not None and record.get("patient_id") != patient_id:
                continue
            if session_id is not None and record.get("session_id") != session_id:
                continue
            found.append(record)
        return found


class SessionManager:
    """Serialized per-session operations over a shared immutable KB."""

    def __init__(
        self,
        kb: KnowledgeBase,
        store: CaseStore | None = None,
        epsilon: float = DEFAULT_EPSILON,
    ) -> None:
        self.kb = kb
        self.store = store
        self.epsilon = epsilon
        self._sessions: dict[str, ConsultationSession] = {}
        self._registry_lock = threading.Lock()

    def create(self, patient_id: str) -> ConsultationSession:
        now = time.time()
        session = ConsultationSession(
            session_id=uuid.uuid4().hex,
            patient_id=patient_id,
            created_at=now,
            updated_at=now,
        )
        with self._registry_lock:
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> ConsultationSession:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise SessionNotFoundError(session_id)
        return session

    def submit_phase(
        self, session_id: str, phase: Phase, findings: dict[str, list[str]]
    ) -> DiagnosisReport:
        """Record one phase's findings and recompute the differential.

        First submissions must respect phase order (later phases may be
        skipped, earlier ones may not be back-filled); re-submitting a phase
        replaces it.
        """
        phase = parse_phase(phase)
        session = self.get(session_id)
        with session.lock:
            if session.finalized_record_id is not None:
                raise PhaseOrderError("session is finalized; no further submissions")
            if phase not in session.findings:
                self._check_order(session, phase)
            candidate = dict(session.findings)
            candidate[phase] = dict(findings)
            patient = self._parse(session.patient_id, candidate)
            report = diagnose(self.kb, patient, self.epsilon)
            session.findings = candidate
            session.report = report
            session.updated_at = time.time()
            return report

    def _check_order(self, session: ConsultationSession, phase: Phase) -> None:
        order = list(PHASE_ORDER)
        idx = order.index(phase)
        if phase is not Phase.HISTORY and Phase.HISTORY not in session.findings:
            raise PhaseOrderError(
                f"submit {Phase.HISTORY.value} before {phase.value}"
            )
        for later in order[idx + 1:]:
            if later in session.findings:
                raise PhaseOrderError(
                    f"cannot submit {phase.value} after {later.value}"
                )

    def _parse(self, patient_id: str, findings: dict[Phase, dict[str, list[str]]]) -> PatientInput:
        document = {
            "patient_id": patient_id,
            "phases": {p.value: findings[p] for p in PHASE_ORDER if p in findings},
        }
        return parse_case(document, self.kb.catalog)

    def differential_payload(self, session_id: str) -> dict:
        session = self.get(session_id)
        with session.lock:
            if session.report is None:
                raise PhaseOrderError("no phase submitted yet")
            return report_payload(session.report, self.kb)

    def finalize(self, session_id: str) -> dict:
        """Freeze the session into an immutable case record."""
        session = self.get(session_id)
        with session.lock:
            if session.report is None:
                raise PhaseOrderError("cannot finalize before any submission")
            if session.finalized_record_id is not None:
                raise PhaseOrderError("session is already finalized")
            record = {
                "record_id": uuid.uuid4().hex,
                "session_id": session.session_id,
                "patient_id": session.patient_id,
                "finalized_at": time.time(),
                "findings": session.case_document()["phases"],
                "differential": report_payload(session.report, self.kb),
            }
            if self.store is not None:
                self.store.append(record)
            session.finalized_record_id = record["record_id"]
            session.updated_at = time.time()
            return record
