from __future__ import annotations

import json
from pathlib import Path

import pytest

from framedx import load_kb_file, parse_case

DATA_DIR = Path(__file__).parent / "data"

SIJA_KB_PATH = DATA_DIR / "sija_kb.json"
CONFLICT_KB_PATH = DATA_DIR / "lbp_conflict_kb.json"
CONFLICT_CASE_PATH = DATA_DIR / "lbp_conflict_case.json"
STUDY_TABLES_PATH = DATA_DIR / "study_tables.json"
OUTCOME_PAIRS_PATH = DATA_DIR / "outcome_pairs.jsonl"


@pytest.fixture(scope="session")
def sija_kb():
    return load_kb_file(SIJA_KB_PATH)


@pytest.fixture(scope="session")
def conflict_kb():
    return load_kb_file(CONFLICT_KB_PATH)


@pytest.fixture(scope="session")
def conflict_case(conflict_kb):
    doc = CONFLICT_CASE_PATH.read_text(encoding="utf-8")
    return parse_case(doc, conflict_kb.catalog)


@pytest.fixture()
def sija_kb_dict():
    return json.loads(SIJA_KB_PATH.read_text(encoding="utf-8"))


@pytest.fixture()
def conflict_kb_dict():
    return json.loads(CONFLICT_KB_PATH.read_text(encoding="utf-8"))


def sija_history_case(patient_id="pt-1", site=("buttock", "groin"),
                      worsening=("supine",), bowel=("normal",)) -> dict:
    phases: dict = {"history": {}}
    if site:
        phases["history"]["site_of_pain"] = list(site)
    if worsening:
        phases["history"]["pain_worsening_factors"] = list(worsening)
    if bowel:
        phases["history"]["bowel_bladder_habit"] = list(bowel)
    return {"patient_id": patient_id, "phases": phases}
