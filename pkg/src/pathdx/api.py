"""Wire-level request handling shared by the CLI and the HTTP service.

`handle_infer` is a pure function of (knowledge base, request dict); schema
violations raise SchemaError (400), domain failures raise DiagnosisError
subclasses (422).
"""

from __future__ import annotations

from .decision import recommend
from .errors import SchemaError
from .inference import FindingSet, PosteriorReport, posterior, two_time_posterior
from .kb_model import FINDING_VALUES, SEXES, KnowledgeBase, PatientContext, eval_priors


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise SchemaError(message)


def _parse_patient(doc) -> PatientContext:
    _require(isinstance(doc, dict), "patient must be an object")
    _require("age" in doc, "patient.age is required")
    _require(isinstance(doc["age"], (int, float)) and not isinstance(doc["age"], bool),
             "patient.age must be a number")
    _require(0 <= doc["age"] <= 120, "patient.age must be in [0, 120]")
    _require(doc.get("sex") in SEXES, "patient.sex must be 'male' or 'female'")
    cycle = doc.get("cycle_day")
    if cycle is not None:
        _require(isinstance(cycle, int) and 1 <= cycle <= 28, "patient.cycle_day must be 1..28")
        _require(doc["sex"] == "female", "patient.cycle_day requires sex female")
    return PatientContext(age=float(doc["age"]), sex=doc["sex"], cycle_day=cycle)


def _parse_findings(items, default_time: float, label: str) -> FindingSet:
    _require(isinstance(items, list), f"{label} must be a list")
    values: dict[str, str] = {}
    time = None
    for item in items:
        _require(isinstance(item, dict), f"{label} entries must be objects")
        sym = item.get("symptom_id")
        _require(isinstance(sym, str) and sym != "", f"{label}: symptom_id is required")
        _require(item.get("value") in FINDING_VALUES,
                 f"{label}: value must be one of {list(FINDING_VALUES)}")
        _require(sym not in values, f"{label}: duplicate symptom_id '{sym}'")
        values[sym] = item["value"]
        if "time" in item and item["time"] is not None:
            t = item["time"]
            _require(isinstance(t, (int, float)) and not isinstance(t, bool) and t >= 0,
                     f"{label}: time must be a number >= 0")
            _require(time is None or time == float(t),
                     f"{label}: all entries of one measurement must share a time")
            time = float(t)
    return FindingSet(findings=values, measurement_time=time if time is not None else default_time)


def parse_infer_request(payload) -> tuple[PatientContext, FindingSet, FindingSet | None, dict | None]:
    _require(isinstance(payload, dict), "request body must be a JSON object")
    patient = _parse_patient(payload.get("patient"))
    onset = payload.get("onset_time", 0.0)
    _require(isinstance(onset, (int, float)) and not isinstance(onset, bool) and onset >= 0,
             "onset_time must be a number >= 0")
    patient = PatientContext(patient.age, patient.sex, patient.cycle_day, float(onset))
    first = _parse_findings(payload.get("findings", []), float(onset), "findings")
    second = None
    if payload.get("second") is not None:
        block = payload["second"]
        _require(isinstance(block, dict), "second must be an object")
        t2 = block.get("time")
        _require(isinstance(t2, (int, float)) and not isinstance(t2, bool) and t2 >= 0,
                 "second.time must be a number >= 0")
        second = _parse_findings(block.get("findings", []), float(t2), "second.findings")
        _require(second.measurement_time == float(t2) or not block.get("findings"),
                 "second.findings times must match second.time")
        second = FindingSet(second.findings, float(t2))
        _require(first.measurement_time < second.measurement_time,
                 "second.time must be after the first measurement time")
    priors = payload.get("priors_override")
    if priors is not None:
        _require(isinstance(priors, dict) and priors, "priors_override must be a non-empty object")
        for k, v in priors.items():
            _require(isinstance(v, (int, float)) and not isinstance(v, bool) and v >= 0,
                     f"priors_override['{k}'] must be a number >= 0")
        priors = {k: float(v) for k, v in priors.items()}
    return patient, first, second, priors


def _report_dict(report: PosteriorReport) -> dict:
    doc = {
        "posteriors": report.posteriors,
        "decomposition": report.decomposition,
        "measurement_time": report.measurement_time,
    }
    if report.first_time is not None:
        doc["first_time"] = report.first_time
    return doc


def handle_infer(kb: KnowledgeBase, payload) -> dict:
    """InferRequest dict -> InferResponse dict (posterior + treatment block)."""
    patient, first, second, priors = parse_infer_request(payload)
    if second is None:
        report = posterior(kb, patient, first, priors=priors)
    else:
        report = two_time_posterior(kb, patient, first, second, priors=priors)

    assessment = recommend(report.posteriors, kb.utilities, threshold_disease=report.top())
    if priors is not None:
        total = sum(priors.values())
        effective = {d.id: priors.get(d.id, 0.0) / total for d in kb.diseases}
    else:
        effective = eval_priors(kb, patient)

    doc = _report_dict(report)
    doc["decision"] = {
        "expected_morbidity": assessment.expected_morbidity,
        "recommendation": assessment.recommendation,
        "margin": assessment.margin,
        "switch_threshold": assessment.switch_threshold,
        "threshold_disease": assessment.threshold_disease,
    }
    doc["priors"] = effective
    return doc
