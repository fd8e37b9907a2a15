"""Likelihood and posterior computation over disease trees.

The recursive likelihood walks a disease tree once per hypothesis: a caused
node passes causation down each link with the link's time-conditioned
strength, a broken link leaves the whole subtree to external causes, and a
symptom leaf combines in-tree causation with its base rate by noisy-OR
(present: q + b - q*b, absent: (1-q)(1-b), unknown contributes 1 so only
known symptoms move the numerator).  Pathstates are latent and binary; the
recursion marginalizes them analytically.

Everything is a pure function over an immutable knowledge base, so cases can
be evaluated concurrently without coordination.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DegeneratePriorError,
    InconsistentEvidenceError,
    NotCausedError,
    UnknownIdError,
)
from .kb_model import (
    ABSENT,
    FINDING_VALUES,
    PRESENT,
    SYMPTOM_REF,
    UNKNOWN,
    CausalNode,
    Curve,
    KnowledgeBase,
    PatientContext,
    descendant_symptoms,
    eval_priors,
)


@dataclass(frozen=True)
class FindingSet:
    """Observed symptom values at a single measurement time (hours since onset).

    Symptoms not listed are unknown.
    """

    findings: dict[str, str]
    measurement_time: float

    def __post_init__(self):
        for sym, v in self.findings.items():
            if v not in FINDING_VALUES:
                raise ValueError(f"finding value for '{sym}' must be one of {FINDING_VALUES}, got {v!r}")
        if self.measurement_time < 0:
            raise ValueError("measurement_time must be >= 0")

    def value(self, symptom_id: str) -> str:
        return self.findings.get(symptom_id, UNKNOWN)


@dataclass(frozen=True)
class PosteriorReport:
    posteriors: dict[str, float]
    decomposition: dict[str, dict[str, float]]  # disease -> prior/tree_likelihood/external_factor
    measurement_time: float
    first_time: float | None = None  # set for two-measurement reports

    def top(self) -> str:
        return max(self.posteriors, key=self.posteriors.get)


@dataclass(frozen=True)
class PatternProbabilities:
    """Two-measurement symptom history probabilities, oriented to (t1, t2)."""

    yes_yes: float
    yes_no: float
    no_yes: float
    no_no: float

    def as_dict(self) -> dict[str, float]:
        return {"yes_yes": self.yes_yes, "yes_no": self.yes_no,
                "no_yes": self.no_yes, "no_no": self.no_no}


def base_rates(kb: KnowledgeBase, patient: PatientContext) -> dict[str, float]:
    """External-cause probability per symptom for this patient's sex and age."""
    rates = {}
    for s in kb.symptoms:
        c = s.base_rate.get(patient.sex)
        rates[s.id] = c.at(patient.age) if c is not None else 0.0
    return rates


def _check_findings(kb: KnowledgeBase, findings: FindingSet) -> None:
    for sym in findings.findings:
        if sym not in kb.symptom_by_id:
            raise UnknownIdError(f"unknown symptom id '{sym}' in findings")


def _subtree_all_clear(node: CausalNode, findings: FindingSet) -> float:
    # Probability of the observed subtree configuration when nothing in it can
    # be caused and there are no external causes: 1 unless something is present.
    if node.kind == SYMPTOM_REF:
        return 0.0 if findings.value(node.symptom_id) == PRESENT else 1.0
    for _link, child in node.children:
        if _subtree_all_clear(child, findings) == 0.0:
            return 0.0
    return 1.0


def hood_basic(node: CausalNode, findings: FindingSet, t: float) -> float:
    """Likelihood of the observed descendant configuration given `node` caused,
    with no external causes: a broken link forces the whole subtree absent.
    """
    acc = 1.0
    for link, child in node.children:
        q = link.at(t)
        if child.kind == SYMPTOM_REF:
            v = findings.value(child.symptom_id)
            if v == PRESENT:
                acc *= q
            elif v == ABSENT:
                acc *= 1.0 - q
        else:
            acc *= q * hood_basic(child, findings, t) + (1.0 - q) * _subtree_all_clear(child, findings)
    return acc


def external_only_likelihood(
    symptom_ids,
    findings: FindingSet,
    kb: KnowledgeBase,
    patient: PatientContext,
) -> float:
    """Probability of the listed symptoms' observed values from base rates alone."""
    rates = base_rates(kb, patient)
    return _external_only(symptom_ids, findings, rates)


def _external_only(symptom_ids, findings: FindingSet, rates: dict[str, float]) -> float:
    acc = 1.0
    for sym in symptom_ids:
        if sym not in rates:
            raise UnknownIdError(f"unknown symptom id '{sym}'")
        v = findings.value(sym)
        b = rates[sym]
        if v == PRESENT:
            acc *= b
        elif v == ABSENT:
            acc *= 1.0 - b
    return acc


def hood_rev(
    node: CausalNode,
    findings: FindingSet,
    t: float,
    kb: KnowledgeBase,
    patient: PatientContext,
) -> float:
    """Revised likelihood: every break in the causal chain leaves the symptoms
    below it to their external causes, and symptom leaves combine both routes
    by noisy-OR.
    """
    return _hood_rev(node, findings, t, base_rates(kb, patient))


def _hood_rev(node: CausalNode, findings: FindingSet, t: float, rates: dict[str, float]) -> float:
    acc = 1.0
    for link, child in node.children:
        q = link.at(t)
        if child.kind == SYMPTOM_REF:
            v = findings.value(child.symptom_id)
            b = rates[child.symptom_id]
            if v == PRESENT:
                acc *= q + b - q * b
            elif v == ABSENT:
                acc *= (1.0 - q) * (1.0 - b)
        else:
            caused = _hood_rev(child, findings, t, rates)
            broken = _external_only(descendant_symptoms(child), findings, rates)
            acc *= q * caused + (1.0 - q) * broken
    return acc


def posterior(
    kb: KnowledgeBase,
    patient: PatientContext,
    findings: FindingSet,
    priors: dict[str, float] | None = None,
) -> PosteriorReport:
    """Normalized disease posteriors with a per-disease factor decomposition.

    `priors` overrides the patient-conditioned priors (values are normalized;
    diseases left out get prior zero), which is how a known case mix is
    described to the model.
    """
    _check_findings(kb, findings)
    t = findings.measurement_time
    pri = _effective_priors(kb, patient, priors)
    rates = base_rates(kb, patient)

    numerators: dict[str, float] = {}
    decomposition: dict[str, dict[str, float]] = {}
    for d in kb.diseases:
        in_tree = set(descendant_symptoms(d.tree))
        tree_l = _hood_rev(d.tree, findings, t, rates)
        ext = _external_only((s.id for s in kb.symptoms if s.id not in in_tree), findings, rates)
        numerators[d.id] = pri[d.id] * tree_l * ext
        decomposition[d.id] = {
            "prior": pri[d.id],
            "tree_likelihood": tree_l,
            "external_factor": ext,
        }
    total = sum(numerators.values())
    if total <= 0.0:
        raise InconsistentEvidenceError(
            "every disease assigns zero probability to these findings"
        )
    return PosteriorReport(
        posteriors={k: v / total for k, v in numerators.items()},
        decomposition=decomposition,
        measurement_time=t,
    )


def _effective_priors(
    kb: KnowledgeBase, patient: PatientContext, priors: dict[str, float] | None
) -> dict[str, float]:
    if priors is None:
        return eval_priors(kb, patient)
    for dis in priors:
        if dis not in kb.disease_by_id:
            raise UnknownIdError(f"prior override for unknown disease '{dis}'")
    total = sum(priors.values())
    if total <= 0.0:
        raise DegeneratePriorError("prior override sums to zero")
    return {d.id: priors.get(d.id, 0.0) / total for d in kb.diseases}


def path_likelihood(kb: KnowledgeBase, disease_id: str, symptom_id: str, t: float) -> float:
    """Product of link strengths along the unique root-to-symptom path at `t`."""
    d = kb.disease_by_id.get(disease_id)
    if d is None:
        raise UnknownIdError(f"unknown disease id '{disease_id}'")
    prod = _path_product(d.tree, symptom_id, t)
    if prod is None:
        raise NotCausedError(f"symptom '{symptom_id}' is not caused by '{disease_id}'")
    return prod


def _path_product(node: CausalNode, symptom_id: str, t: float) -> float | None:
    for link, child in node.children:
        q = link.at(t)
        if child.kind == SYMPTOM_REF:
            if child.symptom_id == symptom_id:
                return q
        else:
            below = _path_product(child, symptom_id, t)
            if below is not None:
                return q * below
    return None


@dataclass(frozen=True)
class CoherencyRow:
    symptom_id: str
    t: float
    model_p: float
    direct_p: float
    delta: float  # model - direct


def coherency_report(
    kb: KnowledgeBase,
    disease_id: str,
    grid=(0.0, 24.0, 72.0, 132.0),
    tol: float = 0.05,
) -> list[CoherencyRow]:
    """Discrepancies between path-product likelihoods and the directly elicited
    symptom curves, worst first; empty when the disease has no direct curves.
    """
    d = kb.disease_by_id.get(disease_id)
    if d is None:
        raise UnknownIdError(f"unknown disease id '{disease_id}'")
    rows: list[CoherencyRow] = []
    for sym_id, direct in d.direct_likelihoods.items():
        for t in grid:
            model_p = path_likelihood(kb, disease_id, sym_id, t)
            direct_p = direct.at(t)
            delta = model_p - direct_p
            if abs(delta) > tol:
                rows.append(CoherencyRow(sym_id, t, model_p, direct_p, delta))
    rows.sort(key=lambda r: -abs(r.delta))
    return rows


def temporal_pattern_probs(q_t1: float, q_t2: float) -> PatternProbabilities:
    """Probabilities of the four two-measurement histories of one link.

    Causation at the less likely time implies causation at the more likely
    time, so the history observed only at the less likely time is impossible.
    """
    lo, hi = min(q_t1, q_t2), max(q_t1, q_t2)
    if q_t1 <= q_t2:
        return PatternProbabilities(yes_yes=lo, yes_no=0.0, no_yes=hi - lo, no_no=1.0 - hi)
    return PatternProbabilities(yes_yes=lo, yes_no=hi - lo, no_yes=0.0, no_no=1.0 - hi)


# Two-time causal states are (caused at t1, caused at t2) pairs.
def _link_pattern(q1: float, q2: float) -> dict[tuple[int, int], float]:
    p = temporal_pattern_probs(q1, q2)
    return {(1, 1): p.yes_yes, (1, 0): p.yes_no, (0, 1): p.no_yes, (0, 0): p.no_no}


def _child_state_dist(q1: float, q2: float, s1: int, s2: int) -> dict[tuple[int, int], float]:
    # Child is caused at a time iff the parent is caused then AND the link fires then.
    if s1 and s2:
        return _link_pattern(q1, q2)
    if s1:
        return {(1, 0): q1, (0, 0): 1.0 - q1}
    if s2:
        return {(0, 1): q2, (0, 0): 1.0 - q2}
    return {(0, 0): 1.0}


def _matches(v: str, present: int) -> bool:
    if v == UNKNOWN:
        return True
    return (v == PRESENT) == bool(present)


def _leaf_two_time(v1: str, v2: str, s1: int, s2: int, b: float) -> float:
    # External causes persist: present at both times (prob b) or neither.
    like = 0.0
    if _matches(v1, s1 or 1) and _matches(v2, s2 or 1):
        like += b
    if _matches(v1, s1) and _matches(v2, s2):
        like += 1.0 - b
    return like


def _hood_two_time(
    node: CausalNode,
    s1: int,
    s2: int,
    f1: FindingSet,
    f2: FindingSet,
    rates: dict[str, float],
) -> float:
    t1, t2 = f1.measurement_time, f2.measurement_time
    acc = 1.0
    for link, child in node.children:
        dist = _child_state_dist(link.at(t1), link.at(t2), s1, s2)
        total = 0.0
        for (c1, c2), w in dist.items():
            if w == 0.0:
                continue
            if child.kind == SYMPTOM_REF:
                sym = child.symptom_id
                total += w * _leaf_two_time(
                    f1.value(sym), f2.value(sym), c1, c2, rates[sym]
                )
            else:
                total += w * _hood_two_time(child, c1, c2, f1, f2, rates)
        acc *= total
    return acc


def two_time_posterior(
    kb: KnowledgeBase,
    patient: PatientContext,
    findings_t1: FindingSet,
    findings_t2: FindingSet,
    priors: dict[str, float] | None = None,
) -> PosteriorReport:
    """Posterior from two measurement times.

    Link histories follow the implication coupling of `temporal_pattern_probs`,
    external causes persist across both times, and the observed value at each
    time is caused-then OR external-then.
    """
    if not findings_t1.measurement_time < findings_t2.measurement_time:
        raise ValueError("first measurement must be strictly earlier than the second")
    _check_findings(kb, findings_t1)
    _check_findings(kb, findings_t2)
    pri = _effective_priors(kb, patient, priors)
    rates = base_rates(kb, patient)

    numerators: dict[str, float] = {}
    decomposition: dict[str, dict[str, float]] = {}
    for d in kb.diseases:
        in_tree = set(descendant_symptoms(d.tree))
        tree_l = _hood_two_time(d.tree, 1, 1, findings_t1, findings_t2, rates)
        ext = 1.0
        for s in kb.symptoms:
            if s.id in in_tree:
                continue
            ext *= _leaf_two_time(
                findings_t1.value(s.id), findings_t2.value(s.id), 0, 0, rates[s.id]
            )
        numerators[d.id] = pri[d.id] * tree_l * ext
        decomposition[d.id] = {
            "prior": pri[d.id],
            "tree_likelihood": tree_l,
            "external_factor": ext,
        }
    total = sum(numerators.values())
    if total <= 0.0:
        raise InconsistentEvidenceError(
            "every disease assigns zero probability to this pair of measurements"
        )
    return PosteriorReport(
        posteriors={k: v / total for k, v in numerators.items()},
        decomposition=decomposition,
        measurement_time=findings_t2.measurement_time,
        first_time=findings_t1.measurement_time,
    )
