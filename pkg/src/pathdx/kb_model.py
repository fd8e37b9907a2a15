"""Domain model for the causal diagnostic knowledge base.

A knowledge base holds a shared symptom registry (with per-sex, per-age
external-cause base rates), one causal tree per disease (root -> latent
pathstates -> symptom leaves, each edge carrying a time-conditioned link
curve), patient-conditioned priors, and a morbidity utility table for the
two treatment options.

Everything here is an immutable value object; construction never validates
beyond basic shape, `validate_kb` produces a full located report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

from .errors import DegeneratePriorError

SEXES = ("male", "female")
TREATMENTS = ("symptomatic", "operation")

PRESENT = "present"
ABSENT = "absent"
UNKNOWN = "unknown"
FINDING_VALUES = (PRESENT, ABSENT, UNKNOWN)

DISEASE_ROOT = "disease-root"
PATHSTATE = "pathstate"
SYMPTOM_REF = "symptom-ref"

# Elicited curve domains: link strengths over hours since onset, base rates
# and priors over age in years, cycle weights over day of menstrual cycle.
LINK_TIME_DOMAIN = (0.0, 132.0)
AGE_DOMAIN = (0.0, 120.0)
CYCLE_DOMAIN = (1.0, 28.0)


@dataclass(frozen=True)
class Curve:
    """Piecewise-linear curve through (x, p) breakpoints, x strictly increasing.

    Evaluation clamps to the end values outside the drawn range, so a late
    re-examination never falls off the curve; domain bounds are enforced by
    validation, not evaluation.
    """

    points: tuple[tuple[float, float], ...]

    def at(self, x: float) -> float:
        pts = self.points
        if x <= pts[0][0]:
            return pts[0][1]
        if x >= pts[-1][0]:
            return pts[-1][1]
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x == x1:  # exact breakpoint hits stay exact
                return y1
            if x < x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return pts[-1][1]


# One representation serves every elicited graph; the aliases name the role.
TimeCurve = Curve
AgeCurve = Curve


def curve(*points: tuple[float, float]) -> Curve:
    return Curve(tuple((float(x), float(p)) for x, p in points))


def constant(p: float) -> Curve:
    return Curve(((0.0, float(p)),))


def eval_time_curve(c: Curve, t: float) -> float:
    """Link strength at `t` hours since onset (clamped outside the curve)."""
    return c.at(t)


@dataclass(frozen=True)
class SymptomDef:
    id: str
    label: str
    base_rate: dict[str, Curve]  # sex -> external-cause probability by age


@dataclass(frozen=True)
class CausalNode:
    """Node of a disease tree; children carry their own link curve."""

    id: str
    kind: str
    children: tuple[tuple[Curve, "CausalNode"], ...] = ()
    symptom_id: str | None = None


def symptom_ref(sym_id: str) -> CausalNode:
    return CausalNode(id=sym_id, kind=SYMPTOM_REF, symptom_id=sym_id)


def pathstate(node_id: str, *children: tuple[Curve, CausalNode]) -> CausalNode:
    return CausalNode(id=node_id, kind=PATHSTATE, children=tuple(children))


def disease_root(node_id: str, *children: tuple[Curve, CausalNode]) -> CausalNode:
    return CausalNode(id=node_id, kind=DISEASE_ROOT, children=tuple(children))


@dataclass(frozen=True)
class DiseaseDef:
    id: str
    label: str
    tree: CausalNode
    prior_age: dict[str, Curve]  # sex -> prior by age; a missing sex means prior 0
    cycle_weight: Curve | None = None  # female-only diseases, day 1..28
    direct_likelihoods: dict[str, Curve] = field(default_factory=dict)

    @property
    def female_only(self) -> bool:
        return "female" in self.prior_age and "male" not in self.prior_age


@dataclass(frozen=True)
class UtilityTable:
    morbidity: dict[tuple[str, str], float]  # (disease_id, treatment) -> expected days


@dataclass(frozen=True)
class KnowledgeBase:
    name: str
    version: str
    symptoms: tuple[SymptomDef, ...]
    diseases: tuple[DiseaseDef, ...]
    utilities: UtilityTable

    @cached_property
    def symptom_by_id(self) -> dict[str, SymptomDef]:
        return {s.id: s for s in self.symptoms}

    @cached_property
    def disease_by_id(self) -> dict[str, DiseaseDef]:
        return {d.id: d for d in self.diseases}


@dataclass(frozen=True)
class PatientContext:
    age: float
    sex: str
    cycle_day: int | None = None
    onset_time: float = 0.0  # hours since first observed symptom


def descendant_symptoms(node: CausalNode) -> list[str]:
    """Symptom ids at the leaves under `node`, in depth-first declaration order."""
    if node.kind == SYMPTOM_REF:
        return [node.symptom_id]
    out: list[str] = []
    for _link, child in node.children:
        out.extend(descendant_symptoms(child))
    return out


def eval_priors(kb: KnowledgeBase, patient: PatientContext) -> dict[str, float]:
    """Patient-conditioned disease priors, normalized to sum to one.

    Raw prior per disease is the age curve for the patient's sex (0 when the
    disease carries no curve for that sex), weighted by the cycle curve when
    the disease has one and the patient reports a cycle day; normalization
    happens after weighting.
    """
    raw: dict[str, float] = {}
    for d in kb.diseases:
        c = d.prior_age.get(patient.sex)
        p = c.at(patient.age) if c is not None else 0.0
        if d.cycle_weight is not None and patient.cycle_day is not None:
            p *= d.cycle_weight.at(float(patient.cycle_day))
        raw[d.id] = p
    total = sum(raw.values())
    if total <= 0.0:
        raise DegeneratePriorError(
            "all raw priors are zero for this patient; cannot normalize"
        )
    return {k: v / total for k, v in raw.items()}


@dataclass(frozen=True)
class ValidationIssue:
    message: str
    disease_id: str | None = None
    path: str | None = None  # node path within the disease tree, "/"-joined
    field: str | None = None

    def where(self) -> str:
        parts = [p for p in (self.disease_id, self.path, self.field) if p]
        return " / ".join(parts) if parts else "<kb>"


@dataclass
class ValidationReport:
    errors: list[ValidationIssue] = field(default_factory=list)
    warnings: list[ValidationIssue] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors


def _check_curve(
    rep: ValidationReport,
    c: Curve,
    domain: tuple[float, float],
    *,
    disease_id: str | None = None,
    path: str | None = None,
    fld: str | None = None,
) -> None:
    err = lambda msg: rep.errors.append(
        ValidationIssue(msg, disease_id=disease_id, path=path, field=fld)
    )
    if not c.points:
        err("curve has no breakpoints")
        return
    lo, hi = domain
    prev_x = None
    for x, p in c.points:
        if not (math.isfinite(x) and math.isfinite(p)):
            err(f"non-finite breakpoint ({x}, {p})")
            continue
        if prev_x is not None and x <= prev_x:
            err(f"breakpoint x={x} not strictly increasing")
        prev_x = x
        if not lo <= x <= hi:
            err(f"breakpoint x={x} outside domain [{lo}, {hi}]")
        if not 0.0 <= p <= 1.0:
            err(f"probability {p} at x={x} outside [0, 1]")


def _walk_tree(
    rep: ValidationReport,
    kb: KnowledgeBase,
    disease: DiseaseDef,
    node: CausalNode,
    path: str,
    seen_nodes: set[str],
    seen_symptoms: set[str],
    counts: dict[str, int],
) -> None:
    err = lambda msg, fld=None: rep.errors.append(
        ValidationIssue(msg, disease_id=disease.id, path=path, field=fld)
    )
    if node.id in seen_nodes:
        err(f"duplicate node id '{node.id}' in disease tree")
    seen_nodes.add(node.id)

    if node.kind == SYMPTOM_REF:
        counts["symptom_refs"] += 1
        if node.symptom_id is None:
            err("symptom-ref node without a symptom id", "symptom_id")
        else:
            if node.symptom_id not in kb.symptom_by_id:
                err(f"symptom-ref to undeclared symptom '{node.symptom_id}'")
            if node.symptom_id in seen_symptoms:
                err(f"symptom '{node.symptom_id}' appears more than once in the tree")
            seen_symptoms.add(node.symptom_id)
        if node.children:
            err("symptom-ref must be a leaf")
        return

    if node.kind == PATHSTATE:
        counts["pathstates"] += 1
        if node.symptom_id is not None:
            err("pathstate carries a symptom id", "symptom_id")
        if not node.children:
            rep.warnings.append(
                ValidationIssue(
                    "pathstate has no children", disease_id=disease.id, path=path
                )
            )
    elif node.kind == DISEASE_ROOT:
        err("disease-root may only appear at the root of a tree")
    else:
        err(f"unknown node kind '{node.kind}'", "kind")

    for link, child in node.children:
        counts["nodes"] += 1
        child_path = f"{path}/{child.id}"
        _check_curve(
            rep, link, LINK_TIME_DOMAIN, disease_id=disease.id, path=child_path, fld="link"
        )
        _walk_tree(rep, kb, disease, child, child_path, seen_nodes, seen_symptoms, counts)


def validate_kb(kb: KnowledgeBase) -> ValidationReport:
    """Structural validation; collects every problem instead of stopping early."""
    rep = ValidationReport()
    counts = {"diseases": len(kb.diseases), "symptoms": len(kb.symptoms),
              "pathstates": 0, "symptom_refs": 0, "nodes": 0}

    seen_sym: set[str] = set()
    for s in kb.symptoms:
        if s.id in seen_sym:
            rep.errors.append(ValidationIssue(f"duplicate symptom id '{s.id}'"))
        seen_sym.add(s.id)
        for sex in SEXES:
            if sex not in s.base_rate:
                rep.errors.append(
                    ValidationIssue(
                        f"symptom '{s.id}' missing {sex} base rate", field="base"
                    )
                )
        for sex, c in s.base_rate.items():
            if sex not in SEXES:
                rep.errors.append(
                    ValidationIssue(f"symptom '{s.id}' base rate for unknown sex '{sex}'")
                )
                continue
            _check_curve(rep, c, AGE_DOMAIN, path=s.id, fld=f"base {sex}")

    seen_dis: set[str] = set()
    for d in kb.diseases:
        if d.id in seen_dis:
            rep.errors.append(ValidationIssue(f"duplicate disease id '{d.id}'", disease_id=d.id))
        seen_dis.add(d.id)
        if not d.prior_age:
            rep.errors.append(ValidationIssue("disease has no prior curve", disease_id=d.id, field="prior"))
        for sex, c in d.prior_age.items():
            if sex not in SEXES:
                rep.errors.append(ValidationIssue(f"prior for unknown sex '{sex}'", disease_id=d.id))
                continue
            _check_curve(rep, c, AGE_DOMAIN, disease_id=d.id, fld=f"prior {sex}")
        if d.cycle_weight is not None:
            if not d.female_only:
                rep.errors.append(
                    ValidationIssue(
                        "cycle weight on a disease that is not female-only",
                        disease_id=d.id, field="cycle",
                    )
                )
            _check_curve(rep, d.cycle_weight, CYCLE_DOMAIN, disease_id=d.id, fld="cycle")

        if d.tree.kind != DISEASE_ROOT:
            rep.errors.append(
                ValidationIssue(f"tree root has kind '{d.tree.kind}'", disease_id=d.id, path=d.tree.id)
            )
        if not d.tree.children:
            rep.warnings.append(ValidationIssue("disease tree has no nodes", disease_id=d.id))
        counts["nodes"] += 1
        seen_nodes: set[str] = set()
        tree_syms: set[str] = set()
        for link, child in d.tree.children:
            counts["nodes"] += 1
            child_path = child.id
            _check_curve(rep, link, LINK_TIME_DOMAIN, disease_id=d.id, path=child_path, fld="link")
            _walk_tree(rep, kb, d, child, child_path, seen_nodes, tree_syms, counts)

        for sym_id, c in d.direct_likelihoods.items():
            if sym_id not in kb.symptom_by_id:
                rep.errors.append(
                    ValidationIssue(
                        f"direct likelihood for undeclared symptom '{sym_id}'",
                        disease_id=d.id, field="direct",
                    )
                )
            elif sym_id not in tree_syms:
                rep.errors.append(
                    ValidationIssue(
                        f"direct likelihood for symptom '{sym_id}' not caused by this disease",
                        disease_id=d.id, field="direct",
                    )
                )
            _check_curve(rep, c, LINK_TIME_DOMAIN, disease_id=d.id, fld=f"direct {sym_id}")

    for (dis_id, treatment), days in kb.utilities.morbidity.items():
        if dis_id not in kb.disease_by_id:
            rep.errors.append(
                ValidationIssue(f"utility entry for undeclared disease '{dis_id}'", field="utilities")
            )
        if treatment not in TREATMENTS:
            rep.errors.append(
                ValidationIssue(f"utility entry for unknown treatment '{treatment}'", field="utilities")
            )
        if not (math.isfinite(days) and days >= 0.0):
            rep.errors.append(
                ValidationIssue(
                    f"morbidity for ({dis_id}, {treatment}) must be >= 0 days, got {days}",
                    field="utilities",
                )
            )
    for d in kb.diseases:
        for treatment in TREATMENTS:
            if (d.id, treatment) not in kb.utilities.morbidity:
                rep.errors.append(
                    ValidationIssue(
                        f"missing morbidity for ({d.id}, {treatment})", disease_id=d.id, field="utilities"
                    )
                )

    rep.counts = counts
    return rep
