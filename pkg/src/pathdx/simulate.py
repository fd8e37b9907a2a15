"""Forward sampling from the generative model and an exact enumeration oracle.

Sampling uses numpy's Philox bit generator (counter-based, splittable) so a
dataset is bit-reproducible from its seed on any platform: each case draws
from its own stream keyed by (dataset seed, case index) and records the key
for replay.  One uniform is drawn per tree edge in depth-first declaration
order, then one per registry symptom for the external causes.

`enumerate_joint` sums all 2^m causal worlds of one tree exactly and is the
ground truth the recursive likelihoods are tested against on small instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import EnumerationSizeError, UnknownIdError
from .inference import FindingSet, base_rates
from .kb_model import (
    ABSENT,
    PRESENT,
    SYMPTOM_REF,
    UNKNOWN,
    CausalNode,
    KnowledgeBase,
    PatientContext,
)

_MASK64 = (1 << 64) - 1
ENUMERATION_GUARD = 20  # latent + leaf binary variables

# Fresh-but-throwaway init state; the key is assigned directly below, which
# gives streams bit-identical to Philox(key=...) without the per-construction
# OS entropy call (tests assert the equivalence).
_PHILOX_INIT = np.random.SeedSequence(0)


def stream(seed: int) -> np.random.Generator:
    """Independent Philox stream keyed by a 128-bit integer."""
    bg = np.random.Philox(_PHILOX_INIT)
    st = bg.state
    st["state"] = {
        "counter": np.zeros(4, dtype=np.uint64),
        "key": np.array([seed & _MASK64, (seed >> 64) & _MASK64], dtype=np.uint64),
    }
    st["buffer_pos"] = 4
    bg.state = st
    return np.random.Generator(bg)


def case_stream_key(dataset_seed: int, index: int, lane: int = 0) -> int:
    """Distinct 128-bit Philox key per (dataset seed, case index, lane)."""
    return ((dataset_seed & _MASK64) << 64) | (((index << 1) | lane) & _MASK64)


@dataclass(frozen=True)
class CaseRecord:
    true_disease_id: str | None  # None marks an externals-only control case
    patient: PatientContext
    findings: FindingSet
    seed: int
    second: FindingSet | None = None
    case_id: str = ""


@dataclass(frozen=True)
class CausalWorld:
    """One sampled assignment of every latent variable of a case."""

    caused: dict[str, bool]  # node id -> caused by the disease chain
    external: dict[str, bool]  # symptom id -> external cause fired


def _edges(node: CausalNode, parent: str, acc: list[tuple[str, object, CausalNode]]):
    for link, child in node.children:
        acc.append((parent, link, child))
        _edges(child, child.id, acc)


def sample_world(
    kb: KnowledgeBase,
    patient: PatientContext,
    disease_id: str | None,
    t: float,
    seed: int,
) -> CausalWorld:
    """Draw one causal world: chain causation down the tree, then independent
    external causes for every registry symptom.
    """
    edges: list[tuple[str, object, CausalNode]] = []
    caused: dict[str, bool] = {}
    if disease_id is not None:
        d = kb.disease_by_id.get(disease_id)
        if d is None:
            raise UnknownIdError(f"unknown disease id '{disease_id}'")
        caused[d.tree.id] = True
        _edges(d.tree, d.tree.id, edges)

    gen = stream(seed)
    u = gen.random(len(edges) + len(kb.symptoms))
    for i, (parent, link, child) in enumerate(edges):
        caused[child.id] = caused[parent] and bool(u[i] < link.at(t))

    rates = base_rates(kb, patient)
    external = {
        s.id: bool(u[len(edges) + j] < rates[s.id]) for j, s in enumerate(kb.symptoms)
    }
    return CausalWorld(caused=caused, external=external)


def _world_findings(kb: KnowledgeBase, disease_id: str | None, world: CausalWorld, t: float) -> FindingSet:
    chain: dict[str, bool] = {}
    if disease_id is not None:
        tree = kb.disease_by_id[disease_id].tree
        for parent, _link, child in _edge_list(tree):
            if child.kind == SYMPTOM_REF:
                chain[child.symptom_id] = world.caused[child.id]
    values = {
        s.id: PRESENT if (chain.get(s.id, False) or world.external[s.id]) else ABSENT
        for s in kb.symptoms
    }
    return FindingSet(findings=values, measurement_time=t)


def _edge_list(tree: CausalNode):
    acc: list[tuple[str, object, CausalNode]] = []
    _edges(tree, tree.id, acc)
    return acc


def sample_case(
    kb: KnowledgeBase,
    patient: PatientContext,
    disease_id: str | None,
    t: float,
    seed: int,
) -> CaseRecord:
    """One fully observed synthetic case; present iff chain-caused or external."""
    world = sample_world(kb, patient, disease_id, t, seed)
    return CaseRecord(
        true_disease_id=disease_id,
        patient=patient,
        findings=_world_findings(kb, disease_id, world, t),
        seed=seed,
    )


@dataclass(frozen=True)
class JointDistribution:
    """Exact probability of every present/absent configuration of the tree's
    symptoms, in `symptom_ids` order."""

    symptom_ids: tuple[str, ...]
    probs: dict[tuple[bool, ...], float]

    def marginal(self, findings: FindingSet) -> float:
        """Total mass of configurations consistent with the findings
        (unknowns marginalized)."""
        total = 0.0
        for config, p in self.probs.items():
            ok = True
            for sym, present in zip(self.symptom_ids, config):
                v = findings.value(sym)
                if v == UNKNOWN:
                    continue
                if (v == PRESENT) != present:
                    ok = False
                    break
            if ok:
                total += p
        return total


def enumerate_joint(
    tree: CausalNode,
    t: float,
    kb: KnowledgeBase,
    patient: PatientContext,
) -> JointDistribution:
    """Sum over all 2^m causal worlds of the tree (every link fires or not,
    every in-tree external cause fires or not), aggregated by observed
    configuration.  Refuses trees beyond the enumeration guard.
    """
    edges = _edge_list(tree)
    leaf_syms: list[str] = [c.symptom_id for _p, _l, c in edges if c.kind == SYMPTOM_REF]
    m = len(edges) + len(leaf_syms)
    if m > ENUMERATION_GUARD:
        raise EnumerationSizeError(
            f"{m} binary variables exceed the enumeration guard of {ENUMERATION_GUARD}"
        )

    rates = base_rates(kb, patient)
    n = 1 << m
    worlds = np.arange(n, dtype=np.uint32)
    prob = np.ones(n, dtype=np.float64)
    bits = []
    params = [link.at(t) for _p, link, _c in edges] + [rates[s] for s in leaf_syms]
    for i, p in enumerate(params):
        bit = (worlds >> i) & 1 == 1
        bits.append(bit)
        prob *= np.where(bit, p, 1.0 - p)

    caused: dict[str, np.ndarray] = {tree.id: np.ones(n, dtype=bool)}
    for i, (parent, _link, child) in enumerate(edges):
        caused[child.id] = caused[parent] & bits[i]

    index = np.zeros(n, dtype=np.int64)
    leaf_pos = 0
    for i, (_parent, _link, child) in enumerate(edges):
        if child.kind != SYMPTOM_REF:
            continue
        ext = bits[len(edges) + leaf_pos]
        present = caused[child.id] | ext
        index += present.astype(np.int64) << leaf_pos
        leaf_pos += 1

    mass = np.bincount(index, weights=prob, minlength=1 << len(leaf_syms))
    probs = {
        tuple(bool((k >> i) & 1) for i in range(len(leaf_syms))): float(mass[k])
        for k in range(1 << len(leaf_syms))
    }
    return JointDistribution(symptom_ids=tuple(leaf_syms), probs=probs)


@dataclass(frozen=True)
class DatasetConfig:
    n_per_class: int
    classes: tuple[str, ...]
    seed: int
    time_range: tuple[float, float] = (0.0, 132.0)
    age_range: tuple[float, float] = (5.0, 70.0)
    female_fraction: float = 0.5


def generate_dataset(kb: KnowledgeBase, config: DatasetConfig) -> list[CaseRecord]:
    """Reproducible synthetic case set with exact per-class counts."""
    if not config.classes:
        raise ValueError("at least one class is required")
    for cls in config.classes:
        if cls not in kb.disease_by_id:
            raise UnknownIdError(f"unknown disease id '{cls}' in classes")

    cases: list[CaseRecord] = []
    for i in range(config.n_per_class * len(config.classes)):
        cls = config.classes[i // config.n_per_class]
        d = kb.disease_by_id[cls]
        gen = stream(case_stream_key(config.seed, i, lane=0))
        age = float(gen.uniform(*config.age_range))
        sex = "female" if gen.random() < config.female_fraction else "male"
        if d.female_only:
            sex = "female"
        cycle_day = int(gen.integers(1, 29)) if sex == "female" else None
        t = float(gen.uniform(*config.time_range))
        patient = PatientContext(age=age, sex=sex, cycle_day=cycle_day, onset_time=t)

        world_seed = case_stream_key(config.seed, i, lane=1)
        case = sample_case(kb, patient, cls, t, seed=world_seed)
        cases.append(
            CaseRecord(
                true_disease_id=case.true_disease_id,
                patient=case.patient,
                findings=case.findings,
                seed=case.seed,
                case_id=f"case-{i:06d}",
            )
        )
    return cases


def mask_findings(cases: list[CaseRecord], n_observed: int, seed: int) -> list[CaseRecord]:
    """Keep a random subset of each case's findings, the rest become unknown.

    The sampler itself always emits fully observed cases; masking is a
    separate seeded step so the same dataset can be re-evaluated at several
    observation levels.
    """
    out: list[CaseRecord] = []
    for i, case in enumerate(cases):
        gen = stream(case_stream_key(seed, i))
        items = sorted(case.findings.findings.items())
        keep = set(gen.choice(len(items), size=min(n_observed, len(items)), replace=False))
        kept = {s: v for j, (s, v) in enumerate(items) if j in keep}
        out.append(
            CaseRecord(
                true_disease_id=case.true_disease_id,
                patient=case.patient,
                findings=FindingSet(kept, case.findings.measurement_time),
                seed=case.seed,
                second=case.second,
                case_id=case.case_id,
            )
        )
    return out


def case_to_dict(case: CaseRecord) -> dict:
    doc = {
        "case_id": case.case_id,
        "true_disease": case.true_disease_id,
        "seed": case.seed,
        "patient": {
            "age": case.patient.age,
            "sex": case.patient.sex,
            "cycle_day": case.patient.cycle_day,
            "onset_time": case.patient.onset_time,
        },
        "measurement_time": case.findings.measurement_time,
        "findings": dict(case.findings.findings),
    }
    if case.second is not None:
        doc["second"] = {
            "time": case.second.measurement_time,
            "findings": dict(case.second.findings),
        }
    return doc


def case_from_dict(doc: dict) -> CaseRecord:
    pat = doc["patient"]
    second = None
    if doc.get("second"):
        second = FindingSet(
            findings=dict(doc["second"]["findings"]),
            measurement_time=float(doc["second"]["time"]),
        )
    return CaseRecord(
        true_disease_id=doc.get("true_disease"),
        patient=PatientContext(
            age=float(pat["age"]),
            sex=pat["sex"],
            cycle_day=pat.get("cycle_day"),
            onset_time=float(pat.get("onset_time", 0.0)),
        ),
        findings=FindingSet(
            findings=dict(doc["findings"]),
            measurement_time=float(doc["measurement_time"]),
        ),
        seed=int(doc.get("seed", 0)),
        second=second,
        case_id=doc.get("case_id", ""),
    )


def save_cases(path, cases: list[CaseRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for case in cases:
            fh.write(json.dumps(case_to_dict(case), separators=(",", ":")) + "\n")


def load_cases(path) -> list[CaseRecord]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(case_from_dict(json.loads(line)))
    return out
