"""Shared test helpers: random tree/KB generation and enumeration oracles."""

from __future__ import annotations

import itertools

import numpy as np

from pathdx.inference import FindingSet, temporal_pattern_probs
from pathdx.kb_model import (
    ABSENT,
    PRESENT,
    SYMPTOM_REF,
    UNKNOWN,
    CausalNode,
    Curve,
    DiseaseDef,
    KnowledgeBase,
    PatientContext,
    SymptomDef,
    UtilityTable,
    constant,
    disease_root,
    pathstate,
    symptom_ref,
)

PATIENT = PatientContext(age=30.0, sex="male")


def random_curve(rng: np.random.Generator) -> Curve:
    n = int(rng.integers(1, 4))
    xs = np.sort(rng.uniform(0.0, 132.0, size=n))
    while len(set(xs.tolist())) < n:
        xs = np.sort(rng.uniform(0.0, 132.0, size=n))
    ps = rng.uniform(0.0, 1.0, size=n)
    for i in range(n):  # hit the exact endpoints sometimes
        r = rng.random()
        if r < 0.05:
            ps[i] = 0.0
        elif r < 0.1:
            ps[i] = 1.0
    return Curve(tuple((float(x), float(p)) for x, p in zip(xs, ps)))


def random_tree(
    rng: np.random.Generator,
    max_depth: int = 4,
    max_symptoms: int = 8,
    var_budget: int = 18,
) -> tuple[CausalNode, KnowledgeBase]:
    """Random disease tree plus a one-disease KB wrapping it.

    Total binary variables (edges + in-tree symptoms) stay within
    `var_budget` so the exact enumerator remains cheap.
    """
    k = int(rng.integers(1, max_symptoms + 1))
    sym_ids = [f"s{i}" for i in range(k)]
    budget = [max(0, var_budget - 2 * k)]  # pathstates remaining, shared down the recursion
    counter = itertools.count()

    def build(symbols: list[str], depth: int) -> list[tuple[Curve, CausalNode]]:
        children: list[tuple[Curve, CausalNode]] = []
        i = 0
        while i < len(symbols):
            can_nest = depth < max_depth - 1 and budget[0] > 0
            if can_nest and rng.random() < 0.45:
                take = int(rng.integers(1, len(symbols) - i + 1))
                group, i = symbols[i:i + take], i + take
                budget[0] -= 1
                node = CausalNode(f"p{next(counter)}", "pathstate", tuple(build(group, depth + 1)))
                children.append((random_curve(rng), node))
            else:
                children.append((random_curve(rng), symptom_ref(symbols[i])))
                i += 1
        if budget[0] > 0 and rng.random() < 0.05:  # occasional childless pathstate
            budget[0] -= 1
            children.append((random_curve(rng), CausalNode(f"p{next(counter)}", "pathstate", ())))
        return children

    tree = disease_root("dz", *build(sym_ids, 0))
    rates = {}
    for s in sym_ids:
        r = rng.random()
        b = 0.0 if r < 0.2 else float(rng.uniform(0.0, 0.5))
        rates[s] = b
    kb = build_kb({"dz": tree}, rates)
    return tree, kb


def build_kb(trees: dict[str, CausalNode], base_rates: dict[str, float],
             priors: dict[str, float] | None = None) -> KnowledgeBase:
    symptoms = tuple(
        SymptomDef(s, s, {"male": constant(b), "female": constant(b)})
        for s, b in base_rates.items()
    )
    diseases = tuple(
        DiseaseDef(
            d, d, tree,
            {"male": constant(priors.get(d, 0.5) if priors else 0.5),
             "female": constant(priors.get(d, 0.5) if priors else 0.5)},
        )
        for d, tree in trees.items()
    )
    utilities = UtilityTable(
        {(d, tr): days for d in trees for tr, days in (("symptomatic", 2.0), ("operation", 5.0))}
    )
    return KnowledgeBase("test", "0", symptoms, diseases, utilities)


def random_findings(rng: np.random.Generator, sym_ids, t: float,
                    p_present=0.35, p_absent=0.35) -> FindingSet:
    values = {}
    for s in sym_ids:
        r = rng.random()
        if r < p_present:
            values[s] = PRESENT
        elif r < p_present + p_absent:
            values[s] = ABSENT
    return FindingSet(values, measurement_time=t)


def _edge_list(tree: CausalNode):
    acc = []

    def walk(node, parent):
        for link, child in node.children:
            acc.append((parent, link, child))
            walk(child, child.id)

    walk(tree, tree.id)
    return acc


def enumerate_two_time(tree: CausalNode, kb: KnowledgeBase, patient: PatientContext,
                       t1: float, t2: float) -> dict:
    """Exact joint over paired observed configurations at two times.

    Link histories use the implication coupling; externals persist (on at
    both times or neither).  Returns {(cfg1, cfg2): prob} where each cfg is a
    tuple of bools over the tree's symptoms in depth-first order.
    """
    from pathdx.inference import base_rates

    edges = _edge_list(tree)
    syms = [c.symptom_id for _p, _l, c in edges if c.kind == SYMPTOM_REF]
    rates = base_rates(kb, patient)

    link_supports = []
    for _parent, link, _child in edges:
        pp = temporal_pattern_probs(link.at(t1), link.at(t2))
        support = [((1, 1), pp.yes_yes), ((1, 0), pp.yes_no), ((0, 1), pp.no_yes), ((0, 0), pp.no_no)]
        link_supports.append([(s, w) for s, w in support if w > 0.0])
    ext_supports = [[((1, 1), rates[s]), ((0, 0), 1.0 - rates[s])] for s in syms]
    ext_supports = [[(s, w) for s, w in sup if w > 0.0] for sup in ext_supports]

    joint: dict = {}
    for link_choice in itertools.product(*link_supports):
        w_links = 1.0
        for _s, w in link_choice:
            w_links *= w
        fired = {i: s for i, (s, _w) in enumerate(link_choice)}
        caused = {tree.id: (1, 1)}
        for i, (parent, _link, child) in enumerate(edges):
            p1, p2 = caused[parent]
            f1, f2 = fired[i]
            caused[child.id] = (p1 & f1, p2 & f2)
        for ext_choice in itertools.product(*ext_supports):
            w = w_links
            for _s, we in ext_choice:
                w *= we
            cfg1, cfg2 = [], []
            si = 0
            for _parent, _link, child in edges:
                if child.kind != SYMPTOM_REF:
                    continue
                c1, c2 = caused[child.id]
                e1, e2 = ext_choice[si][0]
                cfg1.append(bool(c1 | e1))
                cfg2.append(bool(c2 | e2))
                si += 1
            key = (tuple(cfg1), tuple(cfg2))
            joint[key] = joint.get(key, 0.0) + w
    return {"symptoms": syms, "joint": joint}


def two_time_marginal(oracle: dict, f1: FindingSet, f2: FindingSet) -> float:
    total = 0.0
    for (cfg1, cfg2), w in oracle["joint"].items():
        ok = True
        for s, b1, b2 in zip(oracle["symptoms"], cfg1, cfg2):
            for f, b in ((f1, b1), (f2, b2)):
                v = f.value(s)
                if v == UNKNOWN:
                    continue
                if (v == PRESENT) != b:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            total += w
    return total
