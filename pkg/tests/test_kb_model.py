import math

import pytest
from hypothesis import given, strategies as st

from pathdx.errors import DegeneratePriorError
from pathdx.kb_model import (
    Curve,
    DiseaseDef,
    KnowledgeBase,
    PatientContext,
    SymptomDef,
    UtilityTable,
    constant,
    curve,
    descendant_symptoms,
    disease_root,
    eval_priors,
    eval_time_curve,
    pathstate,
    symptom_ref,
    validate_kb,
)

from support import build_kb


@st.composite
def curves(draw, x_max=132.0):
    n = draw(st.integers(1, 6))
    xs = draw(
        st.lists(
            st.floats(0.0, x_max, allow_nan=False, allow_infinity=False),
            min_size=n, max_size=n, unique=True,
        )
    )
    ps = draw(st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=n, max_size=n))
    return Curve(tuple(sorted(zip(xs, ps))))


class TestEvalTimeCurve:
    c = curve((0, 0.1), (24, 0.5))

    def test_breakpoint_hit(self):
        assert eval_time_curve(self.c, 0.0) == 0.1

    def test_segment_midpoint(self):
        assert eval_time_curve(self.c, 12.0) == pytest.approx(0.3, abs=1e-15)

    def test_clamps_beyond_last_breakpoint(self):
        assert eval_time_curve(self.c, 200.0) == 0.5

    def test_clamps_below_first_breakpoint(self):
        assert eval_time_curve(curve((10, 0.4), (20, 0.6)), 3.0) == 0.4

    @given(curves(), st.floats(-50.0, 200.0, allow_nan=False))
    def test_output_in_unit_interval(self, c, t):
        assert 0.0 <= c.at(t) <= 1.0

    @given(curves())
    def test_exact_at_breakpoints(self, c):
        for x, p in c.points:
            assert c.at(x) == p

    @given(curves(), st.data())
    def test_monotone_along_monotone_segments(self, c, data):
        if len(c.points) < 2:
            return
        i = data.draw(st.integers(0, len(c.points) - 2))
        (x0, p0), (x1, p1) = c.points[i], c.points[i + 1]
        ta = data.draw(st.floats(x0, x1, allow_nan=False))
        tb = data.draw(st.floats(ta, x1, allow_nan=False))
        if p0 <= p1:
            assert c.at(ta) <= c.at(tb) + 1e-12
        else:
            assert c.at(ta) >= c.at(tb) - 1e-12


class TestEvalPriors:
    def test_female_only_disease_zero_for_male(self, fixture_kb):
        pri = eval_priors(fixture_kb, PatientContext(age=30, sex="male"))
        assert pri["pelvic_inflammatory_disease"] == 0.0
        assert sum(pri.values()) == pytest.approx(1.0, abs=1e-12)

    def test_identical_flat_priors_are_uniform(self):
        kb = build_kb(
            {f"d{i}": disease_root(f"d{i}", (constant(0.5), symptom_ref("s"))) for i in range(4)},
            {"s": 0.1},
        )
        pri = eval_priors(kb, PatientContext(age=30, sex="male"))
        assert all(v == pytest.approx(0.25, abs=1e-12) for v in pri.values())

    def test_fixture_female_age20_cycle14_hand_value(self, fixture_kb):
        # Raw priors read off the fixture's female age curves at age 20,
        # interpolating by hand, with the cycle weight applied to PID only.
        raw = {
            "appendicitis": 0.08,
            "nonspecific_abdominal_pain": 0.25 + (0.2 - 0.25) * (20 - 15) / (40 - 15),
            "gastroenteritis": 0.15 + (0.08 - 0.15) * (20 - 5) / (30 - 5),
            "mesenteric_adenitis": 0.04 + (0.01 - 0.04) * (20 - 15) / (30 - 15),
            "pelvic_inflammatory_disease": (0.05 + (0.08 - 0.05) * (20 - 16) / (25 - 16)) * 0.9,
            "urinary_tract_infection": 0.1,
        }
        total = sum(raw.values())
        expected = {k: v / total for k, v in raw.items()}
        got = eval_priors(fixture_kb, PatientContext(age=20, sex="female", cycle_day=14))
        for k in expected:
            assert got[k] == pytest.approx(expected[k], abs=1e-12)

    def test_cycle_weight_applies_only_with_cycle_day(self, fixture_kb):
        # day 28 carries weight 0.6 in the fixture; omitting the day skips weighting
        with_day = eval_priors(fixture_kb, PatientContext(age=20, sex="female", cycle_day=28))
        without = eval_priors(fixture_kb, PatientContext(age=20, sex="female"))
        assert with_day["pelvic_inflammatory_disease"] < without["pelvic_inflammatory_disease"]

    def test_all_zero_priors_error(self):
        kb = build_kb({"d": disease_root("d", (constant(0.5), symptom_ref("s")))}, {"s": 0.1})
        dz = kb.diseases[0]
        kb = KnowledgeBase(
            kb.name, kb.version, kb.symptoms,
            (DiseaseDef(dz.id, dz.label, dz.tree, {"female": constant(0.2)}),),
            kb.utilities,
        )
        with pytest.raises(DegeneratePriorError):
            eval_priors(kb, PatientContext(age=30, sex="male"))

    @given(age=st.floats(0.0, 120.0, allow_nan=False),
           sex=st.sampled_from(["male", "female"]),
           cycle_day=st.one_of(st.none(), st.integers(1, 28)))
    def test_priors_sum_to_one(self, fixture_kb, age, sex, cycle_day):
        pri = eval_priors(fixture_kb, PatientContext(age=age, sex=sex, cycle_day=cycle_day if sex == "female" else None))
        assert sum(pri.values()) == pytest.approx(1.0, abs=1e-12)


class TestValidateKb:
    def test_fixture_is_clean_at_paper_scale(self, fixture_kb):
        report = validate_kb(fixture_kb)
        assert report.errors == []
        assert report.counts["diseases"] == 6
        assert report.counts["pathstates"] == 32
        assert report.counts["symptoms"] == 19

    def test_link_probability_out_of_range(self):
        kb = build_kb({"d": disease_root("d", (curve((0, 1.2)), symptom_ref("s")))}, {"s": 0.1})
        report = validate_kb(kb)
        assert any("1.2" in e.message and e.field == "link" for e in report.errors)

    def test_unresolved_symptom_ref(self):
        kb = build_kb({"d": disease_root("d", (constant(0.5), symptom_ref("ghost")))}, {"s": 0.1})
        report = validate_kb(kb)
        assert any("ghost" in e.message for e in report.errors)

    def test_childless_pathstate_warns(self):
        kb = build_kb(
            {"d": disease_root("d", (constant(0.5), pathstate("empty")),
                               (constant(0.5), symptom_ref("s")))},
            {"s": 0.1},
        )
        report = validate_kb(kb)
        assert report.errors == []
        assert any("no children" in w.message for w in report.warnings)

    def test_duplicate_symptom_in_tree(self):
        kb = build_kb(
            {"d": disease_root("d", (constant(0.5), symptom_ref("s")), (constant(0.4), symptom_ref("s")))},
            {"s": 0.1},
        )
        report = validate_kb(kb)
        assert any("more than once" in e.message for e in report.errors)

    def test_missing_utility_entry(self):
        kb = build_kb({"d": disease_root("d", (constant(0.5), symptom_ref("s")))}, {"s": 0.1})
        kb = KnowledgeBase(kb.name, kb.version, kb.symptoms, kb.diseases,
                           UtilityTable({("d", "symptomatic"): 1.0}))
        report = validate_kb(kb)
        assert any("operation" in e.message and e.field == "utilities" for e in report.errors)

    def test_collects_multiple_errors(self):
        kb = build_kb(
            {"d": disease_root("d", (curve((0, 1.5)), symptom_ref("ghost")))},
            {"s": -0.1},
        )
        report = validate_kb(kb)
        assert len(report.errors) >= 3


class TestDescendantSymptoms:
    def test_leaf_is_singleton(self):
        assert descendant_symptoms(symptom_ref("s")) == ["s"]

    def test_fixture_severity_chain_declaration_order(self, fixture_kb):
        app = fixture_kb.disease_by_id["appendicitis"]
        rlq = next(c for _l, c in app.tree.children if c.id == "rlq_peritoneal")
        assert descendant_symptoms(rlq) == [
            "tenderness_rlq", "guarding", "rebound_tenderness", "ileus",
        ]

    def test_childless_pathstate_is_empty(self):
        assert descendant_symptoms(pathstate("empty")) == []

    def test_disease_root_is_disjoint_union_over_children(self, fixture_kb):
        for d in fixture_kb.diseases:
            per_child = [descendant_symptoms(c) for _l, c in d.tree.children]
            flat = [s for chunk in per_child for s in chunk]
            assert flat == descendant_symptoms(d.tree)
            assert len(set(flat)) == len(flat)


def test_symptom_def_requires_both_sexes():
    kb = build_kb({"d": disease_root("d", (constant(0.5), symptom_ref("s")))}, {"s": 0.1})
    lone = SymptomDef("s", "s", {"male": constant(0.1)})
    kb = KnowledgeBase(kb.name, kb.version, (lone,), kb.diseases, kb.utilities)
    report = validate_kb(kb)
    assert any("female base rate" in e.message for e in report.errors)
